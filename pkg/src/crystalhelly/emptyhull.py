"""Empty convex polygons and polytopes with vertices in a point set.

A convex polytope whose vertices lie in ``S`` and whose closed hull meets
``S`` only in those vertices certifies ``h(S) >= #vertices``.  This module
verifies such certificates and searches for large ones inside saturated
patches, by an exhaustive oracle and by a cubic dynamic program.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .geom import (
    Box,
    Membership,
    VPolytope,
    affine_dim,
    convex_hull_2d,
    orientation2d,
    point_in_hull,
    point_in_hull_lp,
    relative_interior_of_facet_contains,
)
from .numeric import (
    UNCERTAIN,
    CertFloat,
    QuadScalar,
    UncertainPredicate,
    format_scalar,
    scalar_sign,
)
from .pointsets import Crystal, Patch, Scheme, _rat_bounds, points_in_box


class Status(str, enum.Enum):
    VERIFIED = "VERIFIED"
    REFUTED = "REFUTED"
    UNCERTAIN = "UNCERTAIN"


class NotConvexPosition(ValueError):
    pass


class VertexNotInS(ValueError):
    pass


class UncertainVerdict(UncertainPredicate):
    pass


class PatchTooLarge(ValueError):
    pass


ORACLE_LIMIT = 22


def _source_name(S) -> str:
    return getattr(S, "name", type(S).__name__)


@dataclass
class EmptyPolytopeCertificate:
    source: str
    vertices: list
    vertex_provenance: list
    status: Status
    witnesses: list = field(default_factory=list)
    note: str = ""
    origin: object = field(default=None, repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def helly_lower_bound(self) -> int | None:
        return self.size if self.status is Status.VERIFIED else None

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "vertices": [[format_scalar(c) for c in v] for v in self.vertices],
            "status": self.status.value,
            "witnesses": [[format_scalar(c) for c in w] for w in self.witnesses],
            "helly_lower_bound": self.helly_lower_bound,
        }


@dataclass
class FacetCertificate:
    polytope: VPolytope
    facet_points: list
    status: Status
    witnesses: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "polytope": [[format_scalar(c) for c in v] for v in self.polytope.vertices],
            "facet_points": [[format_scalar(c) for c in p] for p in self.facet_points],
            "status": self.status.value,
            "witnesses": [[format_scalar(c) for c in w] for w in self.witnesses],
        }


# ---------------------------------------------------------------------------
# membership in S and enumeration around a hull

def _exact_point(x) -> bool:
    return not any(isinstance(c, CertFloat) for c in x)


def _enclosing_box(points: Sequence[Sequence], pad: Fraction = Fraction(1, 1 << 40)) -> Box:
    d = len(points[0])
    if all(_exact_point(p) for p in points) and not any(
            isinstance(c, QuadScalar) for p in points for c in p):
        return Box.bounding(points)
    lo = [min(_rat_bounds(p[i])[0] for p in points) - pad for i in range(d)]
    hi = [max(_rat_bounds(p[i])[1] for p in points) + pad for i in range(d)]
    return Box(tuple(lo), tuple(hi))


def _s_points(S, box: Box) -> tuple:
    """(certain points, uncertain points) of S in a box, as (point, provenance)."""
    patch = points_in_box(S, box)
    return patch.points, patch.uncertain


def _provenance(S, x, given=None):
    """Coset index or integer preimage of a vertex; raises VertexNotInS.

    Returns UNCERTAIN if membership cannot be decided.
    """
    if isinstance(S, Crystal):
        idx = S.coset_of(x)
        if idx is None:
            raise VertexNotInS(f"{[format_scalar(c) for c in x]} is not in the crystal")
        return idx
    if given is not None:
        c = tuple(given)
        phys = S.physical(c)
        if all(scalar_sign(a - b) == 0 for a, b in zip(phys, x)) or phys == tuple(x):
            m = S.in_window(c)
            if m is Membership.IN:
                return c
            if m is Membership.OUT:
                raise VertexNotInS(f"preimage {c} is outside the window")
            return UNCERTAIN
        raise VertexNotInS(f"preimage {c} does not project to the vertex")
    box = _enclosing_box([x])
    certain, unsure = _s_points(S, box)
    if _exact_point(x):
        hits = [prov for p, prov in certain if p == tuple(x)]
        if hits:
            return hits[0]
        if any(p == tuple(x) for p, _ in unsure):
            return UNCERTAIN
        raise VertexNotInS(f"{[format_scalar(c) for c in x]} is not in the model set")
    hits = [prov for p, prov in certain if p == tuple(x)]
    if hits:
        return hits[0]
    raise VertexNotInS("no model set point encloses the vertex")


def _same_point(S, p, prov, vertices, provs) -> bool:
    if isinstance(S, Scheme) and not S.exact:
        return prov in provs
    return tuple(p) in vertices


def _convex_order_2d(vertices):
    """Vertices in counterclockwise hull order; raises NotConvexPosition."""
    pts = [tuple(v) for v in vertices]
    if len(set(map(lambda p: tuple(map(str, p)), pts))) != len(pts):
        raise NotConvexPosition("repeated vertex")
    if all(_exact_point(p) for p in pts):
        hull = convex_hull_2d(pts)
        if hull.dim != 2 or len(hull.vertices) != len(pts):
            raise NotConvexPosition("vertices are not in strictly convex position")
        return hull
    # certified floats: trust the given cyclic order, but check it completely
    n = len(pts)
    for orient_sign in (1, -1):
        seq = pts if orient_sign == 1 else pts[::-1]
        ok = True
        for i in range(n):
            s1 = orientation2d(seq[i], seq[(i + 1) % n], seq[(i + 2) % n])
            if s1 is UNCERTAIN:
                raise UncertainVerdict("turn at a vertex is undecided")
            if s1 <= 0:
                ok = False
                break
        if ok:
            for i in range(1, n - 1):
                s2 = orientation2d(seq[0], seq[i], seq[i + 1])
                if s2 is UNCERTAIN:
                    raise UncertainVerdict("fan orientation undecided")
                if s2 <= 0:
                    ok = False
                    break
        if ok:
            return VPolytope(tuple(seq), 2)
    raise NotConvexPosition("vertices are not in strictly convex position (given order)")


def _rational_edge_test(hull):
    """Closed membership for a counterclockwise rational polygon via its edge
    half-planes, computed once; None when coordinates are not all rational."""
    vs = hull.vertices
    if not all(isinstance(c, (int, Fraction)) for v in vs for c in v):
        return None
    rows = []
    for i in range(len(vs)):
        (ax, ay), (bx, by) = vs[i], vs[(i + 1) % len(vs)]
        dx, dy = bx - ax, by - ay
        rows.append((-dy, dx, dx * ay - dy * ax))

    def inside(p):
        x, y = p
        return all(nx * x + ny * y >= c for nx, ny, c in rows)

    return inside


def _convex_position_nd(pts):
    d = len(pts[0])
    if affine_dim(pts) != d:
        raise NotConvexPosition("vertices do not span the space")
    for i, v in enumerate(pts):
        m = point_in_hull_lp(pts[:i] + pts[i + 1:], v, "closed")
        if m is Membership.UNCERTAIN:
            raise UncertainVerdict("extremality of a vertex is undecided")
        if m is Membership.IN:
            raise NotConvexPosition(f"vertex {i} lies in the hull of the others")
    return VPolytope(tuple(pts), d)


def is_empty_hull(S, vertices: Sequence[Sequence], provenance: Sequence | None = None,
                  raise_on_uncertain: bool = False) -> EmptyPolytopeCertificate:
    """Check that ``vertices`` lie in S, are in strictly convex position, and
    that their closed hull contains no further point of S.

    Undecidable certified-float comparisons give status UNCERTAIN (or raise
    :class:`UncertainVerdict` when ``raise_on_uncertain``).
    """
    pts = [tuple(v) for v in vertices]
    if not pts:
        raise ValueError("no vertices")
    d = len(pts[0])
    if len(pts) < d + 1:
        raise ValueError(f"need at least {d + 1} vertices in dimension {d}")
    name = _source_name(S)
    provs = [_provenance(S, v, provenance[i] if provenance else None) for i, v in enumerate(pts)]
    uncertain = any(p is UNCERTAIN for p in provs)
    try:
        hull = _convex_order_2d(pts) if d == 2 else _convex_position_nd(pts)
    except UncertainVerdict:
        if raise_on_uncertain:
            raise
        return EmptyPolytopeCertificate(name, pts, provs, Status.UNCERTAIN, note="convex position undecided")
    box = _enclosing_box(pts)
    certain, unsure = _s_points(S, box)
    vset = set(pts)
    pset = set(p for p in provs if p is not UNCERTAIN)
    fast = _rational_edge_test(hull) if d == 2 else None
    witnesses = []
    for group, sure in ((certain, True), (unsure, False)):
        for p, prov in group:
            if _same_point(S, p, prov, vset, pset):
                continue
            if fast is not None and all(isinstance(c, Fraction) for c in p):
                m = Membership.IN if fast(p) else Membership.OUT
            elif d == 2:
                m = point_in_hull(hull, p, "closed")
            else:
                m = point_in_hull_lp(pts, p, "closed")
            if m is Membership.IN and sure:
                witnesses.append(p)
            elif m is not Membership.OUT:
                uncertain = True
    if witnesses:
        status = Status.REFUTED
    elif uncertain:
        if raise_on_uncertain:
            raise UncertainVerdict("emptiness could not be certified")
        status = Status.UNCERTAIN
    else:
        status = Status.VERIFIED
    return EmptyPolytopeCertificate(name, pts, provs, status, witnesses, origin=S)


def verify_facet_certificate(S, polytope: VPolytope, facet_points: Sequence[Sequence]) -> FacetCertificate:
    """Each edge of the polygon carries its assigned S point in its relative
    interior, and the closed polygon holds no other S point."""
    if polytope.ambient_dim != 2 or polytope.dim != 2:
        raise ValueError("facet certificates are checked for full-dimensional polygons")
    fps = [tuple(p) for p in facet_points]
    n = len(polytope.vertices)
    if len(fps) != n:
        return FacetCertificate(polytope, fps, Status.REFUTED, [])
    for p in fps:
        _provenance(S, p)
    bad = []
    try:
        for i, p in enumerate(fps):
            if not relative_interior_of_facet_contains(polytope, i, p):
                bad.append(p)
    except UncertainPredicate:
        return FacetCertificate(polytope, fps, Status.UNCERTAIN, [])
    if bad:
        return FacetCertificate(polytope, fps, Status.REFUTED, bad)
    box = _enclosing_box(list(polytope.vertices))
    certain, unsure = _s_points(S, box)
    allowed = set(fps)
    uncertain = False
    for group, sure in ((certain, True), (unsure, False)):
        for p, _ in group:
            if tuple(p) in allowed:
                continue
            m = point_in_hull(polytope, p, "closed")
            if m is Membership.IN and sure:
                bad.append(p)
            elif m is not Membership.OUT:
                uncertain = True
    if bad:
        return FacetCertificate(polytope, fps, Status.REFUTED, bad)
    return FacetCertificate(polytope, fps, Status.UNCERTAIN if uncertain else Status.VERIFIED, [])


# ---------------------------------------------------------------------------
# candidate selection shared by the oracle and the dynamic program

@dataclass
class _Candidates:
    points: list          # candidate vertices, in patch order
    provs: list
    obstacles: list       # indices into obstacle_points (certified float case)
    obstacle_points: list


def _candidates(patch: Patch, margin) -> _Candidates:
    region = patch.region.shrink(margin) if margin else patch.region
    pts, provs = [], []
    for p, prov in patch.points:
        if region.contains(p) is Membership.IN:
            pts.append(tuple(p))
            provs.append(prov)
    obst = [tuple(p) for p, _ in list(patch.points) + list(patch.uncertain)
            if region.contains(p) is not Membership.OUT]
    return _Candidates(pts, provs, [], obst)


def _canonical(seq_ranks):
    return tuple(seq_ranks)


def _best(a, b):
    """Larger count wins; ties go to the lexicographically smaller sequence."""
    if b is None:
        return a
    if a is None:
        return b
    if a[0] != b[0]:
        return a if a[0] > b[0] else b
    return a if a[1] <= b[1] else b


def _certificate_from(S, cand: _Candidates, seq, note: str) -> EmptyPolytopeCertificate:
    verts = [cand.points[i] for i in seq]
    provs = [cand.provs[i] for i in seq]
    cert = is_empty_hull(S, verts, provenance=provs if isinstance(S, Scheme) else None)
    cert.vertices = verts
    cert.note = note
    return cert


def _empty_result(S, note):
    return EmptyPolytopeCertificate(_source_name(S), [], [], Status.VERIFIED, note=note)


# ---------------------------------------------------------------------------
# exhaustive oracle

def _ccw_from_lowest(pts, idx):
    hull = convex_hull_2d([pts[i] for i in idx])
    where = {pts[i]: i for i in idx}
    return hull, tuple(where[v] for v in hull.vertices)


def largest_empty_polygon_bruteforce(patch: Patch, S, max_vertices: int | None = None,
                                     margin=0) -> EmptyPolytopeCertificate:
    """Maximum empty polygon by level-wise subset enumeration.

    Every subset of an empty polygon's vertex set with at least three
    elements is again the vertex set of an empty polygon, so level ``k+1``
    only extends sets whose ``k``-subsets all survived.
    """
    cand = _candidates(patch, margin)
    if len(patch.points) > ORACLE_LIMIT and len(cand.points) > ORACLE_LIMIT:
        raise PatchTooLarge(f"{len(cand.points)} candidates exceed {ORACLE_LIMIT}")
    pts = cand.points
    if any(not _exact_point(p) for p in pts):
        raise ValueError("the oracle needs an exact backend")
    m = len(pts)
    cap = max_vertices or m

    def empty_hull_of(idx):
        if len(idx) < 3:
            return None
        hull, order = _ccw_from_lowest(pts, idx)
        if hull.dim != 2 or len(order) != len(idx):
            return None
        chosen = set(idx)
        for j in range(m):
            if j not in chosen and point_in_hull(hull, pts[j], "closed") is Membership.IN:
                return None
        return order

    level = {}
    for t in itertools.combinations(range(m), 3):
        order = empty_hull_of(t)
        if order is not None:
            level[t] = order
    best = None
    k = 3
    while level:
        for order in level.values():
            best = _best(best, (k, order))
        if k >= cap:
            break
        nxt = {}
        for t in level:
            for x in range(t[-1] + 1, m):
                new = t + (x,)
                if any(new[:i] + new[i + 1:] not in level for i in range(len(new) - 1)):
                    continue
                order = empty_hull_of(new)
                if order is not None:
                    nxt[new] = order
        level = nxt
        k += 1
    if best is None:
        return _empty_result(S, "no empty triangle among candidates")
    return _certificate_from(S, cand, best[1], "exhaustive search; lower bound for h(S)")


# ---------------------------------------------------------------------------
# dynamic program

def _lcm_denominator(vals) -> int:
    den = 1
    for v in vals:
        den = den * v.denominator // math.gcd(den, v.denominator)
    return den


class _IntKernel:
    """Orientation on points with integer coordinates (scaled rationals)."""

    def __init__(self, pts):
        den = _lcm_denominator(Fraction(c) for p in pts for c in p)
        self.P = [(int(Fraction(x) * den), int(Fraction(y) * den)) for x, y in pts]

    def orient(self, i, j, k):
        P = self.P
        ax, ay = P[i]
        bx, by = P[j]
        cx, cy = P[k]
        v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        return (v > 0) - (v < 0)

    def farther(self, a, p, q):
        """On a common ray from ``a``: is ``q`` beyond ``p``?"""
        P = self.P
        return (P[q][0] - P[p][0]) * (P[p][0] - P[a][0]) + (P[q][1] - P[p][1]) * (P[p][1] - P[a][1]) > 0


def _quad_sign(a: int, b: int, D: int) -> int:
    """Exact sign of a + b sqrt(D) for integers."""
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sa == sb or sb == 0:
        return sa
    if sa == 0:
        return sb
    lhs, rhs = a * a, D * b * b
    return sa if lhs > rhs else (sb if lhs < rhs else 0)


class _QuadKernel:
    """Orientation on points of Q(sqrt D)^2, scaled to integer pairs."""

    def __init__(self, pts, D):
        self.D = D
        comps = []
        for p in pts:
            for c in p:
                q = c if isinstance(c, QuadScalar) else QuadScalar(c, 0, D)
                comps.extend([q.a, q.b])
        den = _lcm_denominator(comps)

        def conv(c):
            q = c if isinstance(c, QuadScalar) else QuadScalar(c, 0, D)
            return int(q.a * den), int(q.b * den)

        self.P = [(conv(x), conv(y)) for x, y in pts]

    def _mul(self, u, v):
        return u[0] * v[0] + self.D * u[1] * v[1], u[0] * v[1] + u[1] * v[0]

    @staticmethod
    def _sub(u, v):
        return u[0] - v[0], u[1] - v[1]

    def orient(self, i, j, k):
        P = self.P
        a, b, c = P[i], P[j], P[k]
        l1 = self._mul(self._sub(b[0], a[0]), self._sub(c[1], a[1]))
        l2 = self._mul(self._sub(b[1], a[1]), self._sub(c[0], a[0]))
        return _quad_sign(l1[0] - l2[0], l1[1] - l2[1], self.D)

    def farther(self, a, p, q):
        P = self.P
        t1 = self._mul(self._sub(P[q][0], P[p][0]), self._sub(P[p][0], P[a][0]))
        t2 = self._mul(self._sub(P[q][1], P[p][1]), self._sub(P[p][1], P[a][1]))
        return _quad_sign(t1[0] + t2[0], t1[1] + t2[1], self.D) > 0


def _exact_kernel(pts):
    Ds = {c.D for p in pts for c in p if isinstance(c, QuadScalar)}
    if not Ds:
        return _IntKernel(pts)
    if len(Ds) > 1:
        raise ValueError("mixed quadratic fields")
    return _QuadKernel(pts, Ds.pop())


def _anchor_exact(kernel, a: int, after: Sequence[int]):
    """Best empty polygon with lowest-then-leftmost vertex ``a``.

    ``after`` lists the candidates above ``a`` in the (y, x) order.  Returns
    ``(count, sequence)`` or None.
    """
    if len(after) < 2:
        return None
    orient = kernel.orient

    def cmp(p, q):
        s = orient(a, p, q)
        if s:
            return -s
        return -1 if kernel.farther(a, p, q) else (1 if kernel.farther(a, q, p) else 0)

    order = sorted(after, key=functools.cmp_to_key(cmp))
    # one point per ray: the nearest
    rays = [order[0]]
    for q in order[1:]:
        if orient(a, rays[-1], q) != 0:
            rays.append(q)
    m = len(rays)
    if m < 2:
        return None
    # empty fan triangles (a, rays[i], rays[j]) via the visibility scan
    outgoing = [[] for _ in range(m)]
    incoming = [[] for _ in range(m)]
    for i in range(m):
        pi = rays[i]
        best = None
        for j in range(i + 1, m):
            pj = rays[j]
            if best is None or orient(pi, rays[best], pj) > 0:
                outgoing[i].append(j)
                incoming[j].append(i)
                best = j
    f = {}
    result = None
    for i in range(m):
        pi = rays[i]
        for j in outgoing[i]:
            pj = rays[j]
            val = (3, (a, pi, pj))
            for h in incoming[i]:
                prev = f[(h, i)]
                if prev[0] + 1 >= val[0] and orient(rays[h], pi, pj) > 0:
                    val = _best(val, (prev[0] + 1, prev[1] + (pj,)))
            f[(i, j)] = val
            result = _best(result, val)
    return result


def _anchor_cert(pts, obstacles, a, above, cache):
    """Conservative variant for certified floats: every predicate must be decided."""
    def orient(i, j, k):
        key = (i, j, k)
        if key not in cache:
            s = orientation2d(_pt(pts, obstacles, i), _pt(pts, obstacles, j), _pt(pts, obstacles, k))
            cache[key] = s
        return cache[key]

    pa = pts[a]
    order = sorted(above, key=lambda q: math.atan2(float(pts[q][1] - pa[1]), float(pts[q][0] - pa[0])))
    m = len(order)
    obst_ids = [("o", t) for t in range(len(obstacles))]

    def triangle_empty(p, q):
        for o in obst_ids:
            po = obstacles[o[1]]
            if po == pts[a] or po == pts[p] or po == pts[q]:
                continue
            s1 = orient(a, p, o)
            s2 = orient(p, q, o)
            s3 = orient(q, a, o)
            if not any(s is not UNCERTAIN and s < 0 for s in (s1, s2, s3)):
                return False
        return True

    outgoing = [[] for _ in range(m)]
    incoming = [[] for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if orient(a, order[i], order[j]) == 1 and triangle_empty(order[i], order[j]):
                outgoing[i].append(j)
                incoming[j].append(i)
    f = {}
    result = None
    for i in range(m):
        for j in outgoing[i]:
            val = (3, (a, order[i], order[j]))
            for h in incoming[i]:
                prev = f[(h, i)]
                if orient(order[h], order[i], order[j]) == 1:
                    val = _best(val, (prev[0] + 1, prev[1] + (order[j],)))
            f[(i, j)] = val
            result = _best(result, val)
    return result


def _pt(pts, obstacles, i):
    if isinstance(i, tuple):
        return obstacles[i[1]]
    return pts[i]


def _cmp_yx(p, q) -> int:
    for u, v in ((p[1], q[1]), (p[0], q[0])):
        s = scalar_sign(u - v)
        if s:
            return s
    return 0


def _exact_task(args):
    kernel, a, after = args
    return _anchor_exact(kernel, a, after)


def largest_empty_polygon_dp(patch: Patch, S, interior_margin=1, workers: int = 1) -> EmptyPolytopeCertificate:
    """Largest empty polygon with all vertices in the patch region shrunk by
    ``interior_margin``.

    Every vertex of the result is the lowest-then-leftmost point of its
    polygon for exactly one anchor, so the search runs one independent
    subproblem per anchor: sort the higher points by angle, keep the
    nearest point per ray, find the empty fan triangles and grow the longest
    strictly convex chain over them.  The answer is re-checked with
    :func:`is_empty_hull` and is only a lower bound for h(S).
    """
    cand = _candidates(patch, interior_margin)
    pts = cand.points
    if len(pts) < 3:
        return _empty_result(S, "fewer than three candidates")
    exact = all(_exact_point(p) for p in pts)
    if exact:
        kernel = _exact_kernel(pts)
        order = sorted(range(len(pts)), key=functools.cmp_to_key(lambda i, j: _cmp_yx(pts[i], pts[j])))
        tasks = [(kernel, order[t], order[t + 1:]) for t in range(len(order) - 2)]
        if workers and workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                results = list(ex.map(_exact_task, tasks, chunksize=4))
        else:
            results = [_exact_task(t) for t in tasks]
        note = "dynamic program (exact); lower bound for h(S)"
    else:
        results = []
        obstacles = cand.obstacle_points
        for a in range(len(pts)):
            above = [q for q in range(len(pts)) if q != a and scalar_sign(pts[q][1] - pts[a][1]) == 1]
            if len(above) >= 2:
                results.append(_anchor_cert(pts, obstacles, a, above, {}))
        note = "dynamic program (certified floats, conservative); lower bound for h(S)"
    best = None
    for r in results:
        best = _best(best, r)
    if best is None:
        return _empty_result(S, "no empty triangle among candidates")
    return _certificate_from(S, cand, best[1], note)


def dp_agrees_with_oracle(patch: Patch, S=None, margin=0) -> bool:
    S = patch.source if S is None else S
    dp = largest_empty_polygon_dp(patch, S, margin)
    bf = largest_empty_polygon_bruteforce(patch, S, margin=margin)
    return dp.size == bf.size
