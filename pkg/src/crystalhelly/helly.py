"""Helly-number bounds, the product lift, two planar lemmas and Helly experiments."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .emptyhull import EmptyPolytopeCertificate, Status, is_empty_hull
from .geom import Box, Membership, VPolytope, convex_hull_2d, orientation2d, point_in_hull, solve
from .numeric import format_scalar
from .pointsets import Crystal, Scheme, points_in_box

TWO_DIM_TABLE = {1: 4, 2: 6, 3: 7, 4: 9, 5: 10}
FAMILY_LIMIT = 60


class NotConvex(ValueError):
    pass


class DegenerateQuad(ValueError):
    pass


class SegmentsNotEqualParallel(ValueError):
    pass


class FamilyTooLarge(ValueError):
    pass


# ---------------------------------------------------------------------------
# bounds

def two_dim_crystal_bound(k: int) -> int:
    if k < 1:
        raise ValueError("k must be positive")
    return TWO_DIM_TABLE.get(k, k + 6)


def upper_bound(S) -> tuple:
    """Theorem upper bound for h(S) together with the tag of its source."""
    if isinstance(S, Crystal):
        d, k = S.dim, S.k
        if k == 1:
            return 2 ** d, "doignon"
        if d == 2:
            return two_dim_crystal_bound(k), "twodim_table"
        return k * 2 ** d, "union_k2d"
    if isinstance(S, Scheme):
        return 2 ** (S.d + S.k), "cnp_2dk"
    raise TypeError(f"no bound for {type(S).__name__}")


@dataclass
class BoundReport:
    source: str
    lower: int | None
    upper: int
    tag: str
    lower_from: str = ""

    @property
    def consistent(self) -> bool:
        return self.lower is None or self.lower <= self.upper

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "lower": self.lower,
            "lower_from": self.lower_from,
            "upper": self.upper,
            "upper_from": self.tag,
            "consistent": self.consistent,
        }


def bound_report(S, certificates: Sequence[EmptyPolytopeCertificate] = ()) -> BoundReport:
    upper, tag = upper_bound(S)
    verified = [c for c in certificates if c.status is Status.VERIFIED]
    lower, src = None, ""
    if verified:
        best = max(verified, key=lambda c: c.size)
        lower, src = best.size, best.note or "certificate"
    return BoundReport(getattr(S, "name", "set"), lower, upper, tag, src)


# ---------------------------------------------------------------------------
# product lift

def product_certificate(cert2d: EmptyPolytopeCertificate, extra_dims: int,
                        S: Crystal | None = None) -> EmptyPolytopeCertificate:
    """Lift an empty polygon to the prism over the unit cube in ``extra_dims``
    more coordinates, over the product of the crystal with the integers."""
    if extra_dims < 1:
        raise ValueError("extra_dims must be at least 1")
    S = S if S is not None else cert2d.origin
    if not isinstance(S, Crystal) or S.dim != 2:
        raise ValueError("the lift needs the planar crystal of the certificate")
    if cert2d.status is not Status.VERIFIED:
        raise ValueError("only verified certificates can be lifted")
    lifted = S.product_with_integers(extra_dims)
    verts = [tuple(v) + tuple(Fraction(e) for e in eps)
             for v in cert2d.vertices
             for eps in itertools.product((0, 1), repeat=extra_dims)]
    cert = is_empty_hull(lifted, verts)
    cert.note = f"product of a {cert2d.size}-gon with the unit {extra_dims}-cube"
    return cert


# ---------------------------------------------------------------------------
# quadrilaterals and parallel segments

def _affine_frame(A, B, C):
    """Map (u, v) -> B + u (C - B) + v (A - B) and its inverse."""
    e1 = (C[0] - B[0], C[1] - B[1])
    e2 = (A[0] - B[0], A[1] - B[1])

    def fwd(u, v):
        return (B[0] + u * e1[0] + v * e2[0], B[1] + u * e1[1] + v * e2[1])

    def back(P):
        sol = solve([[e1[0], e2[0]], [e1[1], e2[1]]], [P[0] - B[0], P[1] - B[1]])
        return sol[0], sol[1]

    return fwd, back


def find_parallelogram(quad: Sequence[Sequence]) -> tuple:
    """Parallelogram inside a convex quadrilateral with at least three shared vertices.

    ``quad`` lists the vertices in cyclic order (either orientation).
    Returns ``(vertices, shared)`` where ``shared`` holds the indices into
    ``quad`` of the vertices used.
    """
    q = [tuple(Fraction(c) if isinstance(c, (int, str)) else c for c in p) for p in quad]
    if len(q) != 4:
        raise ValueError("a quadrilateral has four vertices")
    for i, j, k in itertools.combinations(range(4), 3):
        if orientation2d(q[i], q[j], q[k]) == 0:
            raise DegenerateQuad("three vertices are collinear")
    turns = {orientation2d(q[i], q[(i + 1) % 4], q[(i + 2) % 4]) for i in range(4)}
    if len(turns) != 1:
        raise NotConvex("vertices are not a convex quadrilateral in cyclic order")
    iA, iB, iC, iD = 0, 1, 2, 3
    fwd, back = _affine_frame(q[iA], q[iB], q[iC])
    x, y = back(q[iD])
    if x > 1 and y > 1:
        M = fwd(Fraction(1), Fraction(1))
        return (q[iA], q[iB], q[iC], M), (iA, iB, iC)
    if x > 1:
        M = fwd(x - 1, y)
        return (q[iB], q[iC], q[iD], M), (iB, iC, iD)
    if y > 1:
        M = fwd(x, y - 1)
        return (q[iA], q[iB], M, q[iD]), (iA, iB, iD)
    if x == 1 and y == 1:
        return tuple(q), (iA, iB, iC, iD)
    M = fwd(1 - x, 1 - y)
    return (q[iA], M, q[iC], q[iD]), (iA, iC, iD)


def _diff(p, q):
    return (p[0] - q[0], p[1] - q[1])


def parallel_segments_witness(segments: Sequence[Sequence[Sequence]]) -> int:
    """Index (0..5 over X, X', Y, Y', Z, Z') of a point in the closed hull of the other five."""
    if len(segments) != 3:
        raise ValueError("three segments expected")
    pts = [tuple(Fraction(c) if isinstance(c, (int, str)) else c for c in p)
           for seg in segments for p in seg]
    vecs = [_diff(pts[2 * i + 1], pts[2 * i]) for i in range(3)]
    if vecs[0] != vecs[1] or vecs[0] != vecs[2]:
        raise SegmentsNotEqualParallel("difference vectors differ")
    v = vecs[0]
    if v == (0, 0):
        return 1  # X' coincides with X
    for i, j in itertools.combinations(range(6), 2):
        if pts[i] == pts[j]:
            return j

    def offset(p):
        return v[0] * (p[1] - pts[0][1]) - v[1] * (p[0] - pts[0][0])

    offs = [offset(pts[2 * i]) for i in range(3)]
    for a, b in itertools.combinations(range(3), 2):
        if offs[a] == offs[b]:
            # four collinear points: the second along the line sits between two others
            idx = [2 * a, 2 * a + 1, 2 * b, 2 * b + 1]
            idx.sort(key=lambda t: v[0] * pts[t][0] + v[1] * pts[t][1])
            return idx[1]
    order = sorted(range(3), key=lambda i: offs[i])
    lo, mid, hi = order
    fwd, back = _affine_frame(pts[2 * mid], pts[2 * lo], pts[2 * lo + 1])
    x, _ = back(pts[2 * hi])
    return 2 * mid + 1 if x > 0 else 2 * mid


# ---------------------------------------------------------------------------
# families of convex polygons

def _as_polygon(member) -> VPolytope:
    if isinstance(member, VPolytope):
        return member
    if isinstance(member, Box):
        return convex_hull_2d(member.corners())
    return convex_hull_2d([tuple(Fraction(c) if isinstance(c, (int, str)) else c for c in p)
                           for p in member])


def _clip(poly: list, a, b) -> list:
    """Part of a polygon on the left of (or on) the directed line a -> b."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        sp, sq = orientation2d(a, b, p), orientation2d(a, b, q)
        if sp >= 0:
            out.append(p)
        if sp * sq < 0:
            ap = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
            aq = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])
            t = ap / (ap - aq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def intersect_polygons(polys: Sequence[VPolytope]) -> list:
    """Vertex list (possibly degenerate or empty) of the intersection."""
    cur = list(polys[0].vertices)
    for P in polys[1:]:
        vs = P.vertices
        if P.dim < 2:
            raise ValueError("family members must be full-dimensional")
        for i in range(len(vs)):
            if not cur:
                return []
            cur = _clip(cur, vs[i], vs[(i + 1) % len(vs)])
    return cur


def _union_box(polys) -> Box:
    return Box.bounding([v for P in polys for v in P.vertices])


def _coverage(S, polys) -> list:
    """(point, membership bitmask) for S points inside at least one member."""
    out = []
    for p, _ in points_in_box(S, _union_box(polys)).points:
        mask = 0
        for i, P in enumerate(polys):
            if point_in_hull(P, p, "closed") is Membership.IN:
                mask |= 1 << i
        if mask:
            out.append((p, mask))
    return out


@dataclass
class FractionalReport:
    n: int
    alpha: Fraction
    beta_observed: Fraction
    deep_point: tuple | None
    pierced: int = 0
    tuples: int = 0
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alpha": format_scalar(self.alpha),
            "beta_observed": format_scalar(self.beta_observed),
            "deep_point": None if self.deep_point is None else [format_scalar(c) for c in self.deep_point],
            "pierced_tuples": self.pierced,
            "tuples": self.tuples,
        }


def _pierced(S, members) -> bool:
    region = intersect_polygons(members)
    if not region:
        return False
    box = Box.bounding(region)
    for p, _ in points_in_box(S, box).points:
        if all(point_in_hull(P, p, "closed") is Membership.IN for P in members):
            return True
    return False


def fractional_experiment(S, family: Sequence, d: int = 2) -> FractionalReport:
    """Fraction of pierced (d+1)-tuples and the deepest point of S."""
    if d != 2:
        raise ValueError("the harness handles planar families")
    polys = [_as_polygon(m) for m in family]
    n = len(polys)
    if n > FAMILY_LIMIT:
        raise FamilyTooLarge(f"{n} members exceed {FAMILY_LIMIT}")
    if n < d + 1:
        raise ValueError("family needs at least d + 1 members")
    tuples = list(itertools.combinations(range(n), d + 1))
    pierced = sum(1 for t in tuples if _pierced(S, [polys[i] for i in t]))
    cov = _coverage(S, polys)
    best, deep = 0, None
    for p, mask in cov:
        c = bin(mask).count("1")
        if c > best or (c == best and deep is not None and p < deep):
            best, deep = c, p
    return FractionalReport(n, Fraction(pierced, len(tuples)), Fraction(best, n), deep,
                            pierced, len(tuples))


def helly_direct_check(S, family: Sequence, h: int) -> bool:
    """If every ``h`` members share a point of S, so do all members."""
    polys = [_as_polygon(m) for m in family]
    n = len(polys)
    if n > FAMILY_LIMIT:
        raise FamilyTooLarge(f"{n} members exceed {FAMILY_LIMIT}")
    masks = [m for _, m in _coverage(S, polys)]
    full = (1 << n) - 1
    conclusion = any(m == full for m in masks)
    if n <= h:
        return True
    for sub in itertools.combinations(range(n), h):
        smask = sum(1 << i for i in sub)
        if not any(m & smask == smask for m in masks):
            return True  # hypothesis fails
    return conclusion


def random_rectangles(rng: random.Random, n: int, lo: int = 0, hi: int = 10,
                      denominator: int = 4) -> list:
    """``n`` axis-parallel rectangles with rational corners in ``[lo, hi]^2``."""
    out = []
    span = (hi - lo) * denominator
    for _ in range(n):
        xs = sorted(rng.sample(range(span + 1), 2))
        ys = sorted(rng.sample(range(span + 1), 2))
        out.append(Box((Fraction(lo * denominator + xs[0], denominator), Fraction(lo * denominator + ys[0], denominator)),
                       (Fraction(lo * denominator + xs[1], denominator), Fraction(lo * denominator + ys[1], denominator))))
    return out


def random_clustered_rectangles(rng: random.Random, n: int, center=(Fraction(0), Fraction(0)),
                                reach: int = 3, denominator: int = 4) -> list:
    """Rectangles spread around ``center`` so that many of them overlap."""
    out = []
    for _ in range(n):
        a = [Fraction(rng.randrange(lo, reach * denominator + 1), denominator) for lo in (0, 0, 1, 1)]
        jitter = [Fraction(rng.randrange(-denominator, denominator + 1), denominator) for _ in range(2)]
        cx, cy = center[0] + jitter[0], center[1] + jitter[1]
        out.append(Box((cx - a[0], cy - a[1]), (cx + a[2], cy + a[3])))
    return out
