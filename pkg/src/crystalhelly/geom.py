"""Exact low-dimensional convex geometry.

Points are plain tuples of scalars.  Everything here works over any backend
from :mod:`crystalhelly.numeric`; predicates on certified floats may come
back undecided and say so instead of guessing.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .numeric import (
    UNCERTAIN,
    UncertainPredicate,
    certain_sign,
    scalar_ceil,
    scalar_floor,
    scalar_sign,
)

Point = tuple


class DimensionMismatch(ValueError):
    pass


class FacetIndexOutOfRange(IndexError):
    pass


class UnboundedRegion(ValueError):
    pass


class Membership(enum.Enum):
    IN = "IN"
    OUT = "OUT"
    UNCERTAIN = "UNCERTAIN"


def point(*coords) -> Point:
    return tuple(Fraction(c) if isinstance(c, (int, str)) else c for c in coords)


def sub(p: Sequence, q: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(p, q))


def add(p: Sequence, q: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(p, q))


def dot(p: Sequence, q: Sequence):
    it = iter(zip(p, q))
    a, b = next(it)
    s = a * b
    for a, b in it:
        s = s + a * b
    return s


def _and_signs(signs) -> Membership:
    """Combine halfspace tests: each sign is that of ``offset - normal.x``."""
    uncertain = False
    for s in signs:
        if s is UNCERTAIN:
            uncertain = True
        elif s < 0:
            return Membership.OUT
    return Membership.UNCERTAIN if uncertain else Membership.IN


# ---------------------------------------------------------------------------
# regions

@dataclass(frozen=True)
class Box:
    lo: Point
    hi: Point

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise DimensionMismatch("box corners differ in dimension")
        for a, b in zip(self.lo, self.hi):
            if scalar_sign(b - a) == -1:
                raise ValueError("box lo must be <= hi componentwise")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def contains(self, x: Sequence) -> Membership:
        signs = []
        for a, b, c in zip(self.lo, self.hi, x):
            signs.append(scalar_sign(c - a))
            signs.append(scalar_sign(b - c))
        return _and_signs(signs)

    def shrink(self, margin) -> Box:
        return Box(tuple(a + margin for a in self.lo), tuple(b - margin for b in self.hi))

    def grow(self, margin) -> Box:
        return self.shrink(-margin)

    def corners(self) -> list:
        return [tuple(c) for c in itertools.product(*zip(self.lo, self.hi))]

    def as_hpolytope(self) -> HPolytope:
        d = self.dim
        hs = []
        for i in range(d):
            e = tuple(1 if j == i else 0 for j in range(d))
            ne = tuple(-1 if j == i else 0 for j in range(d))
            hs.append((e, self.hi[i]))
            hs.append((ne, -self.lo[i]))
        return HPolytope(tuple(hs))

    @classmethod
    def bounding(cls, points: Sequence[Sequence]) -> Box:
        """Smallest box around exact points (componentwise min/max)."""
        pts = list(points)
        d = len(pts[0])
        lo, hi = [], []
        for i in range(d):
            col = [p[i] for p in pts]
            lo.append(min(col))
            hi.append(max(col))
        return cls(tuple(lo), tuple(hi))

    @classmethod
    def parse(cls, text: str) -> Box:
        """``"x0,y0,x1,y1"`` (any even number of comma-separated rationals)."""
        vals = [Fraction(v.strip()) for v in text.split(",")]
        if len(vals) % 2:
            raise ValueError(f"box needs an even number of coordinates: {text!r}")
        d = len(vals) // 2
        return cls(tuple(vals[:d]), tuple(vals[d:]))


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of an irredundant vertex list.  In 2D the list is counterclockwise."""

    vertices: tuple
    dim: int

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])


@dataclass(frozen=True)
class HPolytope:
    """Intersection of closed halfspaces ``normal . x <= offset``."""

    halfspaces: tuple

    @property
    def dim(self) -> int:
        return len(self.halfspaces[0][0])

    def contains(self, x: Sequence) -> Membership:
        return _and_signs(scalar_sign(o - dot(n, x)) for n, o in self.halfspaces)

    def translate(self, t: Sequence) -> HPolytope:
        return HPolytope(tuple((n, o + dot(n, t)) for n, o in self.halfspaces))


# ---------------------------------------------------------------------------
# small exact linear algebra

def _pick_pivot(rows, col, start):
    uncertain = False
    for r in range(start, len(rows)):
        s = scalar_sign(rows[r][col])
        if s is UNCERTAIN:
            uncertain = True
        elif s != 0:
            return r
    if uncertain:
        raise UncertainPredicate("no certified pivot")
    return None


def _rref(M):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    rows = [list(r) for r in M]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        p = _pick_pivot(rows, c, r)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and scalar_sign(rows[i][c]) != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(M) -> int:
    if not M:
        return 0
    return len(_rref(M)[1])


def det(M):
    n = len(M)
    rows = [list(r) for r in M]
    acc = None
    sgn = 1
    for c in range(n):
        p = _pick_pivot(rows, c, c)
        if p is None:
            return 0 * rows[0][0]
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            sgn = -sgn
        piv = rows[c][c]
        acc = piv if acc is None else acc * piv
        for i in range(c + 1, n):
            if scalar_sign(rows[i][c]) != 0:
                f = rows[i][c] / piv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return acc if sgn > 0 else -acc


def inverse(M):
    n = len(M)
    zero = 0 * M[0][0]
    aug = [list(M[i]) + [zero + (1 if i == j else 0) for j in range(n)] for i in range(n)]
    rows, piv = _rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [r[n:] for r in rows]


def solve(M, b):
    """Unique solution of ``M x = b`` or ``None`` when M is singular."""
    n = len(M)
    aug = [list(M[i]) + [b[i]] for i in range(n)]
    rows, piv = _rref(aug)
    if piv[:n] != list(range(n)) or len(piv) > n:
        return None
    return [rows[i][n] for i in range(n)]


def nullspace(M) -> list:
    rows, piv = _rref(M)
    ncols = len(M[0])
    free = [c for c in range(ncols) if c not in piv]
    zero = 0 * M[0][0]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = zero + 1
        for r, c in enumerate(piv):
            v[c] = -rows[r][f]
        basis.append(v)
    return basis


def matvec_rows(coeffs: Sequence, basis: Sequence[Sequence]) -> tuple:
    """``sum_i coeffs[i] * basis[i]`` (row-vector convention)."""
    d = len(basis[0])
    out = []
    for j in range(d):
        s = None
        for c, row in zip(coeffs, basis):
            if c:
                term = row[j] * c
                s = term if s is None else s + term
        out.append(s if s is not None else 0 * basis[0][j])
    return tuple(out)


# ---------------------------------------------------------------------------
# exact simplex (Bland's rule)

def _lp_max(A, b, c):
    """Maximize ``c.z`` subject to ``A z = b``, ``z >= 0``.

    Returns ``("infeasible", None)``, ``("unbounded", None)`` or
    ``("optimal", value)``.  Every sign test must be certain.
    """
    m, n = len(A), len(A[0])
    zero = 0 * b[0] if b else 0
    T = []
    for i in range(m):
        coeffs, rhs = list(A[i]), b[i]
        if certain_sign(rhs) < 0:
            coeffs, rhs = [-v for v in coeffs], -rhs
        T.append(coeffs + [zero + (1 if k == i else 0) for k in range(m)] + [rhs])
    basis = [n + i for i in range(m)]
    width = n + m

    def run(obj, allowed):
        while True:
            enter = None
            for j in range(width):
                if j in allowed and certain_sign(obj[j]) < 0:
                    enter = j
                    break
            if enter is None:
                return True
            best = None
            for i in range(m):
                if certain_sign(T[i][enter]) > 0:
                    ratio = T[i][-1] / T[i][enter]
                    if best is None:
                        best = (ratio, basis[i], i)
                    else:
                        s = certain_sign(ratio - best[0])
                        if s < 0 or (s == 0 and basis[i] < best[1]):
                            best = (ratio, basis[i], i)
            if best is None:
                return False
            r = best[2]
            piv = T[r][enter]
            T[r] = [v / piv for v in T[r]]
            for i in range(m):
                if i != r and scalar_sign(T[i][enter]) != 0:
                    f = T[i][enter]
                    T[i] = [a - f * bb for a, bb in zip(T[i], T[r])]
            if scalar_sign(obj[enter]) != 0:
                f = obj[enter]
                obj[:] = [a - f * bb for a, bb in zip(obj, T[r])]
            basis[r] = enter

    # phase 1: maximize -sum(artificials)
    obj = [zero] * (width + 1)
    for i in range(m):
        obj = [o - t for o, t in zip(obj, T[i])]
    for k in range(n, width):
        obj[k] = zero
    run(obj, set(range(width)))
    if certain_sign(obj[-1]) != 0:
        return "infeasible", None
    # drive artificial variables out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            for j in range(n):
                if scalar_sign(T[i][j]) not in (0,):
                    if scalar_sign(T[i][j]) is UNCERTAIN:
                        continue
                    piv = T[i][j]
                    T[i] = [v / piv for v in T[i]]
                    for k in range(m):
                        if k != i and scalar_sign(T[k][j]) != 0:
                            f = T[k][j]
                            T[k] = [a - f * bb for a, bb in zip(T[k], T[i])]
                    basis[i] = j
                    break
    # phase 2
    obj = [zero - (c[j] if j < n else 0) for j in range(width)] + [zero]
    for i in range(m):
        if scalar_sign(obj[basis[i]]) != 0:
            f = obj[basis[i]]
            obj = [a - f * bb for a, bb in zip(obj, T[i])]
    if not run(obj, set(range(n))):
        return "unbounded", None
    return "optimal", obj[-1]


# ---------------------------------------------------------------------------
# predicates and hulls

def orientation2d(p: Sequence, q: Sequence, r: Sequence):
    """Sign of the cross product ``(q - p) x (r - p)``; positive is counterclockwise."""
    if not (len(p) == len(q) == len(r) == 2):
        raise DimensionMismatch("orientation2d needs planar points")
    return scalar_sign((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))


def _cmp_xy(a, b) -> int:
    s = certain_sign(a[0] - b[0])
    if s:
        return s
    return certain_sign(a[1] - b[1])


def convex_hull_2d(points: Sequence[Sequence]) -> VPolytope:
    """Extreme points in counterclockwise order, starting from the lowest-then-leftmost.

    Points in the relative interior of hull edges are dropped.  A collinear
    input gives ``dim == 1`` with the two endpoints; a single point ``dim == 0``.
    """
    import functools

    pts = [tuple(p) for p in points]
    if not pts:
        raise ValueError("convex hull of no points")
    if any(len(p) != 2 for p in pts):
        raise DimensionMismatch("convex_hull_2d needs planar points")
    pts.sort(key=functools.cmp_to_key(_cmp_xy))
    uniq = [pts[0]]
    for p in pts[1:]:
        if _cmp_xy(p, uniq[-1]) != 0:
            uniq.append(p)
    if len(uniq) == 1:
        return VPolytope((uniq[0],), 0)

    def turn(o, a, b):
        s = orientation2d(o, a, b)
        if s is UNCERTAIN:
            raise UncertainPredicate("orientation straddles zero")
        return s

    lower, upper = [], []
    for p in uniq:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(uniq):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2:
        return VPolytope((uniq[0], uniq[-1]), 1)
    # rotate so the lowest-then-leftmost vertex comes first
    start = min(range(len(hull)), key=functools.cmp_to_key(
        lambda i, j: _cmp_xy((hull[i][1], hull[i][0]), (hull[j][1], hull[j][0]))))
    return VPolytope(tuple(hull[start:] + hull[:start]), 2)


def polygon(points: Sequence[Sequence]) -> VPolytope:
    """Planar VPolytope from points in any order."""
    return convex_hull_2d(points)


def vpolytope(points: Sequence[Sequence]) -> VPolytope:
    """VPolytope in any dimension; 2D inputs are put in hull order, others kept irredundant."""
    pts = [tuple(p) for p in points]
    if len(pts[0]) == 2:
        return convex_hull_2d(pts)
    uniq = list(dict.fromkeys(pts))
    keep = [v for i, v in enumerate(uniq)
            if point_in_hull_lp(uniq[:i] + uniq[i + 1:], v, "closed") != Membership.IN]
    return VPolytope(tuple(keep), affine_dim(keep))


def affine_dim(points: Sequence[Sequence]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    return rank([sub(p, base) for p in points[1:]])


def _segment_contains(a, b, x, open_: bool) -> Membership:
    s = orientation2d(a, b, x)
    if s is UNCERTAIN:
        return Membership.UNCERTAIN
    if s != 0:
        return Membership.OUT
    d = sub(b, a)
    t1 = scalar_sign(dot(sub(x, a), d))
    t2 = scalar_sign(dot(sub(b, x), d))
    if t1 is UNCERTAIN or t2 is UNCERTAIN:
        return Membership.UNCERTAIN
    if open_:
        return Membership.IN if t1 > 0 and t2 > 0 else Membership.OUT
    return Membership.IN if t1 >= 0 and t2 >= 0 else Membership.OUT


def point_in_hull(P: VPolytope, x: Sequence, mode: str = "closed") -> Membership:
    """Membership of ``x`` in the closed hull or in its (ambient) interior."""
    if mode not in ("closed", "open"):
        raise ValueError(f"mode must be 'closed' or 'open', got {mode!r}")
    x = tuple(x)
    if len(x) != P.ambient_dim:
        raise DimensionMismatch(f"point of dim {len(x)} vs polytope of dim {P.ambient_dim}")
    if P.ambient_dim > 6:
        raise DimensionMismatch("dimensions above 6 are not supported")
    if P.ambient_dim == 2:
        return _point_in_polygon(P, x, mode)
    return point_in_hull_lp(list(P.vertices), x, mode, P.dim)


def _point_in_polygon(P: VPolytope, x, mode: str) -> Membership:
    vs = P.vertices
    if P.dim == 0:
        if mode == "open":
            return Membership.OUT
        return _and_signs([_eq_sign(vs[0], x)])
    if P.dim == 1:
        if mode == "open":
            return Membership.OUT
        return _segment_contains(vs[0], vs[1], x, False)
    signs = []
    n = len(vs)
    for i in range(n):
        s = orientation2d(vs[i], vs[(i + 1) % n], x)
        if s is not UNCERTAIN and mode == "open" and s == 0:
            return Membership.OUT
        signs.append(s)
    return _and_signs(signs)


def _eq_sign(a, b):
    """1 if equal, -1 if certainly different, UNCERTAIN otherwise."""
    uncertain = False
    for u, v in zip(a, b):
        s = scalar_sign(u - v)
        if s is UNCERTAIN:
            uncertain = True
        elif s != 0:
            return -1
    return UNCERTAIN if uncertain else 1


def point_in_hull_lp(vertices: Sequence, x: Sequence, mode: str = "closed",
                     dim: int | None = None) -> Membership:
    """Membership through an exact feasibility problem over the scalar field."""
    vs = [tuple(v) for v in vertices]
    if not vs:
        return Membership.OUT
    d = len(x)
    m = len(vs)
    try:
        if mode == "closed":
            A = [[1] * m] + [[v[i] for v in vs] for i in range(d)]
            b = [1] + [x[i] for i in range(d)]
            A, b = _lift(A, b, x)
            status, _ = _lp_max(A, b, [0] * m)
            return Membership.IN if status == "optimal" else Membership.OUT
        if dim is None:
            dim = affine_dim(vs)
        if dim < d:
            return Membership.OUT
        # lambda_i = mu_i + t with mu, t >= 0; maximize t
        sums = [sum((v[i] for v in vs[1:]), vs[0][i]) for i in range(d)]
        A = [[1] * m + [m]] + [[v[i] for v in vs] + [sums[i]] for i in range(d)]
        b = [1] + [x[i] for i in range(d)]
        A, b = _lift(A, b, x)
        status, val = _lp_max(A, b, [0] * m + [1])
        if status != "optimal":
            return Membership.OUT
        return Membership.IN if certain_sign(val) > 0 else Membership.OUT
    except UncertainPredicate:
        return Membership.UNCERTAIN


def _lift(A, b, x):
    """Cast integer constants in the LP into the scalar field of ``x``."""
    z = 0 * x[0]
    A = [[z + v for v in row] for row in A]
    b = [z + v for v in b]
    return A, b


def relative_interior_of_facet_contains(P: VPolytope, facet_index: int, x: Sequence) -> bool:
    """Whether ``x`` lies in the open edge ``facet_index`` of a polygon.

    Edge ``i`` joins vertices ``i`` and ``i + 1`` (cyclically).
    """
    if P.ambient_dim != 2 or len(x) != 2:
        raise DimensionMismatch("facet queries are implemented for polygons")
    if P.dim != 2:
        raise ValueError("polygon is not full-dimensional")
    n = len(P.vertices)
    if not 0 <= facet_index < n:
        raise FacetIndexOutOfRange(f"facet {facet_index} of {n}")
    a, b = P.vertices[facet_index], P.vertices[(facet_index + 1) % n]
    res = _segment_contains(a, b, tuple(x), True)
    if res is Membership.UNCERTAIN:
        raise UncertainPredicate("facet membership undecided")
    return res is Membership.IN


# ---------------------------------------------------------------------------
# vertices of H-polytopes and lattice enumeration

def hpolytope_vertices(H: HPolytope, include_uncertain: bool = True) -> list:
    """Vertices by brute force over d-subsets of facets (small d only).

    With ``include_uncertain`` candidate vertices whose feasibility cannot be
    certified are kept, which makes the result safe for outer bounds.
    """
    d = H.dim
    hs = H.halfspaces
    out = []
    seen = set()
    for combo in itertools.combinations(range(len(hs)), d):
        M = [list(hs[i][0]) for i in combo]
        rhs = [hs[i][1] for i in combo]
        z = 0 * rhs[0]
        M = [[z + v for v in row] for row in M]
        try:
            sol = solve(M, [z + r for r in rhs])
        except UncertainPredicate:
            continue
        if sol is None:
            continue
        mem = H.contains(sol)
        if mem is Membership.OUT or (mem is Membership.UNCERTAIN and not include_uncertain):
            continue
        key = tuple(str(c) for c in sol)
        if key not in seen:
            seen.add(key)
            out.append(tuple(sol))
    return out


def is_bounded(H: HPolytope) -> bool:
    """Normals positively span the space (sufficient and necessary for a nonempty H)."""
    d = H.dim
    normals = [n for n, _ in H.halfspaces]
    for i in range(d):
        for sgn in (1, -1):
            target = [sgn if j == i else 0 for j in range(d)]
            z = 0 * H.halfspaces[0][1]
            A = [[z + n[j] for n in normals] for j in range(d)]
            b = [z + t for t in target]
            try:
                status, _ = _lp_max(A, b, [0] * len(normals))
            except UncertainPredicate:
                return False
            if status != "optimal":
                return False
    return True


def _outer_box(points: Sequence[Sequence]) -> tuple:
    """Componentwise integer floor/ceil box around points (intervals widened)."""
    d = len(points[0])
    lo = [min(scalar_floor(p[i]) for p in points) for i in range(d)]
    hi = [max(scalar_ceil(p[i]) for p in points) for i in range(d)]
    return lo, hi


def lattice_points_in_polytope(basis: Sequence[Sequence], Q) -> list:
    """Integer coefficient vectors ``c`` with ``c . basis`` in the closed region ``Q``.

    ``basis`` rows are the lattice generators.  ``Q`` may be an
    :class:`HPolytope`, a :class:`VPolytope` or a :class:`Box`.
    """
    if isinstance(Q, Box):
        corners = Q.corners()
        member = Q.contains
    elif isinstance(Q, VPolytope):
        corners = list(Q.vertices)

        def member(x):
            return point_in_hull(Q, x, "closed")
    elif isinstance(Q, HPolytope):
        if not is_bounded(Q):
            raise UnboundedRegion("region is not bounded")
        corners = hpolytope_vertices(Q)
        if not corners:
            return []
        member = Q.contains
    else:
        raise TypeError(f"unsupported region {type(Q).__name__}")
    d = len(basis)
    if len(corners[0]) != d:
        raise DimensionMismatch("region and lattice dimensions differ")
    z = 0 * corners[0][0]
    binv = inverse([[z + v for v in row] for row in basis])
    coords = [matvec_rows(c, binv) for c in corners]
    lo, hi = _outer_box(coords)
    out = []
    for c in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        x = matvec_rows(c, basis)
        m = member(x)
        if m is Membership.IN:
            out.append(tuple(c))
        elif m is Membership.UNCERTAIN:
            raise UncertainPredicate(f"membership of lattice point {c} is undecided")
    return out
