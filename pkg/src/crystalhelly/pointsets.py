"""Crystals, cut-and-project sets and saturated finite patches of them."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .geom import (
    Box,
    HPolytope,
    Membership,
    dot,
    hpolytope_vertices,
    inverse,
    lattice_points_in_polytope,
    matvec_rows,
    nullspace,
    point,
    rank,
    sub,
)
from .numeric import (
    DEFAULT_PRECISION,
    UNCERTAIN,
    CertFloat,
    QuadScalar,
    UncertainPredicate,
    cert_pi,
    format_scalar,
    is_exact,
    parse_scalar,
    scalar_sign,
)


class CrystalError(ValueError):
    pass


class RankDeficient(ValueError):
    pass


class UnknownPreset(KeyError):
    pass


class ArcExhausted(ValueError):
    pass


class UncertainMembership(UncertainPredicate):
    pass


F = Fraction


def _q(*vals) -> tuple:
    return tuple(F(v) for v in vals)


# ---------------------------------------------------------------------------
# lattices and crystals

@dataclass(frozen=True)
class Lattice:
    """Row-convention basis: lattice points are ``c . basis`` for integer ``c``."""

    basis: tuple

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(point(*r) for r in self.basis))
        if rank([list(r) for r in self.basis]) != len(self.basis):
            raise CrystalError("lattice basis is singular")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def standard(cls, d: int) -> Lattice:
        return cls(tuple(tuple(F(int(i == j)) for j in range(d)) for i in range(d)))

    def coords(self, x: Sequence) -> tuple:
        """Real coefficients of ``x`` in the lattice basis."""
        return matvec_rows(x, self._inv)

    @property
    def _inv(self):
        inv = self.__dict__.get("_inv_cache")
        if inv is None:
            inv = inverse([list(r) for r in self.basis])
            object.__setattr__(self, "_inv_cache", inv)
        return inv

    def contains(self, x: Sequence) -> bool:
        return all(_is_integer(c) for c in self.coords(x))

    def reduce(self, x: Sequence) -> tuple:
        """Representative of ``x + lattice`` in the half-open fundamental cell."""
        c = self.coords(x)
        frac = [ci - math.floor(ci) for ci in c]
        return matvec_rows(frac, self.basis)


def _is_integer(x) -> bool:
    if isinstance(x, int):
        return True
    if isinstance(x, Fraction):
        return x.denominator == 1
    if isinstance(x, QuadScalar):
        return x.b == 0 and x.a.denominator == 1
    raise UncertainPredicate("integrality of a certified float is undecidable")


@dataclass(frozen=True)
class Crystal:
    """Union of ``k`` translates of one lattice, translates distinct modulo it."""

    lattice: Lattice
    translates: tuple
    name: str = "crystal"

    def __post_init__(self):
        reduced = tuple(self.lattice.reduce(point(*t)) for t in self.translates)
        for i, j in itertools.combinations(range(len(reduced)), 2):
            if reduced[i] == reduced[j]:
                raise CrystalError(f"translates {i} and {j} differ by a lattice vector")
        if not reduced:
            raise CrystalError("a crystal needs at least one translate")
        object.__setattr__(self, "translates", reduced)

    @classmethod
    def make(cls, basis, translates, name: str = "crystal") -> Crystal:
        return cls(Lattice(tuple(tuple(r) for r in basis)), tuple(tuple(t) for t in translates), name)

    @property
    def dim(self) -> int:
        return self.lattice.dim

    @property
    def k(self) -> int:
        return len(self.translates)

    def coset_of(self, x: Sequence):
        """Index of the translate whose coset contains ``x``, or ``None``."""
        r = self.lattice.reduce(tuple(x))
        for i, t in enumerate(self.translates):
            if r == t:
                return i
        return None

    def contains(self, x: Sequence) -> bool:
        return self.coset_of(x) is not None

    def without(self, index: int, name: str | None = None) -> Crystal:
        ts = [t for i, t in enumerate(self.translates) if i != index]
        return Crystal(self.lattice, tuple(ts), name or self.name)

    def product_with_integers(self, extra_dims: int, name: str | None = None) -> Crystal:
        """Direct product with the integer lattice in ``extra_dims`` more coordinates."""
        d = self.dim
        n = d + extra_dims
        basis = []
        for i in range(n):
            if i < d:
                basis.append(tuple(self.lattice.basis[i]) + (F(0),) * extra_dims)
            else:
                basis.append(tuple(F(int(i == j)) for j in range(n)))
        ts = [tuple(t) + (F(0),) * extra_dims for t in self.translates]
        return Crystal(Lattice(tuple(basis)), tuple(ts), name or f"{self.name} x Z^{extra_dims}")


# ---------------------------------------------------------------------------
# cut-and-project schemes

@dataclass(frozen=True)
class InjectivityCheck:
    """Outcome of searching for nonzero lattice vectors killed by the physical projection."""

    radius: int
    holds: bool | None
    witness: tuple | None = None


@dataclass(frozen=True)
class Scheme:
    """Cut-and-project data.

    ``basis`` (n x n, rows) generates the ambient lattice, ``pi1`` (d x n) and
    ``pi2`` (k x n) act on column vectors, ``window`` is a bounded convex
    polytope in the k-dimensional internal space.
    """

    basis: tuple
    pi1: tuple
    pi2: tuple
    window: HPolytope
    name: str = "scheme"
    injectivity: InjectivityCheck | None = None
    dense_note: str = "density of the internal projection is not checked"
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        n = len(self.basis)
        if len(self.pi1[0]) != n or len(self.pi2[0]) != n:
            raise ValueError("projection widths must match the ambient dimension")
        if len(self.pi1) + len(self.pi2) != n:
            raise ValueError("d + k must equal the ambient dimension")
        if self.window.dim != len(self.pi2):
            raise ValueError("window lives in the internal space")
        # rows: images of basis vectors under [pi1; pi2]
        P1 = [tuple(dot(row, b) for row in self.pi1) for b in self.basis]
        P2 = [tuple(dot(row, b) for row in self.pi2) for b in self.basis]
        M = [list(p1) + list(p2) for p1, p2 in zip(P1, P2)]
        try:
            Minv = inverse(M)
        except ZeroDivisionError:
            raise ValueError("the two projections do not decompose the ambient space") from None
        self._cache.update(P1=P1, P2=P2, Minv=Minv)

    @property
    def n(self) -> int:
        return len(self.basis)

    @property
    def d(self) -> int:
        return len(self.pi1)

    @property
    def k(self) -> int:
        return len(self.pi2)

    @property
    def dim(self) -> int:
        return self.d

    @property
    def exact(self) -> bool:
        return is_exact(self.pi1[0][0]) and is_exact(self.window.halfspaces[0][1])

    def physical(self, c: Sequence[int]) -> tuple:
        return matvec_rows(c, self._cache["P1"])

    def internal(self, c: Sequence[int]) -> tuple:
        return matvec_rows(c, self._cache["P2"])

    def in_window(self, c: Sequence[int]) -> Membership:
        return self.window.contains(self.internal(c))

    def window_box(self) -> tuple:
        """Rational outer bounds (lo, hi) of the window."""
        wb = self._cache.get("wbox")
        if wb is None:
            verts = hpolytope_vertices(self.window, include_uncertain=True)
            if not verts:
                raise ValueError("window has no vertices")
            k = self.k
            lo = [min(_rat_bounds(v[i])[0] for v in verts) for i in range(k)]
            hi = [max(_rat_bounds(v[i])[1] for v in verts) for i in range(k)]
            wb = (lo, hi)
            self._cache["wbox"] = wb
        return wb

    def with_injectivity(self, radius: int = 2) -> Scheme:
        chk = check_injectivity(self, radius)
        return Scheme(self.basis, self.pi1, self.pi2, self.window, self.name, chk, self.dense_note)


def _rat_bounds(x) -> tuple:
    """Rational (lo, hi) with lo <= x <= hi."""
    if isinstance(x, (int, Fraction)):
        return F(x), F(x)
    if isinstance(x, QuadScalar):
        scale = 1 << 32
        f = math.floor(x * scale)
        return F(f, scale), F(f + 1, scale)
    if isinstance(x, CertFloat):
        from .numeric import _to_fraction

        return _to_fraction(x.lo), _to_fraction(x.hi)
    raise TypeError(type(x).__name__)


def check_injectivity(S: Scheme, radius: int = 2) -> InjectivityCheck:
    """Search nonzero integer vectors with ``max|c_i| <= radius`` in the kernel of pi1."""
    n = S.n
    undecided = None
    for c in itertools.product(range(-radius, radius + 1), repeat=n):
        nz = next((v for v in c if v), 0)
        if nz <= 0:
            continue
        x = S.physical(c)
        signs = [scalar_sign(v) for v in x]
        if any(s not in (0, UNCERTAIN) for s in signs):
            continue
        if all(s == 0 for s in signs):
            return InjectivityCheck(radius, False, tuple(c))
        if undecided is None:
            undecided = tuple(c)
    if undecided is not None:
        return InjectivityCheck(radius, None, undecided)
    return InjectivityCheck(radius, True)


def build_slab_scheme(gamma_basis: Sequence[Sequence], epsilon, name: str = "slab") -> Scheme:
    """Model set of lattice points of Z^n near the subspace spanned by ``gamma_basis``.

    The physical map is ``x -> G x`` (a linear image of the orthogonal
    projection onto the subspace) and the internal map uses an orthogonal
    basis of the complement.  The epsilon-ball window is replaced by the
    inscribed axis box in those internal coordinates, with half-widths
    rounded down to rationals.
    """
    G = [[F(v) if isinstance(v, (int, str)) else v for v in r] for r in gamma_basis]
    d, n = len(G), len(G[0])
    if rank(G) != d:
        raise RankDeficient("gamma rows are dependent")
    z = 0 * G[0][0]
    G = [[z + v for v in r] for r in G]
    H = nullspace(G)
    # Gram-Schmidt without normalization
    ortho = []
    for h in H:
        v = list(h)
        for u in ortho:
            f = dot(v, u) / dot(u, u)
            v = [a - f * b for a, b in zip(v, u)]
        ortho.append(v)
    k = len(ortho)
    eps = F(epsilon) if isinstance(epsilon, (int, str)) else epsilon
    halfspaces = []
    for i, h in enumerate(ortho):
        # largest convenient rational w with w^2 <= eps^2 |h|^2 / k
        target = eps * eps * dot(h, h) / k
        w = _rational_sqrt_floor(target)
        e = tuple(z + (1 if j == i else 0) for j in range(k))
        ne = tuple(-v for v in e)
        halfspaces.append((e, z + w))
        halfspaces.append((ne, z + w))
    ident = tuple(tuple(F(int(i == j)) for j in range(n)) for i in range(n))
    S = Scheme(ident, tuple(tuple(r) for r in G), tuple(tuple(r) for r in ortho),
               HPolytope(tuple(halfspaces)), name)
    return S.with_injectivity(3 if n <= 3 else 2)


def _rational_sqrt_floor(t, bits: int = 24) -> Fraction:
    """Rational w >= 0 with w^2 <= t, within 2^-bits of sqrt(t)."""
    lo, _ = _rat_bounds(t)
    if lo <= 0:
        return F(0)
    scale = 1 << bits
    w = F(math.isqrt(int(lo * scale * scale)), scale)
    while scalar_sign(t - w * w) < 0:
        w -= F(1, scale)
    return w


def zonotope_window(generators: Sequence[Sequence], offset: Sequence) -> HPolytope:
    """H-description of ``offset + sum_i [0, 1] g_i`` in dimension 1, 2 or 3.

    Assumes generators in general position (no k of them linearly dependent).
    """
    k = len(generators[0])
    gens = [tuple(g) for g in generators]
    if k == 1:
        normals = [(1 + 0 * gens[0][0],)]
        skip = [()]
    elif k == 2:
        normals = [(-g[1], g[0]) for g in gens]
        skip = [(i,) for i in range(len(gens))]
    elif k == 3:
        normals, skip = [], []
        for i, j in itertools.combinations(range(len(gens)), 2):
            a, b = gens[i], gens[j]
            normals.append((a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                            a[0] * b[1] - a[1] * b[0]))
            skip.append((i, j))
    else:
        raise ValueError("zonotope windows are supported up to dimension 3")
    hs = []
    for nv, sk in zip(normals, skip):
        base = dot(nv, offset)
        hi, lo = base, base
        for l, g in enumerate(gens):
            if l in sk:
                continue
            t = dot(nv, g)
            s = scalar_sign(t)
            if s is UNCERTAIN:
                raise UncertainPredicate("generator in a facet plane cannot be certified")
            if s > 0:
                hi = hi + t
            elif s < 0:
                lo = lo + t
        hs.append((nv, hi))
        hs.append((tuple(-v for v in nv), -lo))
    return HPolytope(tuple(hs))


# ---------------------------------------------------------------------------
# patches

@dataclass
class Patch:
    """All points of a set inside a closed box.

    ``points`` holds ``(point, provenance)`` pairs: the coset index for a
    crystal, the integer preimage for a scheme.  Scheme points whose window
    or region membership cannot be certified sit in ``uncertain`` instead.
    """

    source: object
    region: Box
    points: list
    uncertain: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    @property
    def coords(self) -> list:
        return [p for p, _ in self.points]


def crystal_points_in_box(C: Crystal, region: Box) -> Patch:
    pts = []
    basis = C.lattice.basis
    for i, t in enumerate(C.translates):
        shifted = Box(sub(region.lo, t), sub(region.hi, t))
        for c in lattice_points_in_polytope(basis, shifted):
            x = tuple(a + b for a, b in zip(matvec_rows(c, basis), t))
            pts.append((x, i))
    pts.sort(key=lambda e: (e[0], e[1]))
    return Patch(C, region, pts)


def _scheme_ranges(S: Scheme, region: Box) -> list:
    """Integer coefficient ranges covering the preimage of region x window."""
    wlo, whi = S.window_box()
    ylo = [_rat_bounds(v)[0] for v in region.lo] + list(wlo)
    yhi = [_rat_bounds(v)[1] for v in region.hi] + list(whi)
    Minv = S._cache["Minv"]
    ranges = []
    for j in range(S.n):
        lo = hi = F(0)
        for i in range(S.n):
            mlo, mhi = _rat_bounds(Minv[i][j])
            cands = [mlo * ylo[i], mlo * yhi[i], mhi * ylo[i], mhi * yhi[i]]
            lo += min(cands)
            hi += max(cands)
        ranges.append(range(math.floor(lo), math.ceil(hi) + 1))
    return ranges


def model_points_in_box(S: Scheme, region: Box) -> Patch:
    """Saturated patch of a model set: every lattice point whose physical image
    lies in ``region`` and whose internal image lies in the window."""
    if region.dim != S.d:
        raise ValueError("region dimension must equal the physical dimension")
    ranges = _scheme_ranges(S, region)
    P1, P2 = S._cache["P1"], S._cache["P2"]
    d = S.d
    zero1 = tuple(0 * P1[0][i] for i in range(d))
    zero2 = tuple(0 * P2[0][i] for i in range(S.k))
    # multiples c_j * row_j precomputed per coordinate
    mult = []
    for j, rg in enumerate(ranges):
        mult.append({c: (tuple(v * c for v in P1[j]), tuple(v * c for v in P2[j])) for c in rg})
    pts, unc = [], []
    n = S.n

    def rec(j, c, phys, intl):
        if j == n:
            m1 = region.contains(phys)
            if m1 is Membership.OUT:
                return
            m2 = S.window.contains(intl)
            if m2 is Membership.OUT:
                return
            if m1 is Membership.IN and m2 is Membership.IN:
                pts.append((phys, tuple(c)))
            else:
                unc.append((phys, tuple(c)))
            return
        for v in ranges[j]:
            a, b = mult[j][v]
            c.append(v)
            rec(j + 1, c, tuple(x + y for x, y in zip(phys, a)), tuple(x + y for x, y in zip(intl, b)))
            c.pop()

    rec(0, [], zero1, zero2)
    if S.exact:
        pts.sort(key=lambda e: (e[0], e[1]))
    else:
        pts.sort(key=lambda e: e[1])
        unc.sort(key=lambda e: e[1])
    return Patch(S, region, pts, unc)


def points_in_box(S, region: Box) -> Patch:
    if isinstance(S, Crystal):
        return crystal_points_in_box(S, region)
    if isinstance(S, Scheme):
        return model_points_in_box(S, region)
    raise TypeError(f"unsupported point set {type(S).__name__}")


# ---------------------------------------------------------------------------
# presets

SIX_TRANSLATES = [
    ("0", "0"), ("3/10", "5/10"), ("6/10", "8/10"),
    ("9/10", "9/10"), ("11/10", "9/10"), ("13/10", "8/10"),
]
FOUR_TRANSLATES = [("0", "0"), ("2/10", "3/10"), ("7/10", "8/10"), ("12/10", "8/10")]

# Twelve vertices of the empty 12-gon of the 6-translate crystal, in clockwise
# order.  The eleventh is (3/10, -2/10); the commonly quoted (4/10, -2/10) is
# not a point of the crystal.
TWELVE_GON = [
    ("0", "0"), ("3/10", "5/10"), ("6/10", "8/10"), ("9/10", "9/10"),
    ("11/10", "9/10"), ("13/10", "8/10"), ("13/10", "5/10"), ("1", "0"),
    ("9/10", "-1/10"), ("6/10", "-2/10"), ("3/10", "-2/10"), ("1/10", "-1/10"),
]

# Second copy for the two-copy hexagon: any (x, y) strictly inside the
# triangle (0,-1), (2,1), (0,1) such that the hexagon is empty works; this one
# was checked exhaustively.
HEX_TRANSLATE = ("1/3", "2/3")
HEX_VERTICES = [("0", "0"), ("1/3", "-1/3"), ("1", "0"), ("4/3", "2/3"), ("1", "1"), ("1/3", "2/3")]

PRESETS = {
    "z2": "the integer lattice Z^2",
    "paper-6crystal": "six translates of Z^2 with an empty 12-gon",
    "paper-5crystal": "paper-6crystal without the (13/10, 8/10) copy",
    "paper-4crystal": "four translates of Z^2 with Helly number 9",
    "paper-3crystal": "paper-4crystal without the (12/10, 8/10) copy",
    "paper-2crystal-hex": "Z^2 and Z^2 + (1/3, 2/3): an empty hexagon from 3+3 points",
    "ammann-beenker": "Ammann-Beenker vertex set, Z^4 with an octagonal window over Q(sqrt 2)",
    "fibonacci": "Fibonacci chain, Z^2 with an interval window over Q(sqrt 5)",
    "penrose-debruijn": "Penrose rhomb vertices, Z^5 with a rhombic icosahedron window (certified floats)",
}


def _crystal(translates, name):
    return Crystal.make(Lattice.standard(2).basis, [_q(*t) for t in translates], name)


def preset(name: str, precision: int = DEFAULT_PRECISION):
    if name == "z2":
        return _crystal([("0", "0")], name)
    if name == "paper-6crystal":
        return _crystal(SIX_TRANSLATES, name)
    if name == "paper-5crystal":
        return _crystal(SIX_TRANSLATES[:5], name)
    if name == "paper-4crystal":
        return _crystal(FOUR_TRANSLATES, name)
    if name == "paper-3crystal":
        return _crystal(FOUR_TRANSLATES[:3], name)
    if name == "paper-2crystal-hex":
        return _crystal([("0", "0"), HEX_TRANSLATE], name)
    if name == "ammann-beenker":
        return ammann_beenker()
    if name == "fibonacci":
        return fibonacci()
    if name == "penrose-debruijn":
        return penrose_debruijn(precision)
    raise UnknownPreset(name)


def ammann_beenker(shift=(F(1, 13), F(1, 17))) -> Scheme:
    r = QuadScalar(0, F(1, 2), 2)  # sqrt(2)/2
    one, zero = QuadScalar(1, 0, 2), QuadScalar(0, 0, 2)
    phys = [(one, zero), (r, r), (zero, one), (-r, r)]
    intl = [(one, zero), (-r, r), (zero, -one), (r, r)]
    half = [sum((g[i] for g in intl), zero) / 2 for i in range(2)]
    offset = (shift[0] - half[0], shift[1] - half[1])
    window = zonotope_window(intl, offset)
    pi1 = tuple(tuple(p[i] for p in phys) for i in range(2))
    pi2 = tuple(tuple(p[i] for p in intl) for i in range(2))
    basis = tuple(tuple(F(int(i == j)) for j in range(4)) for i in range(4))
    return Scheme(basis, pi1, pi2, window, "ammann-beenker").with_injectivity(2)


def fibonacci(shift=F(1, 7)) -> Scheme:
    tau = QuadScalar(F(1, 2), F(1, 2), 5)
    tau_c = tau.conjugate()
    one = QuadScalar(1, 0, 5)
    pi1 = ((one, tau),)
    pi2 = ((one, tau_c),)
    lo, hi = -1 + shift, tau - 1 + shift
    window = HPolytope((((one,), one * hi), ((-one,), -(one * lo))))
    basis = ((F(1), F(0)), (F(0), F(1)))
    return Scheme(basis, pi1, pi2, window, "fibonacci").with_injectivity(3)


PENROSE_SHIFT = (F(1, 10), F(2, 10), F(3, 10), F(-1, 4), F(-7, 20))


def penrose_debruijn(precision: int = DEFAULT_PRECISION, shift=PENROSE_SHIFT) -> Scheme:
    """Z^5 cut and projected with the standard pentagrid directions.

    The internal space is spanned by the second pentagonal star and the
    diagonal direction (kept unnormalized, so its coordinate is ``sum c_i``);
    the window is the projected shifted unit 5-cube.  Lattice points only
    reach four planes of it, which does not matter for the bound.
    """
    two_pi_5 = cert_pi(precision) * 2 / 5
    from mpmath import libmp

    def cs(x: CertFloat):
        # cos/sin enclosures from mpmath at extra precision, widened by one ulp
        out = []
        for fn in (libmp.mpf_cos, libmp.mpf_sin):
            lo = fn(x.lo, precision + 20, "f")
            hi = fn(x.hi, precision + 20, "c")
            a, b = (lo, hi) if libmp.mpf_le(lo, hi) else (hi, lo)
            mid = CertFloat.interval(CertFloat._raw(a, a, precision + 20),
                                     CertFloat._raw(b, b, precision + 20), precision)
            out.append(mid + CertFloat(0, F(1, 1 << (precision - 4)), precision))
        return out

    phys, intl = [], []
    for j in range(5):
        c1, s1 = cs(two_pi_5 * j)
        c2, s2 = cs(two_pi_5 * (2 * j))
        phys.append((c1, s1))
        intl.append((c2, s2, CertFloat(1, prec=precision)))
    offset = tuple(sum((intl[j][i] * shift[j] for j in range(5)), CertFloat(0, prec=precision))
                   for i in range(3))
    window = zonotope_window(intl, offset)
    pi1 = tuple(tuple(p[i] for p in phys) for i in range(2))
    pi2 = tuple(tuple(p[i] for p in intl) for i in range(3))
    basis = tuple(tuple(F(int(i == j)) for j in range(5)) for i in range(5))
    return Scheme(basis, pi1, pi2, window, "penrose-debruijn").with_injectivity(1)


def extend_6crystal_on_arc(base: Crystal, extra: int) -> Crystal:
    """Add ``extra`` translates on a rational circular arc bulging right of the
    chord from (13/10, 8/10) down to (13/10, 5/10).

    The circle has center (1, 13/20); points come from the rational
    parametrization by lines through (13/10, 8/10) with slopes in (-10, -2),
    which land strictly inside the arc.
    """
    if extra < 0:
        raise ValueError("extra must be nonnegative")
    if extra == 0:
        return base
    top = (F(13, 10), F(8, 10))
    center = (F(1), F(13, 20))
    rel = (top[0] - center[0], top[1] - center[1])
    pts = []
    for j in range(extra):
        s = -2 - F(8 * (j + 1), extra + 1)
        t = -2 * (rel[0] + rel[1] * s) / (1 + s * s)
        if t <= 0:
            raise ArcExhausted("arc parametrization degenerated")
        pts.append((top[0] + t, top[1] + t * s))
    ts = list(base.translates) + pts
    try:
        return Crystal(base.lattice, tuple(ts), f"{base.name}+arc{extra}")
    except CrystalError as exc:
        raise ArcExhausted(str(exc)) from exc


def arc_polygon(extra: int) -> list:
    """Vertices of the (12 + extra)-gon of :func:`extend_6crystal_on_arc`, clockwise."""
    verts = [_q(*v) for v in TWELVE_GON]
    if extra == 0:
        return verts
    C = extend_6crystal_on_arc(_crystal(SIX_TRANSLATES, "paper-6crystal"), extra)
    arc = [tuple(t) for t in C.translates[6:]]
    # translates were reduced mod Z^2; move them back next to the chord
    arc = [(x + 1, y) if x < 1 else (x, y) for x, y in arc]
    arc.sort(key=lambda p: -p[1])
    i = verts.index(_q("13/10", "8/10"))
    return verts[: i + 1] + arc + verts[i + 1:]


# ---------------------------------------------------------------------------
# config files and export

def _parse_matrix(rows, prec):
    return tuple(tuple(parse_scalar(v, prec) for v in r) for r in rows)


def load_source(source, precision: int = DEFAULT_PRECISION):
    """Crystal or scheme from a config dict (or a path to a JSON file).

    Crystal: ``{"kind": "crystal", "basis": [[...]], "translates": [[...]]}``.
    Scheme: ``{"kind": "scheme", "lattice": [[...]], "pi1": [[...]],
    "pi2": [[...]], "window": [{"normal": [...], "offset": ...}]}``.
    Scalars are strings such as ``"3/10"``, ``"1+1*sqrt(2)"`` or
    ``{"value": ..., "radius": ...}``.
    """
    if isinstance(source, str):
        with open(source) as fh:
            source = json.load(fh)
    prec = int(source.get("precision", precision))
    kind = source.get("kind")
    name = source.get("name", kind or "config")
    if kind == "crystal":
        return Crystal.make(_parse_matrix(source["basis"], prec),
                            _parse_matrix(source["translates"], prec), name)
    if kind == "scheme":
        hs = tuple((tuple(parse_scalar(v, prec) for v in h["normal"]), parse_scalar(h["offset"], prec))
                   for h in source["window"])
        S = Scheme(_parse_matrix(source["lattice"], prec), _parse_matrix(source["pi1"], prec),
                   _parse_matrix(source["pi2"], prec), HPolytope(hs), name)
        return S.with_injectivity(int(source.get("injectivity_radius", 2)))
    raise ValueError(f"unknown source kind {kind!r}")


def _prov_str(p) -> str:
    if isinstance(p, tuple):
        return " ".join(str(v) for v in p)
    return str(p)


def patch_to_csv(patch: Patch, which: str = "points") -> str:
    rows = patch.points if which == "points" else patch.uncertain
    d = patch.region.dim
    names = ["x", "y", "z"][:d] if d <= 3 else [f"x{i}" for i in range(d)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names + ["provenance"])
    for p, prov in rows:
        w.writerow([format_scalar(v) for v in p] + [_prov_str(prov)])
    return buf.getvalue()


def patch_to_json(patch: Patch) -> dict:
    src = patch.source
    return {
        "source": getattr(src, "name", str(src)),
        "region": {"lo": [format_scalar(v) for v in patch.region.lo],
                   "hi": [format_scalar(v) for v in patch.region.hi]},
        "count": len(patch.points),
        "points": [{"coords": [format_scalar(v) for v in p],
                    "provenance": list(prov) if isinstance(prov, tuple) else prov}
                   for p, prov in patch.points],
        "uncertain": [{"coords": [format_scalar(v) for v in p], "provenance": list(prov)}
                      for p, prov in patch.uncertain],
    }
