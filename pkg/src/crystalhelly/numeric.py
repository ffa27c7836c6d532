"""Exact scalars with decidable sign, plus certified floating intervals.

Three backends share one informal protocol (``+ - * /``, negation and
:func:`scalar_sign`):

* :class:`Rational` -- :class:`fractions.Fraction` (plain ``int`` is accepted
  anywhere a rational is).
* :class:`QuadScalar` -- ``a + b*sqrt(D)`` with rational ``a``, ``b`` and a
  square-free ``D >= 2``.
* :class:`CertFloat` -- a closed interval with dyadic endpoints rounded
  outward at a configurable mantissa width.

Signs are reported as ``1``, ``0``, ``-1`` or :data:`UNCERTAIN` (``None``).
Exact backends never produce :data:`UNCERTAIN`.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

from mpmath import libmp

Rational = Fraction

UNCERTAIN = None

DEFAULT_PRECISION = 100


class BackendMismatch(TypeError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


class UncertainDivisor(ArithmeticError):
    pass


class UncertainPredicate(ArithmeticError):
    """A sign query on a certified float could not be decided."""


def _is_rational(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def _squarefree(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % (f * f) == 0:
            return False
        f += 1
    return True


def _sign_of_sum_with_root(a: Fraction, b: Fraction, D: int) -> int:
    """Sign of a + b*sqrt(D) (exact)."""
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 with D*b^2
    d = a * a - D * b * b
    return sa if d > 0 else (sb if d < 0 else 0)


class QuadScalar:
    """Element ``a + b*sqrt(D)`` of the real quadratic field Q(sqrt(D))."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a=0, b=0, D: int = 2):
        if not _squarefree(D):
            raise ValueError(f"D must be square-free and >= 2, got {D}")
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "D", int(D))

    def __setattr__(self, name, value):
        raise AttributeError("QuadScalar is immutable")

    def __reduce__(self):
        return (QuadScalar, (self.a, self.b, self.D))

    def _coerce(self, other) -> QuadScalar | None:
        if isinstance(other, QuadScalar):
            if other.D != self.D:
                raise BackendMismatch(f"sqrt({self.D}) vs sqrt({other.D})")
            return other
        if _is_rational(other):
            return QuadScalar(other, 0, self.D)
        if isinstance(other, CertFloat):
            raise BackendMismatch("QuadScalar mixed with CertFloat")
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadScalar(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadScalar(self.a - o.a, self.b - o.b, self.D)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        D = self.D
        return QuadScalar(self.a * o.a + D * self.b * o.b, self.a * o.b + self.b * o.a, D)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def inverse(self) -> QuadScalar:
        norm = self.a * self.a - self.D * self.b * self.b
        if norm == 0:
            # the norm vanishes only at zero since D is not a square
            raise DivisionByZero("division by zero in Q(sqrt(%d))" % self.D)
        return QuadScalar(self.a / norm, -self.b / norm, self.D)

    def conjugate(self) -> QuadScalar:
        return QuadScalar(self.a, -self.b, self.D)

    def __neg__(self):
        return QuadScalar(-self.a, -self.b, self.D)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def sign(self) -> int:
        return _sign_of_sum_with_root(self.a, self.b, self.D)

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare QuadScalar with {type(other).__name__}")
        return (self - o).sign()

    def __eq__(self, other):
        if isinstance(other, QuadScalar):
            return self.D == other.D and self.a == other.a and self.b == other.b
        if _is_rational(other):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.D)

    def __floor__(self) -> int:
        f = math.floor(float(self))
        while (self - f).sign() < 0:
            f -= 1
        while (self - (f + 1)).sign() >= 0:
            f += 1
        return f

    def __ceil__(self) -> int:
        return -math.floor(-self)

    def __repr__(self):
        return f"QuadScalar({self})"

    def __str__(self):
        return format_scalar(self)


# ---------------------------------------------------------------------------
# certified floats

_RND_DOWN = "f"
_RND_UP = "c"


def _mpf_from_rational(q: Fraction, prec: int, rnd: str):
    return libmp.from_rational(q.numerator, q.denominator, prec, rnd)


def _mpf_min(*xs):
    best = xs[0]
    for x in xs[1:]:
        if libmp.mpf_lt(x, best):
            best = x
    return best


def _mpf_max(*xs):
    best = xs[0]
    for x in xs[1:]:
        if libmp.mpf_gt(x, best):
            best = x
    return best


class CertFloat:
    """Closed interval ``[lo, hi]`` known to contain the true real value.

    Endpoints are binary floats with ``prec`` mantissa bits, rounded
    outward after every operation.  An interval that is exactly ``[0, 0]``
    is the exact-zero marker; any other interval containing zero has an
    undecided sign.
    """

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, value=0, radius=0, prec: int = DEFAULT_PRECISION):
        lo, hi = _enclose(value, prec)
        if radius:
            rlo, rhi = _enclose(radius, prec)
            r = _mpf_max(libmp.mpf_abs(rlo), libmp.mpf_abs(rhi))
            lo = libmp.mpf_sub(lo, r, prec, _RND_DOWN)
            hi = libmp.mpf_add(hi, r, prec, _RND_UP)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "prec", int(prec))

    @classmethod
    def _raw(cls, lo, hi, prec: int) -> CertFloat:
        obj = cls.__new__(cls)
        object.__setattr__(obj, "lo", lo)
        object.__setattr__(obj, "hi", hi)
        object.__setattr__(obj, "prec", prec)
        return obj

    @classmethod
    def interval(cls, lo, hi, prec: int = DEFAULT_PRECISION) -> CertFloat:
        a, _ = _enclose(lo, prec)
        _, b = _enclose(hi, prec)
        if libmp.mpf_gt(a, b):
            raise ValueError("empty interval")
        return cls._raw(a, b, prec)

    def __setattr__(self, name, value):
        raise AttributeError("CertFloat is immutable")

    def __reduce__(self):
        return (CertFloat._raw, (self.lo, self.hi, self.prec))

    @property
    def value(self) -> Fraction:
        """Midpoint of the interval (exact dyadic rational)."""
        return (_to_fraction(self.lo) + _to_fraction(self.hi)) / 2

    @property
    def radius(self) -> Fraction:
        return (_to_fraction(self.hi) - _to_fraction(self.lo)) / 2

    def is_exact_zero(self) -> bool:
        return self.lo == libmp.fzero and self.hi == libmp.fzero

    def sign(self):
        if libmp.mpf_sign(self.lo) > 0:
            return 1
        if libmp.mpf_sign(self.hi) < 0:
            return -1
        if self.is_exact_zero():
            return 0
        return UNCERTAIN

    def _coerce(self, other) -> CertFloat | None:
        if isinstance(other, CertFloat):
            return other
        if _is_rational(other):
            return CertFloat(other, prec=self.prec)
        if isinstance(other, QuadScalar):
            raise BackendMismatch("CertFloat mixed with QuadScalar")
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = max(self.prec, o.prec)
        return CertFloat._raw(
            libmp.mpf_add(self.lo, o.lo, p, _RND_DOWN),
            libmp.mpf_add(self.hi, o.hi, p, _RND_UP),
            p,
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = max(self.prec, o.prec)
        return CertFloat._raw(
            libmp.mpf_sub(self.lo, o.hi, p, _RND_DOWN),
            libmp.mpf_sub(self.hi, o.lo, p, _RND_UP),
            p,
        )

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = max(self.prec, o.prec)
        mul = libmp.mpf_mul
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        lo = _mpf_min(*(mul(x, y, p, _RND_DOWN) for x, y in pairs))
        hi = _mpf_max(*(mul(x, y, p, _RND_UP) for x, y in pairs))
        return CertFloat._raw(lo, hi, p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def inverse(self) -> CertFloat:
        s = self.sign()
        if s == 0:
            raise DivisionByZero("division by exact zero")
        if s is UNCERTAIN:
            raise UncertainDivisor("divisor interval contains zero")
        one = libmp.fone
        p = self.prec
        lo = libmp.mpf_div(one, self.hi, p, _RND_DOWN)
        hi = libmp.mpf_div(one, self.lo, p, _RND_UP)
        return CertFloat._raw(lo, hi, p)

    def __neg__(self):
        return CertFloat._raw(libmp.mpf_neg(self.hi), libmp.mpf_neg(self.lo), self.prec)

    def __pos__(self):
        return self

    def __abs__(self):
        s = self.sign()
        if s is not None and s >= 0:
            return self
        if s == -1:
            return -self
        hi = _mpf_max(libmp.mpf_abs(self.lo), libmp.mpf_abs(self.hi))
        return CertFloat._raw(libmp.fzero, hi, self.prec)

    def sqrt(self) -> CertFloat:
        if libmp.mpf_sign(self.lo) < 0:
            raise ValueError("sqrt of a possibly negative interval")
        p = self.prec
        return CertFloat._raw(
            libmp.mpf_sqrt(self.lo, p, _RND_DOWN), libmp.mpf_sqrt(self.hi, p, _RND_UP), p
        )

    def contains(self, q) -> bool:
        """True when the exact rational ``q`` lies in the interval."""
        q = Fraction(q)
        return _to_fraction(self.lo) <= q <= _to_fraction(self.hi)

    def overlaps(self, other: CertFloat) -> bool:
        return not (libmp.mpf_lt(self.hi, other.lo) or libmp.mpf_lt(other.hi, self.lo))

    def __eq__(self, other):
        if isinstance(other, CertFloat):
            return self.lo == other.lo and self.hi == other.hi
        return NotImplemented

    def __hash__(self):
        return hash((self.lo, self.hi))

    def _ordered(self, other) -> int:
        s = (self - other).sign()
        if s is UNCERTAIN:
            raise UncertainPredicate("comparison of overlapping intervals")
        return s

    def __lt__(self, other):
        return self._ordered(other) < 0

    def __le__(self, other):
        return self._ordered(other) <= 0

    def __gt__(self, other):
        return self._ordered(other) > 0

    def __ge__(self, other):
        return self._ordered(other) >= 0

    def __float__(self):
        return libmp.to_float(libmp.mpf_shift(libmp.mpf_add(self.lo, self.hi, self.prec + 2), -1))

    def __floor__(self) -> int:
        return int(libmp.to_int(libmp.mpf_floor(self.lo)))

    def __ceil__(self) -> int:
        return int(libmp.to_int(libmp.mpf_ceil(self.hi)))

    def __repr__(self):
        return f"CertFloat({self})"

    def __str__(self):
        return format_scalar(self)


def _to_fraction(x) -> Fraction:
    man, exp = libmp.to_rational(x)
    return Fraction(int(man), int(exp))


def _enclose(value, prec: int):
    """Outward-rounded enclosure ``(lo, hi)`` of an exact value."""
    if isinstance(value, CertFloat):
        return value.lo, value.hi
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, int):
        return (libmp.from_int(value, prec, _RND_DOWN), libmp.from_int(value, prec, _RND_UP))
    if isinstance(value, float):
        f = Fraction(value)
        return (_mpf_from_rational(f, prec, _RND_DOWN), _mpf_from_rational(f, prec, _RND_UP))
    if isinstance(value, str):
        return (libmp.from_str(value, prec, _RND_DOWN), libmp.from_str(value, prec, _RND_UP))
    if isinstance(value, Fraction):
        return (
            _mpf_from_rational(value, prec, _RND_DOWN),
            _mpf_from_rational(value, prec, _RND_UP),
        )
    if isinstance(value, QuadScalar):
        c = CertFloat(value.a, prec=prec) + CertFloat(value.b, prec=prec) * CertFloat(
            value.D, prec=prec
        ).sqrt()
        return c.lo, c.hi
    raise TypeError(f"cannot enclose {type(value).__name__}")


def cert_sqrt(x, prec: int = DEFAULT_PRECISION) -> CertFloat:
    return CertFloat(x, prec=prec).sqrt()


def cert_pi(prec: int = DEFAULT_PRECISION) -> CertFloat:
    extra = prec + 10
    lo = libmp.mpf_pi(extra, _RND_DOWN)
    hi = libmp.mpf_pi(extra, _RND_UP)
    return CertFloat._raw(
        libmp.mpf_pos(lo, prec, _RND_DOWN), libmp.mpf_pos(hi, prec, _RND_UP), prec
    )


# ---------------------------------------------------------------------------
# generic helpers

Scalar = Union[int, Fraction, QuadScalar, CertFloat]


def scalar_sign(x):
    """Sign of ``x`` as ``1``, ``0``, ``-1`` or :data:`UNCERTAIN`."""
    if _is_rational(x):
        return (x > 0) - (x < 0)
    if isinstance(x, (QuadScalar, CertFloat)):
        return x.sign()
    raise TypeError(f"not a scalar: {type(x).__name__}")


def certain_sign(x) -> int:
    s = scalar_sign(x)
    if s is UNCERTAIN:
        raise UncertainPredicate(f"sign of {x} is undecided")
    return s


def backend_of(x) -> str:
    if _is_rational(x):
        return "rational"
    if isinstance(x, QuadScalar):
        return f"quad{x.D}"
    if isinstance(x, CertFloat):
        return "certfloat"
    raise TypeError(f"not a scalar: {type(x).__name__}")


def is_exact(x) -> bool:
    return not isinstance(x, CertFloat)


def _check_backends(x, y) -> None:
    bx, by = backend_of(x), backend_of(y)
    if bx != by and "rational" not in (bx, by):
        raise BackendMismatch(f"{bx} vs {by}")


def scalar_arith(x, y, op: str):
    """Apply ``op`` (one of ``+ - * /``) to two scalars of one backend.

    Rationals embed into both other backends; anything else mixed raises
    :class:`BackendMismatch`.
    """
    _check_backends(x, y)
    if op == "+":
        return x + y
    if op == "-":
        return x - y
    if op == "*":
        return x * y
    if op == "/":
        s = scalar_sign(y)
        if s == 0:
            raise DivisionByZero("division by zero")
        if s is UNCERTAIN:
            raise UncertainDivisor("divisor sign is undecided")
        if _is_rational(x) and _is_rational(y):
            return Fraction(x) / y
        return x / y
    raise ValueError(f"unknown operation {op!r}")


def scalar_floor(x) -> int:
    if isinstance(x, Fraction):
        return math.floor(x)
    if isinstance(x, int):
        return x
    return math.floor(x)


def scalar_ceil(x) -> int:
    if isinstance(x, Fraction):
        return math.ceil(x)
    if isinstance(x, int):
        return x
    return math.ceil(x)


def to_float(x) -> float:
    return float(x)


# ---------------------------------------------------------------------------
# serialization

def _fmt_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_mpf(x, digits: int = 40) -> str:
    return libmp.to_str(x, digits)


def format_scalar(x) -> str:
    """``p/q`` for rationals, ``a+b*sqrt(D)`` for quadratic, ``v±r`` for certified."""
    if _is_rational(x):
        return _fmt_rational(x)
    if isinstance(x, QuadScalar):
        a = _fmt_rational(x.a)
        b = _fmt_rational(abs(x.b))
        op = "-" if x.b < 0 else "+"
        return f"{a}{op}{b}*sqrt({x.D})"
    if isinstance(x, CertFloat):
        v, r = cert_to_json(x).values()
        return f"{v}±{r}"
    raise TypeError(f"not a scalar: {type(x).__name__}")


def _decimal_up(q: Fraction, sig: int = 6) -> str:
    """Decimal string >= q with ``sig`` significant digits."""
    if q <= 0:
        return "0"
    e = len(str(q.numerator // q.denominator)) - 1 if q >= 1 else -len(str(q.denominator // q.numerator))
    while Fraction(10) ** e > q:
        e -= 1
    while Fraction(10) ** (e + 1) <= q:
        e += 1
    shift = e - sig + 1
    m = math.ceil(q / Fraction(10) ** shift)
    return f"{m}e{shift}"


def cert_to_json(x: CertFloat) -> dict:
    digits = max(20, int(x.prec * 0.302) + 2)
    mid = libmp.mpf_shift(libmp.mpf_add(x.lo, x.hi, x.prec + 2), -1)
    printed = libmp.to_str(mid, digits)
    pm = Fraction(printed)
    # the printed radius covers both the interval and the decimal rounding of the midpoint
    rad = max(_to_fraction(x.hi) - pm, pm - _to_fraction(x.lo))
    return {"value": printed, "radius": _decimal_up(rad)}


_QUAD_TERM = re.compile(
    r"(?P<coef>[+-]?\s*(?:\d+(?:\.\d*)?(?:/\d+)?(?:[eE][+-]?\d+)?)?)\s*\*?\s*sqrt\(\s*(?P<D>\d+)\s*\)"
)


def parse_scalar(text, prec: int = DEFAULT_PRECISION):
    """Inverse of :func:`format_scalar`; also accepts ints, decimals and JSON dicts."""
    if isinstance(text, dict):
        return CertFloat(Fraction(text["value"]), Fraction(text.get("radius", 0)), prec=prec)
    if _is_rational(text):
        return Fraction(text)
    if not isinstance(text, str):
        raise TypeError(f"cannot parse scalar from {type(text).__name__}")
    s = text.strip()
    for sep in ("±", "+/-", "+-"):
        if sep in s:
            v, r = s.split(sep, 1)
            return CertFloat(Fraction(v.strip()), Fraction(r.strip()), prec=prec)
    m = _QUAD_TERM.search(s)
    if m:
        coef = m.group("coef").replace(" ", "")
        if coef in ("", "+"):
            b = Fraction(1)
        elif coef == "-":
            b = Fraction(-1)
        else:
            b = Fraction(coef)
        rest = (s[: m.start()] + s[m.end():]).strip()
        a = Fraction(rest.replace(" ", "")) if rest else Fraction(0)
        return QuadScalar(a, b, int(m.group("D")))
    return Fraction(s)
