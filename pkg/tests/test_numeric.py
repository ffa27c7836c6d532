from __future__ import annotations

import pickle
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crystalhelly.numeric import (
    UNCERTAIN,
    BackendMismatch,
    CertFloat,
    DivisionByZero,
    QuadScalar,
    UncertainDivisor,
    UncertainPredicate,
    cert_pi,
    cert_sqrt,
    cert_to_json,
    format_scalar,
    parse_scalar,
    scalar_arith,
    scalar_ceil,
    scalar_floor,
    scalar_sign,
)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=60)


def quads(D=2):
    return st.builds(lambda a, b: QuadScalar(a, b, D), rationals, rationals)


class TestSign:
    def test_rational(self):
        assert scalar_sign(F(-3, 10)) == -1
        assert scalar_sign(F(0)) == 0

    def test_sqrt2_minus_one(self):
        assert scalar_sign(QuadScalar(-1, 1, 2)) == 1

    def test_straddling_interval(self):
        assert scalar_sign(CertFloat(1e-40, 1e-30)) is UNCERTAIN

    def test_exact_zero_interval(self):
        assert scalar_sign(CertFloat(0)) == 0

    @pytest.mark.parametrize("a,b,D,expected", [
        (3, -2, 2, 1),      # 3 - 2.828
        (-3, 2, 2, -1),
        (1, -1, 5, -1),
        (0, 0, 7, 0),
        (F(7, 5), -1, 2, -1),
        (F(3, 2), -1, 2, 1),
    ])
    def test_quad_signs(self, a, b, D, expected):
        assert QuadScalar(a, b, D).sign() == expected


class TestArith:
    def test_rational_sum(self):
        assert scalar_arith(F(3, 10), F(5, 10), "+") == F(4, 5)

    def test_conjugate_product(self):
        r = scalar_arith(QuadScalar(1, 1, 2), QuadScalar(1, -1, 2), "*")
        assert (r.a, r.b) == (-1, 0)

    def test_coordinate_difference(self):
        assert scalar_arith(F(13, 10), F(9, 10), "-") == F(2, 5)

    def test_backend_mismatch(self):
        with pytest.raises(BackendMismatch):
            scalar_arith(QuadScalar(1, 1, 2), QuadScalar(1, 1, 3), "+")
        with pytest.raises(BackendMismatch):
            scalar_arith(QuadScalar(1, 1, 2), CertFloat(1), "*")

    def test_division_errors(self):
        with pytest.raises(DivisionByZero):
            scalar_arith(F(1), F(0), "/")
        with pytest.raises(DivisionByZero):
            scalar_arith(QuadScalar(1, 1, 2), QuadScalar(0, 0, 2), "/")
        with pytest.raises(UncertainDivisor):
            scalar_arith(CertFloat(1), CertFloat(0, F(1, 100)), "/")

    def test_square_free_required(self):
        with pytest.raises(ValueError):
            QuadScalar(1, 1, 8)

    def test_quad_inverse(self):
        x = QuadScalar(F(1, 2), F(1, 2), 5)
        assert x * x.inverse() == 1
        # golden ratio identity tau^2 = tau + 1
        assert x * x == x + 1

    def test_floor_ceil(self):
        s2 = QuadScalar(0, 1, 2)
        assert scalar_floor(s2) == 1 and scalar_ceil(s2) == 2
        assert scalar_floor(-s2) == -2
        assert scalar_floor(QuadScalar(3, 0, 2)) == 3 == scalar_ceil(QuadScalar(3, 0, 2))


@settings(max_examples=400, deadline=None)
@given(quads(), quads(), quads())
def test_field_axioms_quad(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x and x * y == y * x


@settings(max_examples=400, deadline=None)
@given(rationals, rationals, rationals)
def test_field_axioms_rational(x, y, z):
    assert x * (y + z) == x * y + x * z


def test_field_axioms_bulk():
    rng = random.Random(7)

    def rq():
        return F(rng.randint(-40, 40), rng.randint(1, 30))

    for _ in range(10_000):
        x, y, z = (QuadScalar(rq(), rq(), 3) for _ in range(3))
        assert x * (y + z) == x * y + x * z
        assert (x + y) + z == x + (y + z)


@settings(max_examples=400, deadline=None)
@given(quads(5), quads(5))
def test_sign_multiplicative(x, y):
    assert scalar_sign(x * y) == scalar_sign(x) * scalar_sign(y)


@settings(max_examples=300, deadline=None)
@given(quads(2))
def test_quad_sign_matches_float(x):
    v = float(x.a) + float(x.b) * 2 ** 0.5
    if abs(v) > 1e-9:
        assert scalar_sign(x) == (1 if v > 0 else -1)


def test_certfloat_soundness_random_dags():
    """Mirror exact expressions in certified floats; the interval must keep the exact value."""
    rng = random.Random(11)
    for _ in range(200):
        exact = [F(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(4)]
        cert = [CertFloat(v, prec=60) for v in exact]
        for _ in range(20):
            i, j = rng.randrange(len(exact)), rng.randrange(len(exact))
            op = rng.choice("+-*/")
            if op == "/" and exact[j] == 0:
                op = "+"
            e = scalar_arith(exact[i], exact[j], op)
            try:
                c = scalar_arith(cert[i], cert[j], op)
            except UncertainDivisor:
                continue
            if abs(e) > 10 ** 6:
                continue
            exact.append(e)
            cert.append(c)
            assert c.contains(e)


def test_cert_sqrt_and_pi():
    r = cert_sqrt(2)
    assert (r * r).contains(2)
    assert r > F(14142135623730950488, 10 ** 19) and r < F(14142135623730950489, 10 ** 19)
    pi = cert_pi()
    assert pi > F(314159265358979323846, 10 ** 20) and pi < F(314159265358979323847, 10 ** 20)
    assert float(pi.radius) < 1e-25


def test_certfloat_comparisons():
    a, b = CertFloat(1), CertFloat(2)
    assert a < b and b > a
    with pytest.raises(UncertainPredicate):
        _ = CertFloat(1, F(1, 10)) < CertFloat(F(21, 20))


def test_pickle_roundtrip():
    for x in (QuadScalar(1, F(2, 3), 2), CertFloat(F(1, 3), F(1, 10 ** 20))):
        y = pickle.loads(pickle.dumps(x))
        assert y == x


@pytest.mark.parametrize("x", [F(3, 10), F(-7), QuadScalar(F(1, 2), F(-3, 4), 5), QuadScalar(0, 1, 2)])
def test_format_parse_roundtrip(x):
    assert parse_scalar(format_scalar(x)) == x


def test_serialization_formats():
    assert format_scalar(F(3, 10)) == "3/10"
    assert format_scalar(QuadScalar(1, 1, 2)) == "1+1*sqrt(2)"
    assert "±" in format_scalar(CertFloat(F(1, 3), F(1, 10 ** 10)))
    j = cert_to_json(CertFloat(F(1, 3), F(1, 10 ** 10)))
    back = parse_scalar(j)
    assert back.contains(F(1, 3))
