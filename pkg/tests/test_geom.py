from __future__ import annotations

import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crystalhelly.geom import (
    Box,
    DimensionMismatch,
    FacetIndexOutOfRange,
    HPolytope,
    Membership,
    UnboundedRegion,
    convex_hull_2d,
    hpolytope_vertices,
    is_bounded,
    lattice_points_in_polytope,
    orientation2d,
    point,
    point_in_hull,
    point_in_hull_lp,
    polygon,
    relative_interior_of_facet_contains,
    vpolytope,
)
from crystalhelly.numeric import CertFloat, QuadScalar, UncertainPredicate
from crystalhelly.pointsets import TWELVE_GON

import oracles

TWELVE = [point(*v) for v in TWELVE_GON]
UNIT_SQUARE = polygon([point(0, 0), point(1, 0), point(1, 1), point(0, 1)])

small_q = st.fractions(min_value=-6, max_value=6, max_denominator=5)
pts2 = st.tuples(small_q, small_q)


class TestOrientation:
    def test_examples(self):
        assert orientation2d(point(0, 0), point(1, 0), point(1, 1)) == 1
        assert orientation2d(point(0, 0), point(1, 0), point(2, 0)) == 0
        assert orientation2d(point(0, 0), point("3/10", "5/10"), point("6/10", "8/10")) == -1

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            orientation2d(point(0, 0, 0), point(1, 0), point(1, 1))

    def test_certfloat_uncertain(self):
        eps = CertFloat(0, F(1, 10 ** 6))
        assert orientation2d((CertFloat(0), CertFloat(0)), (CertFloat(1), CertFloat(0)),
                             (CertFloat(2), eps)) is None

    @settings(max_examples=300, deadline=None)
    @given(pts2, pts2, pts2)
    def test_antisymmetry(self, p, q, r):
        s = orientation2d(p, q, r)
        assert orientation2d(q, p, r) == -s
        assert orientation2d(p, r, q) == -s
        assert orientation2d(r, q, p) == -s


class TestHull:
    def test_square_with_center(self):
        h = convex_hull_2d([point(0, 0), point(1, 0), point(0, 1), point(1, 1), point("1/2", "1/2")])
        assert h.dim == 2 and len(h.vertices) == 4

    def test_twelve_gon(self):
        h = convex_hull_2d(TWELVE)
        assert len(h.vertices) == 12 and set(h.vertices) == set(TWELVE)

    def test_collinear(self):
        h = convex_hull_2d([point(0, 0), point(1, 0), point(2, 0)])
        assert h.dim == 1 and set(h.vertices) == {point(0, 0), point(2, 0)}

    def test_ccw_from_lowest(self):
        h = convex_hull_2d([point(2, 1), point(0, 1), point(1, 0), point(1, 2)])
        assert h.vertices[0] == point(1, 0)
        vs = h.vertices
        assert all(orientation2d(vs[i], vs[(i + 1) % 4], vs[(i + 2) % 4]) == 1 for i in range(4))

    def test_uncertain_raises(self):
        a = (CertFloat(0), CertFloat(0))
        b = (CertFloat(1), CertFloat(0))
        c = (CertFloat(2), CertFloat(0, F(1, 10 ** 9)))
        with pytest.raises(UncertainPredicate):
            convex_hull_2d([a, b, c, (CertFloat(1), CertFloat(1))])

    def test_quadratic_field(self):
        r = QuadScalar(0, F(1, 2), 2)
        z, o = QuadScalar(0, 0, 2), QuadScalar(1, 0, 2)
        octagon = [(o, z), (r, r), (z, o), (-r, r), (-o, z), (-r, -r), (z, -o), (r, -r)]
        assert len(convex_hull_2d(octagon + [(z, z)]).vertices) == 8

    @settings(max_examples=150, deadline=None)
    @given(st.lists(pts2, min_size=3, max_size=12))
    def test_matches_gift_wrap(self, pts):
        h = convex_hull_2d(pts)
        if h.dim == 2:
            assert set(h.vertices) == set(oracles.gift_wrap(pts))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(pts2, min_size=3, max_size=10), st.randoms(use_true_random=False))
    def test_permutation_and_unimodular_invariance(self, pts, rnd):
        h = convex_hull_2d(pts)
        shuffled = list(pts)
        rnd.shuffle(shuffled)
        assert set(convex_hull_2d(shuffled).vertices) == set(h.vertices)
        a, b, c, d = rnd.choice([(1, 1, 0, 1), (2, 1, 1, 1), (0, 1, -1, 0), (1, 0, 3, 1)])
        t = (F(rnd.randint(-3, 3)), F(rnd.randint(-3, 3)))

        def m(p):
            return (a * p[0] + b * p[1] + t[0], c * p[0] + d * p[1] + t[1])

        assert set(convex_hull_2d([m(p) for p in pts]).vertices) == {m(v) for v in h.vertices}


class TestPointInHull:
    def test_examples(self):
        assert point_in_hull(UNIT_SQUARE, point("1/2", "1/2"), "closed") is Membership.IN
        assert point_in_hull(UNIT_SQUARE, point(1, "1/2"), "open") is Membership.OUT
        assert point_in_hull(UNIT_SQUARE, point(1, "1/2"), "closed") is Membership.IN
        assert point_in_hull(polygon(TWELVE), point(1, 1), "closed") is Membership.OUT

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            point_in_hull(UNIT_SQUARE, point(0, 0), "half-open")

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            point_in_hull(UNIT_SQUARE, point(0, 0, 0))

    def test_cube_lp(self):
        cube = vpolytope([point(*c) for c in itertools.product((0, 1), repeat=3)])
        assert point_in_hull(cube, point("1/2", "1/2", "1/2"), "open") is Membership.IN
        assert point_in_hull(cube, point(1, "1/2", "1/2"), "open") is Membership.OUT
        assert point_in_hull(cube, point(1, "1/2", "1/2"), "closed") is Membership.IN
        assert point_in_hull(cube, point(2, 0, 0), "closed") is Membership.OUT

    def test_negative_coordinates_lp(self):
        # rows with negative right-hand side must not break the starting basis
        verts = [point(-1, -1), point(2, -1), point(-1, 2)]
        assert point_in_hull_lp(verts, point(-1, "-1/2")) is Membership.IN
        assert point_in_hull_lp(verts, point(-2, 0)) is Membership.OUT

    def test_six_dimensional(self):
        simplex = [tuple(F(int(i == j)) for j in range(6)) for i in range(6)] + [tuple([F(0)] * 6)]
        P = vpolytope(simplex)
        assert point_in_hull(P, tuple([F(1, 7)] * 6), "open") is Membership.IN
        assert point_in_hull(P, tuple([F(1, 5)] * 6), "closed") is Membership.OUT

    @settings(max_examples=150, deadline=None)
    @given(st.lists(pts2, min_size=3, max_size=7), pts2)
    def test_agrees_with_bruteforce(self, pts, x):
        h = convex_hull_2d(pts)
        expect = oracles.in_closed_hull_any(pts, x)
        assert (point_in_hull(h, x, "closed") is Membership.IN) == expect
        if h.dim == 2:
            assert (point_in_hull_lp(list(h.vertices), x, "closed") is Membership.IN) == expect


class TestFacets:
    def test_examples(self):
        bottom = [i for i, v in enumerate(UNIT_SQUARE.vertices)
                  if v == point(0, 0)][0]
        assert relative_interior_of_facet_contains(UNIT_SQUARE, bottom, point("1/2", 0))
        assert not relative_interior_of_facet_contains(UNIT_SQUARE, bottom, point(0, 0))
        assert not relative_interior_of_facet_contains(UNIT_SQUARE, bottom, point("1/2", "1/10"))

    def test_out_of_range(self):
        with pytest.raises(FacetIndexOutOfRange):
            relative_interior_of_facet_contains(UNIT_SQUARE, 4, point(0, 0))


class TestLatticePoints:
    Z2 = [[F(1), F(0)], [F(0), F(1)]]

    def test_unit_square(self):
        assert len(lattice_points_in_polytope(self.Z2, UNIT_SQUARE)) == 4

    def test_half_area_triangle(self):
        tri = polygon([point(0, 0), point(1, 0), point(1, 1)])
        assert len(lattice_points_in_polytope(self.Z2, tri)) == 3

    def test_twelve_gon_integer_points(self):
        assert lattice_points_in_polytope(self.Z2, polygon(TWELVE)) == [(0, 0), (1, 0)]

    def test_unbounded(self):
        half = HPolytope(((((F(1), F(0))), F(0)),))
        assert not is_bounded(half)
        with pytest.raises(UnboundedRegion):
            lattice_points_in_polytope(self.Z2, half)

    def test_hpolytope_triangle(self):
        H = HPolytope((((F(-1), F(0)), F(0)), ((F(0), F(-1)), F(0)), ((F(1), F(1)), F(3))))
        assert is_bounded(H)
        assert len(lattice_points_in_polytope(self.Z2, H)) == 10
        assert len(hpolytope_vertices(H)) == 3

    def test_skew_basis(self):
        basis = [[F(2), F(1)], [F(0), F(3)]]
        got = lattice_points_in_polytope(basis, Box((F(0), F(0)), (F(6), F(6))))
        naive = sorted((a, b) for a in range(-10, 10) for b in range(-10, 10)
                       if 0 <= 2 * a <= 6 and 0 <= a + 3 * b <= 6)
        assert got == naive

    def test_boxes_against_double_loop(self):
        rng = random.Random(3)
        for _ in range(40):
            x0, y0 = F(rng.randint(-100, 100), rng.randint(1, 7)), F(rng.randint(-100, 100), rng.randint(1, 7))
            w, h = F(rng.randint(0, 50 * 4), 4), F(rng.randint(0, 50 * 4), 4)
            box = Box((x0, y0), (x0 + w, y0 + h))
            got = lattice_points_in_polytope(self.Z2, box)
            naive = [(a, b) for a in range(-110, 160) for b in range(-110, 160)
                     if x0 <= a <= x0 + w and y0 <= b <= y0 + h]
            assert got == sorted(naive)


def test_box_parse_and_shrink():
    b = Box.parse("-2,-2,3,3")
    assert b.lo == (F(-2), F(-2)) and b.hi == (F(3), F(3))
    assert b.shrink(1) == Box.parse("-1,-1,2,2")
    with pytest.raises(ValueError):
        Box.parse("1,2,3")
    with pytest.raises(ValueError):
        Box((F(1),), (F(0),))
