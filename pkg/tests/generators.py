"""Seeded random inputs shared by several test modules."""

from __future__ import annotations

from fractions import Fraction as F

from crystalhelly.geom import Box
from crystalhelly.pointsets import Crystal, Lattice, crystal_points_in_box

Z2_BASIS = Lattice.standard(2).basis


def random_crystal(rng, k, denominator=None):
    den = denominator or rng.choice([2, 3, 4, 5, 10])
    ts = {(F(0), F(0))}
    while len(ts) < k:
        ts.add((F(rng.randrange(den), den), F(rng.randrange(den), den)))
    return Crystal.make(Z2_BASIS, sorted(ts), name=f"random-{k}")


def random_patch(rng, limit=20, k=None):
    """A saturated patch of a random 1-, 2- or 3-crystal with at most ``limit`` points."""
    while True:
        S = random_crystal(rng, k or rng.randint(1, 3))
        w, h = F(rng.randint(4, 12), 4), F(rng.randint(4, 12), 4)
        x0, y0 = F(rng.randint(-8, 8), 4), F(rng.randint(-8, 8), 4)
        P = crystal_points_in_box(S, Box((x0, y0), (x0 + w, y0 + h)))
        if 3 <= len(P) <= limit:
            return S, P


def random_polygon(rng, center, reach=2, denominator=3):
    """Vertices of a random rational convex polygon near ``center``: one
    corner per quadrant around a jittered middle, plus an optional fifth."""
    from crystalhelly.geom import convex_hull_2d

    def r(lo=0):
        return F(rng.randint(lo, reach * denominator), denominator)

    while True:
        mx = center[0] + F(rng.randint(-denominator, denominator), denominator)
        my = center[1] + F(rng.randint(-denominator, denominator), denominator)
        pts = [(mx + r(1), my + r()), (mx - r(), my + r(1)), (mx - r(1), my - r()), (mx + r(), my - r(1))]
        if rng.random() < 0.5:
            pts.append((mx + r(), my + r()))
        hull = convex_hull_2d(pts)
        if hull.dim == 2:
            return list(hull.vertices)
