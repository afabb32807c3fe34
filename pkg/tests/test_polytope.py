from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from toricna.errors import EmptyPolytopeError, InfeasibleError, InputError, UnboundedError
from toricna.polytope import (MomentPolytope, RationalPolytope, boundary_integral, minkowski_sum,
                              mixed_volume, polytope_contains, volume)
from toricna.simplex import lp_minimize

SQUARE = RationalPolytope([(0, 0), (1, 0), (0, 1), (1, 1)])
SEG = RationalPolytope([(0, 0), (1, 0)])


def test_volume_examples():
    assert volume(RationalPolytope([(0,), (1,)])) == 1
    assert volume(RationalPolytope([(0, 0), (1, 0), (0, 1)])) == Fr(1, 2)
    assert volume(RationalPolytope([(0,), (1,)]).scale(3)) == 3
    assert volume(SEG) == 0


def test_empty_polytope():
    with pytest.raises(EmptyPolytopeError, match="empty polytope"):
        RationalPolytope([])


def test_boundary_integral_examples():
    P = MomentPolytope.interval(0, 1)
    assert boundary_integral(P, 1) == 2
    assert boundary_integral(P, (1, 0)) == 1
    assert boundary_integral(MomentPolytope([(0, 0), (1, 0), (0, 1), (1, 1)]), 1) == 4


def test_boundary_integral_numeric_fallback_is_flagged():
    sq = MomentPolytope([(0, 0), (1, 0), (0, 1), (1, 1)])
    v = boundary_integral(sq, lambda y: y[..., 0] ** 2)
    assert v.numeric
    # two vertical sides give 0 and 1, two horizontal ones 1/3 each
    assert abs(v - (1 + 2 / 3)) < 1e-12


def test_mean_scalar():
    assert MomentPolytope.interval(0, 1).meanS == 2
    # triangle of P^2: lattice perimeter 3, area 1/2
    assert MomentPolytope([(0, 0), (1, 0), (0, 1)]).meanS == 6


def test_mixed_volume_examples():
    assert mixed_volume([RationalPolytope([(0,), (1,)])]) == 1
    assert mixed_volume([SQUARE, SQUARE]) == 1
    assert mixed_volume([SQUARE, SEG]) == Fr(1, 2)
    with pytest.raises(InputError):
        mixed_volume([SQUARE, RationalPolytope([(0,), (1,)])])


def test_lp_examples():
    assert lp_minimize([1], [([1], ">=", 3)])[0] == 3
    assert lp_minimize([1, 1], [([1, 0], ">=", 0), ([0, 1], ">=", 0), ([1, 1], ">=", 1)])[0] == 1
    with pytest.raises(InfeasibleError, match="infeasible"):
        lp_minimize([1], [([1], ">=", 2), ([1], "<=", 1)])
    with pytest.raises(UnboundedError, match="unbounded"):
        lp_minimize([1], [([1], "<=", 1)])


def test_contains_examples():
    big = RationalPolytope([(-1,), (1,)])
    pt = RationalPolytope([(1,)])
    assert polytope_contains(big, pt)
    assert not polytope_contains(pt, big)
    sq = RationalPolytope([(-1, -1), (1, -1), (-1, 1), (1, 1)])
    diamond = RationalPolytope([(1, 0), (0, 1), (-1, 0), (0, -1)])
    assert polytope_contains(sq, diamond)
    assert not polytope_contains(diamond, sq)


small = st.integers(-3, 3)
points2 = st.lists(st.tuples(small, small), min_size=3, max_size=6)


def _poly(pts):
    Q = RationalPolytope(pts)
    return Q


@given(points2, points2)
def test_mixed_volume_symmetric_and_diagonal(a, b):
    A, B = _poly(a), _poly(b)
    assert mixed_volume([A, B]) == mixed_volume([B, A])
    assert mixed_volume([A, A]) == volume(A)
    # vol(A + B) = vol A + 2 MV(A, B) + vol B
    assert volume(minkowski_sum(A, B)) == volume(A) + 2 * mixed_volume([A, B]) + volume(B)


@given(points2, points2, points2)
def test_mixed_volume_multilinear(a, b, c):
    A, B, C = _poly(a), _poly(b), _poly(c)
    assert mixed_volume([minkowski_sum(A, B), C]) == mixed_volume([A, C]) + mixed_volume([B, C])


@given(st.lists(st.tuples(small, small, small), min_size=4, max_size=6))
def test_mixed_volume_diagonal_3d(pts):
    A = _poly(pts)
    assert mixed_volume([A, A, A]) == volume(A)


@given(points2, points2)
def test_contains_both_ways_iff_equal(a, b):
    A, B = _poly(a), _poly(b)
    both = polytope_contains(A, B) and polytope_contains(B, A)
    assert both == (set(A.vertices) == set(B.vertices))
