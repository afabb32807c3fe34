from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, strategies as st

from toricna.errors import InputError
from toricna.gitweights import (LogNormFunction, TensorVector, WeightedVector, bergman_map,
                                bergman_weight_vector, bounded_below_fan, bounded_below_torus,
                                conjugated_probe, conjugation_defect, fNA, ricci_bound_check,
                                sup_distance, support_function, slope_vs_fNA)
from toricna.nonarchimedean import make_config, sup_phi
from toricna.potentials import LSEPotential

V = WeightedVector([[1], [-1]])
PLUS = WeightedVector([[1]])
MINUS = WeightedVector([[-1]])


def sl2():
    # log|g e1| - log|g e2| on the diagonal torus
    return LogNormFunction([(1, PLUS), (-1, MINUS)])


def test_support_function():
    assert support_function(V, 3) == 3
    assert support_function(V, 0) == 0
    with pytest.raises(InputError):
        support_function(WeightedVector([[1, 0]]), (1,))


def test_fna_examples():
    assert fNA(sl2(), 1) == -2
    assert fNA(LogNormFunction([(1, V), (-1, V)]), 5) == 0
    f = LogNormFunction([(1, V), (-1, PLUS)])
    assert fNA(f, 1) == 2 and fNA(f, -1) == 0


def test_numeric_slopes():
    r = slope_vs_fNA(sl2(), 1)
    assert r["pass"] and abs(r["numeric"] + 2) <= 1e-3
    assert abs(slope_vs_fNA(LogNormFunction([(1, V), (-1, V)]), 1)["numeric"]) <= 1e-6


def test_norm_choice_irrelevant():
    f = LogNormFunction([(1, WeightedVector([[2, -1], [0, 1], [-1, 0]], [1, 3, 0.5])),
                         (-1, WeightedVector([[1, 1]]))])
    for lam in [(1, 0), (0, -1), (2, 3)]:
        a, b = slope_vs_fNA(f, lam, norm="l2"), slope_vs_fNA(f, lam, norm="max")
        assert a["exact"] == b["exact"] and a["pass"] and b["pass"]


def test_bounded_examples():
    assert bounded_below_torus(LogNormFunction([(1, V), (-1, PLUS)]))
    ok, lam = bounded_below_torus(LogNormFunction([(1, PLUS), (-1, MINUS)]), witness=True)
    assert not ok and lam == (1,) and fNA(sl2(), lam) < 0
    assert bounded_below_torus(LogNormFunction([(1, V), (-1, V)]))


def test_clear_denominators():
    with pytest.raises(InputError, match="clear denominators"):
        LogNormFunction([(float("nan"), V)])
    with pytest.raises(InputError, match="clear denominators"):
        LogNormFunction([("sqrt(2)", V)])
    f = LogNormFunction([(Fr(1, 2), V), (Fr(-1, 3), PLUS)])
    assert bounded_below_torus(f) == bounded_below_fan(f)


ws = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=4)


@given(ws, ws, st.integers(1, 3), st.integers(1, 3))
def test_two_decisions_agree(a, b, p, q):
    f = LogNormFunction([(Fr(p, 2), WeightedVector(a)), (-Fr(q, 2), WeightedVector(b))])
    ok = bounded_below_torus(f)
    assert ok == bounded_below_fan(f)
    if not ok:
        _, lam = bounded_below_torus(f, witness=True)
        assert fNA(f, lam) < 0


@given(ws, ws, st.tuples(st.integers(-4, 4), st.integers(-4, 4)), st.integers(1, 5))
def test_homogeneous_and_additive(a, b, lam, d):
    va, vb = WeightedVector(a), WeightedVector(b)
    f, g = LogNormFunction([(1, va)]), LogNormFunction([(-2, vb)])
    fg = LogNormFunction([(1, va), (-2, vb)])
    assert fNA(fg, lam) == fNA(f, lam) + fNA(g, lam)
    assert fNA(fg, tuple(d * x for x in lam)) == d * fNA(fg, lam)


def _sl3_terms(rng):
    def vec():
        return TensorVector([rng.standard_normal(3) for _ in range(int(rng.integers(1, 3)))])
    return [(1, vec()), (-1, vec())]


@pytest.mark.parametrize("seed", range(10))
def test_sl3_numeric_slopes(seed):
    rng = np.random.default_rng(seed)
    f = LogNormFunction([(a, v.weighted()) for a, v in _sl3_terms(rng)])
    lam = tuple(int(x) for x in rng.integers(-3, 4, 2))
    lam = lam + (-sum(lam),)
    assert slope_vs_fNA(f, lam)["pass"]


def test_probe_trivial_and_identity():
    rng = np.random.default_rng(0)
    v = TensorVector([rng.standard_normal(2)])
    r = conjugated_probe([(1, v), (-1, v)], trials=16)
    assert r["stable"] and r["bounded"] and r["trials"] == 16
    terms = [(1, TensorVector([[1, 0]])), (-1, TensorVector([[0, 1]]))]
    r = conjugated_probe(terms, trials=16, seed=1)
    f = LogNormFunction([(a, v.weighted()) for a, v in terms])
    assert r["identity"] == bounded_below_torus(f)
    assert not r["bounded"]


def test_conjugation_unbounded():
    terms = [(1, TensorVector([[1, 0]])), (-1, TensorVector([[1, 0]]))]
    k = np.array([[np.cos(0.3), -np.sin(0.3)], [np.sin(0.3), np.cos(0.3)]])
    num, exact = conjugation_defect(terms, k, (1, -1))
    assert exact == 0
    num2, exact2 = conjugation_defect([(1, TensorVector([[1, 0]])), (-1, TensorVector([[0, 1]]))], k, (1, -1))
    assert exact2 != 0 and abs(num2 - float(exact2)) <= 1e-3


def test_bergman_map(P1):
    u = LSEPotential.fubini_study(P1, 1)
    b1 = bergman_map(u, 1)
    y = np.linspace(0.05, 0.95, 19)
    d = b1.ustar(y) - u.ustar(y)
    assert np.ptp(d) <= 1e-6
    x = np.linspace(-4, 4, 17)
    assert np.allclose(bergman_map(u.shift(0.4), 3).u(x), bergman_map(u, 3).u(x) + 0.4, atol=1e-9)
    dist = [sup_distance(bergman_map(u, m), u) for m in range(1, 9)]
    assert all(x > y for x, y in zip(dist, dist[1:]))


def test_ricci_bound(P1):
    r = ricci_bound_check(LSEPotential.fubini_study(P1, 1))
    assert r["holds"] and r["N"] == 2 and abs(r["max_S"] - 2) <= 1e-6
    rng = np.random.default_rng(4)
    u = LSEPotential.fubini_study(P1, 3)
    assert ricci_bound_check(u.with_log_weights(rng.uniform(-3, 3, 4)))["max_violation"] <= 1e-8
    degenerate = LSEPotential(P1, [0, 1], [0.0, -30.0])
    assert ricci_bound_check(degenerate)["holds"]


def test_bergman_weights_link(P1, hinge):
    for m in (2, 4, 6):
        f = LogNormFunction([(Fr(1, m), bergman_weight_vector(hinge, m))])
        assert fNA(f, 1) == sup_phi(make_config(P1, hinge))
        assert fNA(f, -1) == hinge.max()
