import numpy as np
from scipy.special import expit
import pytest
from hypothesis import given, strategies as st

from strategies import random_lse, random_symplectic
from toricna import archimedean as A
from toricna.errors import DomainError, NotAnticanonicalError, NotConvexError
from toricna.potentials import (ConvexFunction1D, LSEPotential, PLTerm, SymplecticPotential,
                                grid_representation, legendre)
from toricna.plfunction import PLConvexFunction

seeds = st.integers(0, 10 ** 6)


def fs(P, m=1):
    return LSEPotential.fubini_study(P, m)


def test_legendre_closed_form():
    u = ConvexFunction1D(lambda x: np.logaddexp(0, x), expit)
    us = legendre(u)
    y = np.array([0.1, 0.3, 0.5, 0.8])
    assert np.allclose(us(y), y * np.log(y) + (1 - y) * np.log(1 - y), atol=1e-10)


def test_legendre_involution(P1):
    u = fs(P1)
    x = np.linspace(-5, 5, 21)
    back = legendre(ConvexFunction1D(u.ustar, u.dustar, domain=(0.0, 1.0)), samples=np.linspace(0.01, 0.99, 99))
    assert np.max(np.abs(back(x) - u.u(x))) <= 1e-7


def test_legendre_rejects_nonconvex():
    bad = ConvexFunction1D(lambda x: -x ** 2, lambda x: -2 * x, d2f=lambda x: -2 + 0 * x)
    with pytest.raises(NotConvexError, match="not convex"):
        legendre(bad)


def test_fs_measure(P1):
    u = fs(P1)
    mu = A.ma_measure(u)
    assert abs(mu.mass - 1) <= 1e-9
    x = np.linspace(-6, 6, 25)
    s = 1 / (1 + np.exp(-2 * x))
    assert np.allclose(mu.density_x(x), 2 * s * (1 - s), atol=1e-6)
    assert np.allclose(A.ma_measure(u.shift(3.0)).density_x(x), mu.density_x(x))


@given(seeds)
def test_mass_one(seed):
    from toricna.polytope import MomentPolytope
    u = random_lse(MomentPolytope.interval(0, 1), seed)
    assert abs(A.ma_measure(u).mass - 1) <= 1e-9


def test_basic_values(P1):
    u = fs(P1)
    assert A.energy_E(u, u) == 0
    assert abs(A.energy_E(u.shift(0.7), u) - 0.7) <= 1e-12
    assert abs(A.ricci_energy_R(u.shift(0.5), u) + 1.0) <= 1e-12
    assert abs(A.mabuchi_M(u.shift(0.5), u)) <= 1e-12
    assert abs(A.entropy_H(u.shift(0.5), u)) <= 1e-12
    assert abs(A.twisted_energy(random_lse(P1, 1), u, lambda y: 0 * y)) == 0


def test_translation_invariance_exact(P1):
    u, ref = random_lse(P1, 7), fs(P1)
    assert A.functional_J(u.shift(5.0), ref) == pytest.approx(A.functional_J(u, ref), abs=1e-12)
    assert A.functional_I(u.shift(5.0), ref) == pytest.approx(A.functional_I(u, ref), abs=1e-12)


def test_representation_independence(P1):
    u, ref = random_lse(P1, 3, level=2), fs(P1)
    g = grid_representation(u)
    for F in (A.energy_E, A.functional_I, A.functional_J, A.entropy_H, A.mabuchi_M, A.ricci_energy_R):
        assert abs(F(u, ref) - F(g, ref)) <= 1e-6
    assert abs(A.energy_E(grid_representation(ref), ref)) <= 1e-7


@given(seeds)
def test_i_equals_2j(seed):
    from toricna.polytope import MomentPolytope
    P = MomentPolytope.interval(0, 1)
    u = random_lse(P, seed) if seed % 2 else random_symplectic(P, seed)
    ref = fs(P)
    I, J = A.functional_I(u, ref), A.functional_J(u, ref)
    assert abs(I - 2 * J) <= 1e-6 * max(1, I)
    assert J >= -1e-9 and A.entropy_H(u, ref) >= -1e-9


def test_scalar_curvature(P1):
    y = np.linspace(0.01, 0.99, 50)
    assert np.allclose(A.scalar_curvature(fs(P1))(y), 2, atol=1e-6)
    u = random_symplectic(P1, 5)
    assert abs(A.mean_scalar(u)[0] - 2) <= 1e-6
    assert np.array_equal(A.scalar_curvature(u.shift(1.0))(y), A.scalar_curvature(u)(y))
    kinked = SymplecticPotential(P1, [PLTerm(PLConvexFunction.from_breakpoints(P1, [0, 0.5, 1], [0, 0, 0.5]))])
    with pytest.raises(DomainError, match="derivative order"):
        A.scalar_curvature(kinked)


def test_cscK_is_minimum(P1):
    ref = fs(P1)
    for seed in range(5):
        assert A.mabuchi_M(random_symplectic(P1, seed), ref) >= -1e-6


def test_ding(Pfano, P1):
    u = fs(Pfano)
    assert A.ding_D(u, u) == pytest.approx(0, abs=1e-12)
    assert A.ding_D(u.shift(0.4), u) == pytest.approx(A.ding_D(u, u), abs=1e-10)
    with pytest.raises(NotAnticanonicalError):
        A.ding_L(fs(P1))
    for seed in range(6):
        v = random_lse(Pfano, seed)
        D = A.ding_D(v, u)
        assert D <= A.mabuchi_M(v, u) + 1e-6
        assert D <= A.functional_J(v, u) + 1e-6
        # Fano Mabuchi with entropy against mu_ref differs from M by a constant
        assert A.mabuchi_fano(v, u) - A.mabuchi_M(v, u) == pytest.approx(
            A.mabuchi_fano(u, u) - A.mabuchi_M(u, u), abs=1e-8)


def _fd(F, u, eta, ref, t=1e-4):
    up = u.with_log_weights(u.logc + t * eta)
    um = u.with_log_weights(u.logc - t * eta)
    return (F(up, ref) - F(um, ref)) / (2 * t)


@pytest.mark.parametrize("seed", range(5))
def test_variational_formulas(P1, seed):
    rng = np.random.default_rng(100 + seed)
    u = random_lse(P1, seed, level=2)
    ref = fs(P1)
    eta = rng.uniform(-1, 1, len(u.logc))
    w = A.lse_direction(u, eta)
    mu = A.ma_measure(u)
    dE = mu.integrate(w)[0]
    assert abs(_fd(A.energy_E, u, eta, ref) - dE) <= 1e-5
    S = A.scalar_curvature(u)
    Sbar = float(P1.meanS)
    dM = A.ma_measure(u).integrate(lambda x: w(x) * (Sbar - S(u.du(x))))[0]
    assert abs(_fd(A.mabuchi_M, u, eta, ref) - dM) <= 1e-4


def test_report(P1, Pfano):
    rep = A.functional_report(fs(P1).shift(0.3), fs(P1))
    assert rep.L is None and rep.D is None
    assert rep.M == pytest.approx(rep.H + rep.R + 2 * rep.E, abs=1e-14)
    u, ref = random_lse(Pfano, 2), fs(Pfano)
    rep = A.functional_report(u, ref)
    assert rep.D == pytest.approx(A.ding_D(u, ref), abs=1e-12)
    assert rep.L == pytest.approx(A.ding_L(u), abs=1e-12)


def test_shift_lemma(P1):
    u = random_lse(P1, 11)
    r = A.shift_inequality_check(u, u)
    assert r["J_diff"] == 0 and r["sup_abs"] <= 1e-15
    r = A.shift_inequality_check(u.shift(0.5), u)
    assert r["J_diff"] <= 1e-12 and r["i_holds"]
    for seed in range(20):
        r = A.shift_inequality_check(random_lse(P1, seed), random_symplectic(P1, seed + 1), ref=fs(P1))
        assert r["i_holds"] and r["ii_holds"]
