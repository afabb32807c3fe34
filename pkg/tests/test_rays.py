from fractions import Fraction as Fr

import numpy as np
import pytest

from toricna.errors import IntegralityError
from toricna.nonarchimedean import make_config, na_energy
from toricna.plfunction import PLConvexFunction
from toricna.potentials import LSEPotential, SymplecticPotential
from toricna.rays import RaySpec, entropy_log_correction, ray_at, slope, uniqueness_probe

GRID = list(np.geomspace(50, 200, 8))


def fs(P):
    return LSEPotential.fubini_study(P, 1)


def test_ray_at_zero_and_translates(P1):
    u0 = fs(P1)
    f = PLConvexFunction.constant(P1, Fr(3, 2))
    spec = RaySpec(u0, f)
    assert ray_at(spec, 0) is u0
    us = ray_at(spec, 2.0)
    y = np.linspace(0.1, 0.9, 9)
    assert np.allclose(us.ustar(y), u0.ustar(y) + 3.0)


def test_bergman_trivial_direction(P1):
    u0 = fs(P1)
    spec = RaySpec(u0, PLConvexFunction.constant(P1, 0), kind="bergman")
    x = np.linspace(-3, 3, 7)
    for s in (0.0, 5.0, 50.0):
        assert np.allclose(ray_at(spec, s).u(x), u0.u(x))


def test_integrality(P1, hinge):
    with pytest.raises(IntegralityError, match="integrality"):
        RaySpec(fs(P1), hinge, kind="bergman", m=1)
    assert RaySpec(fs(P1), hinge, kind="bergman").m == 2


def test_rays_stay_convex(P1, hinge):
    for kind in ("legendre", "bergman"):
        spec = RaySpec(fs(P1), hinge, kind=kind)
        for s in (1.0, 30.0):
            u = ray_at(spec, s)
            y = np.linspace(0.001, 0.999, 999)
            assert np.all(np.isfinite(u.log_d2ustar(y)))


@pytest.mark.parametrize("kind", ["legendre", "bergman"])
@pytest.mark.parametrize("name", ["E", "I", "J", "R", "H", "M"])
def test_hinge_slopes(P1, hinge, kind, name):
    rep = slope(RaySpec(fs(P1), hinge, kind=kind, s_grid=GRID), name)
    assert rep.verdict, (rep.slope, rep.target)
    assert not rep.failed


def test_ding_slope(Pfano):
    f = PLConvexFunction.from_breakpoints(Pfano, [0, 1, 2], [0, 0, 1])
    rep = slope(RaySpec(fs(Pfano), f, s_grid=GRID), "D")
    assert rep.verdict, (rep.slope, rep.target)


def test_translate_ray_slopes(P1):
    f = PLConvexFunction.constant(P1, 3)
    spec = RaySpec(fs(P1), f, s_grid=GRID)
    assert slope(spec, "M").slope == pytest.approx(0, abs=1e-9)
    assert slope(spec, "E").slope == pytest.approx(-3, abs=1e-9)
    assert slope(spec, "R").slope == pytest.approx(6, abs=1e-9)


def test_scaling_at_ray_level(P1, hinge):
    base = SymplecticPotential(P1, [])
    a = ray_at(RaySpec(base, hinge.scale(3)), 2.0)
    b = ray_at(RaySpec(base, hinge), 6.0)
    y = np.linspace(0.05, 0.95, 19)
    assert np.allclose(a.ustar(y), b.ustar(y), atol=1e-13)


@pytest.mark.parametrize("seed", range(3))
def test_e_slope_is_minus_average(P1, seed):
    rng = np.random.default_rng(seed)
    k = sorted(set(Fr(int(i), 8) for i in rng.integers(1, 8, 2)))
    ys = [Fr(0)] + k + [Fr(1)]
    slopes = sorted(Fr(int(i), 2) for i in rng.integers(-4, 5, len(ys) - 1))
    vals = [Fr(0)]
    for (y0, y1), s in zip(zip(ys, ys[1:]), slopes):
        vals.append(vals[-1] + s * (y1 - y0))
    f = PLConvexFunction.from_breakpoints(P1, ys, vals)
    rep = slope(RaySpec(fs(P1), f, s_grid=GRID), "E")
    assert rep.target == na_energy(make_config(P1, f)) == -f.average()
    assert abs(rep.slope - float(rep.target)) <= 1e-6


def test_smoothing_sweep(P1, hinge):
    out = {}
    for eps in (0.0, 0.01):
        out[eps] = slope(RaySpec(fs(P1), hinge, eps=eps, s_grid=GRID), "M")
        assert out[eps].verdict
    assert abs(out[0.0].slope - out[0.01].slope) <= 0.01


def test_entropy_log_correction(P1, hinge):
    r0 = entropy_log_correction(RaySpec(fs(P1), PLConvexFunction.constant(P1, 2), s_grid=GRID))
    assert r0["sup_ratio"] <= 1e-9
    r = entropy_log_correction(RaySpec(fs(P1), hinge, s_grid=GRID))
    r2 = entropy_log_correction(RaySpec(fs(P1), hinge, s_grid=[2 * s for s in GRID]))
    assert r2["sup_ratio"] <= 2 * r["sup_ratio"]
    assert abs(r["log_trend"]) <= 1


def test_uniqueness_probe(P1, hinge):
    assert not uniqueness_probe(hinge, hinge)
    assert uniqueness_probe(PLConvexFunction.constant(P1, 0), PLConvexFunction.constant(P1, 1))
    assert uniqueness_probe(hinge, PLConvexFunction.affine(P1, (Fr(1, 2),)))
