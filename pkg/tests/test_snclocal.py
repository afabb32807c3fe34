import numpy as np
import pytest

from toricna.errors import DomainError, InputError
from toricna.snclocal import SNCModel, closed_form, exponent_fit, fiber_volume


def test_model_validation():
    with pytest.raises(InputError):
        SNCModel(1, 2, (1, 1, 1))
    with pytest.raises(InputError):
        SNCModel(1, 1, (1,))
    with pytest.raises(InputError):
        SNCModel(1, 0, (1,), twist="nope")


@pytest.mark.parametrize("n,p,b", [(1, 0, (1,)), (1, 1, (1, 1)), (2, 1, (2, 1)), (2, 2, (1, 2, 1))])
def test_trivial_twist_matches_closed_form(n, p, b):
    m = SNCModel(n, p, b)
    for tau in (1e-9, 1e-4):
        assert fiber_volume(m, tau) == pytest.approx(closed_form(m, tau), rel=1e-12)


def test_domain_degeneracy():
    m = SNCModel(1, 1, (1, 1), eps=0.5)
    with pytest.raises(DomainError, match="degenerates"):
        fiber_volume(m, 0.6)
    with pytest.raises(InputError):
        fiber_volume(m, -1.0)


def test_smooth_fiber_bounded():
    r = exponent_fit(SNCModel(1, 0, (1,), twist="radial"))
    assert abs(r["d_hat"]) <= 0.1
    assert r["sandwich_ratio"] <= 1.1


def test_p1_ratio_constant():
    r = exponent_fit(SNCModel(1, 1, (1, 1), twist="wave"), list(np.geomspace(1e-9, 1e-3, 13)))
    ratio = np.array(r["volume"]) / np.log(1 / np.array(r["tau"]))
    assert ratio.min() > 0 and ratio.max() / ratio.min() <= 1.2


def test_doubling_b0_changes_constant_only():
    a = exponent_fit(SNCModel(1, 1, (1, 1)))
    b = exponent_fit(SNCModel(1, 1, (2, 1)))
    assert abs(a["d_hat"] - b["d_hat"]) <= 1e-9
    assert b["sandwich_min"] == pytest.approx(a["sandwich_min"] / 2)


@pytest.mark.parametrize("twist", ["one", "radial", "wave"])
@pytest.mark.parametrize("n,p,b", [(1, 1, (1, 1)), (2, 2, (1, 2, 1))])
def test_twist_invariance(n, p, b, twist):
    r = exponent_fit(SNCModel(n, p, b, twist=twist))
    assert abs(r["d_hat"] - p) <= 0.1
    assert r["sandwich_ratio"] <= 10


def test_monte_carlo_is_seeded():
    m = SNCModel(3, 1, (1, 1), twist="radial")
    assert fiber_volume(m, 1e-8, seed=3) == fiber_volume(m, 1e-8, seed=3)
    assert fiber_volume(m, 1e-8, method="mc") == pytest.approx(fiber_volume(m, 1e-8, method="gauss", k=8), rel=5e-3)


def test_short_grid_rejected():
    with pytest.raises(InputError, match="six decades"):
        exponent_fit(SNCModel(1, 1, (1, 1)), [1e-5, 1e-3])
