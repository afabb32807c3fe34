from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from toricna.plfunction import PLConvexFunction
from toricna.polytope import MomentPolytope

settings.register_profile("default", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def P1():
    return MomentPolytope.interval(0, 1)


@pytest.fixture
def Pfano():
    return MomentPolytope.interval(0, 2)


@pytest.fixture
def hinge(P1):
    # max(0, y - 1/2)
    return PLConvexFunction.from_breakpoints(P1, [0, Fraction(1, 2), 1], [0, 0, Fraction(1, 2)])
