"""Hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from toricna.plfunction import PLConvexFunction


def fractions(lo=-3, hi=3, den=6):
    return st.builds(Fraction, st.integers(lo * den, hi * den), st.integers(1, den))


@st.composite
def convex_pl(draw, P, max_kinks=3, den=4):
    """Random rational convex PL function on an interval, via sorted increasing slopes."""
    a, b = P.interval_ends
    k = draw(st.integers(0, max_kinks))
    ys = sorted({a + (b - a) * Fraction(i, den * 2) for i in draw(
        st.lists(st.integers(1, 2 * den - 1), min_size=k, max_size=k))})
    ys = [a] + ys + [b]
    slopes = sorted(draw(st.lists(fractions(-2, 2, 2), min_size=len(ys) - 1, max_size=len(ys) - 1)))
    vals = [draw(fractions(-1, 1, 3))]
    for (y0, y1), s in zip(zip(ys, ys[1:]), slopes):
        vals.append(vals[-1] + s * (y1 - y0))
    return PLConvexFunction.from_breakpoints(P, ys, vals)


@st.composite
def convex_pl_2d(draw, P, pieces=3):
    """max of a few rational affine functions on a 2D polytope."""
    aff = [((Fraction(0), Fraction(0)), Fraction(0))]
    for _ in range(draw(st.integers(1, pieces))):
        aff.append(((draw(fractions(-2, 2, 2)), draw(fractions(-2, 2, 2))), draw(fractions(-1, 1, 3))))
    return PLConvexFunction.from_max(P, aff)


def random_lse(P, seed, level=None, spread=2.0):
    """log-sum-exp potential on an interval with random positive weights."""
    import numpy as np

    from toricna.potentials import LSEPotential

    rng = np.random.default_rng(seed)
    m = level or int(rng.integers(1, 4))
    base = LSEPotential.fubini_study(P, m)
    return base.with_log_weights(base.logc + rng.uniform(-spread, spread, len(base.logc)))


def random_symplectic(P, seed, size=0.05):
    """Guillemin potential plus a small cubic, convex for size <= 0.05 on unit-length P."""
    import numpy as np

    from toricna.potentials import PolyTerm, SymplecticPotential

    rng = np.random.default_rng(seed)
    return SymplecticPotential(P, [PolyTerm(list(rng.uniform(-size, size, 4)))])
