"""Torus-invariant metrics on a toric curve as convex potentials.

On the moment interval P = [a, b] a smooth positive metric is a strictly
convex u on R (with x = log|z|) whose gradient maps R onto int P. The
Legendre dual u* lives on P and has the boundary behaviour
u* = (1/2)[(y-a)log(y-a) + (b-y)log(b-y)] + smooth. Two representations are
provided: LSEPotential (closed form in x, Fubini-Study type) and
SymplecticPotential (closed form in y). Each can evaluate both sides.
"""

import math
from fractions import Fraction

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.special import expit, logsumexp, xlogy

from .errors import DomainError, InputError, NotConvexError
from .exact import frac
from .polytope import MomentPolytope

_BISECT = 110


def _as_interval(P):
    if not isinstance(P, MomentPolytope):
        raise InputError("expected a MomentPolytope")
    if P.n != 1:
        raise InputError("Archimedean potentials are implemented on one-dimensional polytopes")
    a, b = P.interval_ends
    return float(a), float(b)


def _expand_bracket(g, x0, lo_step=1.0, rounds=90):
    """Find lo < hi with g(lo) <= 0 <= g(hi) for a nondecreasing vectorized g."""
    lo = x0 - lo_step
    hi = x0 + lo_step
    step = np.full_like(x0, lo_step)
    for _ in range(rounds):
        bad = g(lo) > 0
        if not np.any(bad):
            break
        lo = np.where(bad, lo - step, lo)
        step = np.where(bad, 2 * step, step)
    step = np.full_like(x0, lo_step)
    for _ in range(rounds):
        bad = g(hi) < 0
        if not np.any(bad):
            break
        hi = np.where(bad, hi + step, hi)
        step = np.where(bad, 2 * step, step)
    return lo, hi


def _lse(z, axis=-1):
    m = np.max(z, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        return np.log(np.sum(np.exp(z - m), axis=axis)) + np.squeeze(m, axis)


def _newton(gd, lo, hi, iters=200):
    """Root of an increasing g inside [lo, hi]: Newton steps, falling back to bisection
    when a step leaves the bracket or fails to halve the previous step."""
    x = 0.5 * (lo + hi)
    dxold = hi - lo
    for _ in range(iters):
        g, d = gd(x)
        lo = np.where(g < 0, x, lo)
        hi = np.where(g > 0, x, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - g / d
        ok = (xn > lo) & (xn < hi) & np.isfinite(xn) & (np.abs(2 * g) <= np.abs(dxold * d))
        xn = np.where(ok, xn, 0.5 * (lo + hi))
        dxold = np.abs(xn - x)
        done = (dxold <= 4e-16 * (1 + np.abs(x))) | (g == 0)
        x = xn
        if np.all(done):
            break
    return x


def _bisect(g, lo, hi, iters=_BISECT):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        pos = g(mid) > 0
        hi = np.where(pos, mid, hi)
        lo = np.where(pos, lo, mid)
    return 0.5 * (lo + hi)


class ToricPotential:
    """Common interface. Subclasses provide the one-sided closed forms."""

    polytope = None
    a = b = 0.0
    const = 0.0

    @property
    def length(self):
        return self.b - self.a

    @property
    def breaks(self):
        return ()

    @property
    def kinks(self):
        """(y, jump of u*') at points where u* has a corner."""
        return ()

    @property
    def soft_kinks(self):
        """(y, width) of smoothed corners, where u*'' is large on a short interval."""
        return ()

    def grid_check(self):
        return True

    # x side
    def u(self, x):
        raise NotImplementedError

    def du(self, x):
        raise NotImplementedError

    def log_d2u(self, x):
        raise NotImplementedError

    # y side
    def ustar(self, y):
        raise NotImplementedError

    def dustar(self, y):
        raise NotImplementedError

    def log_d2ustar(self, y):
        raise NotImplementedError

    def scalar_y(self, y):
        raise NotImplementedError

    def shift(self, c):
        raise NotImplementedError


# ---------------------------------------------------------------- LSE

class LSEPotential(ToricPotential):
    """u(x) = (1/(2 beta)) log sum_k c_k exp(2 beta p_k x) + const."""

    def __init__(self, P, points, log_weights, beta=1.0, const=0.0):
        self.polytope = P
        self.a, self.b = _as_interval(P)
        p = np.array([float(frac(t)) for t in points])
        if p.size < 2:
            raise InputError("need at least two exponents")
        order = np.argsort(p)
        p = p[order]
        lc = np.asarray(log_weights, dtype=float)[order]
        if not np.all(np.isfinite(lc)):
            raise InputError("weights must be positive and finite")
        if p[0] != self.a or p[-1] != self.b:
            raise InputError("exponents must span the polytope (gradient image = P)")
        if np.any(np.diff(p) <= 0):
            raise InputError("exponents must be distinct")
        self.p = p
        self.logc = lc
        self.beta = float(beta)
        if self.beta <= 0:
            raise InputError("beta must be positive")
        self.const = float(const)
        self._points = [frac(t) for t in np.array(points, dtype=object)[order]]
        i, j = np.triu_indices(p.size, 1)
        self._pi, self._pj = i, j
        self._logdp2 = 2 * np.log(p[j] - p[i])
        self._s = p[i] + p[j]
        self._cache = {}

    @classmethod
    def fubini_study(cls, P, level=1):
        """Fubini-Study potential of the round metric: binomial weights on (1/level)Z cap P."""
        a, b = P.interval_ends
        m = int(level)
        N = (b - a) * m
        if N.denominator != 1 or (a * m).denominator != 1:
            raise DomainError("level %d does not make the polytope integral" % m)
        N = int(N)
        pts = [a + Fraction(k, m) for k in range(N + 1)]
        lw = [math.lgamma(N + 1) - math.lgamma(k + 1) - math.lgamma(N - k + 1) for k in range(N + 1)]
        return cls(P, pts, lw, beta=m)

    @property
    def points(self):
        return list(self._points)

    @property
    def breaks(self):
        return tuple(float(t) for t in self.p[1:-1])

    def shift(self, c):
        return LSEPotential(self.polytope, self._points, self.logc, self.beta, self.const + c)

    def with_log_weights(self, lw):
        return LSEPotential(self.polytope, self._points, lw, self.beta, self.const)

    def _z(self, x):
        x = np.asarray(x, dtype=float)
        return 2 * self.beta * x[..., None] * self.p + self.logc

    def _logw(self, x):
        z = self._z(x)
        return z - _lse(z)[..., None]

    def u(self, x):
        return logsumexp(self._z(x), axis=-1) / (2 * self.beta) + self.const

    def du(self, x):
        return np.sum(np.exp(self._logw(x)) * self.p, axis=-1)

    def _log_var(self, lw):
        return _lse(lw[..., self._pi] + lw[..., self._pj] + self._logdp2, axis=-1)

    def log_d2u(self, x):
        return math.log(2 * self.beta) + self._log_var(self._logw(x))

    def scalar_x(self, x):
        """S = 2 beta - beta Var_pi(s) / Var_w(p), pair weights pi ~ w_j w_k (p_j - p_k)^2."""
        lw = self._logw(x)
        lpair = lw[..., self._pi] + lw[..., self._pj] + self._logdp2
        lvar = logsumexp(lpair, axis=-1)
        lpi = lpair - lvar[..., None]
        K = lpi.shape[-1]
        if K < 2:
            return np.full(np.shape(x), 2 * self.beta)
        I, J = np.triu_indices(K, 1)
        ds = self._s[J] - self._s[I]
        ok = ds != 0
        lvs = logsumexp(lpi[..., I[ok]] + lpi[..., J[ok]] + 2 * np.log(np.abs(ds[ok])), axis=-1)
        return 2 * self.beta - self.beta * np.exp(lvs - lvar)

    def x_of_y(self, y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        key = y.tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit.copy()
        a, b = self.a, self.b
        low = y <= 0.5 * (a + b)
        out = np.empty_like(y)
        with np.errstate(divide="ignore"):
            lpa = np.log(self.p - a)
            lpb = np.log(b - self.p)
        two_beta = 2 * self.beta
        # Newton on log E_w[p - a] = log(y - a) (or its mirror), safeguarded by a bracket
        for mask, lp, sign in ((low, lpa, 1.0), (~low, lpb, -1.0)):
            if not np.any(mask):
                continue
            with np.errstate(divide="ignore"):
                t = np.log(np.where(sign > 0, y[mask] - a, b - y[mask]))

            def gd(x):
                lw = self._logw(x)
                lm = _lse(lw + lp)
                return sign * (lm - t), two_beta * np.exp(self._log_var(lw) - lm)
            lo, hi = _expand_bracket(lambda x: gd(x)[0], np.zeros_like(t))
            out[mask] = _newton(gd, lo, hi)
        if len(self._cache) > 64:
            self._cache.clear()
        self._cache[key] = out.copy()
        return out

    def dustar(self, y):
        return self.x_of_y(y)

    def ustar(self, y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        x = self.x_of_y(y)
        return x * y - self.u(x)

    def ustar_end(self, which):
        """Boundary value u*(a) or u*(b)."""
        k = 0 if which == "a" else -1
        return -self.logc[k] / (2 * self.beta) - self.const

    def log_d2ustar(self, y):
        return -self.log_d2u(self.x_of_y(y))

    def scalar_y(self, y):
        return self.scalar_x(self.x_of_y(y))


# ---------------------------------------------------------------- symplectic

class PolyTerm:
    def __init__(self, coeffs):
        self.poly = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
        self._d = [self.poly.deriv(k) for k in range(5)]

    def derivs(self, y):
        return [d(y) for d in self._d]

    kinks = ()
    breaks = ()


class SplineTerm:
    """Quintic interpolating spline; five continuous derivatives are needed for S."""

    def __init__(self, y, values):
        self.spline = make_interp_spline(np.asarray(y, float), np.asarray(values, float), k=5)
        self._d = [self.spline.derivative(k) if k else self.spline for k in range(5)]

    def derivs(self, y):
        return [d(y) for d in self._d]

    kinks = ()
    breaks = ()


class PLTerm:
    """s * f for a PL convex f; optional soft-max smoothing with parameter eps."""

    def __init__(self, f, scale=1.0, eps=0.0):
        self.f = f
        self.scale = float(scale)
        self.eps = float(eps)

    def derivs(self, y):
        s = self.scale
        if self.eps > 0:
            v, d1, d2, d3, d4 = self.f.softmax_parts(y, self.eps)
            return [s * v, s * d1, s * d2, s * d3, s * d4]
        z = np.zeros_like(np.asarray(y, dtype=float))
        return [s * self.f.evaluate(y), s * self.f.slopes_float(y), z, z, z]

    @property
    def kinks(self):
        if self.eps > 0 or self.scale == 0:
            return ()
        return tuple((float(y), self.scale * float(j)) for y, j in self.f.kinks())

    @property
    def breaks(self):
        return tuple(float(y) for y in self.f.breakpoints())

    @property
    def soft_kinks(self):
        if self.eps == 0 or self.scale == 0:
            return ()
        return tuple((y, self.eps / abs(float(j))) for y, j in self.f.kinks())


class SymplecticPotential(ToricPotential):
    """u*(y) = G(y) + sum of terms - const, with G the Guillemin boundary term."""

    def __init__(self, P, terms=(), const=0.0, check=True):
        self.polytope = P
        self.a, self.b = _as_interval(P)
        self.terms = tuple(terms)
        self.const = float(const)
        if check:
            self.grid_check()

    def shift(self, c):
        return SymplecticPotential(self.polytope, self.terms, self.const + c, check=False)

    def add_terms(self, *terms):
        return SymplecticPotential(self.polytope, self.terms + tuple(terms), self.const)

    @property
    def breaks(self):
        out = set()
        for t in self.terms:
            out.update(t.breaks)
        return tuple(sorted(out))

    @property
    def kinks(self):
        out = []
        for t in self.terms:
            out.extend(t.kinks)
        return tuple(sorted(out))

    @property
    def soft_kinks(self):
        out = []
        for t in self.terms:
            out.extend(getattr(t, "soft_kinks", ()))
        return tuple(sorted(out))

    def _h(self, y):
        y = np.asarray(y, dtype=float)
        acc = [np.zeros_like(y) for _ in range(5)]
        for t in self.terms:
            for k, d in enumerate(t.derivs(y)):
                acc[k] = acc[k] + d
        return acc

    def _q(self, y):
        return 2 * (y - self.a) * (self.b - y)

    def grid_check(self, npts=4001):
        y = self.a + (self.b - self.a) * 0.5 * (1 - np.cos(np.linspace(0, np.pi, npts)[1:-1]))
        h2 = self._h(y)[2]
        Dn = (self.b - self.a) + self._q(y) * h2
        if np.any(Dn <= 0):
            k = int(np.argmin(Dn))
            raise NotConvexError("not convex: u*'' <= 0 near y = %.6g" % y[k])
        return True

    def ustar(self, y):
        y = np.asarray(y, dtype=float)
        G = 0.5 * (xlogy(y - self.a, y - self.a) + xlogy(self.b - y, self.b - y))
        return G + self._h(y)[0] - self.const

    def dustar(self, y):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore"):
            G1 = 0.5 * (np.log(y - self.a) - np.log(self.b - y))
        return G1 + self._h(y)[1]

    x_of_y = dustar

    def log_d2ustar(self, y):
        y = np.asarray(y, dtype=float)
        q = self._q(y)
        Dn = (self.b - self.a) + q * self._h(y)[2]
        with np.errstate(divide="ignore"):
            return np.log(Dn) - np.log(q)

    def _y_of_t(self, t):
        return self.a + (self.b - self.a) * expit(t)

    def y_of_x(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        L = self.b - self.a

        def gd(t):
            sg = expit(t)
            hs = self._h(self.a + L * sg)
            return 0.5 * t + hs[1] - x, 0.5 + hs[2] * L * sg * (1 - sg)
        lo, hi = _expand_bracket(lambda t: gd(t)[0], 2 * x)
        return self._y_of_t(_newton(gd, lo, hi, iters=200))

    def du(self, x):
        return self.y_of_x(x)

    def u(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = self.y_of_x(x)
        return x * y - self.ustar(y)

    def log_d2u(self, x):
        return -self.log_d2ustar(self.y_of_x(x))

    def scalar_y(self, y):
        """Abreu: S = -(1/2) (1/u*'')'' with 1/u*'' = q / (b - a + q h'')."""
        y = np.asarray(y, dtype=float)
        a, b = self.a, self.b
        _, _, h2, h3, h4 = self._h(y)
        q = self._q(y)
        q1 = 2 * (a + b - 2 * y)
        q2 = -4.0
        Dn = (b - a) + q * h2
        D1 = q1 * h2 + q * h3
        D2 = q2 * h2 + 2 * q1 * h3 + q * h4
        psi2 = q2 / Dn - 2 * q1 * D1 / Dn ** 2 - q * D2 / Dn ** 2 + 2 * q * D1 ** 2 / Dn ** 3
        return -0.5 * psi2

    def ustar_end(self, which):
        y = self.a if which == "a" else self.b
        return float(self.ustar(np.array([y]))[0])


def guillemin(y, a, b):
    y = np.asarray(y, dtype=float)
    return 0.5 * (xlogy(y - a, y - a) + xlogy(b - y, b - y))


def grid_representation(u, nodes=401):
    """Spline-backed copy of u: h = u* - G sampled at Chebyshev-Lobatto nodes.

    u* and u*'' are reproduced to roughly 1e-12 and 1e-6; the scalar curvature
    needs four derivatives of the spline and is only good to a few digits.
    """
    a, b = u.a, u.b
    y = a + (b - a) * 0.5 * (1 - np.cos(np.pi * np.arange(nodes) / (nodes - 1)))
    vals = np.empty(nodes)
    vals[1:-1] = np.asarray(u.ustar(y[1:-1]))
    vals[0] = u.ustar_end("a")
    vals[-1] = u.ustar_end("b")
    h = vals + u.const - guillemin(y, a, b)
    return SymplecticPotential(u.polytope, [SplineTerm(y, h)], const=u.const)


# ---------------------------------------------------------------- Legendre

class ConvexFunction1D:
    """A convex function on an open interval, with derivative, for Legendre duality."""

    def __init__(self, f, df, domain=(-np.inf, np.inf), d2f=None):
        self.f = f
        self.df = df
        self.d2f = d2f
        self.domain = domain

    def __call__(self, x):
        return self.f(np.asarray(x, dtype=float))

    def check_convex(self, samples):
        samples = np.asarray(samples, dtype=float)
        if self.d2f is not None:
            if np.any(np.asarray(self.d2f(samples)) < 0):
                raise NotConvexError("not convex: second derivative negative at a sample point")
        d = np.asarray(self.df(samples))
        if np.any(np.diff(d) < -1e-12 * (1 + np.abs(d[:-1]))):
            raise NotConvexError("not convex: derivative decreases between sample points")

    def _inverse_derivative(self, y):
        lo_d, hi_d = self.domain
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if np.isfinite(lo_d) and np.isfinite(hi_d):
            def g(t):
                return self.df(lo_d + (hi_d - lo_d) * expit(t)) - y
            lo, hi = _expand_bracket(g, np.zeros_like(y))
            t = _bisect(g, lo, hi, iters=200)
            return lo_d + (hi_d - lo_d) * expit(t)

        def g(x):
            return self.df(x) - y
        lo, hi = _expand_bracket(g, np.zeros_like(y))
        return _bisect(g, lo, hi, iters=200)


def legendre(u, samples=None):
    """Legendre transform as a ConvexFunction1D on the image of the derivative.

    Accepts a ToricPotential (its closed-form sides are used) or a
    ConvexFunction1D (numeric inversion of the derivative).
    """
    if isinstance(u, ToricPotential):
        P = (u.a, u.b)
        return ConvexFunction1D(lambda y: u.ustar(y), lambda y: u.dustar(y), domain=P,
                                d2f=lambda y: np.exp(u.log_d2ustar(y)))
    if not isinstance(u, ConvexFunction1D):
        raise InputError("legendre expects a ToricPotential or ConvexFunction1D")
    if samples is None:
        lo, hi = u.domain
        if np.isfinite(lo) and np.isfinite(hi):
            samples = lo + (hi - lo) * np.linspace(0.001, 0.999, 201)
        else:
            samples = np.linspace(-20, 20, 401)
    u.check_convex(samples)
    s = np.asarray(u.df(np.asarray(samples, dtype=float)))
    lo_img = float(u.df(np.array([u.domain[0] if np.isfinite(u.domain[0]) else -1e3]))[0])
    hi_img = float(u.df(np.array([u.domain[1] if np.isfinite(u.domain[1]) else 1e3]))[0])
    lo_img = min(lo_img, float(s.min()))
    hi_img = max(hi_img, float(s.max()))

    def fstar(y):
        y = np.asarray(y, dtype=float)
        x = u._inverse_derivative(y)
        return x * y - u.f(x)

    def dfstar(y):
        return u._inverse_derivative(y)

    return ConvexFunction1D(fstar, dfstar, domain=(lo_img, hi_img))


# ---------------------------------------------------------------- JSON

def potential_from_json(P, data):
    if not isinstance(data, dict) or "kind" not in data:
        raise InputError("potential JSON needs a 'kind'")
    kind = data["kind"]
    c = float(data.get("shift", 0.0))
    if kind == "fs":
        u = LSEPotential.fubini_study(P, int(data.get("level", 1)))
    elif kind == "lse-weights":
        pts = data.get("points")
        if pts is None:
            pts = [p[0] for p in P.lattice_points()]
        w = data["weights"]
        if len(w) != len(pts):
            raise InputError("weights and points differ in length")
        if any(float(frac(x)) <= 0 for x in w):
            raise InputError("weights must be positive")
        u = LSEPotential(P, pts, [math.log(float(frac(x))) for x in w], float(data.get("beta", 1.0)))
    elif kind == "grid":
        y = np.asarray([float(frac(t)) for t in data["y"]])
        us = np.asarray([float(t) for t in data["ustar"]])
        a, b = _as_interval(P)
        if np.any((y <= a) | (y >= b)):
            raise InputError("grid nodes must be interior to the polytope")
        if y.size < 6 or y.size != us.size or np.any(np.diff(y) <= 0):
            raise InputError("grid needs at least 6 increasing nodes with one value each")
        u = SymplecticPotential(P, [SplineTerm(y, us - guillemin(y, a, b))])
    elif kind == "symplectic":
        u = SymplecticPotential(P, [PolyTerm([float(frac(t)) for t in data.get("poly", [0])])])
    else:
        raise InputError("unknown potential kind %r" % (kind,))
    return u.shift(c) if c else u
