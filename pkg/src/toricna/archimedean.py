"""Archimedean functionals of torus-invariant metrics on a toric curve.

Every integral is pulled back to the moment interval P = [a, b] through the
gradient map, where MA(phi) becomes normalized Lebesgue measure dy/|P|. With
x = u*'(y) and x_r = u_ref*'(y):

    E = -(1/|P|) int (u* - u_ref*) dy
    I = int (phi - phi_ref)(MA_ref - MA_phi),   J = int (phi - phi_ref) MA_ref - E
    H = (1/2|P|) int [-log u*''(y) - log u_ref''(x)] dy
    R = -(1/|P|) int (u - u_ref)(x_r) S_ref(y) dy
    M = H + R + Sbar E
"""

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError, InputError, NotAnticanonicalError, QuadratureError
from .potentials import LSEPotential, SymplecticPotential, ToricPotential
from .quadrature import integrate, log_integrate

TOL = 1e-7


def _check_pair(u, ref):
    for w in (u, ref):
        if not isinstance(w, ToricPotential):
            raise InputError("expected ToricPotential instances")
    if u.polytope != ref.polytope:
        raise InputError("potentials live on different polytopes")


def _jump_ends(u):
    """(y_k, x_minus, x_plus) for every corner of u*."""
    out = []
    for yk, jump in u.kinks:
        xp = float(u.dustar(np.array([yk]))[0])
        out.append((yk, xp - jump, xp))
    return out


def _breaks(u, ref):
    """Points where some integrand is not smooth: corners of either u* and the
    preimages under the reference gradient of the flat pieces of u."""
    br = set(u.breaks) | set(ref.breaks)
    for yk, xm, xp in _jump_ends(u):
        br.add(yk)
        for x in (xm, xp):
            br.add(float(ref.du(np.array([x]))[0]))
    a, b = u.a, u.b
    for w in (u, ref):
        other = ref if w is u else u
        for yk, width in w.soft_kinks:
            ys = np.array([yk + j * width for j in (-16, -8, -4, -2, -1, 0, 1, 2, 4, 8, 16)])
            ys = ys[(ys > a) & (ys < b)]
            br.update(float(t) for t in ys)
            br.update(float(t) for t in other.du(w.x_of_y(ys)))
    pad = 1e-9 * (b - a)
    return tuple(sorted(t for t in br if a + pad < t < b - pad))


def _finish(name, val, err, scale=1.0):
    if not np.isfinite(val) or err > max(TOL, 1e-9 * abs(val)) * max(1.0, scale):
        raise QuadratureError("quadrature for %s did not converge (residual %.3g)" % (name, err), err)
    return val


def _rel(u, ref, y):
    """(phi - phi_ref) at x_r = u_ref*'(y)."""
    xr = ref.x_of_y(y)
    return u.u(xr) - (xr * y - ref.ustar(y))


# ---------------------------------------------------------------- measures

@dataclass
class MAMeasure:
    """MA(phi) pulled back to P: density 1/|P| in y, or u''(x)/|P| in x."""
    potential: ToricPotential
    mass: float
    mass_error: float

    def density_y(self, y):
        return np.full(np.shape(y), 1.0 / self.potential.length)

    def density_x(self, x):
        u = self.potential
        return np.exp(u.log_d2u(x)) / u.length

    def integrate(self, g):
        """int g(x) dMA for a vectorized g of x, computed in y."""
        u = self.potential
        v, e = integrate(lambda y: g(u.x_of_y(y)), u.a, u.b, u.breaks)
        return v / u.length, e / u.length


def ma_measure(u):
    """MA(phi), with its total mass recomputed by quadrature of u''(x) dx in x-space."""
    if not isinstance(u, ToricPotential):
        raise InputError("expected a ToricPotential")
    L = u.length
    ya, yb = u.a + 1e-10 * L, u.b - 1e-10 * L
    xlo, xhi = (float(t) for t in u.x_of_y(np.array([ya, yb])))
    xb = [x for _, xm, xp in _jump_ends(u) for x in (xm, xp)]
    xb += [float(t) for t in u.x_of_y(np.array(u.breaks))] if u.breaks else []
    xb += [float(t) for t in u.x_of_y(u.a + L * np.linspace(0, 1, 33)[1:-1])]
    v, e = integrate(lambda x: np.exp(u.log_d2u(x)), xlo, xhi, tuple(xb))
    # the two tails carry exactly the y-measure outside [ya, yb]
    mass = (v + 2e-10 * L) / L
    if abs(mass - 1) > 1e-9:
        raise QuadratureError("MA mass deficit %.3g" % (1 - mass), abs(1 - mass))
    return MAMeasure(u, mass, e / L)


# ---------------------------------------------------------------- energies

def energy_E(u, ref):
    _check_pair(u, ref)
    L = u.length
    v, e = integrate(lambda y: u.ustar(y) - ref.ustar(y), u.a, u.b, _breaks(u, ref))
    return _finish("E", -v / L, e / L)


def _A_ref(u, ref):
    L = u.length
    v, e = integrate(lambda y: _rel(u, ref, y), u.a, u.b, _breaks(u, ref))
    return v / L, e / L


def _A_self(u, ref):
    """int (phi - phi_ref) MA(phi)."""
    L = u.length

    def g(y):
        x = u.x_of_y(y)
        return x * y - u.ustar(y) - ref.u(x)
    v, e = integrate(g, u.a, u.b, _breaks(u, ref))
    return v / L, e / L


def functional_I(u, ref):
    _check_pair(u, ref)
    a1, e1 = _A_ref(u, ref)
    a2, e2 = _A_self(u, ref)
    return _finish("I", a1 - a2, e1 + e2, abs(a1))


def functional_J(u, ref):
    _check_pair(u, ref)
    a1, e1 = _A_ref(u, ref)
    return _finish("J", a1 - energy_E(u, ref), e1, abs(a1))


def twisted_energy(u, ref, theta):
    """V^{-1} int (phi - phi_ref) theta, theta given as a density theta(y) relative to dd^c phi_ref."""
    _check_pair(u, ref)
    L = u.length
    if not callable(theta):
        c = float(theta)
        theta = (lambda y: np.full(np.shape(y), c))
    v, e = integrate(lambda y: _rel(u, ref, y) * theta(y), u.a, u.b, _breaks(u, ref))
    return _finish("twisted energy", v / L, e / L, np.max(np.abs(theta(np.linspace(u.a, u.b, 9)[1:-1]))))


def ricci_energy_R(u, ref):
    """Twisted energy with theta = -Ric(dd^c phi_ref)."""
    _scalar_checked(ref)
    return twisted_energy(u, ref, lambda y: -ref.scalar_y(y))


def entropy_H(u, ref):
    _check_pair(u, ref)
    L = u.length

    def g(y):
        x = u.x_of_y(y)
        return -u.log_d2ustar(y) - ref.log_d2u(x)
    v, e = integrate(g, u.a, u.b, _breaks(u, ref))
    return _finish("H", 0.5 * v / L, 0.5 * e / L)


def mabuchi_M(u, ref):
    Sbar = float(u.polytope.meanS)
    return entropy_H(u, ref) + ricci_energy_R(u, ref) + Sbar * energy_E(u, ref)


# ---------------------------------------------------------------- curvature

def _scalar_checked(u):
    if u.kinks:
        raise DomainError("insufficient derivative order: u* has corners, scalar curvature undefined")
    if isinstance(u, SymplecticPotential):
        for t in u.terms:
            if getattr(t, "eps", None) == 0.0:
                raise DomainError("insufficient derivative order: unsmoothed PL term")


def scalar_curvature(u):
    """S_phi as a function of y in P."""
    _scalar_checked(u)
    return u.scalar_y


def mean_scalar(u):
    """int S_phi MA(phi), which equals Sbar for a metric smooth up to the boundary."""
    S = scalar_curvature(u)
    v, e = integrate(S, u.a, u.b, u.breaks)
    return v / u.length, e / u.length


# ---------------------------------------------------------------- Ding

def _center(u):
    P = u.polytope
    try:
        yc = P.anticanonical_center()
    except NotAnticanonicalError:
        raise NotAnticanonicalError("not anticanonical: Ding functionals need the anticanonical polytope")
    return float(yc[0])


def log_integral_exp(u, yc=None):
    """log int_R exp(-2(u(x) - yc x)) dx, with the flat pieces of u added as atoms."""
    if yc is None:
        yc = _center(u)
    if isinstance(u, LSEPotential):
        return _log_integral_exp_x(u, yc)
    br = tuple(sorted(set(u.breaks) | {yc}))

    def lg(y):
        x = u.x_of_y(y)
        return -2 * ((y - yc) * x - u.ustar(y)) + u.log_d2ustar(y)
    val, err = log_integrate(lg, u.a, u.b, br)
    parts = [val]
    for yk, xm, xp in _jump_ends(u):
        d = yk - yc
        us = float(u.ustar(np.array([yk]))[0])
        if d == 0:
            atom = np.log(xp - xm)
        else:
            # log of (e^{-2 d xm} - e^{-2 d xp}) / (2d), computed stably
            hi, lo = (-2 * d * xm, -2 * d * xp) if d > 0 else (-2 * d * xp, -2 * d * xm)
            atom = hi + np.log(-np.expm1(lo - hi)) - np.log(2 * abs(d))
        parts.append(2 * us + atom)
    return float(logsumexp(parts)), err


def _log_integral_exp_x(u, yc):
    """x-space version for log-sum-exp potentials, whose nearly flat stretches can be far
    narrower in y than any quadrature panel."""
    p, lc, beta = u.p, u.logc, u.beta
    xs = set()
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            xs.add((lc[i] - lc[j]) / (2 * beta * (p[j] - p[i])))
    L = u.b - u.a
    xs.update(float(t) for t in u.x_of_y(u.a + L * np.linspace(0, 1, 17)[1:-1]))
    ra, rb = 2 * (yc - u.a), 2 * (u.b - yc)
    lo = min(xs) - 40.0 / ra
    hi = max(xs) + 40.0 / rb

    def lg(x):
        return -2 * (u.u(x) - yc * x)
    br = sorted(xs | set(np.arange(lo, hi, 0.5).tolist()))
    val, err = log_integrate(lg, lo, hi, tuple(br), levels=1)
    # exponential tails beyond [lo, hi]
    tails = [float(lg(np.array([lo]))[0]) - np.log(ra), float(lg(np.array([hi]))[0]) - np.log(rb)]
    return float(logsumexp([val] + tails)), err


def ding_L(u):
    v, e = log_integral_exp(u)
    return _finish("L", -0.5 * v, 0.5 * e)


def ding_D(u, ref):
    _check_pair(u, ref)
    return ding_L(u) - ding_L(ref) - energy_E(u, ref)


def mabuchi_fano(u, ref):
    """Mabuchi energy with entropy taken relative to mu_ref = e^{-2 phi_ref} / int e^{-2 phi_ref}.

    Differs from mabuchi_M by a constant depending only on ref (the value
    mabuchi_fano(ref, ref)).
    """
    _check_pair(u, ref)
    yc = _center(ref)
    L = u.length
    logZ, ez = log_integral_exp(ref, yc)

    def g(y):
        x = u.x_of_y(y)
        log_ma = -u.log_d2ustar(y) - np.log(L)
        log_mu = -2 * (ref.u(x) - yc * x) - logZ
        return log_ma - log_mu
    v, e = integrate(g, u.a, u.b, _breaks(u, ref))
    a, ea = _A_self(u, ref)
    return _finish("M_fano", 0.5 * v / L + a - energy_E(u, ref), 0.5 * e / L + ea + ez)


# ---------------------------------------------------------------- reports

@dataclass
class FunctionalReport:
    E: float
    I: float
    J: float
    R: float
    H: float
    M: float
    L: float = None
    D: float = None
    errors: dict = field(default_factory=dict)

    def as_dict(self):
        return asdict(self)


def functional_report(u, ref):
    _check_pair(u, ref)
    Sbar = float(u.polytope.meanS)
    E = energy_E(u, ref)
    a1, e1 = _A_ref(u, ref)
    a2, e2 = _A_self(u, ref)
    H = entropy_H(u, ref)
    R = ricci_energy_R(u, ref)
    rep = FunctionalReport(E=E, I=a1 - a2, J=a1 - E, R=R, H=H, M=H + R + Sbar * E)
    rep.errors = {"E": _err_E(u, ref), "I": e1 + e2, "J": e1}
    if u.polytope.is_anticanonical():
        rep.L = ding_L(u)
        rep.D = rep.L - ding_L(ref) - E
    return rep


def _err_E(u, ref):
    return integrate(lambda y: u.ustar(y) - ref.ustar(y), u.a, u.b, _breaks(u, ref))[1] / u.length


# ---------------------------------------------------------------- shift lemma

def sup_difference(u, v, npts=2001):
    """(sup(phi - psi), inf(phi - psi)) over R, sampled through the gradient of psi,
    including the limits at both ends of R."""
    y = v.a + (v.b - v.a) * 0.5 * (1 - np.cos(np.linspace(0, np.pi, npts)[1:-1]))
    d = _rel(u, v, y)
    ends = [v.ustar_end("a") - u.ustar_end("a"), v.ustar_end("b") - u.ustar_end("b")]
    vals = np.concatenate([d, ends])
    return float(vals.max()), float(vals.min())


def shift_inequality_check(u, v, ref=None):
    """Check |J(u) - J(v)| <= 2 sup|u - v| and M(u) >= M(v) - C sup|u - v|.

    C is twice the upper bound max(max S_v, Sbar) on the Ricci curvature of v
    at n = 1. The signed bound with sup(u - v) is reported as well; it is not
    true in general.
    """
    if ref is None:
        ref = v
    hi, lo = sup_difference(u, v)
    supabs = max(abs(hi), abs(lo))
    dJ = abs(functional_J(u, ref) - functional_J(v, ref))
    Sbar = float(u.polytope.meanS)
    ys = np.linspace(v.a, v.b, 2001)[1:-1]
    C = 2 * max(float(np.max(scalar_curvature(v)(ys))), Sbar)
    Mu, Mv = mabuchi_M(u, ref), mabuchi_M(v, ref)
    return {
        "J_diff": dJ,
        "sup_abs": supabs,
        "sup_signed": hi,
        "i_holds": bool(dJ <= 2 * supabs + 1e-9),
        "i_slack": 2 * supabs - dJ,
        "i_signed_holds": bool(dJ <= 2 * hi + 1e-9),
        "M_u": Mu,
        "M_v": Mv,
        "C": C,
        "ii_holds": bool(Mu >= Mv - C * supabs - 1e-9),
        "ii_slack": Mu - Mv + C * supabs,
    }


def lse_direction(u, eta):
    """Derivative of u in its log weights along eta: w(x) = (1/2 beta) E_pi[eta]."""
    if not isinstance(u, LSEPotential):
        raise InputError("lse_direction needs an LSEPotential")
    eta = np.asarray(eta, dtype=float)

    def w(x):
        return np.sum(np.exp(u._logw(x)) * eta, axis=-1) / (2 * u.beta)
    return w


__all__ = [
    "MAMeasure", "ma_measure", "energy_E", "functional_I", "functional_J", "twisted_energy",
    "ricci_energy_R", "entropy_H", "mabuchi_M", "scalar_curvature", "mean_scalar", "ding_L",
    "ding_D", "mabuchi_fano", "FunctionalReport", "functional_report", "sup_difference",
    "shift_inequality_check", "lse_direction",
]
