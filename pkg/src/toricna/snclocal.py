"""Fiber volumes in the local model of an snc degeneration.

Near a point of the central fiber the family is {z_0^{b_0} ... z_p^{b_p} = eps tau}
inside the unit polydisc B in C^{n+1}. On X_tau the relative log canonical form
restricts to (1/b_0) dz_1/z_1 ^ ... ^ dz_p/z_p ^ dz_{p+1} ^ ... ^ dz_n, and the
substitution z_j = exp(w_j log(eps tau) + 2 pi i theta_j) turns its squared norm
into (2 pi L)^p b_0^{-2} dw dtheta dV_polydisc with L = log 1/(eps tau). The
volume is integrated over the simplex sigma, the torus T (b_0 sheets of theta_0)
and the polydisc, weighted by a positive twist rho(z).
"""

from dataclasses import dataclass
from math import factorial, pi, prod

import numpy as np

from .errors import DomainError, InputError

GAUSS = 32
MC_SAMPLES = 10 ** 6


def _twist_one(z):
    return np.ones(z.shape[:-1])


def _twist_radial(z):
    # smooth, positive, between e^{-1/2} and e^{1/2} on B
    k = z.shape[-1]
    return np.exp(np.sum(np.abs(z) ** 2, axis=-1) / k - 0.5)


def _twist_wave(z):
    # not rotation invariant, between 1/2 and 3/2
    return 1.0 + 0.5 * np.cos(2 * pi * z[..., 0].real) * np.exp(-np.abs(z[..., -1]) ** 2)


TWISTS = {"one": _twist_one, "radial": _twist_radial, "wave": _twist_wave}


@dataclass
class SNCModel:
    n: int
    p: int
    b: tuple
    eps: float = 1.0
    twist: object = "one"

    def __post_init__(self):
        self.n, self.p = int(self.n), int(self.p)
        self.b = tuple(int(x) for x in self.b)
        if self.n < 1 or not 0 <= self.p <= self.n:
            raise InputError("need n >= 1 and 0 <= p <= n")
        if len(self.b) != self.p + 1 or any(x < 1 for x in self.b):
            raise InputError("need p + 1 positive multiplicities b_0..b_p")
        if not self.eps > 0:
            raise InputError("eps must be positive")
        if isinstance(self.twist, str):
            if self.twist not in TWISTS:
                raise InputError("unknown twist %r (choose from %s)" % (self.twist, ", ".join(TWISTS)))
            self.rho = TWISTS[self.twist]
        elif callable(self.twist):
            self.rho = self.twist
        else:
            raise InputError("twist must be a name or a callable")

    def to_json(self):
        return {"n": self.n, "p": self.p, "b": list(self.b), "eps": self.eps,
                "twist": self.twist if isinstance(self.twist, str) else "custom"}


def closed_form(model, tau):
    """Volume for the trivial twist: (2 pi L)^p pi^{n-p} / (p! prod b_j)."""
    L = _logscale(model, tau)
    return (2 * pi * L) ** model.p * pi ** (model.n - model.p) / (factorial(model.p) * prod(model.b))


def _logscale(model, tau):
    tau = float(tau)
    if not tau > 0:
        raise InputError("tau must be positive")
    if tau >= model.eps or model.eps * tau >= 1:
        raise DomainError("domain degenerates: need tau < eps and eps * tau < 1 (tau = %g)" % tau)
    return -np.log(model.eps * tau)


def _gauss01(k):
    x, w = np.polynomial.legendre.leggauss(k)
    return 0.5 * (x + 1), 0.5 * w


def _simplex_nodes(bs, k):
    """Tensor Gauss rule on {w_1..w_p >= 0, sum b_j w_j <= 1} by collapsed coordinates."""
    p = len(bs)
    if p == 0:
        return np.zeros((1, 0)), np.ones(1)
    x, w = _gauss01(k)
    grids = np.meshgrid(*([x] * p), indexing="ij")
    wg = np.meshgrid(*([w] * p), indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    W = np.prod(np.stack([g.ravel() for g in wg], axis=1), axis=1)
    T = np.empty_like(U)
    rest = np.ones(U.shape[0])
    jac = np.ones(U.shape[0])
    for i in range(p):
        T[:, i] = rest * U[:, i]
        jac *= rest
        rest = rest - T[:, i]
    return T / np.array(bs, dtype=float), W * jac / prod(bs)


def _periodic(k):
    return np.arange(k) / k, np.full(k, 1.0 / k)


def fiber_volume(model, tau, k=GAUSS, seed=0, method=None):
    """Volume of B cap X_tau for the form |eta_tau|^2 rho."""
    L = _logscale(model, tau)
    if method is None:
        method = "mc" if model.n >= 3 else "gauss"
    if method == "gauss":
        return _volume_gauss(model, L, k)
    if method == "mc":
        return _volume_mc(model, L, MC_SAMPLES, seed)
    raise InputError("unknown method %r" % (method,))


def _points(model, L, w, th, sheet, zeta):
    """z in C^{n+1} from w (m, p), theta (m, p), sheet index (m,), polydisc (m, n-p)."""
    b = np.array(model.b, dtype=float)
    p = model.p
    m = w.shape[0]
    if p:
        w0 = (1 - w @ b[1:]) / b[0]
        th0 = (sheet - th @ b[1:]) / b[0]
        W = np.concatenate([w0[:, None], w], axis=1)
        TH = np.concatenate([th0[:, None], th], axis=1)
    else:
        W = np.full((m, 1), 1.0 / b[0])
        TH = (sheet / b[0])[:, None]
    zf = np.exp(-W * L + 2j * pi * TH)
    return np.concatenate([zf, zeta], axis=1)


def _volume_gauss(model, L, k):
    n, p, b0 = model.n, model.p, model.b[0]
    wn, ww = _simplex_nodes(model.b[1:], k)
    if p:
        tx, tw = _periodic(k)
        tg = np.meshgrid(*([tx] * p), indexing="ij")
        TH = np.stack([g.ravel() for g in tg], axis=1)
        THW = np.full(TH.shape[0], float(np.prod([tw[0]] * p)))
    else:
        TH, THW = np.zeros((1, 0)), np.ones(1)
    q = n - p
    if q:
        rx, rw = _gauss01(k)
        px, pw = _periodic(k)
        R, PH = np.meshgrid(rx, px, indexing="ij")
        disc = (R * np.exp(2j * pi * PH)).ravel()
        dw = (np.outer(rw * rx, pw) * 2 * pi).ravel()  # r dr dphi
        grids = np.meshgrid(*([np.arange(disc.size)] * q), indexing="ij")
        idx = np.stack([g.ravel() for g in grids], axis=1)
        Z = disc[idx]
        ZW = np.prod(dw[idx], axis=1)
    else:
        Z, ZW = np.zeros((1, 0), dtype=complex), np.ones(1)
    total = 0.0
    # loop over the smallest factors to bound memory
    for sheet in range(b0):
        for i in range(TH.shape[0]):
            m = wn.shape[0]
            w = np.repeat(wn, Z.shape[0], axis=0)
            th = np.repeat(TH[i:i + 1], m * Z.shape[0], axis=0)
            zz = np.tile(Z, (m, 1))
            wt = np.repeat(ww, Z.shape[0]) * np.tile(ZW, m)
            z = _points(model, L, w, th, np.full(w.shape[0], float(sheet)), zz)
            total += THW[i] * float(np.sum(wt * model.rho(z)))
    return (2 * pi * L) ** p / b0 ** 2 * total


def _volume_mc(model, L, N, seed):
    rng = np.random.default_rng(seed)
    n, p, b = model.n, model.p, model.b
    # uniform on the simplex {w >= 0, sum b_j w_j <= 1} (j >= 1): Dirichlet then rescale
    if p:
        e = rng.exponential(size=(N, p + 1))
        t = e[:, :p] / e.sum(axis=1, keepdims=True)
        w = t / np.array(b[1:], dtype=float)
        vol_s = 1.0 / (factorial(p) * prod(b[1:]))
        th = rng.random((N, p))
    else:
        w, th, vol_s = np.zeros((N, 0)), np.zeros((N, 0)), 1.0
    sheet = rng.integers(0, b[0], N).astype(float)
    q = n - p
    r = np.sqrt(rng.random((N, q)))
    zeta = r * np.exp(2j * pi * rng.random((N, q)))
    z = _points(model, L, w, th, sheet, zeta)
    mean = float(np.mean(model.rho(z)))
    return (2 * pi * L) ** p / b[0] ** 2 * vol_s * b[0] * pi ** q * mean


def default_tau_grid(lo=1e-12, hi=1e-6, num=13):
    return list(np.geomspace(lo, hi, num))


def exponent_fit(model, tau_grid=None, residual_threshold=0.05, **kw):
    """Least-squares slope of log volume against log log(1/tau)."""
    if tau_grid is None:
        tau_grid = default_tau_grid()
    taus = np.asarray(sorted(float(t) for t in tau_grid))
    if np.log10(taus[-1] / taus[0]) < 6 - 1e-9:
        raise InputError("tau grid must span at least six decades")
    vols = np.array([fiber_volume(model, t, **kw) for t in taus])
    X = np.log(np.log(1 / taus))
    Y = np.log(vols)
    c = np.polyfit(X, Y, 1)
    res = float(np.max(np.abs(Y - np.polyval(c, X))))
    sand = vols / np.log(1 / taus) ** model.p
    out = {
        "d_hat": float(c[0]),
        "p": model.p,
        "residual": res,
        "tau": taus.tolist(),
        "volume": vols.tolist(),
        "sandwich_ratio": float(sand.max() / sand.min()),
        "sandwich_min": float(sand.min()),
        "sandwich_max": float(sand.max()),
        "warnings": [],
    }
    if res > residual_threshold:
        out["warnings"].append("fit residual %.3g exceeds %.3g" % (res, residual_threshold))
    return out
