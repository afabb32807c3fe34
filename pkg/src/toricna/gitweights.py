"""Functions with log norm singularities, weight polytopes and the torus
boundedness criterion, plus Bergman/Fubini-Study plumbing on toric curves.

For f(g) = sum_i a_i log||g.v_i|| and a one-parameter subgroup lambda of the
torus, f(lambda(tau)) = fNA(lambda) log|tau|^{-1} + O(1) with

    fNA(lambda) = -sum_i a_i min_{m in M_{v_i}} <m, lambda>.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, InputError
from .exact import common_denominator, dot, frac, fvec, primitive
from .polytope import RationalPolytope, minkowski_sum, polytope_contains
from .potentials import LSEPotential, ToricPotential
from .quadrature import log_integrate


class WeightedVector:
    """A vector given by its weight components: weights[j] in Z^r with norm norms[j] > 0."""

    def __init__(self, weights, norms=None):
        ws = [tuple(int(frac(x)) if frac(x).denominator == 1 else None for x in m) for m in weights]
        if not ws:
            raise InputError("weight list M_v is empty")
        if any(None in m for m in ws):
            raise InputError("weights must be integral")
        r = len(ws[0])
        if any(len(m) != r for m in ws):
            raise InputError("weights have different ranks")
        if norms is None:
            norms = [1.0] * len(ws)
        norms = [float(x) for x in norms]
        if len(norms) != len(ws) or any(not x > 0 for x in norms):
            raise InputError("need one positive norm per weight")
        # merge repeated weights: components of the same weight add orthogonally
        acc = {}
        for m, c in zip(ws, norms):
            acc[m] = float(np.hypot(acc.get(m, 0.0), c))
        self.weights = list(acc)
        self.norms = [acc[m] for m in self.weights]
        self.rank = r
        self._P = None

    @property
    def polytope(self):
        if self._P is None:
            self._P = RationalPolytope([fvec(m) for m in self.weights])
        return self._P

    def to_json(self):
        return {"weights": [list(m) for m in self.weights], "norms": list(self.norms)}

    def __repr__(self):
        return "WeightedVector(%s)" % (self.weights,)


@dataclass(frozen=True)
class OneParamSubgroup:
    """lambda in Z^r; k (optional) is a compact-group element for conjugated directions."""
    lam: tuple
    k: object = None

    @classmethod
    def of(cls, lam):
        if isinstance(lam, OneParamSubgroup):
            return lam
        if np.ndim(lam) == 0:
            lam = [lam]
        return cls(tuple(frac(x) for x in lam))


class LogNormFunction:
    def __init__(self, terms):
        terms = list(terms)
        if not terms:
            raise InputError("need at least one term")
        out = []
        for a, v in terms:
            try:
                a = frac(a)
            except (TypeError, ValueError):
                raise InputError("coefficient %r is not rational; clear denominators" % (a,))
            if not isinstance(v, WeightedVector):
                raise InputError("terms must carry WeightedVector instances")
            out.append((a, v))
        r = out[0][1].rank
        if any(v.rank != r for _, v in out):
            raise InputError("weighted vectors of different ranks")
        self.terms = out
        self.rank = r

    def __call__(self, lam, s, norm="l2"):
        """f(lambda(e^{-s})) for the chosen norm ('l2' or 'max'); vectorized in s."""
        lam = OneParamSubgroup.of(lam).lam
        s = np.atleast_1d(np.asarray(s, dtype=float))
        tot = np.zeros_like(s)
        for a, v in self.terms:
            pair = np.array([float(dot(m, lam)) for m in v.weights])
            ln = np.log(np.array(v.norms))
            z = ln[None, :] - s[:, None] * pair[None, :]
            if norm == "l2":
                m = z.max(axis=1, keepdims=True)
                val = m[:, 0] + 0.5 * np.log(np.sum(np.exp(2 * (z - m)), axis=1))
            elif norm == "max":
                val = z.max(axis=1)
            else:
                raise InputError("unknown norm %r" % (norm,))
            tot += float(a) * val
        return tot

    def to_json(self):
        return {
            "rank": self.rank,
            "vectors": [v.to_json() for _, v in self.terms],
            "coeffs": [[a.numerator, a.denominator] for a, _ in self.terms],
        }

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict) or "vectors" not in data:
            raise InputError("log-norm JSON needs 'vectors'")
        vecs = [WeightedVector(v["weights"], v.get("norms")) for v in data["vectors"]]
        coeffs = data.get("coeffs", [1] * len(vecs))
        if len(coeffs) != len(vecs):
            raise InputError("one coefficient per vector required")
        f = cls(list(zip(coeffs, vecs)))
        if "rank" in data and int(data["rank"]) != f.rank:
            raise InputError("declared rank %s does not match the weights" % data["rank"])
        return f


# ---------------------------------------------------------------- exact side

def support_function(v, lam):
    """h_v(lambda) = max_{m in M_v} <m, lambda>."""
    lam = OneParamSubgroup.of(lam).lam
    if not v.weights:
        raise InputError("empty weight set")
    if len(lam) != v.rank:
        raise InputError("dimension mismatch: lambda has %d entries, weights %d" % (len(lam), v.rank))
    return max(dot(m, lam) for m in v.weights)


def fNA(f, lam):
    lam = OneParamSubgroup.of(lam).lam
    tot = Fraction(0)
    for a, v in f.terms:
        tot += a * support_function(v, tuple(-x for x in lam))
    return tot


def slope_vs_fNA(f, lam, s_range=(5.0, 40.0), num=36, norm="l2"):
    s = np.linspace(s_range[0], s_range[1], num)
    vals = f(lam, s, norm=norm)
    num_slope = float(np.polyfit(s, vals, 1)[0])
    exact = fNA(f, lam)
    return {
        "numeric": num_slope,
        "exact": exact,
        "diff": abs(num_slope - float(exact)),
        "pass": bool(abs(num_slope - float(exact)) <= 1e-3),
        "norm": norm,
    }


def reduce_pair(f):
    """Clear denominators: D f = log||g.V|| - log||g.W|| with weight polytopes P_V, P_W."""
    D = common_denominator([a for a, _ in f.terms])
    pos, neg = [], []
    for a, v in f.terms:
        k = a * D
        if k == 0:
            continue
        (pos if k > 0 else neg).extend([v.polytope] * int(abs(k)))
    zero = RationalPolytope([tuple(Fraction(0) for _ in range(f.rank))])
    PV = minkowski_sum(*pos) if pos else zero
    PW = minkowski_sum(*neg) if neg else zero
    return D, PV, PW


def _integral_direction(vec):
    vec = fvec(vec)
    den = common_denominator(vec)
    return primitive([int(x * den) for x in vec])


def bounded_below_torus(f, witness=False):
    """f bounded below on the torus iff P_W is contained in P_V."""
    D, PV, PW = reduce_pair(f)
    ok = polytope_contains(PV, PW)
    if not witness:
        return ok
    lam = None
    if not ok:
        lam = _witness(f, PV, PW)
    return ok, lam


def _witness(f, PV, PW):
    for w in PW.vertices:
        for e, d in PV.equations:
            if dot(e, w) != d:
                for sgn in (1, -1):
                    lam = tuple(sgn * x for x in _integral_direction(e))
                    if fNA(f, lam) < 0:
                        return lam
        for a, b in PV.inequalities:
            if dot(a, w) < b:
                lam = tuple(_integral_direction(a))
                if fNA(f, lam) < 0:
                    return lam
    raise DomainError("no witness found although P_W is not contained in P_V")


def fan_directions(f):
    """Generators of the normal fan of P_V + P_W: facet normals and +-lineality directions."""
    _, PV, PW = reduce_pair(f)
    S = minkowski_sum(PV, PW)
    dirs = set()
    for a, _ in S.inequalities:
        dirs.add(tuple(_integral_direction(a)))
    for e, _ in S.equations:
        d = tuple(_integral_direction(e))
        dirs.add(d)
        dirs.add(tuple(-x for x in d))
    return sorted(dirs)


def bounded_below_fan(f):
    """Second decision procedure: fNA >= 0 on every generator of the normal fan."""
    dirs = fan_directions(f)
    if not dirs:
        return True
    return min(fNA(f, d) for d in dirs) >= 0


# ---------------------------------------------------------------- SL(N) probes

class TensorVector:
    """A rank-one tensor x_1 (x) ... (x) x_d in (C^N)^{(x) d} under the diagonal torus of SL(N)."""

    def __init__(self, factors):
        self.factors = [np.asarray(x, dtype=complex) for x in factors]
        if not self.factors:
            raise InputError("need at least one factor")
        self.N = self.factors[0].size
        if any(x.size != self.N for x in self.factors):
            raise InputError("tensor factors of different sizes")

    def act(self, k):
        return TensorVector([k @ x for x in self.factors])

    def weighted(self, tol=1e-12):
        """Weight components (weights in the sum-zero lattice, scaled by N) with their norms."""
        N = self.N
        comp = {}
        for idx in itertools.product(range(N), repeat=len(self.factors)):
            c = np.prod([x[i] for x, i in zip(self.factors, idx)])
            m = [0] * N
            for i in idx:
                m[i] += 1
            key = tuple(N * mi - len(self.factors) for mi in m)
            comp[key] = comp.get(key, 0.0) + c
        scale = max(abs(c) for c in comp.values())
        keep = [(m, abs(c)) for m, c in comp.items() if abs(c) > tol * scale]
        return WeightedVector([m for m, _ in keep], [c for _, c in keep])


def haar_unitary(N, rng):
    z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return q / np.linalg.det(q) ** (1.0 / N)


def conjugated_probe(terms, trials=64, seed=0):
    """Torus verdicts for k.v_i over sampled k in SU(N) (identity and Weyl permutations first).

    terms: list of (a_i, TensorVector). The full criterion needs every k; the
    sample gives a necessary condition and a stability report.
    """
    terms = [(frac(a), v) for a, v in terms]
    N = terms[0][1].N
    rng = np.random.default_rng(seed)
    ks = [("identity", np.eye(N, dtype=complex))]
    for perm in itertools.permutations(range(N)):
        if list(perm) != list(range(N)):
            ks.append(("weyl%s" % (perm,), np.eye(N, dtype=complex)[list(perm)]))
    while len(ks) < trials:
        ks.append(("haar%d" % len(ks), haar_unitary(N, rng)))
    ks = ks[:max(trials, 1)]
    rows = []
    for label, k in ks:
        f = LogNormFunction([(a, v.act(k).weighted()) for a, v in terms])
        ok, lam = bounded_below_torus(f, witness=True)
        rows.append({"k": label, "bounded": ok, "witness": lam,
                     "fNA_witness": fNA(f, lam) if lam is not None else None})
    verdicts = [r["bounded"] for r in rows]
    return {
        "trials": len(rows),
        "identity": verdicts[0],
        "stable": len(set(verdicts)) == 1,
        "bounded": all(verdicts),
        "rows": rows,
    }


def conjugation_defect(terms, k, lam, s_range=(5.0, 40.0), num=36):
    """Numeric slope of f(lambda(tau) k) - f(lambda(tau)) in log|tau|^{-1}; nonzero means unbounded."""
    terms = [(frac(a), v) for a, v in terms]
    f0 = LogNormFunction([(a, v.weighted()) for a, v in terms])
    fk = LogNormFunction([(a, v.act(k).weighted()) for a, v in terms])
    s = np.linspace(s_range[0], s_range[1], num)
    d = fk(lam, s) - f0(lam, s)
    return float(np.polyfit(s, d, 1)[0]), fNA(fk, lam) - fNA(f0, lam)


# ---------------------------------------------------------------- Bergman

def bergman_map(u, m):
    """Fubini-Study potential of the L^2(m phi, MA(phi))-orthonormal monomial basis."""
    if not isinstance(u, ToricPotential):
        raise InputError("expected a ToricPotential")
    m = int(m)
    if m < 1:
        raise InputError("level must be a positive integer")
    P = u.polytope
    a, b = P.interval_ends
    if (a * m).denominator != 1 or (b * m).denominator != 1:
        raise DomainError("level %d does not make the polytope integral" % m)
    ks = list(range(int(a * m), int(b * m) + 1))
    L = u.length
    lognorm = []
    for k in ks:
        def lg(y, k=k):
            x = u.x_of_y(y)
            return 2 * (m * u.ustar(y) + (k - m * y) * x)
        v, _ = log_integrate(lg, u.a, u.b, u.breaks)
        lognorm.append(v - np.log(L))
    lognorm = np.array(lognorm)
    if not np.all(np.isfinite(lognorm)):
        raise DomainError("Gram matrix ill-conditioned: non-finite monomial norms")
    cond = float(np.exp(np.ptp(lognorm))) if np.ptp(lognorm) < 700 else float("inf")
    if not np.isfinite(cond) or cond > 1e300:
        raise DomainError("Gram matrix ill-conditioned (condition number %.3g)" % cond)
    return LSEPotential(P, [Fraction(k, m) for k in ks], -lognorm, beta=m)


def sup_distance(u, v, npts=2001):
    y = u.a + u.length * 0.5 * (1 - np.cos(np.linspace(0, np.pi, npts)[1:-1]))
    d = np.abs(u.ustar(y) - v.ustar(y))
    ends = [abs(u.ustar_end(w) - v.ustar_end(w)) for w in ("a", "b")]
    return float(max(d.max(), *ends))


def ricci_bound_check(u, m=None, npts=4001):
    """Scalar curvature S <= m N_m on a grid, for u = (1/2m) log sum of N_m terms."""
    if not isinstance(u, LSEPotential):
        raise InputError("ricci_bound_check needs a log-sum-exp potential")
    if m is None:
        m = u.beta
    N = len(u.p)
    ts = np.linspace(-1, 1, npts)
    x = np.concatenate([40 * np.sinh(3 * ts) / np.sinh(3), u.x_of_y(u.a + u.length * np.linspace(0, 1, 401)[1:-1])])
    S = u.scalar_x(x)
    bound = m * N
    viol = float(np.max(S - bound))
    return {
        "m": m,
        "N": N,
        "bound": bound,
        "max_S": float(S.max()),
        "max_violation": max(viol, 0.0),
        "slack": bound - float(S.max()),
        "holds": bool(viol <= 1e-8),
    }


def bergman_weight_vector(f, m):
    """Rank-one weighted vector with weights m f(k/m), k in mP cap Z (toric 1-PS of a PL f)."""
    a, b = f.P.interval_ends
    ws = []
    for k in range(int(a * m), int(b * m) + 1):
        w = m * f((Fraction(k, m),))
        if w.denominator != 1:
            raise DomainError("integrality: weight m f(k/m) not integral at level %d" % m)
        ws.append([w])
    return WeightedVector(ws)
