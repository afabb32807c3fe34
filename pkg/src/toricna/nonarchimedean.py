"""Toric test configurations and exact non-Archimedean functionals.

A rational convex PL function f on P gives the polytope
Q_f = {(y, t) : y in P, 0 <= t <= M - f(y)}, the moment polytope of the
compactified total space over P^1. Its roof facets are the irreducible
components E of the central fibre, its side facets are the closures of the
toric divisors of X times C, and its bottom facet is the fibre at infinity.

Sign convention: the Legendre ray u*_s = u*_0 + s f has non-Archimedean
limit phi = phi_triv - f. Accordingly E^NA = -avg f, sup(phi - phi_triv)
= -min f and J^NA = avg f - min f. See README for the discussion.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial, lcm

from .errors import (ConsistencyError, EntropyMismatchError, InfeasibleError, InputError,
                     NonSmoothConeError)
from .exact import ceil_frac, dot, frac, fvec, solve
from .plfunction import PLConvexFunction
from .polytope import (MomentPolytope, RationalPolytope, _facet_latvol_centroid, mixed_volume,
                       volume)
from .simplex import lp_minimize


@dataclass(frozen=True)
class Component:
    """Irreducible component E of the central fibre."""
    index: int
    b: int
    v: tuple
    A_X: Fraction
    mass: Fraction
    cell: RationalPolytope
    affine: tuple
    roof_lattice_volume: Fraction

    @property
    def A_XC(self):
        return self.b * (1 + self.A_X)


@dataclass
class NAFunctionalReport:
    E_NA: Fraction
    I_NA: Fraction
    J_NA: Fraction
    H_NA: Fraction
    R_NA: Fraction
    M_NA: Fraction
    DF: Fraction
    L_NA: Fraction = None
    D_NA: Fraction = None
    delta: Fraction = None
    DF_slack: Fraction = None
    extra: dict = field(default_factory=dict)

    def as_dict(self):
        keys = ["E_NA", "I_NA", "J_NA", "H_NA", "R_NA", "M_NA", "DF", "L_NA", "D_NA", "delta", "DF_slack"]
        return {k: getattr(self, k) for k in keys}


def log_discrepancy_product(P, w):
    """A_{X x C} of the toric valuation of X x C with weight w = (xi, t), t >= 0."""
    w = fvec(w)
    n = P.n
    if w[n] < 0:
        raise InputError("weight must have nonnegative last coordinate")
    for vert, gens in P.vertex_cones():
        G = [tuple(g) + (0,) for g in gens] + [tuple([0] * n) + (1,)]
        A = [[G[i][k] for i in range(n + 1)] for k in range(n + 1)]
        c = solve(A, w)
        if c is not None and all(x >= 0 for x in c):
            return sum(c, Fraction(0))
    raise NonSmoothConeError("weight %s not in a smooth cone of X x C" % (w,))


class ToricTestConfig:
    """Test configuration attached to a convex rational PL function."""

    def __init__(self, P, f, M=None):
        if not isinstance(P, MomentPolytope):
            raise InputError("expected a MomentPolytope")
        if f.P != P:
            raise InputError("PL function lives on a different polytope")
        self.P = P
        self.f = f
        self.n = n = P.n
        if M is None:
            M = ceil_frac(f.max()) + 1
        M = frac(M)
        if M <= f.max():
            raise InputError("height constant M must exceed max f")
        self.M = M
        pts = set()
        for cell in f.cells:
            for v in cell.vertices:
                pts.add(tuple(v) + (Fraction(0),))
                pts.add(tuple(v) + (M - f(v),))
        for v in P.vertices:
            pts.add(tuple(v) + (Fraction(0),))
            pts.add(tuple(v) + (M - f(v),))
        self.cayley = Q = RationalPolytope(sorted(pts))
        if Q.dim != n + 1:
            raise ConsistencyError("Cayley polytope is not full-dimensional")
        self.P0 = RationalPolytope([tuple(v) + (Fraction(0),) for v in P.vertices])

        nf = factorial(n)
        V = P.V
        self.roofs, self.sides, self.bottom = [], [], []
        for F in Q.facets:
            last = F.normal[n]
            lv, _ = _facet_latvol_centroid(list(F.vertices), F.normal, F.offset)
            if last < 0:
                self.roofs.append((F, lv))
            elif last == 0:
                self.sides.append((F, lv))
            else:
                self.bottom.append((F, lv))
        if len(self.bottom) != 1:
            raise ConsistencyError("expected exactly one bottom facet")

        # central fibre components from the roof facets of Q
        comps = []
        piece_of = {}
        for cell, piece in zip(f.cells, f.pieces):
            piece_of[piece] = cell
        for idx, (F, lv) in enumerate(sorted(self.roofs, key=lambda t: t[0].normal)):
            b = -F.normal[n]
            xi = tuple(Fraction(x, b) for x in F.normal[:n])
            a = tuple(-x for x in xi)
            # roof: -b a.y - b t >= offset  =>  t <= M - a.y - c with c = M + offset/b
            c = M + F.offset / b
            if (a, c) not in piece_of:
                raise ConsistencyError("roof facet %s does not match any piece of f" % (F.normal,))
            den = lcm(*[x.denominator for x in a]) if a else 1
            if den != b:
                raise ConsistencyError("lattice height %d differs from denominator %d" % (b, den))
            A = P.log_discrepancy(xi)
            mass = b * nf * lv / V
            comps.append(Component(idx, b, xi, A, mass, piece_of[(a, c)], (a, c), lv))
        self.components = tuple(comps)
        if sum(c.mass for c in comps) != 1:
            raise ConsistencyError("Monge-Ampere masses do not sum to 1")
        for c in comps:
            if log_discrepancy_product(P, tuple(c.b * x for x in c.v) + (c.b,)) != c.A_XC:
                raise ConsistencyError("A_{X x C}(ord_E) != b_E (1 + A_X(v_E)) for component %d" % c.index)

        # intersection numbers with L_phi = L_Q - M X_0
        self.V = V
        self.Lphi_top = factorial(n + 1) * volume(Q) - (n + 1) * M * V
        side_terms = []
        for F, lv in self.sides:
            match = [G for G in P.facets if G.normal == F.normal[:n]]
            if len(match) != 1:
                raise ConsistencyError("side facet %s has no matching facet of P" % (F.normal,))
            G = match[0]
            gl, _ = _facet_latvol_centroid(list(G.vertices), G.normal, G.offset)
            fibre = factorial(n - 1) * gl
            side_terms.append((F.normal[:n], nf * lv - n * M * fibre))
        self.side_terms = side_terms
        self.roof_terms = [(c, nf * c.roof_lattice_volume) for c in comps]

    # ---- intersection-theoretic building blocks

    @cached_property
    def phi_dot_triv(self):
        """(L_phi . L_triv^n)."""
        n = self.n
        return factorial(n + 1) * mixed_volume([self.cayley] + [self.P0] * n) - self.M * self.V

    @cached_property
    def triv_dot_phi(self):
        """(L_triv . L_phi^n)."""
        n = self.n
        return factorial(n + 1) * mixed_volume([self.P0] + [self.cayley] * n) - n * self.M * self.V

    @cached_property
    def klog_term(self):
        """V^-1 (K^log_{Xbar/P^1} . L_phi^n); K^log is minus the sum of side divisors."""
        return -sum((t for _, t in self.side_terms), Fraction(0)) / self.V

    @cached_property
    def rho_k_term(self):
        """V^-1 (rho^* K^log_{X x P^1/P^1} . L_phi^n) via the support function of K_X on rays."""
        P = self.P
        tot = Fraction(0)
        for xi, t in self.side_terms:
            tot += -P.log_discrepancy(xi) * t
        for c, t in self.roof_terms:
            tot += -P.log_discrepancy(tuple(c.b * x for x in c.v)) * t
        return tot / self.V

    @cached_property
    def nonreduced_term(self):
        """V^-1 ((X_0 - X_0,red) . L_phi^n)."""
        return sum(((c.b - 1) * t for c, t in self.roof_terms), Fraction(0)) / self.V


def make_config(P, f, M=None):
    if not isinstance(f, PLConvexFunction):
        raise InputError("expected a PLConvexFunction")
    return ToricTestConfig(P, f, M)


def na_energy(config):
    n = config.n
    E = config.Lphi_top / ((n + 1) * config.V)
    if E != -config.f.average():
        raise ConsistencyError("E^NA intersection number %s != -avg f = %s" % (E, -config.f.average()))
    return E


def sup_phi(config):
    """V^-1 (phi . phi_triv^n) = sup(phi - phi_triv) = -min f."""
    val = config.phi_dot_triv / config.V
    if val != -config.f.min():
        raise ConsistencyError("V^-1(phi.phi_triv^n) = %s but -min f = %s" % (val, -config.f.min()))
    return val


def na_J(config):
    return sup_phi(config) - na_energy(config)


def na_I(config):
    return sup_phi(config) - (config.Lphi_top - config.triv_dot_phi) / config.V


def na_entropy_both(config):
    """(valuative, intersection) values of H^NA."""
    f = config.f
    volP = config.P.vol
    cellvol = dict(zip(f.pieces, f.cell_volumes()))
    val = Fraction(0)
    for c in config.components:
        val += cellvol[c.affine] / volP * c.A_X
    inter = config.klog_term - config.rho_k_term
    return val, inter


def na_entropy(config):
    val, inter = na_entropy_both(config)
    if val != inter:
        raise EntropyMismatchError(val, inter)
    return val


def na_ricci(config):
    return config.rho_k_term


def na_mabuchi(config):
    P = config.P
    M = na_entropy(config) + na_ricci(config) + P.meanS * na_energy(config)
    f = config.f
    donaldson = (f.boundary_integral() - P.meanS * f.integral()) / P.vol
    if M != donaldson:
        raise ConsistencyError("M^NA = %s but the boundary formula gives %s" % (M, donaldson))
    return M


def donaldson_futaki(config):
    M = na_mabuchi(config)
    DF = M + config.nonreduced_term
    # second route: V^-1 (K_{Xbar/P^1} . L^n) + Sbar E^NA
    alt = config.klog_term + config.nonreduced_term + config.P.meanS * na_energy(config)
    if DF != alt:
        raise ConsistencyError("DF routes disagree: %s vs %s" % (DF, alt))
    return DF


def na_ma_measure(config):
    """Atomic measure as a list of (v_E, mass_E)."""
    out = {}
    for c in config.components:
        out[c.v] = out.get(c.v, Fraction(0)) + c.mass
    return sorted(out.items())


def phi_at(config, xi):
    """(phi - phi_triv)(v_xi) for the monomial valuation with weight xi."""
    xi = fvec(xi)
    P, f = config.P, config.f
    lo_P = min(dot(xi, v) for v in P.vertices)
    lo_f = min(f(v) + dot(xi, v) for cell in f.cells for v in cell.vertices)
    return lo_P - lo_f


def ding_candidates(config):
    P, f = config.P, config.f
    cand = {tuple(Fraction(0) for _ in range(P.n))}
    cand.update(c.v for c in config.components)
    cand.update(tuple(Fraction(x) for x in F.normal) for F in P.facets)
    for cell in f.cells:
        if cell.dim == cell.ambient_dim:
            for F in cell.facets:
                cand.add(tuple(Fraction(x) for x in F.normal))
                cand.add(tuple(Fraction(-x) for x in F.normal))
    return sorted(cand)


def na_ding(config, refine=0):
    """(L^NA, D^NA) over the toric candidate set.

    With refine > 0 the candidate set is enlarged by all weights with
    coordinates in (1/refine)Z and absolute value at most the largest slope of
    f plus one, and ``ding_refinement_gap`` reports how much that lowered L^NA.
    """
    P = config.P
    P.anticanonical_center()
    cand = ding_candidates(config)
    if refine:
        import itertools
        bound = max([abs(x) for a, _ in config.f.pieces for x in a] + [Fraction(0)]) + 1
        k = int(bound * refine)
        grid = [Fraction(i, refine) for i in range(-k, k + 1)]
        cand = sorted(set(cand) | set(itertools.product(grid, repeat=P.n)))
    L = min(P.log_discrepancy(xi) + phi_at(config, xi) for xi in cand)
    return L, L - na_energy(config)


def ding_refinement_gap(config, refine=4):
    return na_ding(config)[0] - na_ding(config, refine=refine)[0]


def na_report(config, delta=None):
    E = na_energy(config)
    J = na_J(config)
    I = na_I(config)
    H = na_entropy(config)
    R = na_ricci(config)
    M = na_mabuchi(config)
    if M != H + R + config.P.meanS * E:
        raise ConsistencyError("Chen-Tian assembly failed")
    DF = donaldson_futaki(config)
    rep = NAFunctionalReport(E, I, J, H, R, M, DF)
    if config.P.is_anticanonical():
        rep.L_NA, rep.D_NA = na_ding(config)
    if delta is not None:
        rep.delta = frac(delta)
        rep.DF_slack = DF - rep.delta * J
    rep.extra = {
        "b_E": [c.b for c in config.components],
        "v_E": [list(c.v) for c in config.components],
        "A_X": [c.A_X for c in config.components],
        "mass": [c.mass for c in config.components],
        "M_height": config.M,
    }
    return rep


# ---------------------------------------------------------------- threshold

def _grid(P, breakpoints):
    a, b = P.interval_ends
    pts = sorted({a, b} | {frac(y) for y in breakpoints})
    if pts[0] != a or pts[-1] != b:
        raise InputError("breakpoints must lie in the polytope")
    return pts


def stability_threshold(P, breakpoints, family="convex"):
    """Exact threshold  min { M^NA(f) : f convex PL on the grid, J^NA(f) = 1 }.

    Only n = 1 is supported. The grid is P's endpoints plus ``breakpoints``.
    ``family="constant"`` restricts to constant f, for which the
    normalization J^NA = 1 is unreachable and InfeasibleError is raised.

    J^NA = avg f - min f is handled by one LP per candidate argmin grid point.
    M^NA is linear in the grid values and bounds DF from below; the report also
    gives DF of the minimizer, which equals M^NA when its slopes are integral.
    """
    if P.n != 1:
        raise InputError("stability_threshold is implemented for n = 1")
    ys = _grid(P, breakpoints)
    K = len(ys)
    volP = P.vol
    S = P.meanS
    # integral of f by trapezoid weights (exact for PL on the grid)
    wint = [Fraction(0)] * K
    for j in range(K - 1):
        h = ys[j + 1] - ys[j]
        wint[j] += h / 2
        wint[j + 1] += h / 2
    obj = [Fraction(0)] * K
    obj[0] += 1
    obj[-1] += 1
    obj = [(o - S * w) / volP for o, w in zip(obj, wint)]
    base = []
    for j in range(1, K - 1):
        # slope(j, j+1) >= slope(j-1, j)
        row = [Fraction(0)] * K
        h1, h2 = ys[j] - ys[j - 1], ys[j + 1] - ys[j]
        row[j + 1] += 1 / h2
        row[j] -= 1 / h2 + 1 / h1
        row[j - 1] += 1 / h1
        base.append((row, ">=", 0))
    if family == "constant":
        for j in range(1, K):
            row = [Fraction(0)] * K
            row[j], row[0] = Fraction(1), Fraction(-1)
            base.append((row, "==", 0))
    elif family != "convex":
        raise InputError("unknown family %r" % (family,))
    cases = []
    best = None
    for v in range(K):
        cons = list(base)
        e = [Fraction(0)] * K
        e[v] = Fraction(1)
        cons.append((e, "==", 0))
        for w in range(K):
            if w != v:
                row = [Fraction(0)] * K
                row[w] = Fraction(1)
                cons.append((row, ">=", 0))
        avg = [w / volP for w in wint]
        cons.append((avg, "==", 1))
        try:
            opt, arg = lp_minimize(obj, cons)
        except InfeasibleError:
            cases.append((ys[v], None))
            continue
        cases.append((ys[v], opt))
        if best is None or opt < best[0]:
            best = (opt, arg)
    if best is None:
        raise InfeasibleError("infeasible: J^NA = 1 is unreachable on this family")
    opt, arg = best
    f = PLConvexFunction.from_breakpoints(P, ys, arg)
    cfg = make_config(P, f)
    return {
        "delta": opt,
        "witness": f,
        "witness_values": list(zip(ys, arg)),
        "witness_DF": donaldson_futaki(cfg),
        "witness_M": na_mabuchi(cfg),
        "witness_J": na_J(cfg),
        "cases": cases,
    }
