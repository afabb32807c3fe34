"""Two-phase dense simplex method in exact rational arithmetic (Bland's rule)."""

from fractions import Fraction

from .errors import InfeasibleError, InputError, UnboundedError
from .exact import frac

_SENSES = {"<=", ">=", "=="}


def lp_minimize(c, constraints):
    """Minimize c.x over free variables x subject to linear constraints.

    constraints is a list of (coeffs, sense, rhs) with sense one of
    "<=", ">=", "==". Returns (optimum, argmin) as Fractions.
    Raises InfeasibleError or UnboundedError.
    """
    c = [frac(x) for x in c]
    nv = len(c)
    rows = []
    for coeffs, sense, rhs in constraints:
        if sense not in _SENSES:
            raise InputError("unknown constraint sense %r" % (sense,))
        coeffs = [frac(x) for x in coeffs]
        if len(coeffs) != nv:
            raise InputError("constraint has %d coefficients, objective has %d" % (len(coeffs), nv))
        rows.append((coeffs, sense, frac(rhs)))

    # columns: x+ (nv), x- (nv), slacks, artificials
    nslack = sum(1 for _, s, _ in rows if s != "==")
    m = len(rows)
    ncol = 2 * nv + nslack
    T = []
    rhs = []
    k = 0
    for coeffs, sense, b in rows:
        r = coeffs + [-x for x in coeffs] + [Fraction(0)] * nslack
        if sense == "<=":
            r[2 * nv + k] = Fraction(1)
            k += 1
        elif sense == ">=":
            r[2 * nv + k] = Fraction(-1)
            k += 1
        if b < 0:
            r = [-x for x in r]
            b = -b
        T.append(r)
        rhs.append(b)
    # artificials
    for i in range(m):
        for j in range(m):
            T[i].append(Fraction(int(i == j)))
    ntot = ncol + m
    basis = [ncol + i for i in range(m)]

    phase1 = [Fraction(0)] * ncol + [Fraction(1)] * m
    _run(T, rhs, basis, phase1, ntot)
    if sum(rhs[i] for i in range(m) if basis[i] >= ncol) != 0:
        raise InfeasibleError("infeasible")
    # drive artificials out of the basis
    for i in range(m):
        if basis[i] >= ncol:
            for j in range(ncol):
                if T[i][j] != 0:
                    _pivot(T, rhs, basis, i, j)
                    break
    keep = [i for i in range(m) if basis[i] < ncol]
    T = [T[i][:ncol] for i in keep]
    rhs = [rhs[i] for i in keep]
    basis = [basis[i] for i in keep]

    cost = c + [-x for x in c] + [Fraction(0)] * nslack
    _run(T, rhs, basis, cost, ncol)
    x = [Fraction(0)] * ncol
    for i, j in enumerate(basis):
        x[j] = rhs[i]
    arg = tuple(x[j] - x[nv + j] for j in range(nv))
    opt = sum((a * b for a, b in zip(c, arg)), Fraction(0))
    return opt, arg


def _pivot(T, rhs, basis, r, j):
    p = T[r][j]
    T[r] = [x / p for x in T[r]]
    rhs[r] = rhs[r] / p
    for i in range(len(T)):
        if i != r and T[i][j] != 0:
            f = T[i][j]
            T[i] = [a - f * b for a, b in zip(T[i], T[r])]
            rhs[i] -= f * rhs[r]
    basis[r] = j


def _run(T, rhs, basis, cost, ncol):
    m = len(T)
    while True:
        # reduced costs
        y = [cost[basis[i]] for i in range(m)]
        enter = None
        for j in range(ncol):
            if j in basis:
                continue
            rc = cost[j] - sum((y[i] * T[i][j] for i in range(m)), Fraction(0))
            if rc < 0:
                enter = j
                break
        if enter is None:
            return
        leave = None
        best = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = rhs[i] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            raise UnboundedError("unbounded")
        _pivot(T, rhs, basis, leave, enter)
