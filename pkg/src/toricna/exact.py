"""Small exact linear-algebra helpers over the rationals."""

from fractions import Fraction
from math import gcd, lcm


def frac(x):
    """Coerce ints, strings, Fractions and ``[num, den]`` pairs to Fraction.

    Floats are accepted only when they are exactly representable, which is
    always true for binary floats, so ``0.1`` becomes its exact binary value.
    Callers that care should pass strings or pairs.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("boolean is not a rational number")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return Fraction(int(x[0]), int(x[1]))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            raise ValueError("non-finite value %r" % x)
        return Fraction(x)
    try:
        return Fraction(x)
    except TypeError:
        raise TypeError("cannot read %r as a rational" % (x,)) from None


def fvec(v):
    return tuple(frac(x) for x in v)


def dot(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def common_denominator(values):
    d = 1
    for x in values:
        d = lcm(d, Fraction(x).denominator)
    return d


def primitive(v):
    """Scale a rational vector to the primitive integer vector on its ray."""
    d = common_denominator(v)
    ints = [int(x * d) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def rref(rows, ncols=None):
    """Reduced row echelon form. Returns (matrix, pivot columns)."""
    m = [list(map(Fraction, r)) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows):
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows, ncols):
    """Basis of {x : A x = 0} as a list of rational vectors."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    m, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        x = [Fraction(0)] * ncols
        x[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            x[pc] = -m[i][fcol]
        basis.append(tuple(x))
    return basis


def solve(A, b):
    """Solve the square system A x = b exactly; None if singular."""
    n = len(A)
    aug = [list(map(Fraction, A[i])) + [Fraction(b[i])] for i in range(n)]
    m, pivots = rref(aug, n)
    if pivots != list(range(n)):
        return None
    return tuple(m[i][n] for i in range(n))


def det(A):
    n = len(A)
    m = [list(map(Fraction, r)) for r in A]
    sign = 1
    out = Fraction(1)
    for c in range(n):
        piv = None
        for i in range(c, n):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        out *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                factor = m[i][c] / m[c][c]
                m[i] = [a - factor * bb for a, bb in zip(m[i], m[c])]
    return sign * out


def ceil_frac(x):
    x = Fraction(x)
    return -((-x.numerator) // x.denominator)


def floor_frac(x):
    x = Fraction(x)
    return x.numerator // x.denominator
