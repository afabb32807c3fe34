"""Exact rational polytope geometry.

Everything here works over ``fractions.Fraction``. Convex hulls are found by
brute force over affinely spanning subsets with integer arithmetic after
clearing denominators, which is plenty for the handful-of-vertices polytopes
in dimension at most four that the rest of the package builds.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial, gcd, isqrt
import itertools

import numpy as np

from .errors import DimensionMismatchError, EmptyPolytopeError, InputError, NonSmoothConeError, NotAnticanonicalError
from .exact import common_denominator, det, dot, frac, fvec, nullspace, primitive, rref, solve
from .simplex import lp_minimize  # re-exported

__all__ = [
    "RationalPolytope", "MomentPolytope", "Facet", "volume", "boundary_integral",
    "mixed_volume", "minkowski_sum", "polytope_contains", "lp_minimize", "FlaggedFloat",
]

_INT64_SAFE = 2 ** 61


@dataclass(frozen=True)
class Facet:
    """Facet {x : normal . x >= offset} with primitive integral inward normal."""
    normal: tuple
    offset: Fraction
    vertices: tuple

    def slack(self, x):
        return dot(self.normal, x) - self.offset


class FlaggedFloat(float):
    """Float result of a numeric fallback; ``numeric`` is always True."""
    numeric = True


# ---------------------------------------------------------------- hull kernel

def _normals(diffs, d):
    """Generalized cross products of d-1 difference vectors (arrays K x d)."""
    if d == 2:
        (a,) = diffs
        return np.stack([-a[:, 1], a[:, 0]], axis=1)
    if d == 3:
        a, b = diffs
        return np.stack([
            a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1],
            a[:, 2] * b[:, 0] - a[:, 0] * b[:, 2],
            a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0],
        ], axis=1)
    if d == 4:
        a, b, c = diffs
        cols = []
        for j in range(4):
            idx = [k for k in range(4) if k != j]
            x, y, z = idx
            m = (a[:, x] * (b[:, y] * c[:, z] - b[:, z] * c[:, y])
                 - a[:, y] * (b[:, x] * c[:, z] - b[:, z] * c[:, x])
                 + a[:, z] * (b[:, x] * c[:, y] - b[:, y] * c[:, x]))
            cols.append(m if j % 2 == 0 else -m)
        return np.stack(cols, axis=1)
    raise InputError("hull supports ambient dimension <= 4, got %d" % d)


def _hull_full(points):
    """Facets and vertex indices of a full-dimensional point set.

    Returns (facets, vertex_indices) where each facet is
    (primitive inward integer normal, Fraction offset, tuple of point indices).
    """
    d = len(points[0])
    if d == 1:
        vals = [p[0] for p in points]
        lo, hi = min(vals), max(vals)
        ilo = tuple(i for i, v in enumerate(vals) if v == lo)
        ihi = tuple(i for i, v in enumerate(vals) if v == hi)
        facets = [((1,), lo, ilo), ((-1,), -hi, ihi)]
        return facets, sorted({ilo[0], ihi[0]})

    L = common_denominator(x for p in points for x in p)
    ints = [[int(x * L) for x in p] for p in points]
    bound = max(abs(x) for p in ints for x in p) + 1
    risk = factorial(d) * (2 * bound) ** d * d
    dtype = np.int64 if risk < _INT64_SAFE else object
    X = np.array(ints, dtype=dtype)
    N = len(points)

    found = {}
    combos = combinations(range(N), d)
    while True:
        chunk = list(itertools.islice(combos, 20000))
        if not chunk:
            break
        C = np.array(chunk, dtype=np.int64)
        base = X[C[:, 0]]
        diffs = [X[C[:, k]] - base for k in range(1, d)]
        nrm = _normals(diffs, d)
        nz = np.any(nrm != 0, axis=1)
        if not np.any(nz):
            continue
        nrm = nrm[nz]
        base = base[nz]
        off = np.sum(nrm * base, axis=1)
        s = X @ nrm.T - off
        ge = np.all(s >= 0, axis=0)
        le = np.all(s <= 0, axis=0)
        for k in np.nonzero(ge | le)[0]:
            v = [int(x) for x in nrm[k]]
            o = int(off[k])
            if le[k] and not ge[k]:
                v = [-x for x in v]
                o = -o
            g = 0
            for x in v:
                g = gcd(g, x)
            key = tuple(x // g for x in v)
            if key in found:
                continue
            offset = Fraction(o // g if o % g == 0 else Fraction(o, g), L)
            found[key] = offset

    facets = []
    for normal, offset in found.items():
        on = tuple(i for i, p in enumerate(points) if dot(normal, p) == offset)
        facets.append((normal, offset, on))
    facets.sort()

    incident = [[] for _ in range(N)]
    for normal, _, on in facets:
        for i in on:
            incident[i].append(normal)
    verts = []
    for i in range(N):
        if len(incident[i]) >= d and len(rref(incident[i], d)[1]) == d:
            verts.append(i)
    return facets, verts


def _vol_centroid(points, hull=None):
    """Volume and centroid of a full-dimensional polytope given by points."""
    d = len(points[0])
    if d == 1:
        vals = [p[0] for p in points]
        lo, hi = min(vals), max(vals)
        return hi - lo, ((lo + hi) / 2,)
    facets, verts = hull if hull is not None else _hull_full(points)
    c = [sum(points[i][k] for i in verts) / len(verts) for k in range(d)]
    total = Fraction(0)
    mom = [Fraction(0)] * d
    for normal, offset, on in facets:
        h = dot(normal, c) - offset
        if h == 0:
            continue
        lv, fc = _facet_latvol_centroid([points[i] for i in on], normal, offset)
        pv = h * lv / d
        t = Fraction(d, d + 1)
        total += pv
        for k in range(d):
            mom[k] += pv * (c[k] + t * (fc[k] - c[k]))
    return total, tuple(m / total for m in mom)


def _facet_latvol_centroid(fpts, normal, offset):
    """Lattice-normalized volume and centroid of a facet lying on normal.x = offset."""
    d = len(normal)
    j = max(range(d), key=lambda k: abs(normal[k]))
    if d == 1:
        return Fraction(1), tuple(fpts[0])
    proj = _dedupe([tuple(p[k] for k in range(d) if k != j) for p in fpts])
    vol, cen = _vol_centroid(proj)
    lv = vol / abs(normal[j])
    rest = [k for k in range(d) if k != j]
    full = [Fraction(0)] * d
    for k, v in zip(rest, cen):
        full[k] = v
    full[j] = (offset - sum(normal[k] * full[k] for k in rest)) / normal[j]
    return lv, tuple(full)


def _dedupe(pts):
    seen = []
    s = set()
    for p in pts:
        if p not in s:
            s.add(p)
            seen.append(p)
    return seen


# ---------------------------------------------------------------- polytopes

class RationalPolytope:
    """Convex hull of finitely many rational points; may be lower-dimensional."""

    def __init__(self, vertices):
        pts = _dedupe([fvec(v) for v in vertices])
        if not pts:
            raise EmptyPolytopeError("empty polytope")
        n = len(pts[0])
        if n == 0 or any(len(p) != n for p in pts):
            raise DimensionMismatchError("points of unequal or zero length")
        self.ambient_dim = n
        origin = pts[0]
        diffs = [tuple(a - b for a, b in zip(p, origin)) for p in pts[1:]]
        if diffs:
            basis, pivots = rref(diffs, n)
        else:
            basis, pivots = [], []
        self.dim = len(pivots)
        self._pivots = tuple(pivots)
        self._basis = [tuple(r) for r in basis]
        self._origin = origin
        self.equations = tuple(
            (a, dot(a, origin)) for a in (primitive(v) for v in nullspace(diffs, n))
        ) if self.dim < n else ()
        if self.dim == 0:
            self.vertices = (origin,)
            self._proj_facets = []
            return
        proj = [tuple(p[k] for k in pivots) for p in pts]
        self._proj_hull = _hull_full(proj)
        facets, verts = self._proj_hull
        self._proj_facets = facets
        keep = sorted(pts[i] for i in verts)
        self.vertices = tuple(keep)
        self._points = pts

    # ---- H-representation (ambient coordinates)

    @property
    def inequalities(self):
        """List of (a, b) with a.x >= b, valid on the affine hull."""
        out = []
        n = self.ambient_dim
        for normal, offset, _ in self._proj_facets:
            a = [0] * n
            for k, c in zip(self._pivots, normal):
                a[k] = c
            out.append((tuple(a), offset))
        return out

    @property
    def facets(self):
        if self.dim != self.ambient_dim:
            raise InputError("facets are only defined for full-dimensional polytopes")
        if not hasattr(self, "_facets"):
            pts = self._points
            self._facets = tuple(
                Facet(normal, offset, tuple(sorted(pts[i] for i in on if pts[i] in set(self.vertices))))
                for normal, offset, on in self._proj_facets
            )
        return self._facets

    def contains_point(self, x):
        x = fvec(x)
        if len(x) != self.ambient_dim:
            raise DimensionMismatchError("point dimension %d vs %d" % (len(x), self.ambient_dim))
        for a, b in self.equations:
            if dot(a, x) != b:
                return False
        if self.dim == 0:
            return x == self.vertices[0]
        return all(dot(a, x) >= b for a, b in self.inequalities)

    def volume(self, ambient=True):
        return volume(self, ambient=ambient)

    def centroid(self):
        if self.dim != self.ambient_dim:
            raise InputError("centroid implemented for full-dimensional polytopes")
        return _vol_centroid(list(self.vertices))[1]

    def scale(self, c):
        c = frac(c)
        return RationalPolytope([tuple(c * x for x in v) for v in self.vertices])

    def translate(self, t):
        t = fvec(t)
        return RationalPolytope([tuple(x + y for x, y in zip(v, t)) for v in self.vertices])

    def __eq__(self, other):
        return isinstance(other, RationalPolytope) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return "%s(%s)" % (type(self).__name__, [[str(x) for x in v] for v in self.vertices])

    def to_json(self):
        return {"dim": self.ambient_dim,
                "vertices": [[[x.numerator, x.denominator] for x in v] for v in self.vertices]}


class MomentPolytope(RationalPolytope):
    """Full-dimensional lattice-type polytope of a polarized toric manifold."""

    def __init__(self, vertices):
        super().__init__(vertices)
        if self.dim != self.ambient_dim:
            raise InputError("moment polytope must be full-dimensional (got dim %d in Q^%d)"
                             % (self.dim, self.ambient_dim))
        self.n = self.dim
        vol, cen = _vol_centroid(list(self.vertices))
        self.vol = vol
        self.barycenter = cen
        self.V = factorial(self.n) * vol
        sigma = sum((facet_lattice_volume(F) for F in self.facets), Fraction(0))
        self.boundary_measure = sigma
        self.meanS = sigma / vol

    @classmethod
    def interval(cls, a, b):
        return cls([(frac(a),), (frac(b),)])

    @property
    def interval_ends(self):
        if self.n != 1:
            raise InputError("not a one-dimensional polytope")
        return self.vertices[0][0], self.vertices[1][0]

    def lattice_points(self):
        lo = [min(v[k] for v in self.vertices) for k in range(self.n)]
        hi = [max(v[k] for v in self.vertices) for k in range(self.n)]
        rng = [range(-((-x.numerator) // x.denominator), (y.numerator // y.denominator) + 1)
               for x, y in zip(lo, hi)]
        return [tuple(Fraction(c) for c in p) for p in itertools.product(*rng)
                if self.contains_point(p)]

    def vertex_cones(self):
        """For each vertex, the primitive inward normals of its facets."""
        out = []
        for v in self.vertices:
            out.append((v, [F.normal for F in self.facets if v in F.vertices]))
        return out

    def is_delzant(self):
        for v, gens in self.vertex_cones():
            if len(gens) != self.n or abs(det(gens)) != 1:
                return False
        return all(x.denominator == 1 for v in self.vertices for x in v)

    def log_discrepancy(self, xi):
        """A_X of the monomial valuation with weight xi.

        xi is written in the smooth cone of the fan containing it; the result is
        the sum of the coefficients. Non-smooth cones raise NonSmoothConeError.
        """
        xi = fvec(xi)
        if all(x == 0 for x in xi):
            return Fraction(0)
        for v, gens in self.vertex_cones():
            if len(gens) != self.n:
                continue
            A = [[gens[i][k] for i in range(self.n)] for k in range(self.n)]
            c = solve(A, xi)
            if c is None or any(x < 0 for x in c):
                continue
            if abs(det(gens)) != 1:
                raise NonSmoothConeError("weight %s lies in a non-smooth cone at vertex %s" % (xi, v))
            return sum(c, Fraction(0))
        raise NonSmoothConeError("weight %s not found in a simplicial smooth cone" % (xi,))

    def anticanonical_center(self):
        """Lattice point at lattice distance one from every facet, if any."""
        F = self.facets
        rows = [F[i].normal for i in range(len(F))]
        _, piv = rref([list(r) for r in zip(*rows)], len(rows))
        sel = [F[i] for i in piv][: self.n]
        y = solve([f.normal for f in sel], [f.offset + 1 for f in sel])
        if y is None or any(f.slack(y) != 1 for f in F) or any(x.denominator != 1 for x in y):
            raise NotAnticanonicalError("polytope is not a translate of a reflexive polytope")
        return y

    def is_anticanonical(self):
        try:
            self.anticanonical_center()
            return True
        except NotAnticanonicalError:
            return False


# ---------------------------------------------------------------- operations

def facet_lattice_volume(F):
    return _facet_latvol_centroid(list(F.vertices), F.normal, F.offset)[0]


def volume(Q, ambient=True):
    """Volume of Q.

    With ambient=True a lower-dimensional Q has volume 0. With ambient=False the
    Euclidean volume in the affine hull is returned: a Fraction when it is
    rational, otherwise a FlaggedFloat.
    """
    if not isinstance(Q, RationalPolytope):
        Q = RationalPolytope(Q)
    if Q.dim == Q.ambient_dim:
        return _vol_centroid(list(Q._points), Q._proj_hull)[0] if Q.dim > 0 else Fraction(1)
    if ambient:
        return Fraction(0)
    if Q.dim == 0:
        return Fraction(1)
    proj = [tuple(p[k] for k in Q._pivots) for p in Q._points]
    vk = _vol_centroid(proj, Q._proj_hull)[0]
    B = Q._basis
    gram = det([[dot(r, s) for s in B] for r in B])
    num, den = gram.numerator, gram.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return vk * Fraction(rn, rd)
    return FlaggedFloat(float(vk) * (num / den) ** 0.5)


def minkowski_sum(*Qs):
    Qs = [q if isinstance(q, RationalPolytope) else RationalPolytope(q) for q in Qs]
    _same_ambient(Qs)
    pts = [tuple(Fraction(0) for _ in range(Qs[0].ambient_dim))]
    for q in Qs:
        pts = _dedupe([tuple(a + b for a, b in zip(p, v)) for p in pts for v in q.vertices])
        pts = list(RationalPolytope(pts).vertices)
    return RationalPolytope(pts)


def _same_ambient(Qs):
    dims = {q.ambient_dim for q in Qs}
    if len(dims) != 1:
        raise DimensionMismatchError("polytopes live in different ambient spaces: %s" % sorted(dims))


def mixed_volume(Qs):
    """Mixed volume normalized so that mixed_volume([Q]*n) == volume(Q)."""
    Qs = [q if isinstance(q, RationalPolytope) else RationalPolytope(q) for q in Qs]
    if not Qs:
        raise InputError("need at least one polytope")
    _same_ambient(Qs)
    n = Qs[0].ambient_dim
    if len(Qs) != n:
        raise DimensionMismatchError("mixed volume in Q^%d needs %d polytopes, got %d" % (n, n, len(Qs)))
    # group equal arguments so repeated polytopes cost one Minkowski sum per multiplicity vector
    distinct = []
    mult = []
    for q in Qs:
        for i, r in enumerate(distinct):
            if r == q:
                mult[i] += 1
                break
        else:
            distinct.append(q)
            mult.append(1)
    total = Fraction(0)
    for counts in itertools.product(*[range(m + 1) for m in mult]):
        k = sum(counts)
        if k == 0:
            continue
        coeff = 1
        for c, m in zip(counts, mult):
            coeff *= _binom(m, c)
        parts = [distinct[i].scale(c) for i, c in enumerate(counts) if c > 0]
        vol = volume(minkowski_sum(*parts)) if len(parts) > 1 else volume(parts[0])
        total += (-1) ** (n - k) * coeff * vol
    return total / factorial(n)


def _binom(m, c):
    return factorial(m) // (factorial(c) * factorial(m - c))


def polytope_contains(outer, inner):
    """True iff every vertex of inner satisfies every (in)equality of outer."""
    outer = outer if isinstance(outer, RationalPolytope) else RationalPolytope(outer)
    inner = inner if isinstance(inner, RationalPolytope) else RationalPolytope(inner)
    _same_ambient([outer, inner])
    return all(outer.contains_point(v) for v in inner.vertices)


def boundary_integral(P, g):
    """Integral of g over the boundary of P against the lattice boundary measure.

    g may be a number (constant), a sequence (a_1..a_n, b) for the affine
    function a.y + b, or an object with an ``affine_pieces`` attribute listing
    (cell RationalPolytope, (a, b)) pairs covering P, such as a PL function.
    Any other callable is integrated numerically and the result is a FlaggedFloat.
    """
    if not isinstance(P, MomentPolytope):
        P = MomentPolytope(P.vertices if isinstance(P, RationalPolytope) else P)
    n = P.n
    if hasattr(g, "affine_pieces"):
        total = Fraction(0)
        for F in P.facets:
            for cell, (a, b) in g.affine_pieces:
                on = [v for v in cell.vertices if F.slack(v) == 0]
                if len(on) < n:
                    continue
                if n > 1 and RationalPolytope(on).dim < n - 1:
                    continue
                lv, cen = _facet_latvol_centroid(on, F.normal, F.offset)
                total += lv * (dot(a, cen) + b)
        return total
    if callable(g):
        return _numeric_boundary_integral(P, g)
    if isinstance(g, (list, tuple)):
        coeffs = fvec(g)
        if len(coeffs) != n + 1:
            raise DimensionMismatchError("affine g needs %d coefficients" % (n + 1))
        a, b = coeffs[:n], coeffs[n]
    else:
        a, b = (Fraction(0),) * n, frac(g)
    total = Fraction(0)
    for F in P.facets:
        lv, cen = _facet_latvol_centroid(list(F.vertices), F.normal, F.offset)
        total += lv * (dot(a, cen) + b)
    return total


def _numeric_boundary_integral(P, g, order=12):
    x, w = np.polynomial.legendre.leggauss(order)
    total = 0.0
    for F in P.facets:
        if P.n == 1:
            total += float(g(np.array([float(F.vertices[0][0])])))
            continue
        if P.n != 2:
            raise InputError("numeric boundary integral implemented for n <= 2")
        (p, q) = [np.array([float(c) for c in v]) for v in F.vertices]
        lv = float(facet_lattice_volume(F))
        t = 0.5 * (x + 1)
        pts = p[None, :] + t[:, None] * (q - p)[None, :]
        total += lv * 0.5 * float(np.sum(w * np.asarray(g(pts), dtype=float)))
    return FlaggedFloat(total)
