"""Rational piecewise-linear convex functions on a moment polytope."""

from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import InputError, NotSemipositiveError
from .exact import dot, frac, fvec, solve
from .polytope import RationalPolytope, _vol_centroid, boundary_integral


def _parse_affine(aff, n):
    v = fvec(aff)
    if len(v) != n + 1:
        raise InputError("affine function needs %d coefficients, got %d" % (n + 1, len(v)))
    return (tuple(v[:n]), v[n])


def _cell_vertices(P, halfspaces):
    """Vertices of {y : a.y >= b for (a, b) in halfspaces}, bounded inside P."""
    n = P.n
    cons = [(F.normal, F.offset) for F in P.facets] + list(halfspaces)
    pts = set()
    for sub in combinations(cons, n):
        y = solve([a for a, _ in sub], [b for _, b in sub])
        if y is None:
            continue
        if all(dot(a, y) >= b for a, b in cons):
            pts.add(y)
    return sorted(pts)


class PLConvexFunction:
    """f = max_E (a_E . y + c_E) on P, stored with the full-dimensional cells C_E."""

    def __init__(self, P, pieces, cells):
        self.P = P
        self.n = P.n
        self.pieces = tuple(pieces)
        self.cells = tuple(cells)

    # ---- constructors

    @classmethod
    def from_max(cls, P, affines):
        n = P.n
        aff = []
        for x in affines:
            a = x if (isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], tuple)) else _parse_affine(x, n)
            a = (fvec(a[0]), frac(a[1]))
            if a not in aff:
                aff.append(a)
        if not aff:
            raise InputError("need at least one affine piece")
        pieces, cells = [], []
        for i, (a, c) in enumerate(aff):
            hs = []
            for j, (b, d) in enumerate(aff):
                if j != i:
                    hs.append((tuple(x - y for x, y in zip(a, b)), d - c))
            verts = _cell_vertices(P, hs)
            if not verts:
                continue
            cell = RationalPolytope(verts)
            if cell.dim == n:
                pieces.append((a, c))
                cells.append(cell)
        return cls(P, pieces, cells)

    @classmethod
    def from_cells(cls, P, cells):
        """Build from explicit cells, checking coverage, continuity and convexity."""
        n = P.n
        polys, aff = [], []
        for cell in cells:
            poly = RationalPolytope(cell["vertices"])
            if poly.dim != n or poly.ambient_dim != n:
                raise InputError("cell %s is not full-dimensional" % (cell["vertices"],))
            if not all(P.contains_point(v) for v in poly.vertices):
                raise InputError("cell %s leaves the polytope" % (cell["vertices"],))
            polys.append(poly)
            aff.append(_parse_affine(cell["affine"], n))
        total = sum((_vol_centroid(list(p.vertices))[0] for p in polys), Fraction(0))
        if total != P.vol:
            raise InputError("cells do not tile the polytope (volume %s vs %s)" % (total, P.vol))

        def val(k, y):
            return dot(aff[k][0], y) + aff[k][1]

        for i, Ci in enumerate(polys):
            for v in Ci.vertices:
                fv = val(i, v)
                for j, Cj in enumerate(polys):
                    if j == i:
                        continue
                    w = val(j, v)
                    if Cj.contains_point(v) and w != fv:
                        raise InputError("cells disagree at shared point %s" % (list(map(str, v)),))
                    if w > fv:
                        raise NotSemipositiveError("not semipositive: f is not convex near %s"
                                                   % (list(map(str, v)),))
        merged = {}
        for (a, c), poly in zip(aff, polys):
            merged.setdefault((a, c), []).append(poly)
        return cls.from_max(P, list(merged.keys()))

    @classmethod
    def from_breakpoints(cls, P, ys, values):
        """One-dimensional f given by its values at an increasing list of points covering P."""
        if P.n != 1:
            raise InputError("from_breakpoints needs a one-dimensional polytope")
        ys = [frac(y) for y in ys]
        vs = [frac(v) for v in values]
        a, b = P.interval_ends
        if len(ys) != len(vs) or len(ys) < 2 or ys[0] != a or ys[-1] != b:
            raise InputError("breakpoints must start and end at the polytope endpoints")
        if any(y1 >= y2 for y1, y2 in zip(ys, ys[1:])):
            raise InputError("breakpoints must be strictly increasing")
        cells = []
        for (y1, v1), (y2, v2) in zip(zip(ys, vs), zip(ys[1:], vs[1:])):
            s = (v2 - v1) / (y2 - y1)
            cells.append({"vertices": [(y1,), (y2,)], "affine": [s, v1 - s * y1]})
        return cls.from_cells(P, cells)

    @classmethod
    def constant(cls, P, c=0):
        return cls.from_max(P, [tuple([0] * P.n) + (frac(c),)])

    @classmethod
    def affine(cls, P, a, c=0):
        return cls.from_max(P, [tuple(fvec(a)) + (frac(c),)])

    # ---- evaluation

    def __call__(self, y):
        y = fvec(y)
        return max(dot(a, y) + c for a, c in self.pieces)

    def evaluate(self, y):
        """Float evaluation on an array of points (shape (..., n) or (...) when n = 1)."""
        y = np.asarray(y, dtype=float)
        if self.n == 1 and (y.ndim == 0 or y.shape[-1] != 1):
            y = y[..., None]
        A = np.array([[float(x) for x in a] for a, _ in self.pieces])
        c = np.array([float(c) for _, c in self.pieces])
        return np.max(y @ A.T + c, axis=-1)

    @property
    def affine_pieces(self):
        return list(zip(self.cells, self.pieces))

    def vertex_values(self):
        return [self(v) for cell in self.cells for v in cell.vertices]

    def min(self):
        return min(self.vertex_values())

    def max(self):
        return max(self.vertex_values())

    def integral(self):
        tot = Fraction(0)
        for cell, (a, c) in zip(self.cells, self.pieces):
            vol, cen = _vol_centroid(list(cell.vertices))
            tot += vol * (dot(a, cen) + c)
        return tot

    def average(self):
        return self.integral() / self.P.vol

    def boundary_integral(self):
        return boundary_integral(self.P, self)

    def cell_volumes(self):
        return [_vol_centroid(list(cell.vertices))[0] for cell in self.cells]

    # ---- algebra

    def scale(self, d):
        d = frac(d)
        if d <= 0:
            raise InputError("scaling factor must be positive")
        return PLConvexFunction(self.P, [(tuple(d * x for x in a), d * c) for a, c in self.pieces], self.cells)

    def shift(self, t):
        t = frac(t)
        return PLConvexFunction(self.P, [(a, c + t) for a, c in self.pieces], self.cells)

    def is_constant(self):
        return len(self.pieces) == 1 and all(x == 0 for x in self.pieces[0][0])

    def same_as(self, other):
        """Exact pointwise equality, checked on the vertices of both subdivisions and
        on the vertices of pairwise cell intersections."""
        pts = set()
        for cell in self.cells + other.cells:
            pts.update(cell.vertices)
        if self.n > 1:
            for ci in self.cells:
                for cj in other.cells:
                    hs = [(F.normal, F.offset) for F in ci.facets] + [(F.normal, F.offset) for F in cj.facets]
                    pts.update(_cell_vertices(self.P, hs))
        return all(self(p) == other(p) for p in pts)

    # ---- one-dimensional conveniences

    def breakpoints(self):
        """Interior kinks (n = 1), sorted."""
        if self.n != 1:
            raise InputError("breakpoints only for n = 1")
        a, b = self.P.interval_ends
        ends = sorted({v[0] for cell in self.cells for v in cell.vertices})
        return [y for y in ends if a < y < b]

    def kinks(self):
        """(y, jump of slope) for each interior kink (n = 1)."""
        out = []
        order = sorted(zip(self.cells, self.pieces), key=lambda t: t[0].vertices[0][0])
        for (c1, p1), (c2, p2) in zip(order, order[1:]):
            out.append((c1.vertices[-1][0], p2[0][0] - p1[0][0]))
        return out

    def slopes_float(self, y):
        """Right-continuous derivative of f at float points (n = 1)."""
        y = np.asarray(y, dtype=float)
        A = np.array([float(a[0]) for a, _ in self.pieces])
        c = np.array([float(c) for _, c in self.pieces])
        vals = y[..., None] * A + c
        # ties are broken toward the larger slope, i.e. the right derivative
        best = np.max(vals, axis=-1, keepdims=True)
        mask = vals >= best - 1e-14 * (1 + np.abs(best))
        return np.max(np.where(mask, A, -np.inf), axis=-1)

    def softmax_parts(self, y, eps):
        """Value and first two derivatives of eps*log(sum exp(l_j/eps)) at float points (n = 1)."""
        y = np.asarray(y, dtype=float)
        A = np.array([float(a[0]) for a, _ in self.pieces])
        c = np.array([float(c) for _, c in self.pieces])
        z = (y[..., None] * A + c) / eps
        zmax = np.max(z, axis=-1, keepdims=True)
        w = np.exp(z - zmax)
        Z = np.sum(w, axis=-1, keepdims=True)
        w = w / Z
        val = eps * (np.log(Z[..., 0]) + zmax[..., 0])
        m1 = np.sum(w * A, axis=-1)
        m2 = np.sum(w * (A - m1[..., None]) ** 2, axis=-1)
        m3 = np.sum(w * (A - m1[..., None]) ** 3, axis=-1)
        c4 = np.sum(w * (A - m1[..., None]) ** 4, axis=-1) - 3 * m2 ** 2
        return val, m1, m2 / eps, m3 / eps ** 2, c4 / eps ** 3

    # ---- serialization

    def to_json(self):
        cells = []
        for cell, (a, c) in zip(self.cells, self.pieces):
            cells.append({
                "vertices": [[[x.numerator, x.denominator] for x in v] for v in cell.vertices],
                "affine": [[x.numerator, x.denominator] for x in list(a) + [c]],
            })
        return {"cells": cells}

    @classmethod
    def from_json(cls, P, data):
        if not isinstance(data, dict):
            raise InputError("PL function JSON must be an object")
        if "cells" in data:
            return cls.from_cells(P, [
                {"vertices": [fvec(v) for v in cell["vertices"]], "affine": cell["affine"]}
                for cell in data["cells"]
            ])
        if "max_of" in data:
            return cls.from_max(P, data["max_of"])
        if "breakpoints" in data:
            return cls.from_breakpoints(P, data["breakpoints"], data["values"])
        raise InputError("PL function JSON needs 'cells', 'max_of' or 'breakpoints'")

    def __repr__(self):
        return "PLConvexFunction(%s)" % ", ".join(
            "%s.y%+s" % ([str(x) for x in a], c) for a, c in self.pieces)
