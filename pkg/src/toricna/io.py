"""JSON and CSV plumbing. Rationals are written as [num, den] everywhere."""

import csv
import dataclasses
import io
import json
from fractions import Fraction

import numpy as np

from .errors import InputError
from .exact import frac, fvec
from .polytope import MomentPolytope


def encode(obj):
    """Turn a report into JSON-ready data: Fractions become [num, den]."""
    if isinstance(obj, Fraction):
        return [obj.numerator, obj.denominator]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [encode(x) for x in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "as_dict"):
            return encode(obj.as_dict())
        return encode(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(x) for x in obj]
    if hasattr(obj, "to_json"):
        return encode(obj.to_json())
    return repr(obj)


def dumps(obj):
    return json.dumps(encode(obj), indent=2, sort_keys=True)


def decode_rational(x):
    """Inverse of encode for a single rational."""
    return frac(x)


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc.strerror)) from None
    except json.JSONDecodeError as exc:
        raise InputError("malformed JSON in %s: %s" % (path, exc)) from None


def polytope_from_json(data):
    if not isinstance(data, dict):
        raise InputError("polytope JSON must be an object")
    try:
        if "interval" in data:
            a, b = data["interval"]
            return MomentPolytope.interval(frac(a), frac(b))
        if "vertices" in data:
            return MomentPolytope([_vertex(v, data.get("dim")) for v in data["vertices"]])
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError("bad polytope data: %s" % exc) from None
    raise InputError("polytope JSON needs 'vertices' or 'interval'")


def _vertex(v, dim):
    # with dim = 1 a bare [num, den] pair is one rational coordinate
    if not isinstance(v, (list, tuple)):
        return (frac(v),)
    if dim is not None and int(dim) == 1 and len(v) == 2 and all(isinstance(x, int) for x in v):
        return (frac(v),)
    if dim is not None and len(v) != int(dim):
        raise InputError("vertex %s does not have %s coordinates" % (v, dim))
    return fvec(v)


def write_csv(rows, header, path=None):
    """Deterministic CSV: floats through repr, rationals as num/den."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    text = buf.getvalue()
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def _cell(x):
    if isinstance(x, Fraction):
        return "%d/%d" % (x.numerator, x.denominator)
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)
