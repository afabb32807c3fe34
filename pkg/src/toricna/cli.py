"""Command line entry point: toricna <command> [options].

Exit codes: 0 success, 2 bad input, 3 outside the mathematical domain,
4 internal consistency failure.
"""

import argparse
import sys

import numpy as np

from . import __version__
from .errors import InputError, ToricError
from .exact import frac
from .io import dumps, load_json, polytope_from_json, write_csv

EPILOG = """CSV columns:
  functionals  name,value,error
  na           name,value            (rationals as num/den)
  ray          s,F,F_over_s
  weights      lambda,fNA,numeric_slope
  snc          tau,volume
  scan         y,f(y)                (witness of the threshold)
"""


def _potential(P, path):
    from .potentials import LSEPotential, potential_from_json
    if path is None:
        return LSEPotential.fubini_study(P, 1)
    return potential_from_json(P, load_json(path))


def _pl(P, path):
    from .plfunction import PLConvexFunction
    return PLConvexFunction.from_json(P, load_json(path))


def cmd_functionals(args):
    from .archimedean import functional_report
    P = polytope_from_json(load_json(args.polytope))
    u = _potential(P, args.potential)
    ref = _potential(P, args.ref)
    rep = functional_report(u, ref)
    d = rep.as_dict()
    rows = [(k, d[k], d["errors"].get(k, "")) for k in "EIJRHMLD" if d.get(k) is not None]
    return {"report": d}, (["name", "value", "error"], rows)


def cmd_na(args):
    from .nonarchimedean import make_config, na_report
    P = polytope_from_json(load_json(args.polytope))
    f = _pl(P, args.pl)
    rep = na_report(make_config(P, f), delta=args.delta)
    d = rep.as_dict()
    rows = [(k, v) for k, v in d.items() if v is not None]
    return {"report": d, "components": rep.extra}, (["name", "value"], rows)


def cmd_ray(args):
    from .rays import FUNCTIONALS, RaySpec, slope
    if args.functional not in FUNCTIONALS:
        raise InputError("unknown functional %r (choose from %s)" % (args.functional, ", ".join(FUNCTIONALS)))
    P = polytope_from_json(load_json(args.polytope))
    f = _pl(P, args.pl)
    base = _potential(P, args.potential)
    if not 0 < args.s_min < args.s_max:
        raise InputError("need 0 < s-min < s-max")
    grid = list(np.geomspace(args.s_min, args.s_max, args.num))
    spec = RaySpec(base, f, kind=args.kind, eps=args.eps, s_grid=grid, m=args.level)
    rep = slope(spec, args.functional)
    return {"report": rep.as_dict()}, (["s", "F", "F_over_s"], rep.csv_rows())


def _lambdas(text, rank):
    out = []
    for part in text.split(";"):
        lam = tuple(frac(x) for x in part.split(","))
        if len(lam) != rank:
            raise InputError("lambda %s has %d entries, rank is %d" % (part, len(lam), rank))
        out.append(lam)
    return out


def cmd_weights(args):
    from .gitweights import (LogNormFunction, TensorVector, bounded_below_fan, bounded_below_torus,
                             conjugated_probe, fNA, slope_vs_fNA)
    data = load_json(args.input)
    try:
        f = LogNormFunction.from_json(data)
    except (KeyError, TypeError) as exc:
        raise InputError("bad weights JSON: %s" % exc) from None
    lams = _lambdas(args.lam, f.rank) if args.lam else []
    rows, table = [], []
    for lam in lams:
        chk = slope_vs_fNA(f, lam)
        table.append({"lambda": lam, "fNA": fNA(f, lam), "numeric": chk["numeric"], "pass": chk["pass"]})
        rows.append((" ".join(str(x) for x in lam), fNA(f, lam), chk["numeric"]))
    ok, wit = bounded_below_torus(f, witness=True)
    out = {"fNA": table, "bounded_below_torus": ok, "witness": wit, "bounded_below_fan": bounded_below_fan(f)}
    if "tensors" in data:
        terms = [(c, TensorVector([np.array(x, dtype=float) for x in t["factors"]]))
                 for c, t in zip(data.get("tensor_coeffs", [1] * len(data["tensors"])), data["tensors"])]
        out["probe"] = conjugated_probe(terms, trials=args.trials, seed=args.seed)
    return out, (["lambda", "fNA", "numeric_slope"], rows)


def cmd_snc(args):
    from .snclocal import SNCModel, exponent_fit
    data = load_json(args.model)
    try:
        model = SNCModel(data["n"], data["p"], data["b"], float(data.get("eps", 1.0)), data.get("twist", "one"))
    except KeyError as exc:
        raise InputError("model JSON misses %s" % exc) from None
    grid = list(np.geomspace(args.tau_min, args.tau_max, args.num))
    rep = exponent_fit(model, grid, seed=args.seed)
    rows = list(zip(rep["tau"], rep["volume"]))
    return {"model": model.to_json(), "report": rep}, (["tau", "volume"], rows)


def cmd_scan(args):
    from .nonarchimedean import stability_threshold
    P = polytope_from_json(load_json(args.polytope))
    a, b = P.interval_ends
    k = args.grid
    pts = [a + (b - a) * frac([i, k]) for i in range(1, k)]
    rep = stability_threshold(P, pts, family=args.family)
    out = dict(rep)
    out["semistable"] = rep["delta"] >= 0
    rows = [(y, v) for y, v in rep["witness_values"]]
    return out, (["y", "f"], rows)


COMMANDS = {
    "functionals": cmd_functionals, "na": cmd_na, "ray": cmd_ray,
    "weights": cmd_weights, "snc": cmd_snc, "scan": cmd_scan,
}


def build_parser():
    p = argparse.ArgumentParser(prog="toricna", description=__doc__.splitlines()[0], epilog=EPILOG,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write the JSON report here (default: stdout)")
        sp.add_argument("--csv", help="write plot-ready CSV here")
        sp.add_argument("--seed", type=int, default=0)
        return sp

    sp = common(sub.add_parser("functionals", help="Archimedean functionals of a potential"))
    sp.add_argument("--polytope", required=True)
    sp.add_argument("--potential")
    sp.add_argument("--ref")

    sp = common(sub.add_parser("na", help="exact non-Archimedean functionals of a PL function"))
    sp.add_argument("--polytope", required=True)
    sp.add_argument("--pl", required=True)
    sp.add_argument("--delta", type=frac)

    sp = common(sub.add_parser("ray", help="slope of a functional along a ray"))
    sp.add_argument("--polytope", required=True)
    sp.add_argument("--pl", required=True)
    sp.add_argument("--potential")
    sp.add_argument("--functional", default="E")
    sp.add_argument("--kind", default="legendre", choices=["legendre", "bergman"])
    sp.add_argument("--eps", type=float, default=0.0)
    sp.add_argument("--s-min", type=float, default=10.0)
    sp.add_argument("--s-max", type=float, default=200.0)
    sp.add_argument("--num", type=int, default=16)
    sp.add_argument("--level", type=int)

    sp = common(sub.add_parser("weights", help="f^NA and boundedness of a log-norm function"))
    sp.add_argument("--input", required=True)
    sp.add_argument("--lambda", dest="lam", help="cocharacters, e.g. '1,-1;0,1'")
    sp.add_argument("--trials", type=int, default=64)

    sp = common(sub.add_parser("snc", help="fiber volume growth in an snc model"))
    sp.add_argument("--model", required=True)
    sp.add_argument("--tau-min", type=float, default=1e-12)
    sp.add_argument("--tau-max", type=float, default=1e-6)
    sp.add_argument("--num", type=int, default=13)

    sp = common(sub.add_parser("scan", help="exact stability threshold over convex PL functions"))
    sp.add_argument("--polytope", required=True)
    sp.add_argument("--grid", type=int, default=4, help="breakpoints at multiples of |P|/grid")
    sp.add_argument("--family", default="convex", choices=["convex", "constant"])
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out, (header, rows) = COMMANDS[args.command](args)
    except ToricError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return exc.exit_code
    except (InputError, KeyError, TypeError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    out = {"command": args.command, "config": {k: v for k, v in vars(args).items() if k != "command"},
           "result": out}
    text = dumps(out)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.csv:
        write_csv(rows, header, args.csv)
    return 0


if __name__ == "__main__":
    sys.exit(main())
