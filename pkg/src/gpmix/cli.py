"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 internal verification failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from .errors import ConstructionFailure, GpmixError, NonPrimeDimension, SpecParseError
from .generators import mixture_rates_simplified, regularity_scan
from .kernels import mixture_kernel_analytic, oscillation_condition, slot_kernel, slot_solution
from .mixtures import (Cos, ExpCos, MixtureSpec, SemigroupMix, find_singularities,
                       parse_eigenfunction, parse_weights)
from .mub_core import ATOL, build_mubs, build_unitaries, check_dim
from .volterra import TimeGrid, compare_trajectories, solve_volterra
from .worked_examples import ERRATUM_NOTE, EXAMPLES, run_example

DEFAULT_PRECISION = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(v: float, prec: int) -> str:
    return "%.*g" % (prec, v + 0.0)  # no "-0"


def write_table(columns: dict, path, fmt: str, prec: int, report: dict | None = None) -> None:
    names = list(columns)
    arrays = [np.asarray(columns[n], dtype=float) for n in names]
    if fmt == "json":
        doc = {"columns": {n: [float(_fmt(v, prec)) for v in a] for n, a in zip(names, arrays)}}
        if report is not None:
            doc["report"] = report
        text = json.dumps(doc, indent=1, allow_nan=True) + "\n"
    else:
        lines = [",".join(names)]
        for row in zip(*arrays):
            lines.append(",".join(_fmt(v, prec) for v in row))
        text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
        if report is not None and fmt != "json":
            sys.stderr.write(json.dumps(report, indent=1) + "\n")
        return
    with open(path, "w") as fh:
        fh.write(text)
    if report is not None and fmt != "json":
        with open(sidecar_path(path), "w") as fh:
            json.dump(report, fh, indent=1)
            fh.write("\n")


def sidecar_path(path: str) -> str:
    base, _ = os.path.splitext(path)
    return base + ".report.json"


def _precision(args) -> int:
    if args.precision is not None:
        return args.precision
    env = os.environ.get("GPC_PRECISION")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"GPC_PRECISION must be an integer, got {env!r}") from None
    return DEFAULT_PRECISION


def _nodes(t_max: float, step: float | None) -> np.ndarray:
    if not t_max > 0:
        raise UsageError("--t-max must be positive")
    h = step if step is not None else 1e-3 * t_max
    if not h > 0:
        raise UsageError("--step must be positive")
    return np.linspace(0.0, t_max, int(round(t_max / h)) + 1)


def _mixture(args) -> MixtureSpec:
    d = check_dim(args.dim)
    w = parse_weights(args.weights)
    f = parse_eigenfunction(args.lam, d)
    return MixtureSpec(d, w, f, tol=1e-9)


def cmd_mubs(args) -> int:
    try:
        m = build_mubs(args.dim)
        build_unitaries(m)
    except NonPrimeDimension:
        print("error: dimension must be prime", file=sys.stderr)
        return 1
    except ConstructionFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 2
    dev = m.max_deviation()
    print(f"d={m.d}: {m.d + 1} bases, max deviation {dev:.3e} (<= {ATOL:g})")
    return 0 if dev <= ATOL else 2


def cmd_mix(args) -> int:
    m = _mixture(args)
    t = _nodes(args.t_max, args.step)
    lam = m.eigenvalues(t)
    cols = {"t": t}
    for a in range(m.d + 1):
        cols[f"lambda_{a + 1}"] = lam[:, a]
    rep = find_singularities(m, args.t_max, t[1] - t[0])
    report = rep.to_dict()
    report["range_ok"] = m.f.check_range(m.d, args.t_max, t[1] - t[0])[0]
    write_table(cols, args.out, args.format, _precision(args), report)
    return 0


def cmd_generator(args) -> int:
    m = _mixture(args)
    t = _nodes(args.t_max, args.step)
    verdict = regularity_scan(m, args.t_max, t[1] - t[0])
    # singular times get their own rows so the blow-up shows up as inf
    extra = verdict.singular_at + verdict.indeterminate_at
    if extra:
        t = np.union1d(t, extra)
    g = mixture_rates_simplified(m, t)
    cols = {"t": t}
    for a in range(m.d + 1):
        cols[f"gamma_{a + 1}"] = g[:, a]
    report = verdict.to_dict()
    write_table(cols, args.out, args.format, _precision(args), report)
    return 0


def _parse_kernel_spec(text: str) -> dict:
    body = text.split(":", 1)[1] if text.startswith("kernel:") else text
    out = {}
    for item in filter(None, body.split(",")):
        k, eq, v = item.partition("=")
        if not eq:
            raise SpecParseError(f"bad kernel parameter {item!r}")
        out[k.strip()] = v.strip()
    return out


def cmd_kernel(args) -> int:
    params = {"family": args.family, "omega": args.omega, "Z": args.Z, "r": args.r, "x": args.x}
    if args.spec:
        params.update(_parse_kernel_spec(args.spec))
    d = check_dim(args.dim)
    family = params["family"]

    def num(key):
        v = params.get(key)
        if v is None:
            raise UsageError(f"family {family} needs --{key}")
        try:
            return float(Fraction(str(v)))
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad number for {key}: {v!r}") from None

    if family == "cos":
        f = Cos(num("omega"))
    elif family == "expcos":
        f = ExpCos(num("Z"), num("omega"))
    elif family == "semigroup-mix":
        f = SemigroupMix(num("r"), d)
    else:
        raise UsageError(f"unknown kernel family {family!r}")
    if params.get("x") is None:
        raise UsageError("--x is required")
    xs = [float(Fraction(s.strip())) for s in str(params["x"]).split(",")]
    if any(not 0.0 <= x <= 1.0 for x in xs):
        raise UsageError("x must lie in [0, 1]")
    kernels = ([slot_kernel(f, xs[0], 1)] if len(xs) == 1 else mixture_kernel_analytic(f, xs))
    grid = TimeGrid(args.t_max, args.step)
    t = grid.nodes
    cols = {"t": t}
    for k, x in zip(kernels, xs):
        cols[f"kappa_{k.slot}"] = np.asarray(k.regular(t), dtype=float) * np.ones_like(t)
    report = {
        "family": family,
        "d": d,
        "x": xs,
        "delta_coeff": [k.delta_coeff for k in kernels],
    }
    if isinstance(f, ExpCos):
        report["oscillating"] = [oscillation_condition(x, f.Z, f.omega) if 0 < x < 1 else None for x in xs]
    if isinstance(f, SemigroupMix) and any(abs(x - 1 / (d + 1)) < 1e-12 for x in xs):
        report["note"] = ERRATUM_NOTE
    if args.solve:
        errs = [compare_trajectories(solve_volterra(k, grid), slot_solution(f, x)) for k, x in zip(kernels, xs)]
        report["solve_max_error"] = max(e for e, _ in errs)
        report["solve_max_error_time"] = max(errs)[1]
    write_table(cols, args.out, args.format, _precision(args), report)
    if args.solve and not report["solve_max_error"] <= 5e-4:
        return 2
    return 0


def cmd_example(args) -> int:
    title = EXAMPLES[args.id][0]
    cols, checks, notes = run_example(args.id)
    os.makedirs(args.out_dir, exist_ok=True)
    base = os.path.join(args.out_dir, f"example_{args.id}")
    write_table(cols, base + ".csv", "csv", _precision(args))
    ok = all(c.passed for c in checks)
    with open(base + ".check.json", "w") as fh:
        json.dump({"id": args.id, "title": title, "status": "PASS" if ok else "FAIL",
                   "checks": [c.to_dict() for c in checks], "notes": notes}, fh, indent=1)
        fh.write("\n")
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  ({c.value:.3e} vs {c.tolerance:.1e})")
    for n in notes:
        print(f"note: {n}")
    return 0 if ok else 2


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gpmix", description="Mixtures of generalized Pauli dynamical maps.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def output_opts(sp):
        sp.add_argument("--out", help="output file (stdout if omitted)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--precision", type=int, help="significant digits (default 12, env GPC_PRECISION)")

    s = sub.add_parser("mubs", help="build and verify MUBs")
    s.add_argument("--dim", type=int, required=True)
    s.set_defaults(func=cmd_mubs)

    for name, func, helptext in (("mix", cmd_mix, "mixture eigenvalues and singular points"),
                                 ("generator", cmd_generator, "time-local rates of the mixture")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--dim", type=int, required=True)
        s.add_argument("--weights", required=True, help="comma list, fractions allowed")
        s.add_argument("--lambda", dest="lam", required=True, help="e.g. cos:omega=1")
        s.add_argument("--t-max", type=float, required=True)
        s.add_argument("--step", type=float)
        output_opts(s)
        s.set_defaults(func=func)

    s = sub.add_parser("kernel", help="closed-form memory kernels")
    s.add_argument("--family", choices=("cos", "expcos", "semigroup-mix"))
    s.add_argument("--spec", help="kernel:family=<f>,<params>,x=<x>")
    s.add_argument("--omega")
    s.add_argument("--Z")
    s.add_argument("--r")
    s.add_argument("--x", help="one weight, or a comma list of all d+1 weights")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--t-max", type=float, default=10.0)
    s.add_argument("--step", type=float, default=1e-3)
    s.add_argument("--solve", action="store_true", help="check against the closed-form trajectory")
    output_opts(s)
    s.set_defaults(func=cmd_kernel)

    s = sub.add_parser("example", help="run a worked example with checks")
    s.add_argument("--id", type=int, required=True, choices=sorted(EXAMPLES))
    s.add_argument("--out-dir", default=".")
    s.add_argument("--precision", type=int)
    s.set_defaults(func=cmd_example)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, GpmixError, ValueError) as exc:
        if isinstance(exc, ConstructionFailure):
            print(f"verification failed: {exc}", file=sys.stderr)
            return 2
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
