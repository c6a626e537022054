"""Command-line front end: ``fracnoether {deriv,solve,noether,invariance,examples}``.

Exit codes: 0 ok, 2 usage or constraint error, 3 file error, 4 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import ConstraintViolation, NonConvergence, UnsupportedGenerator
from .fracdiff import Grid, SampledPath, left_rl_deriv, power_law_deriv, right_rl_deriv
from .model import REGISTRY, get_problem, state_translation, time_translation
from .noether import check_invariance, noether_law, verify_conservation
from .solver import SolverConfig, solve_pontryagin

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NONCONV = 0, 2, 3, 4
GENERATORS = ("time-translation", "q-translation")


class UsageError(Exception):
    pass


class FileError(Exception):
    pass


def _int_list(text):
    try:
        vals = [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or min(vals) < 2:
        raise argparse.ArgumentTypeError("grid sizes must be >= 2")
    return vals


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _formats(text):
    fm = set(text.split(","))
    if not fm or not fm <= {"csv", "json"}:
        raise argparse.ArgumentTypeError("formats must be a subset of csv,json")
    return fm


def _add_run_options(sp, n_default="1000"):
    sp.add_argument("problem", choices=sorted(REGISTRY))
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--N", type=_int_list, default=_int_list(n_default), help="grid size(s), comma-separated")
    sp.add_argument("--tolerance", type=float)
    sp.add_argument("--max-iterations", type=int)
    sp.add_argument("--relaxation", type=float)
    sp.add_argument("--out", type=Path, default=Path("."), help="output directory")
    sp.add_argument("--format", type=_formats, default={"csv", "json"})


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracnoether", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("deriv", help="left and right fractional derivatives of a sampled function")
    d.add_argument("function", help="power:UPSILON, const, or a CSV file with columns t,f")
    d.add_argument("--p", type=float, required=True)
    d.add_argument("--a", type=float, default=0.0)
    d.add_argument("--b", type=float, default=1.0)
    d.add_argument("--N", type=int, default=1024)
    d.add_argument("--out", type=Path, help="CSV file (default: stdout)")

    s = sub.add_parser("solve", help="compute a Pontryagin extremal")
    _add_run_options(s)

    nt = sub.add_parser("noether", help="solve, build the Noether law, report its drift")
    _add_run_options(nt)
    nt.add_argument("--gen", choices=GENERATORS, default="time-translation")

    iv = sub.add_parser("invariance", help="first-order invariance defect on probe paths")
    _add_run_options(iv, n_default="200")
    iv.add_argument("--gen", choices=GENERATORS, default="time-translation")
    iv.add_argument("--eps", type=_float_list, help="comma-separated eps values (default: grid-aligned 1e-2, 5e-3)")

    sub.add_parser("examples", help="list built-in problems")
    return ap


def _config(args) -> SolverConfig:
    over = {k: getattr(args, k) for k in ("tolerance", "max_iterations", "relaxation") if getattr(args, k) is not None}
    try:
        return SolverConfig(**over)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _problem(args):
    if not 0.0 < args.alpha <= 1.0:
        raise ConstraintViolation(f"alpha must lie in (0, 1], got {args.alpha}")
    return get_problem(args.problem, args.alpha)


def _generator(name, problem):
    if name == "time-translation":
        return time_translation(problem.n, problem.m)
    return state_translation(np.ones(problem.n), problem.m)


def _stem(args, N):
    return f"{args.problem}_a{args.alpha:g}_N{N}"


def _error_report(args, name, exc):
    if "json" in args.format:
        args.out.mkdir(parents=True, exist_ok=True)
        io.write_json(args.out / f"{name}.json", {"command": args.command, "error": type(exc).__name__, "message": str(exc)})


def cmd_deriv(args) -> int:
    if args.N < 2 or not args.b > args.a:
        raise UsageError("need N >= 2 and a < b")
    exact = None
    func = args.function
    if func == "const" or func.startswith("power:"):
        grid = Grid(args.a, args.b, args.N)
        try:
            ups = 0.0 if func == "const" else float(func.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad exponent in {func!r}") from None
        if ups <= -1:
            raise UsageError("power exponent must exceed -1")
        f = SampledPath(grid, grid.offsets**ups)
        exact = power_law_deriv(args.p, ups, grid)
    else:
        try:
            f = io.read_path_csv(func)
        except (OSError, ValueError) as exc:
            raise FileError(str(exc)) from None
        grid = f.grid
    if args.p < 0:
        raise UsageError("order p must be non-negative")
    left = left_rl_deriv(f, args.p)
    right = right_rl_deriv(f, args.p)
    header, cols = ["t"], [grid.nodes]
    for i in range(f.dim):
        sfx = "" if f.dim == 1 else str(i + 1)
        header += [f"left{sfx}", f"right{sfx}"]
        cols += [left.component(i), right.component(i)]
    if exact is not None:
        header.append("left_exact")
        cols.append(exact.component(0))
        err = np.abs(left.values - exact.values)[1:-1]
        print(f"max interior error of left derivative: {float(err.max()):.6e}", file=sys.stderr)
    if args.out is None:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([io.fmt(x) for x in row])
    else:
        io.write_columns(args.out, header, cols)
    return EXIT_OK


def _solve(args, problem, N, cfg):
    """Solve and write outputs; returns ``(triple, exit_code)``."""
    grid = Grid(problem.a, problem.b, N)
    code = EXIT_OK
    try:
        triple = solve_pontryagin(problem, grid, cfg)
    except NonConvergence as exc:
        triple, code = exc.report, EXIT_NONCONV
        print(f"{problem.name} N={N}: {exc}", file=sys.stderr)
        if triple is None:
            _error_report(args, _stem(args, N) + "_report", exc)
            return None, code
    args.out.mkdir(parents=True, exist_ok=True)
    stem = _stem(args, N)
    if "csv" in args.format:
        io.write_triple_csv(args.out / f"{stem}_triple.csv", triple)
    if "json" in args.format:
        io.write_json(args.out / f"{stem}_report.json", triple.report())
    r = triple.residual_report
    print(f"{problem.name} alpha={problem.alpha:g} N={N}: converged={triple.converged} "
          f"residuals state={r[0]:.3e} costate={r[1]:.3e} stationarity={r[2]:.3e}", file=sys.stderr)
    return triple, code


def cmd_solve(args) -> int:
    cfg = _config(args)
    problem = _problem(args)
    code = EXIT_OK
    for N in args.N:
        _, c = _solve(args, problem, N, cfg)
        code = max(code, c)
    return code


def cmd_noether(args) -> int:
    cfg = _config(args)
    problem = _problem(args)
    gen = _generator(args.gen, problem)
    code = EXIT_OK
    runs = []
    for N in args.N:
        triple, c = _solve(args, problem, N, cfg)
        code = max(code, c)
        if triple is None:
            continue
        report = verify_conservation(noether_law(triple, gen), triple)
        inv = check_invariance(problem, gen, triple.grid, paths=triple)
        stem = _stem(args, N) + f"_{args.gen}"
        ref = None
        if "csv" in args.format:
            ref = f"{stem}_summed.csv"
            io.write_columns(args.out / ref, ["t", "summed"], [report.grid.nodes, report.summed.component(0)])
        doc = report.to_json(ref)
        doc["generator"] = args.gen
        doc["invariance"] = inv.to_json()
        doc.pop("schema")
        runs.append((N, doc))
        verdict = "holds" if inv.invariant else "FAILS"
        print(f"N={N}: chosen drift {report.chosen:.6e}; invariance check {verdict} "
              f"(defects {', '.join(f'{x:.3e}' for x in inv.defects)})", file=sys.stderr)
        if report.derivative_drift is not None:
            print(f"N={N}: alpha=1 derivative drift {report.derivative_drift:.6e}", file=sys.stderr)
    if "json" in args.format and runs:
        summary = {"problem": problem.name, "alpha": problem.alpha, "generator": args.gen,
                   "runs": [doc for _, doc in runs]}
        if len(runs) > 1:
            summary["refinement"] = [
                {"N": [n0, n1], "chosen_drift_ratio": d0["verdict_fields"]["max_chosen_drift"] / d1["verdict_fields"]["max_chosen_drift"]
                 if d1["verdict_fields"]["max_chosen_drift"] > 0 else None}
                for (n0, d0), (n1, d1) in zip(runs, runs[1:])
            ]
        io.write_json(args.out / f"{args.problem}_a{args.alpha:g}_{args.gen}_noether.json", summary)
    return code


def cmd_invariance(args) -> int:
    problem = _problem(args)
    gen = _generator(args.gen, problem)
    results = []
    for N in args.N:
        res = check_invariance(problem, gen, Grid(problem.a, problem.b, N), args.eps)
        doc = res.to_json()
        doc.pop("schema")
        doc["N"] = N
        results.append(doc)
        print(f"N={N}: {args.gen} {'invariant' if res.invariant else 'NOT invariant'}; "
              f"defects {', '.join(f'{x:.3e}' for x in res.defects)}", file=sys.stderr)
    if "json" in args.format:
        args.out.mkdir(parents=True, exist_ok=True)
        io.write_json(args.out / f"{args.problem}_a{args.alpha:g}_{args.gen}_invariance.json",
                      {"problem": problem.name, "alpha": problem.alpha, "results": results})
    return EXIT_OK


def cmd_examples(args) -> int:
    for name in sorted(REGISTRY):
        doc = (REGISTRY[name].__doc__ or "").strip().splitlines()
        print(f"{name}\t{doc[0] if doc else ''}")
    return EXIT_OK


COMMANDS = {"deriv": cmd_deriv, "solve": cmd_solve, "noether": cmd_noether,
            "invariance": cmd_invariance, "examples": cmd_examples}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConstraintViolation, UnsupportedGenerator) as exc:
        print(f"fracnoether: error: {exc}", file=sys.stderr)
        if hasattr(args, "format"):
            _error_report(args, f"{args.problem}_a{args.alpha:g}_{args.command}_error", exc)
        return EXIT_USAGE
    except (FileError, OSError) as exc:
        print(f"fracnoether: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
