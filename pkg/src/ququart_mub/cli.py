"""Command-line entry point: ``ququart-mub verify`` and ``ququart-mub experiment``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .error_analysis import (
    BlockSingularError,
    DEFAULT_CLAMP,
    clamp_stable,
    clamp_sweep,
    cramer_rao,
    monte_carlo_table,
    random_state,
)
from .mub import family_build
from .tomography import born_probabilities, reconstruct_monomial, reconstruct_projector, squared_errors

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ROUNDTRIP_TOL = 1e-10


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _n_value(text: str) -> int:
    v = _positive_int(text)
    if v > 3:
        raise argparse.ArgumentTypeError("N must be 1, 2 or 3")
    return v


def _int_list(text: str) -> list[int]:
    return [_positive_int(t) for t in text.split(",") if t]


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("expected a positive number")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ququart-mub", description="MU-like bases and linear-inversion tomography for ququarts.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=7)
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")

    v = sub.add_parser("verify", parents=[common], help="run the conformance checks")
    v.add_argument("--n", type=_n_value, default=1)

    e = sub.add_parser("experiment", help="tomography experiments")
    esub = e.add_subparsers(dest="experiment", required=True)

    r = esub.add_parser("roundtrip", parents=[common], help="exact-probability reconstruction residuals")
    r.add_argument("--n", type=_n_value, default=1)
    r.add_argument("--samples", type=_positive_int, default=100)
    r.add_argument("--ensemble", choices=("pure", "mixed"), default="mixed")

    s = esub.add_parser("simulate", parents=[common], help="sampled counts: empirical MSE against the Cramer-Rao bound")
    s.add_argument("--n", type=_n_value, default=1)
    s.add_argument("--shots", type=_int_list, default=[1000, 4000, 16000])
    s.add_argument("--repeats", type=_positive_int, default=200)
    s.add_argument("--ensemble", choices=("pure", "mixed"), default=None,
                   help="draw the state from this ensemble (default: maximally mixed)")
    s.add_argument("--clamp", type=_positive_float, default=DEFAULT_CLAMP)

    t = esub.add_parser("table3", parents=[common], help="minimum-error benchmark across schemes")
    t.add_argument("--n", type=_int_list, default=[1, 2], help="comma-separated list from {1,2}")
    t.add_argument("--samples", type=_positive_int, default=1000)
    t.add_argument("--ensemble", choices=("pure", "mixed"), default=None, help="restrict to one ensemble")
    t.add_argument("--clamp", type=_positive_float, default=DEFAULT_CLAMP)
    return p


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _csv_text(header, rows, comments=()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_verify(args) -> int:
    from .verify import run_checks

    checks, extra = run_checks(args.n, args.seed)
    ok = all(c.passed for c in checks)
    report = {
        "command": "verify",
        "n": args.n,
        "seed": args.seed,
        "ring": extra["ring"],
        "checks": {c.name: c.as_dict() for c in checks},
        "fixtures": extra["fixtures"],
        "pass": ok,
    }
    if args.format == "csv":
        text = _csv_text(("check", "max_violation", "tolerance", "pass"),
                         [(c.name, repr(float(c.violation)), c.tolerance, c.passed) for c in checks],
                         [f"n={args.n}", f"ring={extra['ring']}"])
    else:
        text = json.dumps(report, indent=2) + "\n"
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_roundtrip(args) -> int:
    fam = family_build(args.n)
    rows, worst = [], 0.0
    for i in range(args.samples):
        rho = random_state(args.ensemble, fam.dim, args.seed, i)
        p = born_probabilities(rho, fam)
        a, b = reconstruct_projector(p), reconstruct_monomial(p)
        ra, rb, gap = (float(np.max(np.abs(x))) for x in (a - rho, b - rho, a - b))
        worst = max(worst, ra, rb, gap)
        rows.append((i, f"{ra:.3e}", f"{rb:.3e}", f"{gap:.3e}"))
    header = ("state", "residual_projector", "residual_monomial", "path_gap")
    echo = f"n={args.n} ensemble={args.ensemble} samples={args.samples} seed={args.seed}"
    if args.format == "json":
        text = json.dumps({"command": "roundtrip", "config": echo, "max_residual": worst,
                           "rows": [dict(zip(header, r)) for r in rows]}, indent=2) + "\n"
    else:
        text = _csv_text(header, rows, [echo, f"max_residual={worst:.3e}"])
    _emit(text, args.out)
    return EXIT_OK if worst <= ROUNDTRIP_TOL else EXIT_FAIL


def cmd_simulate(args) -> int:
    fam = family_build(args.n)
    if args.ensemble is None:
        rho, state = np.eye(fam.dim) / fam.dim, "maximally-mixed"
    else:
        rho, state = random_state(args.ensemble, fam.dim, args.seed, 0), f"{args.ensemble}[0]"
    try:
        sweep = clamp_sweep(rho, args.n)
        bound = cramer_rao(rho, args.n, args.clamp)
    except BlockSingularError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    rows = []
    for m in args.shots:
        err = squared_errors(rho, fam, m, args.repeats, args.seed)
        mse, se = err.mean(), err.std(ddof=1) / np.sqrt(len(err)) if len(err) > 1 else 0.0
        rows.append((m, f"{mse:.6e}", f"{se:.6e}", f"{mse * m:.6f}", f"{bound:.6f}", f"{mse * m / bound:.4f}"))
    header = ("shots", "mse", "stderr", "mse_times_shots", "cramer_rao", "ratio")
    echo = f"n={args.n} state={state} repeats={args.repeats} seed={args.seed} clamp={args.clamp} shots per setup"
    if args.format == "json":
        text = json.dumps({"command": "simulate", "config": echo, "clamp_sweep": {repr(k): v for k, v in sweep.items()},
                           "rows": [dict(zip(header, r)) for r in rows]}, indent=2) + "\n"
    else:
        text = _csv_text(header, rows, [echo])
    _emit(text, args.out)
    return EXIT_OK if clamp_stable(sweep) else EXIT_FAIL


def cmd_table3(args) -> int:
    if any(n not in (1, 2) for n in args.n):
        print("error: table3 supports --n values 1 and 2", file=sys.stderr)
        return EXIT_USAGE
    ensembles = (args.ensemble,) if args.ensemble else ("pure", "mixed")
    try:
        report = monte_carlo_table(tuple(args.n), ensembles, args.samples, args.seed, args.clamp)
    except BlockSingularError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.format == "json":
        text = report.to_json() + "\n"
    else:
        echo = f"# samples={args.samples} seed={args.seed} clamp={args.clamp} shots per setup; mean of sqrt over states\n"
        text = echo + report.to_csv()
    _emit(text, args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    handler = {"roundtrip": cmd_roundtrip, "simulate": cmd_simulate, "table3": cmd_table3}[args.experiment]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
