"""Command-line front end.

    gcovsel select --data d.csv --response y [--alpha 0.01] [--no-intercept]
    gcovsel verify-beta --n 20 --k 3 [--reps 100000] [--seed 1] [--scheme both]
    gcovsel verify-uniform --n 20 --k 3 --q 10 [--reps 100000] [--seed 1]

Each run writes one JSON document to stdout and a short human summary to
stderr. Exit status is 0 on success, 1 on bad input or usage, 2 when an
internal accuracy guard trips.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import math
import sys
import time
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .errors import AccuracyError, DataFormatError, GcovError, InvalidInputError
from .linmodel import DEFAULT_COLLINEARITY_TOL, Dataset
from .montecarlo import (
    McConfig,
    compare_schemes,
    simulate_B_gaussian_covariate,
    simulate_B_standard_model,
    simulate_max_pvalue_uniformity,
)
from .selection import SelectionConfig, forward_select

EXIT_OK, EXIT_INPUT, EXIT_ACCURACY = 0, 1, 2


# --------------------------------------------------------------------- CSV

def load_csv(path: str, response: str, drop: Optional[Sequence[str]] = None,
             intercept: bool = False) -> Dataset:
    """Read a comma-separated file with a header row into a Dataset.

    Quoting is not supported. Row numbers in diagnostics count data rows
    from 1; the header is line 1 of the file.
    """
    drop = list(drop or [])
    try:
        fh = open(path, newline="")
    except FileNotFoundError:
        raise DataFormatError(f"data file not found: {path}")
    with fh:
        rows = list(csv.reader(fh, delimiter=",", quoting=csv.QUOTE_NONE))
    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if not rows:
        raise DataFormatError(f"{path} is empty; a header row is required")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if response not in header:
        raise DataFormatError(f"response column {response!r} not found in header", column=response)
    for name in drop:
        if name not in header:
            raise DataFormatError(f"column to drop {name!r} not found in header", column=name)
        if name == response:
            raise DataFormatError("the response column cannot be dropped", column=name)
    if len(body) < 3:
        raise DataFormatError(f"need at least 3 data rows, found {len(body)}")

    values = np.empty((len(body), len(header)))
    for i, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise DataFormatError(
                f"expected {len(header)} fields, found {len(row)} (line {i + 1})", row=i
            )
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise DataFormatError(
                    f"non-numeric cell {cell.strip()!r} (line {i + 1})", row=i, column=header[j]
                ) from None
            if not math.isfinite(v):
                raise DataFormatError(
                    f"non-finite cell {cell.strip()!r} (line {i + 1})", row=i, column=header[j]
                )
            values[i - 1, j] = v

    yj = header.index(response)
    keep = [j for j, h in enumerate(header) if j != yj and h not in drop]
    if not keep:
        raise DataFormatError("no covariate columns left after removing response and drops")
    return Dataset.from_arrays(
        values[:, yj], values[:, keep], names=[header[j] for j in keep], intercept=intercept
    )


def _sha256(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


# -------------------------------------------------------------------- JSON

def _float_token(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits.

    Non-finite floats become the strings "inf", "-inf" and "nan".
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        obj = dataclasses.asdict(obj)
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float_token(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


# ----------------------------------------------------------------- parsing

class UsageError(InvalidInputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gcovsel", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sel = sub.add_parser("select", help="forward selection with Gaussian-covariate p-values")
    sel.add_argument("--data", required=True)
    sel.add_argument("--response", required=True)
    sel.add_argument("--drop", action="append", default=[],
                     help="column to ignore; repeatable")
    sel.add_argument("--alpha", type=float, default=0.01)
    sel.add_argument("--intercept", action=argparse.BooleanOptionalAction, default=True)
    sel.add_argument("--max-steps", type=int, default=None)
    sel.add_argument("--tol", type=float, default=DEFAULT_COLLINEARITY_TOL)
    sel.add_argument("--count-rejected-in-q", action="store_true")
    sel.add_argument("--no-scores", action="store_true",
                     help="omit per-candidate scores from the report")
    sel.add_argument("--timing", action="store_true")

    def mc_common(p):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--reps", type=int, default=100_000)
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--sigma-z", type=float, default=1.0)
        p.add_argument("--sigma", type=float, default=1.0)
        p.add_argument("--y-dist", choices=["normal", "t3"], default="normal")
        p.add_argument("--timing", action="store_true")

    vb = sub.add_parser("verify-beta", help="Monte Carlo check of the Beta law of B")
    mc_common(vb)
    vb.add_argument("--scheme", choices=["covariate", "standard", "both"], default="both")

    vu = sub.add_parser("verify-uniform", help="Monte Carlo check of best-of-q p-values")
    mc_common(vu)
    vu.add_argument("--q", type=int, default=1)
    vu.add_argument("--alpha", type=float, default=0.05)
    return parser


# ------------------------------------------------------------------- modes

def _run_select(args):
    d = load_csv(args.data, args.response, args.drop, intercept=args.intercept)
    cfg = SelectionConfig(
        alpha=args.alpha,
        max_steps=args.max_steps,
        with_intercept=args.intercept,
        collinearity_tol=args.tol,
        count_rejected_in_q=args.count_rejected_in_q,
    )
    config = {
        "data": args.data,
        "data_sha256": _sha256(args.data),
        "response": args.response,
        "drop": list(args.drop),
        "alpha": cfg.alpha,
        "intercept": cfg.with_intercept,
        "max_steps": cfg.max_steps,
        "tol": cfg.collinearity_tol,
        "count_rejected_in_q": cfg.count_rejected_in_q,
        "n": d.n,
        "p": d.p,
    }
    trace = forward_select(d, cfg, keep_scores=not args.no_scores)
    lines = [f"{s.step:3d}  {s.chosen_name:<20s} F={s.f_max:<12.6g} q={s.q:<5d} "
             f"p_adj={s.p_adjusted:.4g}  {'accept' if s.accepted else 'reject'}"
             for s in trace.steps]
    lines.append(f"stop: {trace.stop_reason}; selected: {', '.join(trace.final_names) or '(none)'}")
    return "select", config, trace.to_dict(), lines


def _mc_config(args, **extra) -> McConfig:
    return McConfig(n=args.n, k=args.k, reps=args.reps, seed=args.seed,
                    sigma_z=args.sigma_z, sigma=args.sigma, y_dist=args.y_dist, **extra)


def _mc_echo(cfg: McConfig) -> dict:
    out = dataclasses.asdict(cfg)
    out.pop("beta")
    return out


def _report_line(rep) -> str:
    verdict = "within" if rep.ks_stat < rep.ks_band else "OUTSIDE"
    return (f"{rep.scheme}: KS={rep.ks_stat:.5f} ({verdict} band {rep.ks_band:.5f}), "
            f"mean {rep.empirical_mean:.6f} vs {rep.theoretical_mean:.6f}")


def _run_verify_beta(args):
    cfg = _mc_config(args)
    config = {**_mc_echo(cfg), "scheme": args.scheme}
    for key in ("q", "alpha"):
        config.pop(key)
    if args.scheme == "both":
        result = compare_schemes(cfg)
        lines = [_report_line(r) for r in result["reports"]]
        lines.append(f"two-sample KS={result['two_sample_ks']:.5f} "
                     f"(band {result['two_sample_band']:.5f})")
    else:
        fn = simulate_B_gaussian_covariate if args.scheme == "covariate" else simulate_B_standard_model
        rep = fn(cfg)
        result = {"reports": [rep]}
        lines = [_report_line(rep)]
    return "verify_beta", config, result, lines


def _run_verify_uniform(args):
    cfg = _mc_config(args, q=args.q, alpha=args.alpha)
    rep = simulate_max_pvalue_uniformity(cfg)
    lines = [_report_line(rep) + f", rejection rate at {cfg.alpha}: {rep.rejection_rate:.5f}"]
    return "verify_uniform", _mc_echo(cfg), rep, lines


_MODES = {
    "select": _run_select,
    "verify-beta": _run_verify_beta,
    "verify-uniform": _run_verify_uniform,
}


def run(argv: Optional[List[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        t0 = time.perf_counter()
        mode, config, result, lines = _MODES[args.command](args)
        wall = time.perf_counter() - t0
    except AccuracyError as exc:
        print(f"gcovsel: internal accuracy error: {exc}", file=stderr)
        return EXIT_ACCURACY
    except UsageError as exc:
        print(str(exc).rstrip(), file=stderr)
        return EXIT_INPUT
    except (GcovError, ValueError, OSError) as exc:
        print(f"gcovsel: error: {exc}", file=stderr)
        return EXIT_INPUT

    report = {
        "mode": mode,
        "tool_version": __version__,
        "config": config,
        "result": result,
        "wall_time": wall if args.timing else None,
    }
    stdout.write(to_json(report) + "\n")
    for line in lines:
        print(line, file=stderr)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
