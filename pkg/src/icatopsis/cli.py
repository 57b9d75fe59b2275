"""Command-line entry point.

    icatopsis rank --input data.csv --method ica-topsis-m --ica jade
    icatopsis bench snr --profile ci --seed 1 --out results/

Data go to standard output or the output directory; diagnostics go to
standard error.  ``ICATOPSIS_WORKERS`` sets the default number of worker
processes for ``bench``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import bench
from .core import IcaTopsisError, WeightVector
from .ica import IcaConfig
from .io import read_decision_csv, result_table_to_json, write_ranking_csv
from .pipelines import ica_topsis, ica_topsis_m
from .topsis import topsis_rank
from .topsis_m import topsis_m_rank

log = logging.getLogger("icatopsis")

RANK_METHODS = ("topsis", "topsis-m", "ica-topsis", "ica-topsis-m")


class CliError(Exception):
    pass


def _parse_weights(text: str | None, m: int) -> WeightVector:
    if text is None:
        return WeightVector.equal(m)
    try:
        raw = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CliError(f"weights must be comma-separated numbers, got {text!r}") from None
    if len(raw) != m:
        raise CliError(f"{len(raw)} weights given for {m} criteria")
    if any(x < 0 for x in raw) or sum(raw) <= 0:
        raise CliError("weights must be nonnegative with a positive sum")
    return WeightVector.normalized(raw)


def cmd_rank(args: argparse.Namespace) -> int:
    matrix = read_decision_csv(args.input)
    weights = _parse_weights(args.weights, matrix.n_criteria)
    config = IcaConfig(algorithm=args.ica, seed=args.seed)
    if args.method == "topsis":
        outcome = topsis_rank(matrix, weights).outcome
    elif args.method == "topsis-m":
        outcome = topsis_m_rank(matrix, weights, ridge=args.ridge).outcome
    elif args.method == "ica-topsis":
        outcome = ica_topsis(matrix, weights, config).outcome
    else:
        outcome = ica_topsis_m(matrix, weights, config, ridge=args.ridge).outcome
    write_ranking_csv(outcome, matrix.alternative_ids, sys.stdout)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    spec = bench.profile_spec(
        args.experiment,
        args.profile,
        base_seed=args.seed,
        M=args.criteria,
        replications=args.replications,
        workers=args.workers,
    )
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {out}: {exc}") from exc
    log.info("running %s (%s profile, %d replications)", args.experiment, args.profile, spec.replications)
    table = bench.run_named(args.experiment, spec)
    stem = args.experiment if args.experiment != "tables" else f"tables_M{spec.M}"
    try:
        with open(out / f"{stem}.csv", "w", newline="", encoding="utf-8") as fh:
            table.to_csv(fh)
        with open(out / f"{stem}_long.csv", "w", newline="", encoding="utf-8") as fh:
            table.to_long_csv(fh)
        (out / f"{stem}.json").write_text(result_table_to_json(table), encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write results to {out}: {exc}") from exc
    failures = sum(c.failures for c in table.cells.values())
    if failures:
        log.warning("%d method runs failed and were excluded from the means", failures)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="icatopsis", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    rank = sub.add_parser("rank", help="rank the alternatives of a decision CSV")
    rank.add_argument("--input", required=True, help="CSV with one alternative per row")
    rank.add_argument("--method", choices=RANK_METHODS, default="topsis")
    rank.add_argument("--ica", choices=("fastica", "jade"), default="jade")
    rank.add_argument("--weights", help="comma-separated criterion weights (default: equal)")
    rank.add_argument("--seed", type=int, default=0)
    rank.add_argument("--ridge", action="store_true", help="regularize a singular covariance")
    rank.set_defaults(func=cmd_rank)

    b = sub.add_parser("bench", help="run a Monte Carlo experiment")
    b.add_argument("experiment", choices=tuple(bench.RUNNERS))
    b.add_argument("--profile", choices=("ci", "paper"), default="ci")
    b.add_argument("--replications", type=int, help="override the profile's replication count")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--criteria", "-M", type=int, default=3, help="criteria count for 'tables'")
    b.add_argument("--workers", type=int, help=f"worker processes (default ${bench.WORKERS_ENV} or 1)")
    b.add_argument("--out", default=".", help="output directory")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (CliError, IcaTopsisError, ValueError, OSError, ArithmeticError) as exc:
        module = type(exc).__module__.replace("icatopsis.", "")
        print(f"icatopsis {args.command}: error [{module}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
