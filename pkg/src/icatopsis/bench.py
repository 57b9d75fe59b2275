"""Monte Carlo comparison of the ranking methods on synthetic problems.

Every replication draws one instance, shared by all methods (paired design),
computes the target ranking with TOPSIS on the true latents, and scores each
method by Kendall tau, Pearson correlation of closeness and the top-20%
position error.  A method that raises inside a replication is recorded as a
failure for that cell and left out of its means.

Replication ``i`` uses seed ``base_seed ^ i`` for every scenario, so
scenarios that differ only in SNR see the same latents and mixing matrix.
"""

from __future__ import annotations

import csv
import itertools
import logging
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from .core import IcaTopsisError, MixingInstance
from .ica import IcaConfig
from .metrics import kendall_tau, pearson_closeness, top_segment_mae
from .pipelines import ica_topsis, ica_topsis_m, utopic_pipeline
from .synth import (
    OFFDIAG_LIMIT,
    generate_instance,
    generate_random_instance,
    make_mixing_2x2,
)
from .topsis import topsis_rank
from .topsis_m import topsis_m_rank

log = logging.getLogger(__name__)

METHODS = (
    "topsis",
    "topsis_m",
    "ica_topsis_fastica",
    "ica_topsis_jade",
    "ica_topsis_m_fastica",
    "ica_topsis_m_jade",
    "utopic_ica_topsis",
    "utopic_ica_topsis_m",
)
METRICS = ("tau", "rho", "eps")
TABLE_METHODS = ("topsis", "topsis_m", "ica_topsis_m_jade")
TABLE_SNRS = (15.0, 30.0, 45.0)
TABLE_KS = (30, 100, 170)
WORKERS_ENV = "ICATOPSIS_WORKERS"


@dataclass(frozen=True, order=True)
class Scenario:
    """One cell of an experiment; unused fields stay None."""

    snr_db: float | None = None
    K: int | None = None
    alpha: float | None = None
    beta: float | None = None

    def label(self) -> str:
        parts = []
        if self.alpha is not None:
            parts.append(f"alpha={self.alpha:g}")
            parts.append(f"beta={self.beta:g}")
        if self.snr_db is not None:
            parts.append(f"snr={self.snr_db:g}")
        if self.K is not None:
            parts.append(f"K={self.K}")
        return ",".join(parts)


@dataclass(frozen=True)
class ExperimentSpec:
    methods: tuple[str, ...] = TABLE_METHODS
    M: int = 2
    K: tuple[int, ...] = (100,)
    snr_db: tuple[float | None, ...] = (None,)
    alpha_beta_grid: tuple[tuple[float, float], ...] | None = None
    replications: int = 100
    base_seed: int = 0
    offdiag_range: tuple[float, float] = (-OFFDIAG_LIMIT, OFFDIAG_LIMIT)
    workers: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "K", tuple(int(k) for k in _as_tuple(self.K)))
        object.__setattr__(self, "snr_db", tuple(_as_tuple(self.snr_db)))
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown method(s): {sorted(unknown)}")
        if not self.methods:
            raise ValueError("no methods selected")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if not self.K or not self.snr_db:
            raise ValueError("sweep lists must be nonempty")
        if self.alpha_beta_grid is not None:
            grid = tuple((float(a), float(b)) for a, b in self.alpha_beta_grid)
            if not grid:
                raise ValueError("alpha/beta grid is empty")
            lo, hi = self.offdiag_range
            for a, b in grid:
                if not (lo <= a <= hi and lo <= b <= hi):
                    raise ValueError(f"grid point ({a}, {b}) outside [{lo}, {hi}]")
            object.__setattr__(self, "alpha_beta_grid", grid)


def _as_tuple(x) -> tuple:
    if isinstance(x, (list, tuple)):
        return tuple(x)
    return (x,)


@dataclass
class CellStats:
    """Per-metric samples of one (method, scenario) cell."""

    samples: dict[str, list[float]] = field(default_factory=lambda: {m: [] for m in METRICS})
    failures: int = 0

    @property
    def n(self) -> int:
        return len(self.samples["tau"])

    def mean(self, metric: str) -> float:
        vals = self.samples[metric]
        return float(np.mean(vals)) if vals else float("nan")

    def std(self, metric: str) -> float:
        vals = self.samples[metric]
        return float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0


@dataclass
class ResultTable:
    """Cells keyed by ``(method, scenario)`` in insertion order."""

    replications: int
    cells: dict[tuple[str, Scenario], CellStats] = field(default_factory=dict)

    def cell(self, method: str, scenario: Scenario | None = None, **fields) -> CellStats:
        return self.cells[(method, scenario or Scenario(**fields))]

    def mean(self, method: str, scenario: Scenario, metric: str = "tau") -> float:
        return self.cells[(method, scenario)].mean(metric)

    @property
    def methods(self) -> list[str]:
        return list(dict.fromkeys(m for m, _ in self.cells))

    @property
    def scenarios(self) -> list[Scenario]:
        return list(dict.fromkeys(s for _, s in self.cells))

    def rows(self) -> list[dict]:
        out = []
        for (method, sc), stats in self.cells.items():
            row = {"method": method, "snr_db": sc.snr_db, "K": sc.K, "alpha": sc.alpha, "beta": sc.beta}
            for metric in METRICS:
                row[f"{metric}_mean"] = stats.mean(metric)
                row[f"{metric}_std"] = stats.std(metric)
            row["n"] = stats.n
            row["failures"] = stats.failures
            out.append(row)
        return out

    def to_csv(self, stream: IO[str]) -> None:
        """One row per (method, scenario): metric means, metric sigmas, failure count."""
        rows = self.rows()
        fields = ["method", "snr_db", "K", "alpha", "beta"]
        fields += [f"{m}_{s}" for m in METRICS for s in ("mean", "std")] + ["n", "failures"]
        writer = csv.DictWriter(stream, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})

    def to_long_csv(self, stream: IO[str]) -> None:
        """Plot-ready long format: scenario, method, metric, value."""
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["scenario", "snr_db", "K", "alpha", "beta", "method", "metric", "value"])
        for (method, sc), stats in self.cells.items():
            for metric in METRICS:
                for stat, value in (("mean", stats.mean(metric)), ("std", stats.std(metric))):
                    writer.writerow(
                        [sc.label(), _fmt(sc.snr_db), _fmt(sc.K), _fmt(sc.alpha), _fmt(sc.beta),
                         method, f"{metric}_{stat}", _fmt(value)]
                    )


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def replication_seed(base_seed: int, rep: int) -> int:
    return int(base_seed) ^ int(rep)


def make_replication_instance(spec: ExperimentSpec, scenario: Scenario, rep: int) -> MixingInstance:
    seed = replication_seed(spec.base_seed, rep)
    k = scenario.K if scenario.K is not None else spec.K[0]
    if scenario.alpha is not None:
        return generate_instance(make_mixing_2x2(scenario.alpha, scenario.beta), k, scenario.snr_db, seed)
    return generate_random_instance(spec.M, k, scenario.snr_db, seed, spec.offdiag_range)


def _run_method(method: str, inst: MixingInstance, seed: int):
    v = inst.observed
    if method == "topsis":
        return topsis_rank(v).outcome
    if method == "topsis_m":
        return topsis_m_rank(v).outcome
    if method.startswith("utopic_"):
        return utopic_pipeline(inst, None, method[len("utopic_"):]).outcome
    base, algo = method.rsplit("_", 1)
    config = IcaConfig(algorithm=algo, seed=seed)
    run = ica_topsis if base == "ica_topsis" else ica_topsis_m
    return run(v, None, config).outcome


def run_replication(spec: ExperimentSpec, scenario: Scenario, rep: int) -> dict[str, tuple | str]:
    """Scores of every method on one instance; an error message replaces a failed method's scores."""
    inst = make_replication_instance(spec, scenario, rep)
    target = topsis_rank(inst.latents).outcome
    seed = replication_seed(spec.base_seed, rep)
    out: dict[str, tuple | str] = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for method in spec.methods:
            try:
                res = _run_method(method, inst, seed)
                out[method] = (
                    kendall_tau(res.order, target.order),
                    pearson_closeness(res.closeness, target.closeness),
                    top_segment_mae(res.order, target.order),
                )
            except (IcaTopsisError, np.linalg.LinAlgError, ValueError, ArithmeticError) as exc:
                out[method] = f"{type(exc).__name__}: {exc}"
    return out


def _task(args):
    spec, scenario, rep = args
    return run_replication(spec, scenario, rep)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_experiment(spec: ExperimentSpec, scenarios: Sequence[Scenario]) -> ResultTable:
    """Run every method on every scenario for ``spec.replications`` replications."""
    tasks = [(spec, sc, rep) for sc in scenarios for rep in range(spec.replications)]
    workers = spec.workers or default_workers()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        results = [_task(t) for t in tasks]

    table = ResultTable(spec.replications)
    for sc in scenarios:
        for method in spec.methods:
            table.cells[(method, sc)] = CellStats()
    for (_, sc, rep), res in zip(tasks, results):
        for method, value in res.items():
            stats = table.cells[(method, sc)]
            if isinstance(value, str):
                stats.failures += 1
                log.info("%s failed on %s rep %d: %s", method, sc.label(), rep, value)
            else:
                for metric, x in zip(METRICS, value):
                    stats.samples[metric].append(x)
    return table


def run_grid_experiment(spec: ExperimentSpec) -> ResultTable:
    """TOPSIS-M (or the chosen methods) on noiseless 2x2 mixtures over an (alpha, beta) grid."""
    if spec.M != 2:
        raise ValueError("the mixing grid experiment is defined for M = 2")
    if spec.alpha_beta_grid is None:
        raise ValueError("spec has no alpha/beta grid")
    scenarios = [Scenario(snr_db=spec.snr_db[0], K=spec.K[0], alpha=a, beta=b) for a, b in spec.alpha_beta_grid]
    return run_experiment(spec, scenarios)


def run_snr_sweep(spec: ExperimentSpec) -> ResultTable:
    for snr in spec.snr_db:
        if snr is None or not 0 < snr <= 50:
            raise ValueError(f"SNR sweep values must lie in (0, 50] dB, got {snr}")
    return run_experiment(spec, [Scenario(snr_db=s, K=spec.K[0]) for s in spec.snr_db])


def run_alternatives_sweep(spec: ExperimentSpec) -> ResultTable:
    if len(spec.snr_db) != 1:
        raise ValueError("the alternatives sweep uses a single fixed SNR")
    return run_experiment(spec, [Scenario(snr_db=spec.snr_db[0], K=k) for k in spec.K])


def run_table_experiment(spec: ExperimentSpec) -> ResultTable:
    """Scenarios {SNR} x {K} for M >= 3, in SNR-major order."""
    if spec.M < 3:
        raise ValueError("table experiments use M >= 3 criteria")
    missing = set(TABLE_METHODS) - set(spec.methods)
    if missing:
        raise ValueError(f"table experiments need methods {sorted(missing)}")
    scenarios = [Scenario(snr_db=s, K=k) for s, k in itertools.product(spec.snr_db, spec.K)]
    return run_experiment(spec, scenarios)


def grid_points(step: float, limit: float = OFFDIAG_LIMIT) -> tuple[tuple[float, float], ...]:
    n = int(round(2 * limit / step))
    axis = [round(-limit + i * step, 10) for i in range(n + 1)]
    return tuple(itertools.product(axis, axis))


PROFILES = {
    # experiment -> profile -> spec keyword overrides
    "grid": {
        "paper": dict(replications=500, alpha_beta_grid=grid_points(0.125)),
        "ci": dict(replications=20, alpha_beta_grid=grid_points(0.25)),
    },
    "snr": {
        "paper": dict(replications=500, snr_db=tuple(float(s) for s in range(5, 51, 5))),
        "ci": dict(replications=20, snr_db=(10.0, 25.0, 40.0)),
    },
    "alternatives": {
        "paper": dict(replications=500, K=(10, 20, 30, 40, 50, 70, 100, 130, 170, 200)),
        "ci": dict(replications=20, K=(10, 30, 100)),
    },
    "tables": {
        "paper": dict(replications=1000),
        "ci": dict(replications=20),
    },
}


def profile_spec(
    experiment: str,
    profile: str = "ci",
    base_seed: int = 0,
    M: int = 3,
    replications: int | None = None,
    workers: int | None = None,
) -> ExperimentSpec:
    """The ExperimentSpec a named experiment runs under the ``paper`` or ``ci`` profile."""
    try:
        overrides = dict(PROFILES[experiment][profile])
    except KeyError:
        raise ValueError(f"unknown experiment/profile {experiment!r}/{profile!r}") from None
    if replications is not None:
        overrides["replications"] = replications
    base = dict(base_seed=base_seed, workers=workers)
    if experiment == "grid":
        base.update(methods=("topsis_m",), M=2, K=(100,), snr_db=(None,))
    elif experiment == "snr":
        base.update(methods=METHODS, M=2, K=(100,))
    elif experiment == "alternatives":
        base.update(methods=METHODS, M=2, snr_db=(30.0,))
    else:
        base.update(methods=TABLE_METHODS, M=M, K=TABLE_KS, snr_db=TABLE_SNRS)
    base.update(overrides)
    return ExperimentSpec(**base)


RUNNERS = {
    "grid": run_grid_experiment,
    "snr": run_snr_sweep,
    "alternatives": run_alternatives_sweep,
    "tables": run_table_experiment,
}


def run_named(experiment: str, spec: ExperimentSpec) -> ResultTable:
    return RUNNERS[experiment](spec)


def iter_bold(table: ResultTable, metric: str = "tau") -> Iterable[tuple[Scenario, str]]:
    """Best method per scenario (highest mean, or lowest for the position error)."""
    for sc in table.scenarios:
        means = {m: table.mean(m, sc, metric) for m in table.methods}
        pick = min if metric == "eps" else max
        yield sc, pick(means, key=means.get)
