"""CSV and JSON formats.

Decision-matrix CSV files store one alternative per row::

    alternative,forest_area_pct,gni_per_capita_usd,life_expectancy_years
    A83,68.9229,57880,82.2049

The first header cell names the label column; the remaining header cells
are criterion labels.  In memory the matrix is transposed to criteria-as-rows.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from importlib import resources
from typing import IO, Any, Sequence, Union

import numpy as np

from .core import DecisionMatrix, MixingInstance, RankingOutcome, ValidationError

Source = Union[str, "os.PathLike[str]", IO[str]]


def _open_text(source: Source):
    if hasattr(source, "read"):
        return source, False
    return open(source, newline="", encoding="utf-8"), True


def read_decision_csv(source: Source) -> DecisionMatrix:
    """Parse an alternatives-as-rows CSV into a criteria-as-rows DecisionMatrix.

    Errors name the offending cell by 1-based file line and column header.
    """
    stream, owned = _open_text(source)
    try:
        rows = list(csv.reader(stream))
    finally:
        if owned:
            stream.close()
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise ValidationError("CSV is empty")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2:
        raise ValidationError("CSV header needs a label column and at least one criterion")
    criteria = header[1:]
    if len(set(criteria)) != len(criteria):
        raise ValidationError(f"duplicate criterion labels in header: {criteria}")

    labels: list[str] = []
    values: list[list[float]] = []
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValidationError(
                f"line {line} has {len(row)} cells, header has {len(header)}", location=(line,)
            )
        label = row[0].strip()
        if not label:
            raise ValidationError(f"line {line} has a blank alternative label", location=(line, 1))
        if label in labels:
            raise ValidationError(f"duplicate alternative label {label!r} on line {line}")
        parsed = []
        for col, cell in enumerate(row[1:], start=2):
            text = cell.strip()
            where = f"line {line}, column {col} ({header[col - 1]})"
            if not text:
                raise ValidationError(f"blank cell at {where}", location=(line, col))
            try:
                x = float(text)
            except ValueError:
                raise ValidationError(f"non-numeric cell {text!r} at {where}", location=(line, col)) from None
            if not math.isfinite(x):
                raise ValidationError(f"non-finite cell {text!r} at {where}", location=(line, col))
            parsed.append(x)
        labels.append(label)
        values.append(parsed)

    if len(values) < 2:
        raise ValidationError(f"CSV has {len(values)} alternative(s); at least two are required")
    return DecisionMatrix(np.array(values).T, tuple(criteria), tuple(labels))


def write_decision_csv(matrix: DecisionMatrix, stream: IO[str], label_header: str = "alternative") -> None:
    """Inverse of :func:`read_decision_csv`; floats are written with ``repr`` precision."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([label_header, *matrix.criterion_ids])
    for k, label in enumerate(matrix.alternative_ids):
        writer.writerow([label, *(repr(float(x)) for x in matrix.values[:, k])])


def write_ranking_csv(
    outcome: RankingOutcome, labels: Sequence[str] | None = None, stream: IO[str] | None = None
) -> IO[str]:
    """Write ``position,alternative,closeness`` rows, best first.

    Closeness is printed with nine decimals.  Returns the stream written to;
    when none is given, a fresh StringIO rewound to the start.
    """
    k = outcome.closeness.size
    if labels is None:
        labels = [f"A{i + 1}" for i in range(k)]
    if len(labels) != k:
        raise ValidationError(f"{len(labels)} labels for {k} alternatives")
    fresh = stream is None
    stream = io.StringIO() if fresh else stream
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["position", "alternative", "closeness"])
    for pos, idx in enumerate(outcome.order, start=1):
        writer.writerow([pos, labels[idx], f"{outcome.closeness[idx]:.9f}"])
    if fresh:
        stream.seek(0)
    return stream


def read_ranking_csv(source: Source) -> list[tuple[int, str, float]]:
    stream, owned = _open_text(source)
    try:
        reader = csv.reader(stream)
        header = next(reader)
        if [h.strip() for h in header] != ["position", "alternative", "closeness"]:
            raise ValidationError(f"unexpected ranking header {header}")
        return [(int(p), a, float(c)) for p, a, c in reader]
    finally:
        if owned:
            stream.close()


def load_countries() -> DecisionMatrix:
    """Sixteen countries scored on forest area (%), GNI per capita (USD) and life expectancy (years)."""
    text = resources.files("icatopsis").joinpath("data/countries.csv").read_text(encoding="utf-8")
    return read_decision_csv(io.StringIO(text))


def instance_to_dict(instance: MixingInstance) -> dict[str, Any]:
    return {
        "latents": instance.latents.tolist(),
        "mixing": instance.mixing.tolist(),
        "noise": instance.noise.tolist(),
        "observed": instance.observed.tolist(),
        "snr_db": instance.snr_db,
        "seed": instance.seed,
    }


def instance_from_dict(data: dict[str, Any]) -> MixingInstance:
    return MixingInstance(
        latents=np.array(data["latents"]),
        mixing=np.array(data["mixing"]),
        noise=np.array(data["noise"]),
        observed=np.array(data["observed"]) if data.get("observed") is not None else None,
        snr_db=data.get("snr_db"),
        seed=data.get("seed"),
    )


def instance_to_json(instance: MixingInstance) -> str:
    return json.dumps(instance_to_dict(instance))


def instance_from_json(text: str) -> MixingInstance:
    return instance_from_dict(json.loads(text))


def result_table_to_json(table) -> str:
    """Serialize a bench ResultTable, keeping every per-replication sample."""
    cells = []
    for (method, sc), stats in table.cells.items():
        cells.append(
            {
                "method": method,
                "scenario": {"snr_db": sc.snr_db, "K": sc.K, "alpha": sc.alpha, "beta": sc.beta},
                "samples": stats.samples,
                "failures": stats.failures,
            }
        )
    return json.dumps({"replications": table.replications, "cells": cells})


def result_table_from_json(text: str):
    from .bench import CellStats, ResultTable, Scenario

    data = json.loads(text)
    table = ResultTable(data["replications"])
    for cell in data["cells"]:
        stats = CellStats({k: list(v) for k, v in cell["samples"].items()}, cell["failures"])
        table.cells[(cell["method"], Scenario(**cell["scenario"]))] = stats
    return table
