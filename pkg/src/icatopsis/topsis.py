"""Classical TOPSIS with Euclidean distances to the ideal alternatives."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import (
    DecisionMatrix,
    DegenerateCriterionError,
    IdealPair,
    RankingOutcome,
    SpaceTag,
    WeightVector,
    validate_problem,
)


class DegenerateClosenessWarning(RuntimeWarning):
    """An alternative sits at zero distance from both ideals; closeness set to 0.5."""


@dataclass(frozen=True)
class TopsisTrace:
    """Every intermediate quantity of one TOPSIS run."""

    normalized: NDArray[np.float64]
    weighted: NDArray[np.float64]
    ideals: IdealPair
    d_plus: NDArray[np.float64]
    d_minus: NDArray[np.float64]
    outcome: RankingOutcome


def row_norms(values: ArrayLike) -> NDArray[np.float64]:
    """Euclidean norm of every criterion row; raises on an all-zero row."""
    values = np.asarray(values, dtype=np.float64)
    norms = np.sqrt(np.sum(values**2, axis=1))
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise DegenerateCriterionError(int(zero[0]))
    return norms


def vector_normalize(matrix: DecisionMatrix | ArrayLike) -> NDArray[np.float64]:
    """Divide each criterion row by its Euclidean norm.

    Negative entries are allowed (estimated latent criteria can be negative).
    """
    values = matrix.values if isinstance(matrix, DecisionMatrix) else np.asarray(matrix, float)
    if values.ndim == 1:
        values = values[np.newaxis, :]
    return values / row_norms(values)[:, np.newaxis]


def closeness(d_plus: NDArray[np.float64], d_minus: NDArray[np.float64]) -> NDArray[np.float64]:
    """``d_minus / (d_plus + d_minus)``, with 0.5 where both distances vanish."""
    total = d_plus + d_minus
    degenerate = total == 0
    if np.any(degenerate):
        warnings.warn(
            f"{int(degenerate.sum())} alternative(s) coincide with both ideals; closeness set to 0.5",
            DegenerateClosenessWarning,
            stacklevel=3,
        )
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(degenerate, 0.5, d_minus / np.where(degenerate, 1.0, total))
    return np.clip(r, 0.0, 1.0)


def topsis_rank(
    matrix: DecisionMatrix | ArrayLike,
    weights: WeightVector | Sequence[float] | None = None,
) -> TopsisTrace:
    """Rank alternatives by closeness to the weighted-normalized ideals.

    Parameters
    ----------
    matrix : DecisionMatrix or array_like, shape (M, K)
        Benefit-type evaluations, criteria in rows.
    weights : WeightVector or sequence of float, optional
        Criterion importances; equal weights when omitted.

    Returns
    -------
    TopsisTrace
        Normalized and weighted matrices, ideals, distances and the outcome.
    """
    matrix, w = validate_problem(matrix, weights)
    u = vector_normalize(matrix)
    p = w.w[:, np.newaxis] * u
    ideals = IdealPair.extract(p, SpaceTag.WEIGHTED_NORMALIZED)
    d_plus = np.sqrt(np.sum((p - ideals.pia[:, np.newaxis]) ** 2, axis=0))
    d_minus = np.sqrt(np.sum((p - ideals.nia[:, np.newaxis]) ** 2, axis=0))
    outcome = RankingOutcome(closeness(d_plus, d_minus), ideals)
    return TopsisTrace(u, p, ideals, d_plus, d_minus, outcome)
