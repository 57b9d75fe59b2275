"""ICA-TOPSIS and ICA-TOPSIS-M end to end.

ICA-TOPSIS runs plain TOPSIS on the adjusted latent estimates.  ICA-TOPSIS-M
takes its ideals from the adjusted latent estimates, maps them back into the
observed space with the adjusted mixing matrix, and ranks the observed data
with TOPSIS-M against those ideals.

Weights are applied positionally: after the permutation adjustment, latent
criterion ``n`` is the one that mostly drives observed criterion ``n`` and
inherits ``w[n]``.

The mapped ideals are raw observed-space vectors while TOPSIS-M measures
distances on vector-normalized data.  They are brought into that space with
the row norms of the observed matrix itself, so ideals and data share one
scale per criterion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike

from .core import (
    DecisionMatrix,
    IdealPair,
    MixingInstance,
    RankingOutcome,
    SeparationResult,
    SpaceTag,
    ValidationError,
    WeightVector,
    validate_problem,
)
from .ica import IcaConfig, separate, separation_from_unmixing
from .topsis import TopsisTrace, row_norms, topsis_rank
from .topsis_m import TopsisMTrace, topsis_m_rank_with_ideals

Pipeline = Literal["ica_topsis", "ica_topsis_m"]
Weights = Union[WeightVector, Sequence[float], None]


@dataclass(frozen=True)
class PipelineResult:
    outcome: RankingOutcome
    separation: SeparationResult
    trace: TopsisTrace | TopsisMTrace
    latent_ideals: IdealPair | None = None
    mixed_ideals: IdealPair | None = None


def _ica_topsis_from(separation: SeparationResult, w: WeightVector) -> PipelineResult:
    trace = topsis_rank(separation.L_adj, w)
    return PipelineResult(trace.outcome, separation, trace)


def _ica_topsis_m_from(
    matrix: DecisionMatrix,
    separation: SeparationResult,
    w: WeightVector,
    latent_ideals: IdealPair | None = None,
    ridge: bool = False,
) -> PipelineResult:
    if latent_ideals is None:
        latent_ideals = IdealPair.extract(separation.L_adj, SpaceTag.LATENT)
    mixed = IdealPair(
        separation.A_adj @ latent_ideals.pia,
        separation.A_adj @ latent_ideals.nia,
        SpaceTag.MIXED,
    )
    norms = row_norms(matrix.values)
    normalized = IdealPair(mixed.pia / norms, mixed.nia / norms, SpaceTag.NORMALIZED)
    trace = topsis_m_rank_with_ideals(matrix, w, normalized, ridge=ridge)
    return PipelineResult(trace.outcome, separation, trace, latent_ideals, mixed)


def ica_topsis(
    matrix: DecisionMatrix | ArrayLike,
    weights: Weights = None,
    config: IcaConfig | None = None,
) -> PipelineResult:
    """Separate, fix ambiguities, then run TOPSIS on the latent estimates."""
    matrix, w = validate_problem(matrix, weights)
    return _ica_topsis_from(separate(matrix.values, config), w)


def ica_topsis_m(
    matrix: DecisionMatrix | ArrayLike,
    weights: Weights = None,
    config: IcaConfig | None = None,
    ridge: bool = False,
) -> PipelineResult:
    """Separate, fix ambiguities, derive latent ideals, run TOPSIS-M against their images."""
    matrix, w = validate_problem(matrix, weights)
    return _ica_topsis_m_from(matrix, separate(matrix.values, config), w, ridge=ridge)


def rank_with_separation(
    matrix: DecisionMatrix | ArrayLike,
    weights: Weights,
    separation: SeparationResult,
    which: Pipeline,
    ridge: bool = False,
) -> PipelineResult:
    """Run either pipeline on a separation computed elsewhere."""
    matrix, w = validate_problem(matrix, weights)
    if which == "ica_topsis":
        return _ica_topsis_from(separation, w)
    if which == "ica_topsis_m":
        return _ica_topsis_m_from(matrix, separation, w, ridge=ridge)
    raise ValidationError(f"unknown pipeline {which!r}")


def utopic_pipeline(
    instance: MixingInstance,
    weights: Weights = None,
    which: Pipeline = "ica_topsis",
    ridge: bool = False,
) -> PipelineResult:
    """Benchmark upper bound: the pipeline with the true separating matrix ``inv(A)``.

    In ``ica_topsis_m`` mode the ideals are the latent-space targets (extremes
    of the true latents) mapped through ``A``; without noise these coincide
    with the extremes of ``inv(A) @ V``.
    """
    matrix, w = validate_problem(instance.decision_matrix(), weights)
    try:
        b = np.linalg.inv(instance.mixing)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"mixing matrix is singular: {exc}") from exc
    separation = separation_from_unmixing(matrix.values, b)
    if which == "ica_topsis":
        return _ica_topsis_from(separation, w)
    if which == "ica_topsis_m":
        # the true latents line up with the adjusted estimates only up to the
        # adjustment, which is the identity for diagonally dominant A
        targets = IdealPair.extract(
            separation.signs[:, np.newaxis] * instance.latents[separation.permutation],
            SpaceTag.LATENT,
        )
        return _ica_topsis_m_from(matrix, separation, w, targets, ridge=ridge)
    raise ValidationError(f"unknown pipeline {which!r}")
