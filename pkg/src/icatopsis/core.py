"""Domain types shared by every ranking method.

Decision data follow the criteria-as-rows layout: ``values[m, k]`` is the
evaluation of alternative ``k`` under criterion ``m``.  All criteria are
benefit criteria (larger is better); cost criteria must be negated or
inverted by the caller before building a :class:`DecisionMatrix`.

Every type here is immutable after construction.  Array fields are copied
and marked read-only so instances can be shared between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

WEIGHT_SUM_TOL = 1e-9


class IcaTopsisError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(IcaTopsisError, ValueError):
    """Malformed input: wrong shape, non-finite entry, bad weights."""

    def __init__(self, message: str, location: tuple[int, ...] | None = None):
        super().__init__(message)
        self.location = location


class DegenerateCriterionError(IcaTopsisError, ValueError):
    """A criterion row is all zeros and cannot be vector-normalized."""

    def __init__(self, row: int):
        super().__init__(f"criterion row {row + 1} is all zeros; vector normalization undefined")
        self.row = row


def _frozen(a: ArrayLike) -> NDArray[np.float64]:
    out = np.array(a, dtype=np.float64)
    out.setflags(write=False)
    return out


def _check_finite(values: NDArray[np.float64], what: str) -> None:
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        loc = tuple(int(i) for i in bad[0])
        human = ", ".join(str(i + 1) for i in loc)
        raise ValidationError(f"{what} has a non-finite entry at ({human})", location=loc)


@dataclass(frozen=True)
class DecisionMatrix:
    """M x K evaluations, criteria in rows and alternatives in columns.

    Labels default to ``C1..CM`` and ``A1..AK``.  Non-finite entries raise a
    :class:`ValidationError` whose ``location`` is the 0-based
    ``(criterion, alternative)`` index; the message uses 1-based indices.
    """

    values: NDArray[np.float64]
    criterion_ids: tuple[str, ...] = ()
    alternative_ids: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values[np.newaxis, :]
        if values.ndim != 2:
            raise ValidationError(f"decision matrix must be 2-D, got {values.ndim}-D")
        m, k = values.shape
        if m < 1:
            raise ValidationError("decision matrix needs at least one criterion")
        if k < 2:
            raise ValidationError(f"decision matrix needs at least two alternatives, got {k}")
        _check_finite(values, "decision matrix")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

        crit = tuple(self.criterion_ids) or tuple(f"C{i + 1}" for i in range(m))
        alts = tuple(self.alternative_ids) or tuple(f"A{i + 1}" for i in range(k))
        if len(crit) != m:
            raise ValidationError(f"{len(crit)} criterion labels for {m} criteria")
        if len(alts) != k:
            raise ValidationError(f"{len(alts)} alternative labels for {k} alternatives")
        object.__setattr__(self, "criterion_ids", tuple(str(c) for c in crit))
        object.__setattr__(self, "alternative_ids", tuple(str(a) for a in alts))

    @property
    def n_criteria(self) -> int:
        return self.values.shape[0]

    @property
    def n_alternatives(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative criterion importances summing to one."""

    w: NDArray[np.float64]

    def __post_init__(self) -> None:
        w = np.array(self.w, dtype=np.float64).ravel()
        if w.size == 0:
            raise ValidationError("weight vector is empty")
        _check_finite(w, "weight vector")
        neg = np.flatnonzero(w < 0)
        if neg.size:
            i = int(neg[0])
            raise ValidationError(f"weight {i + 1} is negative ({w[i]})", location=(i,))
        total = float(w.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"weights sum to {total!r}, expected 1")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @classmethod
    def equal(cls, m: int) -> WeightVector:
        return cls(np.full(m, 1.0 / m))

    @classmethod
    def normalized(cls, raw: ArrayLike) -> WeightVector:
        """Rescale arbitrary nonnegative importances to sum to one."""
        raw = np.asarray(raw, dtype=np.float64).ravel()
        return cls(raw / raw.sum())

    def __len__(self) -> int:
        return self.w.size

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.w == self.w[0]))


class SpaceTag(str, Enum):
    WEIGHTED_NORMALIZED = "weighted-normalized"
    NORMALIZED = "normalized"
    LATENT = "latent"
    MIXED = "mixed"


@dataclass(frozen=True)
class IdealPair:
    """Positive and negative ideal alternatives in a tagged space."""

    pia: NDArray[np.float64]
    nia: NDArray[np.float64]
    space_tag: SpaceTag = SpaceTag.NORMALIZED

    def __post_init__(self) -> None:
        pia = _frozen(np.ravel(self.pia))
        nia = _frozen(np.ravel(self.nia))
        if pia.shape != nia.shape:
            raise ValidationError(f"PIA has length {pia.size} but NIA has length {nia.size}")
        object.__setattr__(self, "pia", pia)
        object.__setattr__(self, "nia", nia)
        object.__setattr__(self, "space_tag", SpaceTag(self.space_tag))

    @classmethod
    def extract(cls, data: ArrayLike, space_tag: SpaceTag) -> IdealPair:
        """Row-wise max (PIA) and min (NIA) of a criteria-as-rows matrix."""
        data = np.asarray(data, dtype=np.float64)
        return cls(data.max(axis=1), data.min(axis=1), space_tag)

    def __len__(self) -> int:
        return self.pia.size


@dataclass(frozen=True)
class RankingOutcome:
    """Closeness per alternative and the induced total order.

    ``order[0]`` is the index of the best alternative.  Ties in closeness are
    broken by ascending alternative index.
    """

    closeness: NDArray[np.float64]
    ideals: IdealPair
    order: NDArray[np.int64] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        r = _frozen(np.ravel(self.closeness))
        object.__setattr__(self, "closeness", r)
        if self.order is None:
            order = np.argsort(-r, kind="stable")
        else:
            order = np.array(self.order, dtype=np.int64)
            if sorted(order.tolist()) != list(range(r.size)):
                raise ValidationError("order is not a permutation of the alternatives")
        order = order.astype(np.int64)
        order.setflags(write=False)
        object.__setattr__(self, "order", order)

    @property
    def positions(self) -> NDArray[np.int64]:
        """1-based rank position of every alternative."""
        pos = np.empty_like(self.order)
        pos[self.order] = np.arange(1, self.order.size + 1)
        return pos


@dataclass(frozen=True)
class MixingInstance:
    """Ground truth of a synthetic problem, ``observed = mixing @ latents + noise``.

    ``snr_db`` is None for noiseless instances.  ``seed`` records the seed the
    instance was generated from, when known.
    """

    latents: NDArray[np.float64]
    mixing: NDArray[np.float64]
    noise: NDArray[np.float64]
    observed: NDArray[np.float64] = field(default=None)  # type: ignore[assignment]
    snr_db: float | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        latents = _frozen(self.latents)
        mixing = _frozen(self.mixing)
        noise = _frozen(self.noise)
        if mixing.shape[1] != latents.shape[0]:
            raise ValidationError(
                f"mixing is {mixing.shape} but latents have {latents.shape[0]} rows"
            )
        signal = mixing @ latents
        if noise.shape != signal.shape:
            raise ValidationError(f"noise is {noise.shape}, signal is {signal.shape}")
        observed = signal + noise
        if self.observed is not None and not np.array_equal(np.asarray(self.observed), observed):
            raise ValidationError("observed does not equal mixing @ latents + noise")
        object.__setattr__(self, "latents", latents)
        object.__setattr__(self, "mixing", mixing)
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "observed", _frozen(observed))
        if self.snr_db is not None:
            object.__setattr__(self, "snr_db", float(self.snr_db))

    @property
    def signal(self) -> NDArray[np.float64]:
        return self.mixing @ self.latents

    def decision_matrix(self) -> DecisionMatrix:
        return DecisionMatrix(self.observed)


@dataclass(frozen=True)
class SeparationResult:
    """Output of a separation step plus its ambiguity-adjusted form.

    ``B`` is the separating matrix, ``A_hat = inv(B)`` and ``L_hat = B @ V``.
    ``A_adj``/``L_adj`` are ``A_hat``/``L_hat`` after the permutation and sign
    adjustments: ``A_adj = A_hat[:, permutation] * signs`` and
    ``L_adj = signs[:, None] * L_hat[permutation]``.
    """

    B: NDArray[np.float64]
    A_hat: NDArray[np.float64]
    L_hat: NDArray[np.float64]
    A_adj: NDArray[np.float64]
    L_adj: NDArray[np.float64]
    permutation: NDArray[np.int64]
    signs: NDArray[np.float64]
    iterations: int = 0

    def __post_init__(self) -> None:
        for name in ("B", "A_hat", "L_hat", "A_adj", "L_adj", "signs"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        perm = np.array(self.permutation, dtype=np.int64)
        perm.setflags(write=False)
        object.__setattr__(self, "permutation", perm)


def as_decision_matrix(data: DecisionMatrix | ArrayLike) -> DecisionMatrix:
    if isinstance(data, DecisionMatrix):
        return data
    return DecisionMatrix(np.asarray(data, dtype=np.float64))


def as_weights(weights: WeightVector | Sequence[float] | None, m: int) -> WeightVector:
    """Coerce to a :class:`WeightVector`; None means equal weights."""
    if weights is None:
        return WeightVector.equal(m)
    if isinstance(weights, WeightVector):
        return weights
    return WeightVector(np.asarray(weights, dtype=np.float64))


def validate_problem(
    matrix: DecisionMatrix | ArrayLike, weights: WeightVector | Sequence[float] | None
) -> tuple[DecisionMatrix, WeightVector]:
    """Check that a decision matrix and weight vector form a well-posed problem.

    Returns the pair unchanged (coerced to the domain types) when the weight
    count matches the number of criteria, all entries are finite and there
    are at least two alternatives.
    """
    matrix = as_decision_matrix(matrix)
    w = as_weights(weights, matrix.n_criteria)
    if len(w) != matrix.n_criteria:
        raise ValidationError(
            f"{len(w)} weights given for {matrix.n_criteria} criteria", location=(len(w),)
        )
    return matrix, w
