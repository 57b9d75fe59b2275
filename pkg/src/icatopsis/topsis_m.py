"""TOPSIS-M: TOPSIS with weighted Mahalanobis distances.

Ideals are extracted from the vector-normalized data before weighting; the
weights only enter through ``diag(w)`` inside the quadratic form
``d^T diag(w) inv(Sigma_U) diag(w) d``.

With equal weights the Mahalanobis distance is the Euclidean distance after
the map ``u -> inv(F) diag(w) u`` where ``Sigma_U = F F^T`` is the Cholesky
factorization; :func:`whitened_euclidean_oracle` computes rankings through
that route and serves as an independent check of :func:`topsis_m_rank`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from .core import (
    DecisionMatrix,
    IcaTopsisError,
    IdealPair,
    RankingOutcome,
    SpaceTag,
    ValidationError,
    WeightVector,
    as_weights,
    validate_problem,
)
from .topsis import closeness, vector_normalize

# smallest admissible eigenvalue of Sigma_U relative to the largest
SINGULAR_RTOL = 1e-12
RIDGE_SCALE = 1e-8


class SingularCovarianceError(IcaTopsisError, np.linalg.LinAlgError):
    """Sigma_U is singular or indefinite and no ridge was requested."""


class IndefiniteFormError(IcaTopsisError, ArithmeticError):
    """A Mahalanobis quadratic form came out clearly negative."""


@dataclass(frozen=True)
class CovarianceModel:
    """Covariance of normalized data with its Cholesky factor and weight matrix.

    Attributes
    ----------
    sigma : ndarray, shape (M, M)
        Covariance matrix (ridge included when one was applied).
    cholesky_f : ndarray, shape (M, M)
        Lower-triangular factor with positive diagonal, ``sigma = F @ F.T``.
    delta : ndarray, shape (M, M)
        ``diag(w)``.
    ridge : float
        Amount added to the diagonal, 0 when unregularized.
    """

    sigma: NDArray[np.float64]
    cholesky_f: NDArray[np.float64]
    delta: NDArray[np.float64]
    ridge: float = 0.0

    @property
    def dim(self) -> int:
        return self.sigma.shape[0]


def covariance_model(
    sigma: ArrayLike,
    weights: WeightVector | Sequence[float] | None = None,
    ridge: bool = False,
) -> CovarianceModel:
    """Validate a covariance matrix and factor it.

    ``ridge=True`` adds ``1e-8 * trace(sigma) / M`` to the diagonal before
    factoring.  Without it a singular or indefinite matrix raises
    :class:`SingularCovarianceError`.
    """
    sigma = np.array(sigma, dtype=np.float64)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ValidationError(f"covariance must be square, got shape {sigma.shape}")
    m = sigma.shape[0]
    sigma = 0.5 * (sigma + sigma.T)
    lam = 0.0
    if ridge:
        lam = RIDGE_SCALE * float(np.trace(sigma)) / m
        sigma = sigma + lam * np.eye(m)

    eig = np.linalg.eigvalsh(sigma)
    if eig[-1] <= 0 or eig[0] <= SINGULAR_RTOL * eig[-1]:
        raise SingularCovarianceError(
            f"covariance is singular or indefinite (eigenvalues {eig[0]:.3e} .. {eig[-1]:.3e}); "
            "pass ridge=True to regularize"
        )
    try:
        f = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise SingularCovarianceError(f"Cholesky factorization failed: {exc}") from exc

    w = as_weights(weights, m)
    if len(w) != m:
        raise ValidationError(f"{len(w)} weights for a {m}x{m} covariance")
    return CovarianceModel(sigma, f, np.diag(w.w), lam)


def sample_covariance(
    u: ArrayLike,
    weights: WeightVector | Sequence[float] | None = None,
    ridge: bool = False,
    ddof: int = 0,
) -> CovarianceModel:
    """Covariance of criteria-as-rows data.

    ``ddof=0`` (the default) divides by K, the expectation-operator
    convention; ``ddof=1`` gives the unbiased estimate.
    """
    u = np.asarray(u, dtype=np.float64)
    if not np.all(np.isfinite(u)):
        raise ValidationError("normalized matrix has non-finite entries")
    centered = u - u.mean(axis=1, keepdims=True)
    sigma = centered @ centered.T / (u.shape[1] - ddof)
    return covariance_model(sigma, weights, ridge)


def _form_matrix(cov: CovarianceModel) -> NDArray[np.float64]:
    # diag(w) inv(Sigma) diag(w), via a general solve (not the Cholesky factor)
    q = cov.delta.T @ np.linalg.solve(cov.sigma, cov.delta)
    return 0.5 * (q + q.T)


def _distances(disp: NDArray[np.float64], q: NDArray[np.float64]) -> NDArray[np.float64]:
    """sqrt(d^T Q d) for every column d of ``disp``."""
    forms = np.einsum("ik,ij,jk->k", disp, q, disp)
    scale = np.einsum("ik,ik->k", disp, disp) * np.abs(q).max()
    if np.any(forms < -1e-10 * np.maximum(scale, np.finfo(float).tiny)):
        raise IndefiniteFormError("Mahalanobis quadratic form is negative")
    return np.sqrt(np.maximum(forms, 0.0))


def mahalanobis_distance(u_k: ArrayLike, ideal: ArrayLike, cov: CovarianceModel) -> float:
    """Weighted Mahalanobis distance between one alternative and an ideal."""
    u_k = np.asarray(u_k, dtype=np.float64).ravel()
    ideal = np.asarray(ideal, dtype=np.float64).ravel()
    if u_k.size != cov.dim or ideal.size != cov.dim:
        raise ValidationError(
            f"vectors have lengths {u_k.size} and {ideal.size}, covariance is {cov.dim}x{cov.dim}"
        )
    d = u_k - ideal
    return float(_distances(d[:, np.newaxis], _form_matrix(cov))[0])


@dataclass(frozen=True)
class TopsisMTrace:
    normalized: NDArray[np.float64]
    ideals: IdealPair
    covariance: CovarianceModel
    dm_plus: NDArray[np.float64]
    dm_minus: NDArray[np.float64]
    outcome: RankingOutcome


def _rank_normalized(
    u: NDArray[np.float64], w: WeightVector, ideals: IdealPair, ridge: bool, ddof: int
) -> TopsisMTrace:
    if len(ideals) != u.shape[0]:
        raise ValidationError(f"ideals have length {len(ideals)} for {u.shape[0]} criteria")
    cov = sample_covariance(u, w, ridge=ridge, ddof=ddof)
    q = _form_matrix(cov)
    dm_plus = _distances(u - ideals.pia[:, np.newaxis], q)
    dm_minus = _distances(u - ideals.nia[:, np.newaxis], q)
    outcome = RankingOutcome(closeness(dm_plus, dm_minus), ideals)
    return TopsisMTrace(u, ideals, cov, dm_plus, dm_minus, outcome)


def topsis_m_rank(
    matrix: DecisionMatrix | ArrayLike,
    weights: WeightVector | Sequence[float] | None = None,
    ridge: bool = False,
    ddof: int = 0,
) -> TopsisMTrace:
    """Rank alternatives by weighted Mahalanobis closeness.

    Steps: vector normalization, ideal extraction on the normalized (not yet
    weighted) data, covariance of the normalized data, Mahalanobis distances,
    closeness.
    """
    matrix, w = validate_problem(matrix, weights)
    u = vector_normalize(matrix)
    return _rank_normalized(u, w, IdealPair.extract(u, SpaceTag.NORMALIZED), ridge, ddof)


def topsis_m_rank_with_ideals(
    matrix: DecisionMatrix | ArrayLike,
    weights: WeightVector | Sequence[float] | None,
    ideals: IdealPair,
    ridge: bool = False,
    ddof: int = 0,
) -> TopsisMTrace:
    """TOPSIS-M with externally supplied ideals.

    The ideals must already live in the vector-normalized space of
    ``matrix`` (divide by the same per-criterion row norms).
    """
    matrix, w = validate_problem(matrix, weights)
    return _rank_normalized(vector_normalize(matrix), w, ideals, ridge, ddof)


@dataclass(frozen=True)
class WhitenedTrace:
    """Data and ideals mapped by ``inv(F) diag(w)``, and the Euclidean ranking there."""

    transformed: NDArray[np.float64]
    ideals: IdealPair
    transformed_covariance: NDArray[np.float64]
    outcome: RankingOutcome


def whitened_euclidean_oracle(
    matrix: DecisionMatrix | ArrayLike,
    weights: WeightVector | Sequence[float] | None = None,
    ridge: bool = False,
) -> WhitenedTrace:
    """Euclidean TOPSIS closeness in the decorrelated space.

    Only defined for equal weights, where it must agree with
    :func:`topsis_m_rank`.  The covariance of the transformed data is
    ``w**2 * I``.
    """
    matrix, w = validate_problem(matrix, weights)
    if not w.is_uniform:
        raise ValidationError("the whitened-space equivalence requires equal weights")
    u = vector_normalize(matrix)
    ideals = IdealPair.extract(u, SpaceTag.NORMALIZED)
    cov = sample_covariance(u, w, ridge=ridge)

    def transform(x: NDArray[np.float64]) -> NDArray[np.float64]:
        return scipy.linalg.solve_triangular(cov.cholesky_f, cov.delta @ x, lower=True)

    ut = transform(u)
    pia = transform(ideals.pia[:, np.newaxis])
    nia = transform(ideals.nia[:, np.newaxis])
    d_plus = np.sqrt(np.sum((ut - pia) ** 2, axis=0))
    d_minus = np.sqrt(np.sum((ut - nia) ** 2, axis=0))
    centered = ut - ut.mean(axis=1, keepdims=True)
    t_cov = centered @ centered.T / ut.shape[1]
    t_ideals = IdealPair(pia.ravel(), nia.ravel(), SpaceTag.NORMALIZED)
    return WhitenedTrace(ut, t_ideals, t_cov, RankingOutcome(closeness(d_plus, d_minus), t_ideals))
