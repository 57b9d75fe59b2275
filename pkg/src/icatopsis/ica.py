"""Blind source separation for the determined case (as many latent as observed criteria).

Two estimators are provided, both operating on PCA-whitened data:

* :func:`fastica` -- deflationary fixed-point iteration on the kurtosis
  contrast with Gram-Schmidt decorrelation between components.
* :func:`jade` -- joint approximate diagonalization of the M(M+1)/2
  fourth-order cumulant matrices of the whitened data by Jacobi rotations.

Both return a :class:`~icatopsis.core.SeparationResult` whose separating
matrix ``B`` maps the *uncentered* observations to the estimates,
``L_hat = B @ V``, so that ``A_hat @ L_hat`` reproduces ``V``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .ambiguity import PermutationMode, adjust
from .core import IcaTopsisError, SeparationResult, ValidationError

RANK_RTOL = 1e-12
JADE_MAX_SWEEPS = 100
# |excess kurtosis| below this is treated as indistinguishable from Gaussian
GAUSSIAN_KURTOSIS_FLOOR = 0.1

Algorithm = Literal["fastica", "jade"]


class RankDeficientError(IcaTopsisError, np.linalg.LinAlgError):
    """The observation covariance is singular; fewer latent than observed criteria."""


class ConvergenceError(IcaTopsisError, RuntimeError):
    """An iterative separation did not converge.

    ``best`` holds the best separating matrix reached (or None).
    """

    def __init__(self, message: str, best: NDArray[np.float64] | None = None, iterations: int = 0):
        super().__init__(message)
        self.best = best
        self.iterations = iterations


class DegenerateKurtosisWarning(RuntimeWarning):
    pass


class NearGaussianWarning(RuntimeWarning):
    """An extracted component has near-zero kurtosis; ICA may be unidentifiable."""


@dataclass(frozen=True)
class IcaConfig:
    algorithm: Algorithm = "jade"
    max_iterations: int = 1000
    tolerance: float = 1e-8
    seed: int = 0
    restarts: int = 5
    permutation_mode: PermutationMode = "greedy"

    def __post_init__(self) -> None:
        algo = {"fastica_kurtosis": "fastica"}.get(self.algorithm, self.algorithm)
        if algo not in ("fastica", "jade"):
            raise ValidationError(f"unknown ICA algorithm {self.algorithm!r}")
        object.__setattr__(self, "algorithm", algo)
        if not self.tolerance > 0:
            raise ValidationError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be at least 1")
        if self.restarts < 1:
            raise ValidationError("restarts must be at least 1")


@dataclass(frozen=True)
class WhiteningTransform:
    mean: NDArray[np.float64]
    W: NDArray[np.float64]
    W_inv: NDArray[np.float64]

    def apply(self, v: ArrayLike) -> NDArray[np.float64]:
        v = np.asarray(v, dtype=np.float64)
        return self.W @ (v - self.mean[:, np.newaxis])


def _observations(v: ArrayLike) -> NDArray[np.float64]:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim == 1:
        v = v[np.newaxis, :]
    if v.ndim != 2:
        raise ValidationError(f"observations must be 2-D, got {v.ndim}-D")
    if not np.all(np.isfinite(v)):
        raise ValidationError("observations contain non-finite entries")
    m, k = v.shape
    if k <= m:
        raise ValidationError(f"need more alternatives than criteria for separation ({k} <= {m})")
    return v


def whiten(v: ArrayLike) -> tuple[NDArray[np.float64], WhiteningTransform]:
    """Center and decorrelate observations to unit variance.

    ``W = diag(d)**-0.5 @ E.T`` from the eigendecomposition ``E diag(d) E.T``
    of the population covariance of ``v``.
    """
    v = _observations(v)
    mean = v.mean(axis=1)
    centered = v - mean[:, np.newaxis]
    cov = centered @ centered.T / v.shape[1]
    d, e = np.linalg.eigh(cov)
    if d[-1] <= 0 or d[0] <= RANK_RTOL * d[-1]:
        raise RankDeficientError(
            f"observation covariance is rank deficient (eigenvalues {d[0]:.3e} .. {d[-1]:.3e}); "
            "the determined-case assumption (as many latent as observed criteria) does not hold"
        )
    w = (e / np.sqrt(d)).T
    w_inv = e * np.sqrt(d)
    return w @ centered, WhiteningTransform(mean, w, w_inv)


def kurtosis(y: ArrayLike) -> float:
    """Excess kurtosis ``E{y^4} - 3 E{y^2}^2`` of the centered sample.

    Returns 0 (with a :class:`DegenerateKurtosisWarning`) for a constant input.
    """
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.size < 4:
        raise ValidationError(f"kurtosis needs at least 4 samples, got {y.size}")
    if not np.all(np.isfinite(y)):
        raise ValidationError("kurtosis input contains non-finite values")
    y = y - y.mean()
    m2 = np.mean(y**2)
    if m2 == 0:
        warnings.warn("kurtosis of a constant sample; returning 0", DegenerateKurtosisWarning, stacklevel=2)
        return 0.0
    return float(np.mean(y**4) - 3.0 * m2**2)


def _gram_schmidt(w: NDArray[np.float64], basis: NDArray[np.float64]) -> NDArray[np.float64]:
    if basis.shape[0]:
        w = w - basis.T @ (basis @ w)
    return w


def _fastica_rotation(
    z: NDArray[np.float64], config: IcaConfig
) -> tuple[NDArray[np.float64], int]:
    m = z.shape[0]
    rng = np.random.default_rng(config.seed)
    units = np.zeros((m, m))
    total = 0
    for p in range(m):
        best_w, best_delta = None, np.inf
        done = False
        for _ in range(config.restarts):
            w = _gram_schmidt(rng.standard_normal(m), units[:p])
            w /= np.linalg.norm(w)
            for _ in range(config.max_iterations):
                total += 1
                y = w @ z
                w_new = (z * y**3).mean(axis=1) - 3.0 * w
                w_new = _gram_schmidt(w_new, units[:p])
                norm = np.linalg.norm(w_new)
                if norm == 0:
                    break
                w_new /= norm
                delta = abs(1.0 - abs(float(w_new @ w)))
                w = w_new
                if delta < best_delta:
                    best_w, best_delta = w, delta
                if delta < config.tolerance:
                    done = True
                    break
            if done:
                break
        if not done:
            if best_w is not None:
                units[p] = best_w
            raise ConvergenceError(
                f"FastICA component {p + 1} did not converge after "
                f"{config.restarts} x {config.max_iterations} iterations "
                f"(best step change {best_delta:.2e})",
                best=units,
                iterations=total,
            )
        units[p] = w
    return units, total


def _cumulant_matrices(z: NDArray[np.float64]) -> NDArray[np.float64]:
    """Stack the M(M+1)/2 fourth-order cumulant slices of white data side by side."""
    m, k = z.shape
    x = z.T
    eye = np.eye(m)
    blocks = []
    for p in range(m):
        xp = x[:, p]
        q_pp = ((xp * xp)[:, np.newaxis] * x).T @ x / k - eye - 2.0 * np.outer(eye[:, p], eye[:, p])
        blocks.append(q_pp)
        for q in range(p):
            xpq = xp * x[:, q]
            q_pq = (xpq[:, np.newaxis] * x).T @ x / k
            q_pq -= np.outer(eye[:, p], eye[q, :]) + np.outer(eye[:, q], eye[p, :])
            blocks.append(np.sqrt(2.0) * q_pq)
    return np.hstack(blocks)


def _jade_rotation(
    z: NDArray[np.float64], config: IcaConfig
) -> tuple[NDArray[np.float64], int]:
    m, k = z.shape
    cm = _cumulant_matrices(z)
    n_mats = cm.shape[1] // m
    rot = np.eye(m)
    threshold = config.tolerance / np.sqrt(k)
    max_sweeps = min(config.max_iterations, JADE_MAX_SWEEPS)
    for sweep in range(1, max_sweeps + 1):
        rotated = False
        for p in range(m - 1):
            for q in range(p + 1, m):
                ip = np.arange(p, m * n_mats, m)
                iq = np.arange(q, m * n_mats, m)
                g = np.vstack([cm[p, ip] - cm[q, iq], cm[p, iq] + cm[q, ip]])
                gg = g @ g.T
                ton = gg[0, 0] - gg[1, 1]
                toff = gg[0, 1] + gg[1, 0]
                theta = 0.5 * np.arctan2(toff, ton + np.sqrt(ton * ton + toff * toff))
                if abs(theta) > threshold:
                    rotated = True
                    c, s = np.cos(theta), np.sin(theta)
                    givens = np.array([[c, -s], [s, c]])
                    pair = [p, q]
                    rot[:, pair] = rot[:, pair] @ givens
                    cm[pair, :] = givens.T @ cm[pair, :]
                    cp, cq = cm[:, ip].copy(), cm[:, iq]
                    cm[:, ip] = c * cp + s * cq
                    cm[:, iq] = -s * cp + c * cq
        if not rotated:
            return rot.T, sweep
    raise ConvergenceError(
        f"JADE did not converge within {max_sweeps} Jacobi sweeps", best=rot.T, iterations=max_sweeps
    )


def _warn_if_gaussian(y: NDArray[np.float64]) -> None:
    for i, row in enumerate(y):
        if abs(kurtosis(row)) < GAUSSIAN_KURTOSIS_FLOOR:
            warnings.warn(
                f"estimated component {i + 1} has near-zero kurtosis; "
                "sources may be Gaussian and the separation unidentifiable",
                NearGaussianWarning,
                stacklevel=3,
            )


def separation_from_unmixing(
    v: ArrayLike,
    b: ArrayLike,
    permutation_mode: PermutationMode = "greedy",
    iterations: int = 0,
) -> SeparationResult:
    """Build a SeparationResult from a given separating matrix (e.g. ``inv(A)``)."""
    v = np.asarray(v, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (v.shape[0], v.shape[0]):
        raise ValidationError(f"separating matrix is {b.shape}, expected square of size {v.shape[0]}")
    try:
        a_hat = np.linalg.inv(b)
    except np.linalg.LinAlgError as exc:
        raise ValidationError(f"separating matrix is singular: {exc}") from exc
    l_hat = b @ v
    a_adj, l_adj, perm, signs = adjust(a_hat, l_hat, permutation_mode)
    return SeparationResult(b, a_hat, l_hat, a_adj, l_adj, perm, signs, iterations)


def _separate(v: ArrayLike, config: IcaConfig, rotation) -> SeparationResult:
    v = _observations(v)
    z, white = whiten(v)
    units, iterations = rotation(z, config)
    _warn_if_gaussian(units @ z)
    return separation_from_unmixing(v, units @ white.W, config.permutation_mode, iterations)


def fastica(v: ArrayLike, config: IcaConfig | None = None) -> SeparationResult:
    """Separate ``v`` with kurtosis-based deflationary FastICA."""
    return _separate(v, config or IcaConfig(algorithm="fastica"), _fastica_rotation)


def jade(v: ArrayLike, config: IcaConfig | None = None) -> SeparationResult:
    """Separate ``v`` with JADE."""
    return _separate(v, config or IcaConfig(algorithm="jade"), _jade_rotation)


def separate(v: ArrayLike, config: IcaConfig | None = None) -> SeparationResult:
    """Dispatch on ``config.algorithm``."""
    config = config or IcaConfig()
    return fastica(v, config) if config.algorithm == "fastica" else jade(v, config)
