"""Synthetic decision problems: uniform latents, linear mixing, white Gaussian noise."""

from __future__ import annotations

import logging
import math
import warnings

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import MixingInstance, ValidationError

log = logging.getLogger(__name__)

OFFDIAG_LIMIT = 0.75
MAX_CONDITION = 1e6
MAX_RESAMPLES = 100


def _rng(seed: int | None, stream: int) -> np.random.Generator:
    # latents, mixing and noise draw from independent streams of one seed
    return np.random.default_rng(None if seed is None else [int(seed), stream])


def generate_latents(n: int, k: int, seed: int | None = None) -> NDArray[np.float64]:
    """N x K i.i.d. uniform[0, 1] latent evaluations."""
    if n < 1 or k < 2:
        raise ValidationError(f"need N >= 1 and K >= 2, got N={n}, K={k}")
    return _rng(seed, 0).uniform(0.0, 1.0, size=(n, k))


def make_mixing_2x2(alpha: float, beta: float) -> NDArray[np.float64]:
    """``[[1, alpha], [beta, 1]]``."""
    if abs(alpha) > OFFDIAG_LIMIT or abs(beta) > OFFDIAG_LIMIT:
        warnings.warn(
            f"off-diagonal entries ({alpha}, {beta}) exceed {OFFDIAG_LIMIT}",
            RuntimeWarning,
            stacklevel=2,
        )
    return np.array([[1.0, alpha], [beta, 1.0]])


def make_mixing_random(
    m: int,
    offdiag_range: tuple[float, float] = (-OFFDIAG_LIMIT, OFFDIAG_LIMIT),
    seed: int | None = None,
) -> NDArray[np.float64]:
    """Unit diagonal with i.i.d. uniform off-diagonal entries.

    Draws whose condition number exceeds 1e6 are resampled, at most 100 times.
    """
    lo, hi = offdiag_range
    if not lo <= hi:
        raise ValidationError(f"empty off-diagonal range [{lo}, {hi}]")
    if max(abs(lo), abs(hi)) >= 1:
        raise ValidationError("off-diagonal magnitudes must stay below the unit diagonal")
    rng = _rng(seed, 1)
    for attempt in range(MAX_RESAMPLES):
        a = rng.uniform(lo, hi, size=(m, m))
        np.fill_diagonal(a, 1.0)
        cond = np.linalg.cond(a)
        if cond <= MAX_CONDITION:
            log.debug("mixing matrix accepted after %d draw(s), cond=%.3g", attempt + 1, cond)
            return a
        log.debug("rejected mixing draw with cond=%.3g", cond)
    raise ValidationError(f"no mixing matrix with condition <= {MAX_CONDITION:g} in {MAX_RESAMPLES} draws")


def add_noise_at_snr(
    signal: ArrayLike, snr_db: float | None, seed: int | None = None
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Add white Gaussian noise at an exact realized SNR.

    The noise draw is rescaled so that ``10 log10(P_signal / P_noise)`` equals
    ``snr_db`` for this particular draw, powers being mean squared entries.
    ``snr_db`` of None or +inf gives zero noise.
    """
    signal = np.asarray(signal, dtype=np.float64)
    if snr_db is None or (math.isinf(snr_db) and snr_db > 0):
        noise = np.zeros_like(signal)
        return signal + noise, noise
    p_signal = np.mean(signal**2)
    if p_signal == 0:
        raise ValidationError("signal is identically zero; SNR undefined")
    g = _rng(seed, 2).standard_normal(signal.shape)
    noise = g * np.sqrt(p_signal / (np.mean(g**2) * 10.0 ** (snr_db / 10.0)))
    # snap to the float difference so that (signal + noise) - signal == noise exactly
    for _ in range(4):
        snapped = (signal + noise) - signal
        if np.array_equal(snapped, noise):
            break
        noise = snapped
    return signal + noise, noise


def generate_instance(
    mixing: ArrayLike,
    k: int,
    snr_db: float | None = None,
    seed: int | None = None,
) -> MixingInstance:
    """Draw latents, mix them with ``mixing`` and add noise; reproducible from ``seed``."""
    mixing = np.asarray(mixing, dtype=np.float64)
    latents = generate_latents(mixing.shape[1], k, seed)
    _, noise = add_noise_at_snr(mixing @ latents, snr_db, seed)
    return MixingInstance(latents, mixing, noise, snr_db=snr_db, seed=seed)


def generate_random_instance(
    m: int,
    k: int,
    snr_db: float | None = None,
    seed: int | None = None,
    offdiag_range: tuple[float, float] = (-OFFDIAG_LIMIT, OFFDIAG_LIMIT),
) -> MixingInstance:
    """As :func:`generate_instance` with a random diagonally dominant mixing matrix."""
    return generate_instance(make_mixing_random(m, offdiag_range, seed), k, snr_db, seed)
