"""Ranking and signal metrics used to score a method against the target ranking.

Rankings are passed as *orders*: ``order[0]`` is the index of the best
alternative (``RankingOutcome.order``).
"""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import ValidationError


def _as_order(order: ArrayLike, name: str) -> NDArray[np.int64]:
    arr = np.asarray(order)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        raise ValidationError(f"{name} must contain integer indices")
    arr = arr.astype(np.int64)
    if not np.array_equal(np.sort(arr), np.arange(arr.size)):
        raise ValidationError(f"{name} is not a permutation of 0..{arr.size - 1}")
    return arr


def _paired(a: ArrayLike, b: ArrayLike) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    a = _as_order(a, "first ranking")
    b = _as_order(b, "second ranking")
    if a.size != b.size:
        raise ValidationError(f"rankings have different lengths ({a.size} vs {b.size})")
    return a, b


def _positions(order: NDArray[np.int64]) -> NDArray[np.int64]:
    pos = np.empty_like(order)
    pos[order] = np.arange(order.size)
    return pos


def count_inversions(seq: list[int]) -> int:
    """Number of pairs ``i < j`` with ``seq[i] > seq[j]``, by merge sort."""
    seq = list(seq)
    buf = seq[:]
    inversions = 0
    width = 1
    n = len(seq)
    while width < n:
        for lo in range(0, n - width, 2 * width):
            mid, hi = lo + width, min(lo + 2 * width, n)
            i, j, out = lo, mid, lo
            while i < mid and j < hi:
                if seq[i] <= seq[j]:
                    buf[out] = seq[i]
                    i += 1
                else:
                    buf[out] = seq[j]
                    inversions += mid - i
                    j += 1
                out += 1
            buf[out:hi] = seq[i:mid] if i < mid else seq[j:hi]
            seq[lo:hi] = buf[lo:hi]
        width *= 2
    return inversions


def kendall_tau(rank_a: ArrayLike, rank_b: ArrayLike) -> float:
    """Kendall tau-a between two total orders of the same K alternatives."""
    a, b = _paired(rank_a, rank_b)
    k = a.size
    if k < 2:
        raise ValidationError("Kendall tau needs at least two alternatives")
    # positions in b of the alternatives listed in a's order
    discordant = count_inversions(_positions(b)[a].tolist())
    pairs = k * (k - 1) // 2
    return (pairs - 2 * discordant) / pairs


def kendall_tau_bruteforce(rank_a: ArrayLike, rank_b: ArrayLike) -> float:
    """O(K^2) pair enumeration; reference for :func:`kendall_tau`."""
    a, b = _paired(rank_a, rank_b)
    pa, pb = _positions(a), _positions(b)
    k = a.size
    conc = disc = 0
    for i in range(k):
        for j in range(i + 1, k):
            s = (pa[i] - pa[j]) * (pb[i] - pb[j])
            if s > 0:
                conc += 1
            elif s < 0:
                disc += 1
    return (conc - disc) / (k * (k - 1) / 2)


def pearson_closeness(r_est: ArrayLike, r_target: ArrayLike) -> float:
    """Product-moment correlation between two closeness vectors."""
    x = np.asarray(r_est, dtype=np.float64).ravel()
    y = np.asarray(r_target, dtype=np.float64).ravel()
    if x.size != y.size:
        raise ValidationError(f"closeness vectors differ in length ({x.size} vs {y.size})")
    if x.size < 2:
        raise ValidationError("correlation needs at least two alternatives")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0 or sy == 0:
        raise ValidationError("correlation undefined for a constant closeness vector")
    return float(dx @ dy) / (sx * sy)


def top_segment_mae(order_est: ArrayLike, order_target: ArrayLike, fraction: float = 0.2) -> float:
    """Mean absolute position error over the top ``fraction`` of the target ranking.

    For target positions ``k = 1..floor(fraction * K)``, compares ``k`` with
    the 1-based position ``o_k`` that the same alternative holds in the
    estimated ranking.
    """
    est, target = _paired(order_est, order_target)
    if not 0 < fraction <= 1:
        raise ValidationError(f"fraction must lie in (0, 1], got {fraction}")
    size = math.floor(fraction * target.size + 1e-9)
    if size < 1:
        raise ValidationError(f"top segment is empty for K={target.size}, fraction={fraction}")
    o = _positions(est)[target[:size]] + 1
    return float(np.mean(np.abs(o - np.arange(1, size + 1))))


def measure_snr(signal: ArrayLike, noise: ArrayLike) -> float | None:
    """SNR in dB from mean squared entries; None when the noise is identically zero."""
    signal = np.asarray(signal, dtype=np.float64)
    noise = np.asarray(noise, dtype=np.float64)
    p_noise = float(np.mean(noise**2))
    if p_noise == 0:
        return None
    return 10.0 * math.log10(float(np.mean(signal**2)) / p_noise)
