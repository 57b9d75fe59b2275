"""Permutation and sign fixing for separated latent criteria.

Both steps rely on the estimated mixing matrix being diagonally dominant
with a positive diagonal: every observed criterion is driven mostly, and
positively, by "its own" latent criterion.  Only swaps and negations are
applied, so ``A_adj @ L_adj`` reproduces ``A_hat @ L_hat``.  Positive
rescaling is left alone; vector normalization inside TOPSIS cancels it.
"""

from __future__ import annotations

from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import linear_sum_assignment

from .core import IcaTopsisError, ValidationError

PermutationMode = Literal["greedy", "optimal", "literal"]


class AmbiguityError(IcaTopsisError, ArithmeticError):
    """The sign of an estimated latent criterion cannot be decided."""


def _check(a_hat: NDArray[np.float64], l_hat: NDArray[np.float64]) -> None:
    if a_hat.ndim != 2 or a_hat.shape[0] != a_hat.shape[1]:
        raise ValidationError(f"estimated mixing matrix must be square, got {a_hat.shape}")
    if l_hat.ndim != 2 or l_hat.shape[0] != a_hat.shape[1]:
        raise ValidationError(
            f"estimates have {l_hat.shape[0]} rows for a {a_hat.shape} mixing matrix"
        )


def adjust_permutation(
    a_hat: ArrayLike, l_hat: ArrayLike, mode: PermutationMode = "greedy"
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.int64]]:
    """Move the dominant column of each row of ``a_hat`` onto the diagonal.

    Parameters
    ----------
    a_hat : array_like, shape (M, M)
        Estimated mixing matrix.
    l_hat : array_like, shape (M, K)
        Estimated latent criteria, one per row.
    mode : {"greedy", "optimal", "literal"}
        ``greedy`` walks the rows in order; row ``m`` picks the largest
        absolute entry among the columns not yet claimed by earlier rows and
        swaps it into column ``m``.  ``optimal`` maximizes the sum of the
        absolute diagonal over all permutations.  ``literal`` lets every row
        search all columns, so a later row may swap back a column an earlier
        row had placed.

    Returns
    -------
    a_adj, l_adj, permutation
        ``a_adj = a_hat[:, permutation]`` and ``l_adj = l_hat[permutation]``.
    """
    a_hat = np.array(a_hat, dtype=np.float64)
    l_hat = np.array(l_hat, dtype=np.float64)
    _check(a_hat, l_hat)
    m = a_hat.shape[0]

    if mode == "optimal":
        _, perm = linear_sum_assignment(np.abs(a_hat), maximize=True)
        perm = perm.astype(np.int64)
    elif mode in ("greedy", "literal"):
        perm = np.arange(m, dtype=np.int64)
        work = a_hat.copy()
        for row in range(m):
            first = row if mode == "greedy" else 0
            q = first + int(np.argmax(np.abs(work[row, first:])))
            if q != row:
                work[:, [row, q]] = work[:, [q, row]]
                perm[[row, q]] = perm[[q, row]]
    else:
        raise ValidationError(f"unknown permutation mode {mode!r}")

    return a_hat[:, perm], l_hat[perm], perm


def adjust_signs(
    a_adj_p: ArrayLike, l_adj_p: ArrayLike
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Negate every column with a negative diagonal entry, and its estimate row.

    Raises :class:`AmbiguityError` when a diagonal entry is exactly zero.
    """
    a = np.array(a_adj_p, dtype=np.float64)
    l = np.array(l_adj_p, dtype=np.float64)
    _check(a, l)
    diag = np.diag(a)
    zero = np.flatnonzero(diag == 0)
    if zero.size:
        raise AmbiguityError(
            f"diagonal entry {int(zero[0]) + 1} of the estimated mixing matrix is zero; sign undefined"
        )
    signs = np.where(diag < 0, -1.0, 1.0)
    flip = signs < 0
    a[:, flip] = -a[:, flip]
    l[flip] = -l[flip]
    return a, l, signs


def adjust(
    a_hat: ArrayLike, l_hat: ArrayLike, mode: PermutationMode = "greedy"
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.int64], NDArray[np.float64]]:
    """Permutation then sign adjustment; returns ``(a_adj, l_adj, permutation, signs)``."""
    a_p, l_p, perm = adjust_permutation(a_hat, l_hat, mode)
    a_c, l_c, signs = adjust_signs(a_p, l_p)
    return a_c, l_c, perm, signs
