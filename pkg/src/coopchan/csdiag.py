"""Restricted-isometry diagnostics for the equivalent training matrix.

The order-K restricted isometry constant delta_K of a column-normalized
matrix is the largest relative energy distortion over all column subsets of
size at most K. Exact computation enumerates every subset, which is only
feasible at small sizes; above the budget we fall back to uniform subset
sampling, which lower-bounds the true constant.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["RicReport", "ric_estimate"]


@dataclass(frozen=True)
class RicReport:
    """Estimated restricted isometry constant and how it was obtained."""

    order: int
    delta: float
    exhaustive: bool
    subsets_checked: int
    column_scaling: np.ndarray  # norms the columns were divided by


def _subset_delta(u: np.ndarray, cols) -> float:
    s = np.linalg.svd(u[:, list(cols)], compute_uv=False)
    return max(s[0] ** 2 - 1.0, 1.0 - s[-1] ** 2)


def ric_estimate(
    u: np.ndarray,
    order: int,
    budget: int = 200_000,
    rng: np.random.Generator | None = None,
) -> RicReport:
    """Estimate delta_K of ``u`` after normalizing its columns to unit norm.

    Enumerates all subsets of size 1..order when their count fits in
    ``budget``; otherwise samples ``budget`` size-``order`` subsets uniformly
    (the maximum over subsets is attained at full size, so sampling smaller
    subsets would be wasted work). Sampled estimates are lower bounds.
    """
    u = np.asarray(u, dtype=np.complex128)
    n_cols = u.shape[1]
    if not 1 <= order <= n_cols:
        raise ValueError(f"order must be in [1, {n_cols}], got {order}")
    norms = np.linalg.norm(u, axis=0)
    if np.any(norms == 0):
        raise ValueError("matrix has a zero column; delta_K is undefined")
    u = u / norms

    total = sum(math.comb(n_cols, k) for k in range(1, order + 1))
    delta = 0.0
    if total <= budget:
        checked = 0
        for k in range(1, order + 1):
            for cols in itertools.combinations(range(n_cols), k):
                delta = max(delta, _subset_delta(u, cols))
                checked += 1
        return RicReport(order, delta, True, checked, norms)

    rng = np.random.default_rng() if rng is None else rng
    for _ in range(budget):
        cols = rng.choice(n_cols, size=order, replace=False)
        delta = max(delta, _subset_delta(u, cols))
    return RicReport(order, delta, False, budget, norms)
