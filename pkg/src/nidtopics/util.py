"""Small shared helpers: deterministic parallel maps and column matching."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Sequence, TypeVar

import numpy as np
from scipy.optimize import linear_sum_assignment

T = TypeVar("T")
R = TypeVar("R")


def run_chunked(fn: Callable[[T], R], items: Sequence[T], threads: int = 1) -> List[R]:
    """Map ``fn`` over ``items`` with results in input order.

    With threads > 1 a thread pool is used; the reduction order is still the
    input order, so results do not depend on scheduling.
    """
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def match_columns(estimate: np.ndarray, truth: np.ndarray):
    """Best column assignment between two (d, k) matrices under l1 distance.

    Returns (perm, errors) where estimate[:, perm[j]] is matched to
    truth[:, j] and errors[j] is the l1 distance of that pair.
    """
    est = np.asarray(estimate, dtype=float)
    tru = np.asarray(truth, dtype=float)
    if est.shape != tru.shape:
        raise ValueError(f"shape mismatch {est.shape} vs {tru.shape}")
    k = est.shape[1]
    cost = np.zeros((k, k))
    for j in range(k):
        cost[j] = np.abs(est - tru[:, j][:, None]).sum(axis=0)
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(k, dtype=int)
    perm[rows] = cols
    errors = cost[rows, cols]
    return perm, errors
