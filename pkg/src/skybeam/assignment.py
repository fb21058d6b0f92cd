"""Bijective matching of measured to predicted physical identities.

Cost entries are reciprocal similarities; the objective balances the mean
assigned cost (f1) against the dispersion of assigned costs (f2).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ConfigError, ConstraintViolationError
from .identity import FeatureSet, similarity_matrix

K_EXACT_DEFAULT = 8


@dataclass
class Assignment:
    """Permutation mapping measured index i to predicted index perm[i]."""

    perm: np.ndarray
    f1: float
    f2: float

    @property
    def total(self) -> float:
        return self.f1 + self.f2


def objective(perm, d: np.ndarray):
    """(f1, f2) of a permutation on cost matrix d.

    f1 is the mean assigned cost; f2 = (1/K) * sqrt(sum over assigned pairs
    of (cost - f1)^2).
    """
    perm = np.asarray(perm, dtype=int)
    k = d.shape[0]
    if perm.shape != (k,) or set(perm.tolist()) != set(range(k)):
        raise ConstraintViolationError(f"not a bijection on {k} items: {perm}")
    costs = d[np.arange(k), perm]
    f1 = float(np.mean(costs))
    f2 = float(np.sqrt(np.sum((costs - f1) ** 2)) / k)
    return f1, f2


def _make_assignment(perm, d) -> Assignment:
    f1, f2 = objective(perm, d)
    return Assignment(np.asarray(perm, dtype=int), f1, f2)


def solve_exact(d: np.ndarray, k_exact: int = K_EXACT_DEFAULT) -> Assignment:
    """Global minimizer of f1 + f2 by exhaustive search over permutations.

    Ties break to the lexicographically smallest permutation. Refuses
    instances larger than `k_exact`.
    """
    k = d.shape[0]
    if k > k_exact:
        raise ConfigError(f"exhaustive search limited to K <= {k_exact}, got {k}")
    best = None
    best_val = np.inf
    for perm in permutations(range(k)):   # lexicographic order
        costs = d[np.arange(k), perm]
        f1 = costs.mean()
        val = f1 + np.sqrt(np.sum((costs - f1) ** 2)) / k
        if val < best_val - 0.0:
            best_val = val
            best = perm
    return _make_assignment(best, d)


def solve_local_search(
    d: np.ndarray,
    rng: np.random.Generator | None = None,
    iters: int = 1000,
    restarts: int = 20,
) -> Assignment:
    """2-swap hill climbing on f1 + f2, seeded with the f1-optimal assignment.

    The first descent starts from a classic linear-assignment solve; each
    iteration applies the best improving swap until none exists or the
    budget runs out. Additional descents from random permutations escape
    the seed's basin; the best local optimum wins. Never returns an
    objective above the seed's, and with iters=0 returns the seed
    unchanged.
    """
    k = d.shape[0]
    rows, cols = linear_sum_assignment(d)
    seed = np.empty(k, dtype=int)
    seed[rows] = cols

    idx = np.arange(k)
    triu = np.triu(np.ones((k, k), dtype=bool), 1)

    def descend(perm):
        perm = perm.copy()
        costs = d[idx, perm]
        total = costs.sum()
        sumsq = float(costs @ costs)
        current = total / k + np.sqrt(max(sumsq - total**2 / k, 0.0)) / k
        for _ in range(iters):
            # objective after swapping rows i and j, for every pair at once:
            # only costs i and j change, so track the sum and sum of squares
            a = d[:, perm]                      # a[i, j] = cost of pair (i, perm[j])
            swapped_sum = total - costs[:, None] - costs[None, :] + a + a.T
            swapped_ssq = sumsq - costs[:, None] ** 2 - costs[None, :] ** 2 \
                + a**2 + (a**2).T
            var = np.maximum(swapped_ssq - swapped_sum**2 / k, 0.0)
            vals = swapped_sum / k + np.sqrt(var) / k
            vals[~triu] = np.inf
            i, j = np.unravel_index(np.argmin(vals), vals.shape)
            if vals[i, j] >= current - 1e-15:
                break
            perm[i], perm[j] = perm[j], perm[i]
            costs[i], costs[j] = d[i, perm[i]], d[j, perm[j]]
            total = costs.sum()
            sumsq = float(costs @ costs)
            current = total / k + np.sqrt(max(sumsq - total**2 / k, 0.0)) / k
        return perm, current

    best_perm, best_val = descend(seed)
    if iters > 0 and restarts > 0:
        rng = np.random.default_rng() if rng is None else rng
        for _ in range(restarts):
            perm, val = descend(rng.permutation(k))
            if val < best_val - 1e-15:
                best_perm, best_val = perm, val
    return _make_assignment(best_perm, d)


def solve(d: np.ndarray, rng=None, k_exact: int = K_EXACT_DEFAULT) -> Assignment:
    """Exact search for small instances, local search otherwise."""
    if d.shape[0] <= k_exact:
        return solve_exact(d, k_exact)
    return solve_local_search(d, rng)


def baseline_assignment(
    measured: FeatureSet,
    predicted: FeatureSet,
    mode: str,
    rng=None,
    k_exact: int = K_EXACT_DEFAULT,
) -> Assignment:
    """Single-feature baselines: location-only or velocity-only matching.

    Feature 0 is position, feature 1 velocity; the chosen one gets weight 1
    and the same solver stack runs on its reciprocal similarity.
    """
    try:
        weights = {"location": np.array([1.0, 0.0]),
                   "velocity": np.array([0.0, 1.0])}[mode]
    except KeyError:
        raise ConfigError(f"unknown baseline mode {mode!r}") from None
    sim = similarity_matrix(measured, predicted, weights=weights)
    return solve(1.0 / sim.s, rng, k_exact)
