"""First-moment functionals over the phase set S_q and the resulting
non-colourability threshold for random Delta-regular K-uniform hypergraphs."""
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import comb, log, log1p

import numpy as np

from .errors import DomainError, TooLarge

MAX_TUPLES = 10**6


def entropy(v):
    v = np.asarray(v, dtype=float)
    v = v[v > 0]
    return float(-(v * np.log(v)).sum())


@lru_cache(maxsize=32)
def colour_tuples(q, K):
    """Ordered colour tuples and their occurrence counts t[ib, i]."""
    if q**K > MAX_TUPLES:
        raise TooLarge(f"q^K = {q**K} tuples exceeds {MAX_TUPLES}")
    tup = np.array(list(product(range(q), repeat=K)), dtype=np.int64).reshape(-1, K)
    counts = np.stack([(tup == i).sum(axis=1) for i in range(q)], axis=1)
    mono = counts.max(axis=1) == K
    return tup, counts, mono


@dataclass
class PhasePair:
    alpha: np.ndarray
    beta: np.ndarray
    K: int

    def violations(self):
        """Largest violation of each S_q constraint."""
        q = len(self.alpha)
        _, counts, mono = colour_tuples(q, self.K)
        marg = counts.T @ self.beta
        return {
            "alpha_sum": abs(self.alpha.sum() - 1),
            "marginals": float(np.abs(marg - self.K * self.alpha).max()),
            "monochromatic": float(np.abs(self.beta[mono]).max(initial=0.0)),
            "negative": float(max(0.0, -self.alpha.min(), -self.beta.min())),
        }

    def in_Sq(self, tol=1e-12):
        return all(v <= tol for v in self.violations().values())


def norm_K_pow(alpha, K):
    return float((np.asarray(alpha, dtype=float) ** K).sum())


def beta_star(alpha, K):
    """beta*_ib proportional to prod alpha_i^t_{i,ib} off the monochromatic tuples."""
    alpha = np.asarray(alpha, dtype=float)
    nk = norm_K_pow(alpha, K)
    if nk >= 1:
        raise DomainError("|alpha|_K^K = 1: point mass has no non-monochromatic tuple")
    tup, _, mono = colour_tuples(len(alpha), K)
    w = alpha[tup].prod(axis=1)
    w[mono] = 0.0
    return w / (1 - nk)


def G_value(pp):
    """h(beta) + sum_i ln(alpha_i) sum_ib t_{i,ib} beta_ib."""
    _, counts, _ = colour_tuples(len(pp.alpha), pp.K)
    live = pp.beta > 0
    with np.errstate(divide="ignore"):
        la = np.log(pp.alpha)
    cross = counts[live] @ la
    return entropy(pp.beta) + float(pp.beta[live] @ cross)


def F_value(pp, Delta):
    return -(Delta - 1) * entropy(pp.alpha) + Delta / pp.K * entropy(pp.beta)


def F_reduced(alpha, K, Delta):
    """h(alpha) + (Delta/K) ln(1 - |alpha|_K^K); vectorized over rows."""
    a = np.atleast_2d(np.asarray(alpha, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(a > 0, a * np.log(np.where(a > 0, a, 1)), 0).sum(axis=1)
        g = np.log1p(-(a**K).sum(axis=1))
    out = h + Delta / K * g
    return out if np.ndim(alpha) > 1 else float(out[0])


def F_upper_bound(q, K, Delta):
    """ln(q (1 - q^(1-K))^(Delta/K))."""
    return log(q) + Delta / K * log1p(-(q ** (1 - K)))


def is_uncolourable_regime(q, K, Delta):
    return F_upper_bound(q, K, Delta) < 0


def exact_threshold(q, K):
    """Delta where the bound changes sign."""
    return K * log(q) / -log1p(-(q ** (1 - K)))


def sufficient_threshold(q, K):
    """K q^(K-1) ln q, the simpler bound from ln(1-x) <= -x."""
    return K * q ** (K - 1) * log(q)


def simplex_grid(q, g):
    """All alpha in the simplex with coordinates in {0, 1/g, ..., 1}."""
    n = comb(g + q - 1, q - 1)
    if n > 5 * 10**6:
        raise TooLarge(f"{n} grid points")
    pts = [c for c in product(range(g + 1), repeat=q - 1) if sum(c) <= g]
    a = np.array(pts, dtype=float).reshape(-1, q - 1)
    return np.hstack([a, g - a.sum(axis=1, keepdims=True)]) / g


def maximize_F_grid(q, K, Delta, grid_resolution=60, rounds=3, span=10):
    """Grid maximum of F_reduced, then `rounds` local refinements 10x finer."""
    colour_tuples(q, K)  # size check
    grid = simplex_grid(q, grid_resolution)
    vals = F_reduced(grid, K, Delta)
    i = int(np.nanargmax(vals))
    best_a, best_v = grid[i], vals[i]
    step = 1.0 / grid_resolution
    for _ in range(rounds):
        step /= 10
        offs = np.array(list(product(range(-span, span + 1), repeat=q - 1)), dtype=float) * step
        free = best_a[:-1] + offs
        cand = np.hstack([free, 1 - free.sum(axis=1, keepdims=True)])
        cand = cand[(cand >= 0).all(axis=1)]
        v = F_reduced(cand, K, Delta)
        j = int(np.nanargmax(v))
        if v[j] > best_v:
            best_a, best_v = cand[j], v[j]
    return float(best_v), best_a


def landscape_rows(q, K, Delta, grid_resolution=40):
    """(alpha_1..alpha_q, F) rows for plotting; point masses are skipped."""
    grid = simplex_grid(q, grid_resolution)
    vals = F_reduced(grid, K, Delta)
    keep = np.isfinite(vals)
    return [tuple(a) + (float(v),) for a, v in zip(grid[keep], vals[keep])]
