"""Model parameters, the (q+1)-spin interaction matrix B, and exact
partition functions of small graphs by exhaustive enumeration.

Spin 0 is the mixed state, spins 1..q are the pure colours.
"""
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidParams, NotRegular, TooLarge
from .numerics import DEFAULT_CONTEXT, PrecisionContext

DEFAULT_BUDGET = 10**8
CHUNK = 1 << 18
T_REGIME_BOUND = 1.0312


@dataclass(frozen=True)
class ModelParams:
    q: int
    k: int
    Delta: int
    ctx: PrecisionContext = field(default=DEFAULT_CONTEXT, compare=False)

    @property
    def K(self):
        return 2 * self.k

    @property
    def d(self):
        return self.Delta - 1

    @property
    def T(self):
        """t**Delta = q**k - q, an exact integer."""
        return self.q**self.k - self.q

    @cached_property
    def t(self):
        mp = self.ctx.mp
        return mp.exp(mp.log(self.T) / self.Delta)

    @property
    def t_float(self):
        return math.exp(math.log(self.T) / self.Delta)

    @property
    def in_proven_regime(self):
        return self.q % 2 == 0 and self.q >= 4 and self.k >= 2 and self.d >= 5 * self.q**self.k

    def as_dict(self):
        return {"q": self.q, "k": self.k, "K": self.K, "Delta": self.Delta, "d": self.d}


def build_params(q, k, Delta, ctx=None):
    """Validate (q, k, Delta) and bundle them with a precision context.

    Delta = 2 is accepted so that cycles can serve as oracle instances.
    """
    for name, v in (("q", q), ("k", k), ("Delta", Delta)):
        if int(v) != v:
            raise InvalidParams(f"{name} must be an integer, got {v!r}")
    q, k, Delta = int(q), int(k), int(Delta)
    if q < 2:
        raise InvalidParams("q must be >= 2")
    if k < 1 or q**k - q < 2:
        raise InvalidParams(f"need q**k > q, got q={q}, k={k}")
    if Delta < 2:
        raise InvalidParams("Delta must be >= 2")
    return ModelParams(q, k, Delta, DEFAULT_CONTEXT if ctx is None else ctx)


def params_from_d(q, k, d, ctx=None):
    return build_params(q, k, d + 1, ctx)


@dataclass(frozen=True)
class InteractionMatrix:
    q: int
    t: object  # mpf

    def as_mp(self, mp):
        q, t = self.q, mp.mpf(self.t)
        B = mp.matrix(q + 1, q + 1)
        B[0, 0] = t * t
        for j in range(1, q + 1):
            B[0, j] = B[j, 0] = t
            for i in range(1, q + 1):
                B[i, j] = 0 if i == j else 1
        return B

    @property
    def entries(self):
        q, t = self.q, float(self.t)
        B = np.ones((q + 1, q + 1))
        np.fill_diagonal(B, 0.0)
        B[0, :] = t
        B[:, 0] = t
        B[0, 0] = t * t
        return B


def build_interaction_matrix(params):
    return InteractionMatrix(params.q, params.t)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple

    def __post_init__(self):
        edges = []
        for e in self.edges:
            u, v = (int(x) for x in e)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidParams(f"edge {e} out of range for n={self.n}")
            if u == v:
                raise InvalidParams(f"self-loop at {u}")
            edges.append((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def m(self):
        return len(self.edges)

    def degrees(self):
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def regular_degree(self):
        """Common degree if regular, else None."""
        deg = set(self.degrees())
        return deg.pop() if len(deg) == 1 else None


def cycle_graph(m):
    return Graph(m, tuple((i, (i + 1) % m) for i in range(m)))


def path_graph(n):
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def complete_graph(n):
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def cube_graph(dim=3):
    n = 1 << dim
    return Graph(n, tuple((v, v ^ (1 << b)) for v in range(n) for b in range(dim) if v < v ^ (1 << b)))


def disjoint_union(G1, G2):
    shifted = tuple((u + G1.n, v + G1.n) for u, v in G2.edges)
    return Graph(G1.n + G2.n, G1.edges + shifted)


def iter_assignments(base, n, budget=DEFAULT_BUDGET, chunk=CHUNK):
    """Yield all base**n assignments as int8 arrays of shape (rows, n), in
    lexicographic order with vertex 0 as the most significant digit."""
    total = base**n
    if total > budget:
        raise TooLarge(f"{base}^{n} = {total} states exceeds budget {budget}")
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        out = np.empty((idx.size, n), dtype=np.int8)
        for col in range(n - 1, -1, -1):
            idx, out[:, col] = np.divmod(idx, base)
        yield out


def weight(sigma, G, B):
    """Product over edges of B[sigma(u), sigma(v)] as a float."""
    Bf = B.entries
    w = 1.0
    for u, v in G.edges:
        w *= Bf[sigma[u], sigma[v]]
    return w


def weight_exact(sigma, G, params):
    """Exact weight on a Delta-regular graph: 0 on a pure-colour conflict,
    else (q**k - q)**n0."""
    if G.m and G.regular_degree() != params.Delta:
        raise NotRegular("exact weights need a Delta-regular graph")
    for u, v in G.edges:
        if sigma[u] == sigma[v] != 0:
            return 0
    return params.T ** sum(1 for s in sigma if s == 0)


def _conflict_free(block, G):
    ok = np.ones(block.shape[0], dtype=bool)
    for u, v in G.edges:
        a, b = block[:, u], block[:, v]
        ok &= ~((a == b) & (a != 0))
    return ok


def partition_function_ZB(G, params, mode="float", budget=DEFAULT_BUDGET):
    """Z_B(G) by enumeration of all (q+1)**n assignments.

    mode='exact' returns a Python int and needs G to be Delta-regular, where
    every nonzero weight equals (q**k - q)**n0.
    """
    q = params.q
    if mode == "exact":
        if G.m and G.regular_degree() != params.Delta:
            raise NotRegular(f"exact mode needs a {params.Delta}-regular graph")
        counts = np.zeros(G.n + 1, dtype=np.int64)
        for block in iter_assignments(q + 1, G.n, budget):
            ok = _conflict_free(block, G)
            n0 = (block[ok] == 0).sum(axis=1)
            counts += np.bincount(n0, minlength=G.n + 1)
        return sum(int(c) * params.T**i for i, c in enumerate(counts))
    if mode != "float":
        raise InvalidParams(f"unknown mode {mode!r}")
    Bf = build_interaction_matrix(params).entries
    parts = []
    for block in iter_assignments(q + 1, G.n, budget):
        w = np.ones(block.shape[0])
        for u, v in G.edges:
            w *= Bf[block[:, u], block[:, v]]
        parts.append(math.fsum(w))
    return math.fsum(parts)


def mono_count(G, sigma):
    return sum(1 for u, v in G.edges if sigma[u] == sigma[v])


def potts_partition(G, q, B_scalar, mode="float", budget=DEFAULT_BUDGET):
    """Sum over sigma in [q]^V of B_scalar**Mono(G, sigma).

    mode='exact' accepts an int or Fraction B_scalar and sums exactly.
    """
    hist = np.zeros(G.m + 1, dtype=np.int64)
    for block in iter_assignments(q, G.n, budget):
        mono = np.zeros(block.shape[0], dtype=np.int64)
        for u, v in G.edges:
            mono += block[:, u] == block[:, v]
        hist += np.bincount(mono, minlength=G.m + 1)
    if mode == "exact":
        return sum(int(c) * B_scalar**i for i, c in enumerate(hist))
    return math.fsum(float(c) * float(B_scalar) ** i for i, c in enumerate(hist))


def trace_power(B, m):
    """trace(B^m) in float; equals Z_B of the m-cycle."""
    return float(np.trace(np.linalg.matrix_power(B.entries, m)))
