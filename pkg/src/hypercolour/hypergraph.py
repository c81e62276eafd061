"""Hypergraphs, exact colouring counts, the halving fibre map and the
configuration-model sampler.

Hypergraph colourings use colours 0..q-1. Under the fibre map a block of
clones all coloured c becomes the pure spin c+1; anything else becomes 0.
"""
from collections import Counter
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import Indivisible, InvalidParams, NotProper, TooLarge
from .spin import DEFAULT_BUDGET, iter_assignments

RNG_NAME = "numpy.random.PCG64"
RNG_VERSION = 1


@dataclass(frozen=True)
class Hypergraph:
    """Edges are sorted vertex tuples. A sampled edge may repeat a vertex;
    such an edge is kept, and the instance is then not simple."""

    n: int
    edges: tuple

    def __post_init__(self):
        edges = []
        for e in self.edges:
            e = tuple(sorted(int(v) for v in e))
            if not e:
                raise InvalidParams("empty hyperedge")
            if e[0] < 0 or e[-1] >= self.n:
                raise InvalidParams(f"hyperedge {e} out of range for n={self.n}")
            edges.append(e)
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def m(self):
        return len(self.edges)

    @property
    def arity(self):
        """Common edge size, or None if sizes differ."""
        sizes = {len(e) for e in self.edges}
        return sizes.pop() if len(sizes) == 1 else None

    def degrees(self):
        """Point degrees: a vertex repeated inside an edge counts twice."""
        deg = [0] * self.n
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg

    def max_degree(self):
        return max(self.degrees(), default=0)

    def has_repeated_vertex(self):
        return any(len(set(e)) < len(e) for e in self.edges)

    def remove_edge(self, i):
        return Hypergraph(self.n, self.edges[:i] + self.edges[i + 1:])

    def add_edges(self, edges, extra_vertices=0):
        return Hypergraph(self.n + extra_vertices, self.edges + tuple(edges))


def fano_plane():
    lines = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]
    return Hypergraph(7, tuple(lines))


def single_edge(K):
    return Hypergraph(K, (tuple(range(K)),))


def is_simple(H):
    if H.has_repeated_vertex():
        return False
    sets = [set(e) for e in H.edges]
    return all(len(a & b) <= 1 for a, b in combinations(sets, 2))


def _proper_mask(block, edges):
    ok = np.ones(block.shape[0], dtype=bool)
    for e in edges:
        cols = block[:, list(e)]
        ok &= (cols != cols[:, :1]).any(axis=1)
    return ok


def count_colourings(H, q, budget=DEFAULT_BUDGET):
    """Exact number of q-colourings with no monochromatic hyperedge, by
    enumeration of all q**n colourings."""
    if q**H.n > budget:
        raise TooLarge(f"{q}^{H.n} colourings exceeds budget {budget}")
    total = 0
    for block in iter_assignments(q, H.n, budget):
        total += int(_proper_mask(block, H.edges).sum())
    return total


def proper_colourings(H, q, budget=DEFAULT_BUDGET):
    """All proper colourings as one int8 array (rows in lexicographic order)."""
    if q**H.n > budget:
        raise TooLarge(f"{q}^{H.n} colourings exceeds budget {budget}")
    parts = [b[_proper_mask(b, H.edges)] for b in iter_assignments(q, H.n, budget)]
    return np.concatenate(parts) if parts else np.empty((0, H.n), dtype=np.int8)


def _edge_factor(e, q):
    scope = tuple(sorted(set(e)))
    table = np.ones((q,) * len(scope), dtype=object)
    for c in range(q):
        table[(c,) * len(scope)] = 0
    return scope, table


def _multiply(f1, f2, q):
    (s1, t1), (s2, t2) = f1, f2
    scope = tuple(sorted(set(s1) | set(s2)))

    def spread(s, t):
        # scopes are kept sorted, so only singleton axes need inserting
        return t.reshape([q if v in s else 1 for v in scope])

    return scope, spread(s1, t1) * spread(s2, t2)


def count_colourings_elimination(H, q, pinned=None, max_table=1 << 22):
    """Exact colouring count by variable elimination with a min-degree order.

    pinned maps vertex -> colour and restricts those vertices. Tables hold
    Python ints so counts never overflow.
    """
    pinned = dict(pinned or {})
    factors = [_edge_factor(e, q) for e in H.edges]
    for v, c in pinned.items():
        t = np.zeros(q, dtype=object)
        t[c] = 1
        factors.append(((v,), t))
    free = H.n - len({v for s, _ in factors for v in s})
    remaining = {v for s, _ in factors for v in s}
    result = 1
    while remaining:
        nbrs = {v: set() for v in remaining}
        for s, _ in factors:
            for v in s:
                nbrs[v].update(s)
        v = min(remaining, key=lambda x: (len(nbrs[x]), x))
        touching = [f for f in factors if v in f[0]]
        factors = [f for f in factors if v not in f[0]]
        prod = touching[0]
        for f in touching[1:]:
            prod = _multiply(prod, f, q)
            if prod[1].size > max_table:
                raise TooLarge(f"elimination table of size {prod[1].size} exceeds {max_table}")
        scope, table = prod
        axis = scope.index(v)
        rest = scope[:axis] + scope[axis + 1:]
        summed = table.sum(axis=axis)
        if rest:
            factors.append((rest, summed))
        else:
            result *= int(summed)
        remaining.discard(v)
    return result * q**free


def sample_configuration_model(n, Delta, K, seed):
    """Pairing model: n*Delta vertex points matched uniformly at random to
    the K slots of m = n*Delta/K hyperedges. Deterministic given seed."""
    if n < 1 or Delta < 1 or K < 2:
        raise InvalidParams("need n >= 1, Delta >= 1, K >= 2")
    if (n * Delta) % K:
        raise Indivisible(f"n*Delta = {n * Delta} is not divisible by K = {K}")
    rng = np.random.Generator(np.random.PCG64(seed))
    points = np.repeat(np.arange(n), Delta)
    slots = points[rng.permutation(points.size)].reshape(-1, K)
    return Hypergraph(n, tuple(tuple(int(v) for v in row) for row in slots))


def sample_simple_hypergraph(n, Delta, K, seed, max_retries=1000):
    """Rejection loop over sample_configuration_model. Returns (H, attempts)."""
    for attempt in range(max_retries):
        H = sample_configuration_model(n, Delta, K, seed + attempt)
        if is_simple(H):
            return H, attempt + 1
    raise TooLarge(f"no simple sample in {max_retries} attempts")


def phi_map(tau, G, k):
    """Map a proper colouring of H_G to a spin assignment on G.

    Clone j of vertex v is hypergraph vertex v*k + j.
    """
    tau = list(tau)
    if len(tau) != G.n * k:
        raise InvalidParams("colouring has the wrong length for H_G")
    sigma = []
    for v in range(G.n):
        block = tau[v * k:(v + 1) * k]
        sigma.append(block[0] + 1 if len(set(block)) == 1 else 0)
    for u, v in G.edges:
        cols = set(tau[u * k:(u + 1) * k]) | set(tau[v * k:(v + 1) * k])
        if len(cols) == 1:
            raise NotProper(f"hyperedge of G-edge ({u}, {v}) is monochromatic")
    return tuple(sigma)


def fiber_size(sigma, k, q):
    return (q**k - q) ** sum(1 for s in sigma if s == 0)


def fiber_histogram(G, k, q, budget=DEFAULT_BUDGET):
    """Group every proper colouring of H_G by its image under phi_map."""
    n = G.n * k
    hist = Counter()
    edges = [tuple(range(u * k, u * k + k)) + tuple(range(v * k, v * k + k)) for u, v in G.edges]
    for block in iter_assignments(q, n, budget):
        block = block[_proper_mask(block, edges)]
        if not len(block):
            continue
        clones = block.reshape(-1, G.n, k)
        pure = (clones == clones[:, :, :1]).all(axis=2)
        sig = np.where(pure, clones[:, :, 0] + 1, 0)
        keys, counts = np.unique(sig, axis=0, return_counts=True)
        for key, c in zip(keys, counts):
            hist[tuple(int(x) for x in key)] += int(c)
    return hist
