"""Halving, gadget discovery by trimming, equality and Potts edge gadgets,
and parallel-edge powering."""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import EmptyS, InvalidParams, NotUncolourable, VerificationFailure, WrongQ
from .hypergraph import (
    Hypergraph,
    count_colourings,
    count_colourings_elimination,
    proper_colourings,
)
from .spin import DEFAULT_BUDGET, Graph, potts_partition


def halve(G, k):
    """Replace vertex v by clones v*k..v*k+k-1 and each edge by the 2k-edge
    on both clone blocks."""
    edges = tuple(
        tuple(range(u * k, u * k + k)) + tuple(range(v * k, v * k + k)) for u, v in G.edges
    )
    return Hypergraph(G.n * k, edges)


def count_exact(H, q, budget=DEFAULT_BUDGET):
    """Enumerate when q**n fits the budget, otherwise eliminate variables."""
    if q**H.n <= budget:
        return count_colourings(H, q, budget)
    return count_colourings_elimination(H, q)


def trim_to_minimal(H, q, budget=DEFAULT_BUDGET):
    """Drop hyperedges in input order while the instance stays uncolourable.

    One pass is enough: an edge kept at its turn stays necessary, because
    later removals only make colouring easier.
    """
    if count_exact(H, q, budget) > 0:
        raise NotUncolourable(f"input hypergraph is {q}-colourable")
    i = 0
    while i < H.m:
        trial = H.remove_edge(i)
        if count_exact(trial, q, budget) == 0:
            H = trial
        else:
            i += 1
    return H


@dataclass(frozen=True)
class Gadget:
    H: Hypergraph
    u: int
    v: int
    kind: str
    C0: int
    q: int
    steps: tuple = ()  # (j, Z_col(H_j)) log of the discovery sequence

    def pair_counts(self, budget=DEFAULT_BUDGET):
        return pair_count_table(self.H, self.q, self.u, self.v, budget)


def pair_count_table(H, q, u, v, budget=DEFAULT_BUDGET):
    """q x q table of proper colouring counts with (colour(u), colour(v)) fixed."""
    table = np.zeros((q, q), dtype=object)
    if q**H.n <= budget:
        cols = proper_colourings(H, q, budget)
        for a in range(q):
            for b in range(q):
                table[a, b] = int(((cols[:, u] == a) & (cols[:, v] == b)).sum())
    else:
        for a in range(q):
            for b in range(q):
                table[a, b] = count_colourings_elimination(H, q, {u: a, v: b})
    return table


def _check_gadget(H, q, u, v, kind, budget):
    table = pair_count_table(H, q, u, v, budget)
    diag = [table[a, a] for a in range(q)]
    off = [table[a, b] for a in range(q) for b in range(q) if a != b]
    deg = H.degrees()
    if kind == "disequality":
        if any(diag):
            raise VerificationFailure("a proper colouring gives u and v the same colour")
        if len(set(off)) != 1:
            raise VerificationFailure(f"pair counts differ across colour pairs: {sorted(set(off))}")
        if deg[u] != 1:
            raise VerificationFailure(f"degree(u) = {deg[u]}, expected 1")
        return int(off[0])
    if any(off):
        raise VerificationFailure("a proper colouring gives u and v different colours")
    if len(set(diag)) != 1:
        raise VerificationFailure("equal-colour counts differ across colours")
    if deg[u] != 1 or deg[v] != 1:
        raise VerificationFailure("equality gadget terminals must have degree 1")
    return int(diag[0])


def build_disequality_gadget(H_min, q, budget=DEFAULT_BUDGET):
    """Split the lexicographically first hyperedge e one vertex at a time.

    H_j replaces the first j vertices of S (the vertices of e still covered
    by H - e) with fresh vertices u_1..u_j. The first j where H_j becomes
    colourable gives u = u_j and v = v_j.
    """
    if count_exact(H_min, q, budget) > 0:
        raise NotUncolourable("seed hypergraph is colourable")
    idx = min(range(H_min.m), key=lambda i: H_min.edges[i])
    e = H_min.edges[idx]
    rest = H_min.remove_edge(idx)
    deg = rest.degrees()
    S = [w for w in e if deg[w] > 0]
    if not S:
        raise EmptyS("every vertex of e has degree 0 in H - e, so H was not minimal")
    order = S + [w for w in e if deg[w] == 0]
    n = H_min.n
    steps = []
    for j in range(1, len(S) + 1):
        fresh = list(range(n, n + j))
        Hj = rest.add_edges([tuple(fresh) + tuple(order[j:])], extra_vertices=j)
        z = count_exact(Hj, q, budget)
        steps.append((j, z))
        if z > 0:
            u, v = fresh[-1], order[j - 1]
            C0 = _check_gadget(Hj, q, u, v, "disequality", budget)
            return Gadget(Hj, u, v, "disequality", C0, q, tuple(steps))
    raise VerificationFailure("H_j never became colourable; input was not minimal")


def _embed(edges, gadget, a, b, next_vertex):
    """Copy gadget.H with gadget.u -> a, gadget.v -> b, interior vertices
    renumbered from next_vertex upward in gadget order."""
    mapping = {gadget.u: a, gadget.v: b}
    for w in range(gadget.H.n):
        if w not in mapping:
            mapping[w] = next_vertex
            next_vertex += 1
    edges.extend(tuple(mapping[w] for w in e) for e in gadget.H.edges)
    return next_vertex


def build_equality_gadget(dis, budget=DEFAULT_BUDGET):
    """Chain two disequality copies u-w and v-w. With two colours this
    forces colour(u) = colour(v). Vertices 0, 1, 2 are u, v, w."""
    if dis.q != 2:
        raise WrongQ(f"equality chaining needs q = 2, got q = {dis.q}")
    edges = []
    nxt = _embed(edges, dis, 0, 2, 3)
    nxt = _embed(edges, dis, 1, 2, nxt)
    H = Hypergraph(nxt, tuple(edges))
    C = _check_gadget(H, 2, 0, 1, "equality", budget)
    return Gadget(H, 0, 1, "equality", C, 2)


def potts_constants(q, C0):
    """(C, B) with Z_col(H_G) = C**|E| * Z_potts(G, B), exact."""
    C = ((q - 2) ** 2 + (q - 1)) * C0**3
    B = Fraction((q - 1) * (q - 2), (q - 2) ** 2 + (q - 1))
    return C, B


def potts_edge_gadget_replace(G, dis):
    """Each edge (u, v) gets fresh w1, w2 and gadget copies on (u, w1),
    (w2, w1), (v, w2). Original vertices keep indices 0..n-1."""
    edges = []
    nxt = G.n
    for u, v in G.edges:
        w1, w2 = nxt, nxt + 1
        nxt += 2
        nxt = _embed(edges, dis, u, w1, nxt)
        nxt = _embed(edges, dis, w2, w1, nxt)
        nxt = _embed(edges, dis, v, w2, nxt)
    H = Hypergraph(nxt, tuple(edges))
    _check_degrees(G, dis, H)
    return H


def _check_degrees(G, dis, H):
    d0 = dis.H.max_degree()
    deg = H.degrees()
    for v, dv in enumerate(G.degrees()):
        if deg[v] != dv:
            raise VerificationFailure(f"vertex {v} changed degree {dv} -> {deg[v]}")
    nxt = G.n
    per_edge = 2 + 3 * (dis.H.n - 2)
    for _ in G.edges:
        w1, w2 = nxt, nxt + 1
        if deg[w1] > 2 * d0 or deg[w2] > d0 + 1:
            raise VerificationFailure("gadget hub degree bound violated")
        nxt += per_edge


@dataclass(frozen=True)
class PottsCheck:
    lhs: int
    rhs: Fraction
    C: int
    B: Fraction
    C0: int
    n_vertices: int

    @property
    def ok(self):
        return self.lhs == self.rhs


def potts_identity_report(G, dis, budget=DEFAULT_BUDGET):
    q = dis.q
    H = potts_edge_gadget_replace(G, dis)
    C0 = _check_gadget(dis.H, q, dis.u, dis.v, "disequality", budget)
    C, B = potts_constants(q, C0)
    lhs = count_exact(H, q, budget)
    rhs = C**G.m * potts_partition(G, q, B, mode="exact", budget=budget)
    return PottsCheck(lhs, rhs, C, B, C0, H.n)


def verify_potts_identity(G, dis, budget=DEFAULT_BUDGET):
    return potts_identity_report(G, dis, budget).ok


def parallel_power(G, s):
    if s < 1:
        raise InvalidParams("s must be >= 1")
    return Graph(G.n, tuple(e for e in G.edges for _ in range(s)))
