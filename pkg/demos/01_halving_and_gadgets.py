"""
Counting identities by brute force
==================================

Split every vertex of a regular graph into k copies and turn each edge into
one hyperedge on the 2k copies. Proper q-colourings of that hypergraph are
counted by the spin system B on the original graph.
"""
from hypercolour.hypergraph import count_colourings, fano_plane
from hypercolour.reductions import (
    build_disequality_gadget,
    count_exact,
    halve,
    potts_identity_report,
    trim_to_minimal,
)
from hypercolour.spin import Graph, build_params, cycle_graph, partition_function_ZB, path_graph

# a triangle, two colours, every vertex split in two
G = cycle_graph(3)
H = halve(G, 2)
print("hyperedges:", H.edges)
zb = partition_function_ZB(G, build_params(2, 2, 2), mode="exact")
print("Z_B(C3) =", zb, " Z_col(H) =", count_exact(H, 2))

# the Fano plane has no proper 2-colouring
F = fano_plane()
print("Fano 2-colourings:", count_colourings(F, 2))

# cut one hyperedge apart vertex by vertex until colourings appear;
# the last split pair is forced to take different colours
g = build_disequality_gadget(trim_to_minimal(F, 2), 2)
for j, z in g.steps:
    print(f"  H_{j}: {z} colourings")
print(f"gadget: {g.H.n} vertices, terminals u={g.u} v={g.v}, C0={g.C0}")
print(g.pair_counts())

# three gadget copies per edge give a Potts edge (antiferromagnetic at q=2)
for name, G in (("K2", Graph(2, ((0, 1),))), ("P3", path_graph(3))):
    rep = potts_identity_report(G, g)
    print(f"{name}: Z_col={rep.lhs}  C^|E| Z_potts={rep.rhs}  C={rep.C}  ok={rep.ok}")
