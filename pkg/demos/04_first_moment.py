"""
First moment of the colouring count
===================================

Random Delta-regular 3-uniform hypergraphs with two colours. Once
ln q + (Delta/K) ln(1 - q^(1-K)) is negative, the expected number of proper
colourings decays and almost no such hypergraph is colourable.
"""
import numpy as np

from hypercolour import first_moment as fm

q, K = 2, 3
for Delta in range(2, 12):
    b = fm.F_upper_bound(q, K, Delta)
    v, a = fm.maximize_F_grid(q, K, Delta, grid_resolution=60)
    print(f"Delta={Delta:2d}  bound={b:+.6f}  grid max={v:+.6f} at alpha={np.round(a, 4)}")

print("bound changes sign at Delta =", round(fm.exact_threshold(q, K), 6))
print("K q^(K-1) ln q =", round(fm.sufficient_threshold(q, K), 6))

# the product-form maximizer over edge-colour tuples
alpha = np.array([0.5, 0.5])
beta = fm.beta_star(alpha, K)
pp = fm.PhasePair(alpha, beta, K)
print("beta* =", np.round(beta, 4), " constraint violations:", pp.violations())
