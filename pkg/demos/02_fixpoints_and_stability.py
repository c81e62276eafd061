"""
Tree-recursion fixpoints and which one wins
===========================================

q = 4, k = 2, d = 80. Three families of fixpoints: colours split in two
halves, all colours alike with R = C, and all colours alike with R != C.
"""
from hypercolour import recursion as rc
from hypercolour.phi import dominant_search, value
from hypercolour.spin import params_from_d
from hypercolour.stability import classify

p = params_from_d(4, 2, 80)
mp = p.ctx.mp
print(f"t = {mp.nstr(p.t, 10)}, T = t^(d+1) = {mp.nstr(p.T, 6)}")

fps = {
    "half-half": rc.solve_half_half(p),
    "q00-sym": rc.symmetric_q00_fixpoint(p),
    "q00-asym": rc.asymmetric_q00_fixpoint(p),
}
for name, fp in fps.items():
    rep = classify(fp, p)
    print(f"{name:10s} phi={mp.nstr(value(fp, p), 12)}  second singular value "
          f"{mp.nstr(rep.second_largest, 6)} vs 1/d={mp.nstr(rep.threshold, 4)}  -> {rep.verdict}")

# the two-spin reduction behind the (q,0,0) points
x = rc.solve_symmetric_q00(p)
xa, ya = rc.solve_asymmetric_q00(p)
print("symmetric x:", mp.nstr(x, 10), " tx+q-1 =", mp.nstr(p.t * x + p.q - 1, 8), "< d")
print("asymmetric (x, y):", mp.nstr(xa, 10), mp.nstr(ya, 10))

# search a lattice of colour-class sizes too
rep = dominant_search(p)
for c in rep.candidates[:6]:
    print(f"  {c.label:18s} {mp.nstr(c.value, 12)} {c.verdict}")
print("winner:", rep.winner_candidate.label, " margin:", mp.nstr(rep.margin, 4))
