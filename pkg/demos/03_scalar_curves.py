"""
The two curves f1 = 0 and f2 = 0 near (1, 1)
============================================

q = 6, k = 3, d = 1080. Landmarks on the x-axis, the branch of f1 = 0
below the diagonal, and its crossing with f2 = 0. Writes curves.csv.
"""
import csv

from hypercolour import scalar as sc
from hypercolour.phi import dphi_dq
from hypercolour.spin import params_from_d

p = params_from_d(6, 3, 1080)
mp = p.ctx.mp

L = sc.landmarks(p)
for k, v in L.as_dict().items():
    print(f"{k:7s} {mp.nstr(v, 15)}")
print("x0 > x* > x** :", L.ordering_ok())

ext = sc.exterior_report(p)
print(f"s = {mp.nstr(ext.s, 8)}, f2 at the two exterior points: {mp.nstr(ext.f2_a, 6)}, {mp.nstr(ext.f2_b, 6)}")

it = sc.find_intersection_near_diagonal(p)
print(f"intersection x = {mp.nstr(it.x, 15)}, y = {mp.nstr(it.y, 15)}, "
      f"|f1| = {mp.nstr(abs(it.f1), 3)}, |f2| = {mp.nstr(abs(it.f2), 3)}")

# lifted to a (6,0,0) critical point, moving mass from class 1 to 3 pays off
d1, _, d3 = dphi_dq((6, 0, 0), it.R, it.C, p)
print("d/dq1 - d/dq3 =", mp.nstr(d1 - d3, 6))

trace = sc.trace_P1_plus(p, n_points=60, x_star=L.x_star)
with open("curves.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["which", "x", "y"])
    for x, y, _ in trace.points:
        w.writerow(["f1", mp.nstr(x, 20), mp.nstr(y, 20)])
        for xr in sc.solve_f2_for_x(y, p, n=128):
            w.writerow(["f2", mp.nstr(xr, 20), mp.nstr(y, 20)])
print("wrote curves.csv")
