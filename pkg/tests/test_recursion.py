import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypercolour import recursion as rc
from hypercolour.errors import InvalidParams
from hypercolour.phi import value
from hypercolour.spin import params_from_d

REGIME = [(q, k) for q in (4, 6, 8, 10) for k in (2, 3)]


def _full_residual(fp, params):
    """Violation of the (q+1)-dimensional recursion on the expanded vectors."""
    mp = params.ctx.mp
    R, C = rc.expand(fp.qvec, fp.R), rc.expand(fp.qvec, fp.C)
    sR, sC = sum(R), sum(C)
    R, C = [r / sR for r in R], [c / sC for c in C]
    a = rc.tree_step(C, params)
    b = rc.tree_step(R, params)
    return max(max(abs(x - y) for x, y in zip(a, R)), max(abs(x - y) for x, y in zip(b, C)))


def test_qvec_helpers():
    assert rc.canonical_qvec((0, 2, 2)) == (2, 2, 0)
    with pytest.raises(InvalidParams):
        rc.validate_qvec((1, 1, 1), 4)
    assert rc.expand((2, 1, 0), (9, 1, 2, 3)) == [9, 1, 1, 2]


def test_symmetric_point_reproduced_by_tree_step(p4):
    x = rc.solve_symmetric_q00(p4)
    mp = p4.ctx.mp
    C = [x] + [mp.one] * 4
    s = sum(C)
    C = [c / s for c in C]
    out = rc.tree_step(C, p4)
    assert max(abs(a - b) for a, b in zip(out, C)) < mp.mpf(10) ** -60


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.01, 10), min_size=5, max_size=5), st.permutations([1, 2, 3, 4]))
def test_tree_step_equivariance(C, perm):
    p = params_from_d(4, 2, 80)
    out = rc.tree_step(C, p)
    idx = [0] + list(perm)
    out_perm = rc.tree_step([C[i] for i in idx], p)
    assert max(abs(out_perm[j] - out[idx[j]]) for j in range(5)) < 1e-60
    assert abs(sum(out) - 1) < 1e-60


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.01, 10), min_size=5, max_size=5))
def test_tree_step_cross_effect(C):
    p = params_from_d(4, 2, 80)
    R = rc.tree_step(C, p)
    for i in range(1, 5):
        for j in range(1, 5):
            if C[i] > C[j]:
                assert R[i] < R[j]


@pytest.mark.parametrize("q,k", REGIME)
def test_two_spin_bounds(q, k):
    p = params_from_d(q, k, 5 * q**k)
    mp = p.ctx.mp
    xs = rc.solve_symmetric_q00(p)
    assert rc.symmetric_residual(xs, p) < mp.mpf(10) ** -50
    assert p.t * xs + q - 1 < p.d
    u = mp.exp(mp.log(xs) / p.d) / p.t
    assert u < 1 + mp.mpf(0.5) / (p.T - 1)
    x, y = rc.solve_asymmetric_q00(p)
    assert x > mp.mpf(p.d) ** 2 / p.T
    assert x > xs > y


def test_asymmetric_swap(p4):
    x, y = rc.solve_asymmetric_q00(p4)
    mp = p4.ctx.mp
    # (y, x) solves the same two-step system
    assert abs(rc.two_spin_map(x, p4) - y) / y < mp.mpf(10) ** -50
    assert abs(rc.two_spin_map(y, p4) - x) / x < mp.mpf(10) ** -50
    assert x > mp.mpf(6400) / 12


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 1e4))
def test_ising_mapping(z):
    p = params_from_d(4, 2, 80)
    a, b = rc.two_spin_map(z, p), rc.ising_map(z, p)
    assert abs(a - b) <= 1e-60 * abs(a)


def test_half_half(p4, fixpoints4):
    fp = fixpoints4["half-half"]
    mp = p4.ctx.mp
    assert fp.converged and fp.residual < 1e-60
    assert _full_residual(fp, p4) < mp.mpf(10) ** -60
    assert abs(fp.R[1] / fp.R[2] - fp.C[2] / fp.C[1]) < mp.mpf(10) ** -60 * fp.R[1] / fp.R[2]
    x = fp.info["x"]
    assert 1 < x < 1 + mp.mpf(1) / 11


def test_fixpoints_normalized(fixpoints4):
    for fp in fixpoints4.values():
        for v in (fp.R, fp.C):
            assert abs(v[0] + sum(q * x for q, x in zip(fp.qvec, v[1:])) - 1) < 1e-70


def test_general_type_recovers_half_half(p4, fixpoints4):
    hh = fixpoints4["half-half"]
    fp = rc.solve_general_type((2, 2, 0), p4, init=(np.array([3, 2, 1, 1.0]), np.array([3, 1, 2, 1.0])))
    assert fp.converged
    v1, v2 = value(fp, p4), value(hh, p4)
    assert abs(v1 - v2) <= 1e-20 * abs(v2)
    assert fp.distinct_active() <= 3


def test_general_type_recovers_symmetric(p4, fixpoints4):
    sym = fixpoints4["q00-sym"]
    mp = p4.ctx.mp
    x = float(sym.R[0] / sym.R[1])
    init = (np.array([x, 1, 1, 1]), np.array([x, 1, 1, 1]))
    fp = rc.solve_general_type((4, 0, 0), p4, init=init)
    assert fp.converged
    assert abs(fp.R[0] / fp.R[1] - sym.R[0] / sym.R[1]) < mp.mpf(10) ** -40 * x


def test_general_type_full_residual(p4):
    for qvec in ((2, 1, 1), (3, 1, 0)):
        fp = rc.solve_general_type(qvec, p4, mode="alternating")
        assert _full_residual(fp, p4) < 1e-40
        # cross effect at a fixpoint: R_i = R_j iff C_i = C_j
        for i in fp.active():
            for j in fp.active():
                same_r = abs(fp.R[i] - fp.R[j]) < 1e-40
                same_c = abs(fp.C[i] - fp.C[j]) < 1e-40
                assert same_r == same_c


def test_full_iteration_float(p4, fixpoints4):
    # float Jacobi on the (q+1)-vector stays at the stable asymmetric point
    fp = fixpoints4["q00-asym"]
    R = np.array([float(v) for v in rc.expand(fp.qvec, fp.R)])
    C = np.array([float(v) for v in rc.expand(fp.qvec, fp.C)])
    R2, C2, ok = rc.iterate_full(R * (1 + 1e-3 * np.arange(5)), C, p4)
    assert ok
    assert np.allclose(R2, R / R.sum(), rtol=1e-8)
