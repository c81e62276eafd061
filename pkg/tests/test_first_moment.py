import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypercolour import first_moment as fm
from hypercolour.errors import DomainError, TooLarge


def _alpha(raw):
    a = np.asarray(raw, dtype=float)
    return a / a.sum()


simplex3 = st.lists(st.floats(0.05, 1.0), min_size=3, max_size=3).map(_alpha)


def test_entropy_examples():
    assert fm.entropy([0.25] * 4) == pytest.approx(math.log(4), abs=1e-15)
    assert fm.entropy([0, 1, 0]) == 0
    assert fm.entropy([0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-15)


def test_colour_tuples_counts():
    tup, counts, mono = fm.colour_tuples(3, 2)
    assert tup.shape == (9, 2)
    assert (counts.sum(axis=1) == 2).all()
    assert mono.sum() == 3
    with pytest.raises(TooLarge):
        fm.colour_tuples(10, 7)


@pytest.mark.parametrize("q,K", [(2, 3), (3, 3), (4, 2)])
def test_beta_star_uniform(q, K):
    a = np.full(q, 1 / q)
    assert fm.norm_K_pow(a, K) == pytest.approx(q ** (1 - K))
    b = fm.beta_star(a, K)
    pp = fm.PhasePair(a, b, K)
    assert pp.in_Sq(1e-12)
    assert b.sum() == pytest.approx(1, abs=1e-14)
    assert fm.G_value(pp) == pytest.approx(math.log1p(-(q ** (1 - K))), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(simplex3)
def test_beta_star_attains_G(a):
    b = fm.beta_star(a, 3)
    assert b.sum() == pytest.approx(1, abs=1e-12)
    pp = fm.PhasePair(a, b, 3)
    assert fm.G_value(pp) == pytest.approx(math.log1p(-fm.norm_K_pow(a, 3)), abs=1e-12)


def test_beta_star_marginals_only_at_uniform():
    # the product form matches sum_ib t_i,ib beta_ib = K alpha_i only when alpha is uniform
    a = np.array([0.5, 0.3, 0.2])
    v = fm.PhasePair(a, fm.beta_star(a, 3), 3).violations()
    assert v["marginals"] > 1e-3
    assert v["monochromatic"] == 0 and v["negative"] == 0


def _feasible_beta(a, K, rng):
    """Random non-monochromatic tuple law averaged over colour permutations;
    it lies in S_q when alpha is uniform."""
    q = len(a)
    tup, counts, mono = fm.colour_tuples(q, K)
    # for uniform alpha any tuple law symmetric under colour permutations works
    w = rng.random(len(tup))
    w[mono] = 0
    perms = [np.array(p) for p in itertools.permutations(range(q))]
    index = {tuple(t): i for i, t in enumerate(tup)}
    sym = np.zeros_like(w)
    for p in perms:
        for i, t in enumerate(tup):
            sym[index[tuple(p[t])]] += w[i]
    return sym / sym.sum()


def test_G_concavity_against_random_beta():
    rng = np.random.default_rng(7)
    a = np.full(3, 1 / 3)
    g_star = fm.G_value(fm.PhasePair(a, fm.beta_star(a, 3), 3))
    for _ in range(100):
        b = _feasible_beta(a, 3, rng)
        pp = fm.PhasePair(a, b, 3)
        assert pp.in_Sq(1e-12)
        assert fm.G_value(pp) <= g_star + 1e-12


def test_beta_star_point_mass():
    with pytest.raises(DomainError):
        fm.beta_star([1.0, 0.0], 3)


def test_F_reduction_at_uniform():
    a = np.full(2, 0.5)
    pp = fm.PhasePair(a, fm.beta_star(a, 3), 3)
    for Delta in (2, 5, 10):
        assert fm.F_value(pp, Delta) == pytest.approx(fm.F_reduced(a, 3, Delta), abs=1e-12)


def test_bound_delta_10():
    v = fm.F_upper_bound(2, 3, 10)
    assert v == pytest.approx(math.log(2) + 10 / 3 * math.log(0.75), abs=1e-9)
    assert v == pytest.approx(-0.2658, abs=1e-4)
    assert fm.is_uncolourable_regime(2, 3, 10)


def test_bound_delta_8_example():
    # stated example: flag false at Delta = 8. The bound there is -0.0740.
    assert not fm.is_uncolourable_regime(2, 3, 8)


def test_bound_zero_at_sufficient_threshold():
    # stated example: the bound vanishes at K q^(K-1) ln q
    assert abs(fm.F_upper_bound(2, 3, fm.sufficient_threshold(2, 3))) < 1e-9


def test_bound_zero_at_exact_threshold():
    D = fm.exact_threshold(2, 3)
    assert abs(fm.F_upper_bound(2, 3, D)) < 1e-12
    assert D < fm.sufficient_threshold(2, 3)
    assert fm.sufficient_threshold(2, 3) == pytest.approx(8.3178, abs=1e-4)


def test_regime_monotone():
    flags = [fm.is_uncolourable_regime(2, 3, D) for D in range(1, 30)]
    assert flags == sorted(flags)


@pytest.mark.parametrize("Delta", [2, 6, 10])
def test_grid_max(Delta):
    v, a = fm.maximize_F_grid(2, 3, Delta, grid_resolution=60)
    assert v <= fm.F_upper_bound(2, 3, Delta) + 1e-12
    assert np.allclose(a, 0.5, atol=1e-3)


def test_grid_max_signs():
    assert fm.maximize_F_grid(2, 3, 10)[0] < 0
    assert fm.maximize_F_grid(2, 3, 2)[0] > 0


def test_grid_max_q3_uniform():
    v, a = fm.maximize_F_grid(3, 3, 12, grid_resolution=30)
    assert np.allclose(a, 1 / 3, atol=1e-2)
    assert v <= fm.F_upper_bound(3, 3, 12) + 1e-12


def test_landscape_rows():
    rows = fm.landscape_rows(2, 3, 5, 10)
    assert len(rows) == 9  # point masses dropped
    assert all(len(r) == 3 for r in rows)
