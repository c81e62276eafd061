import pytest

from hypercolour import stability as stab
from hypercolour.errors import ZeroMarginal
from hypercolour.spin import build_interaction_matrix, params_from_d

EXPECTED = {"half-half": ("stable", "half_half"), "q00-sym": ("unstable", "q00_sym"),
            "q00-asym": ("stable", "q00_asym")}


@pytest.fixture(scope="module")
def reports(fixpoints4, p4):
    return {k: stab.classify(fp, p4) for k, fp in fixpoints4.items()}


@pytest.mark.parametrize("name", list(EXPECTED))
def test_verdicts(reports, name):
    rep = reports[name]
    verdict, kind = EXPECTED[name]
    assert rep.verdict == verdict
    assert rep.closed_form_used == kind
    assert rep.crosscheck_delta <= 1e-8
    assert rep.pm_one_error <= 1e-10
    assert rep.symmetry_error <= 1e-60


def test_second_values(reports):
    assert abs(reports["half-half"].second_largest - 0.003973) < 1e-6
    assert abs(reports["q00-sym"].second_largest - 0.018364) < 1e-6
    assert abs(reports["q00-asym"].second_largest - 0.006053) < 1e-6


def test_half_half_cubic_facts(reports, p4):
    e = reports["half-half"].extras
    a, b = e["a"], e["b"]
    qp = p4.q // 2
    assert abs(e["f_at_1"]) < 1e-60
    assert abs(e["f_at_ab"] - (-(a * b) ** 2 * qp * (a - b) ** 2)) < 1e-60
    assert abs(e["f_at_minus_ab"] - (-(a * b) ** 2 * qp * (a + b) ** 2)) < 1e-60
    assert e["f_at_ab"] < 0
    assert e["amgm_gap"] > 0
    assert 1 / p4.d < a < 1


def test_q00_asym_facts(reports, p4):
    e = reports["q00-asym"].extras
    roots = sorted(e["quartic_roots"])
    # biquadratic: roots come in +- pairs, product of the positive pair is abrs
    pos = [r for r in roots if r > 0]
    assert abs(pos[0] * pos[1] - e["abrs"]) < 1e-60
    assert e["product_bound"] > e["txy"] > p4.d ** 2


def test_q00_sym_facts(reports, p4):
    e = reports["q00-sym"].extras
    assert e["a"] > 1 / p4.d


def test_zero_marginal(p4):
    B = build_interaction_matrix(p4).as_mp(p4.ctx.mp)
    with pytest.raises(ZeroMarginal):
        stab.build_A_L([1, 0, 0, 0, 0], [0, 1, 1, 1, 1], B, p4.ctx.mp)


def test_fractional_type_rejected(p4, fixpoints4):
    fp = fixpoints4["half-half"]
    bad = type(fp)((1.5, 2.5, 0), fp.R, fp.C, fp.residual, fp.converged, fp.source, fp.info)
    with pytest.raises(ValueError):
        stab.classify(bad, p4)


def test_L_is_symmetric(fixpoints4, p4):
    from hypercolour.recursion import expand
    fp = fixpoints4["q00-asym"]
    B = build_interaction_matrix(p4).as_mp(p4.ctx.mp)
    _, L = stab.build_A_L(expand(fp.qvec, fp.R), expand(fp.qvec, fp.C), B, p4.ctx.mp)
    assert max(abs(L[i, j] - L[j, i]) for i in range(10) for j in range(10)) == 0
