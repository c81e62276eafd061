"""Jacobian stability of fixpoints through the normalized matrix A and
L = [[0, A], [A^T, 0]].

The eigenvalues of L are plus and minus the singular values of A, so the
generic path is one SVD. The top singular value is always 1 (singular
vectors sqrt(alpha), sqrt(beta)); a fixpoint is stable when the next one is
below 1/d.
"""
from dataclasses import dataclass, field

from .errors import ZeroMarginal
from .numerics import geom_sum, real_polynomial_roots
from .recursion import expand, is_integer_qvec
from .spin import build_interaction_matrix

MARGIN = 1e-9


def build_A_L(R, C, B, mp):
    """A with a_ij = B_ij R_i C_j / sqrt(alpha_i beta_j), and L."""
    n = len(R)
    R, C = [mp.mpf(x) for x in R], [mp.mpf(x) for x in C]
    alpha = [sum(B[i, j] * R[i] * C[j] for j in range(n)) for i in range(n)]
    beta = [sum(B[i, j] * R[i] * C[j] for i in range(n)) for j in range(n)]
    if min(alpha) <= 0 or min(beta) <= 0:
        raise ZeroMarginal("some alpha_i or beta_j vanishes")
    A = mp.matrix(n, n)
    for i in range(n):
        for j in range(n):
            A[i, j] = B[i, j] * R[i] * C[j] / mp.sqrt(alpha[i] * beta[j])
    L = mp.zeros(2 * n, 2 * n)
    for i in range(n):
        for j in range(n):
            L[i, n + j] = A[i, j]
            L[n + j, i] = A[i, j]
    return A, L


def _pm(vals):
    return sorted([v for v in vals] + [-v for v in vals], reverse=True)


def spectrum_half_half(x, q, d, ctx):
    """L-spectrum at the (q/2, q/2, 0) point with r1 = c3 = x."""
    mp = ctx.mp
    x = mp.mpf(x)
    u = x - 1
    qp = mp.mpf(q) / 2
    G = geom_sum(u, d, ctx)          # (x^d-1)/(x-1)
    G1 = geom_sum(u, d + 1, ctx)     # (x^(d+1)-1)/(x-1)
    X = mp.exp(d * mp.log(x))
    a2 = X / x / G
    b2 = 1 / G
    c2 = 1 - qp * (1 + X) / G1
    ab = mp.sqrt(a2 * b2)
    cubic = [1, -(qp * a2 + qp * b2 + c2), (2 * qp - 1) * a2 * b2, a2 * b2 * c2]
    lam = real_polynomial_roots(cubic, ctx)
    f = lambda z: mp.polyval(cubic, z)
    extras = {"a": mp.sqrt(a2), "b": mp.sqrt(b2), "c": mp.sqrt(c2), "ab": ab, "cubic_roots": lam,
              "f_at_1": f(1), "f_at_ab": f(ab), "f_at_minus_ab": f(-ab),
              "amgm_gap": G - d * mp.exp((d - 1) * mp.log(x) / 2)}
    vals = [abs(v) for v in lam] + [ab] * (q - 2)
    return _pm(vals), extras


def spectrum_q00_asym(x, y, q, d, t, ctx):
    mp = ctx.mp
    x, y = mp.mpf(x), mp.mpf(y)
    a2 = 1 / (t * x + q - 1)
    b2 = 1 / (t * y + q - 1)
    r2 = t * y / (t * x + q)
    s2 = t * x / (t * y + q)
    quartic = [1, 0, -((q - 1) ** 2 * a2 * b2 + q * b2 * r2 + q * a2 * s2 + r2 * s2), 0, a2 * b2 * r2 * s2]
    roots = real_polynomial_roots(quartic, ctx)
    pos = sorted((r for r in roots if r > 0), reverse=True)
    ab = mp.sqrt(a2 * b2)
    abrs = mp.sqrt(a2 * b2 * r2 * s2)
    extras = {"a": mp.sqrt(a2), "b": mp.sqrt(b2), "r": mp.sqrt(r2), "s": mp.sqrt(s2),
              "ab": ab, "abrs": abrs, "quartic_roots": roots,
              "product_bound": (t * x + q - 1) * (t * y + q - 1), "txy": t * x * y}
    vals = pos + [ab] * (q - 1)
    return _pm(vals), extras


def spectrum_q00_sym(x, q, d, t, ctx):
    """A is symmetric here: eigenvalues -a (q-1 times), 1 and b + a(q-1) - 1."""
    mp = ctx.mp
    x = mp.mpf(x)
    a = 1 / (q - 1 + t * x)
    b = t * x / (t * x + q)
    other = b + a * (q - 1) - 1
    extras = {"a": a, "b": b, "A_eigenvalues": sorted([-a] * (q - 1) + [mp.one, other])}
    vals = [a] * (q - 1) + [mp.one, abs(other)]
    verdict = "unstable" if a > mp.mpf(1) / d else "stable"
    return _pm(vals), extras, verdict


@dataclass
class StabilityReport:
    qvec: tuple
    eigenvalues: list
    second_largest: object
    threshold: object
    verdict: str
    closed_form_used: str
    crosscheck_delta: object
    closed_form: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    symmetry_error: object = 0
    pm_one_error: object = 0
    mantissa_bits: int = 0


def _detect(fp, params):
    """Closed-form family of a fixpoint, with its scalar coordinates."""
    mp = params.ctx.mp
    q, d = params.q, params.d
    qv = [float(v) for v in fp.qvec]
    active = [i for i in range(1, 4) if qv[i - 1] > 0]
    rel = mp.mpf(10) ** -20
    if len(active) == 2 and q % 2 == 0 and all(qv[i - 1] == q / 2 for i in active):
        i, j = active
        if abs(fp.R[i] / fp.R[j] - fp.C[j] / fp.C[i]) <= rel * (fp.R[i] / fp.R[j]):
            ratio = max(fp.R[i] / fp.R[j], fp.R[j] / fp.R[i])
            return "half_half", {"x": mp.exp(mp.log(ratio) / d)}
    if len(active) == 1:
        i = active[0]
        x, y = fp.R[0] / fp.R[i], fp.C[0] / fp.C[i]
        if abs(x - y) <= rel * x:
            return "q00_sym", {"x": x}
        return "q00_asym", {"x": max(x, y), "y": min(x, y)}
    return "generic", {}


def _generic_spectrum(fp, params):
    mp = params.ctx.mp
    B = build_interaction_matrix(params).as_mp(mp)
    A, _ = build_A_L(expand(fp.qvec, fp.R), expand(fp.qvec, fp.C), B, mp)
    sv = mp.svd_r(A, compute_uv=False)
    sv = sorted((sv[i] for i in range(sv.rows)), reverse=True)
    return sv


def classify(fp, params, _escalated=False):
    """Verdict from the generic SVD path; closed forms are cross-checks."""
    if not is_integer_qvec(fp.qvec):
        raise ValueError("stability needs an integer type to expand the fixpoint")
    mp = params.ctx.mp
    q, d, t = params.q, params.d, params.t
    sv = _generic_spectrum(fp, params)
    eig = _pm(sv)
    second = sv[1]
    thr = mp.mpf(1) / d
    if abs(second - thr) <= MARGIN and not _escalated:
        from dataclasses import replace as _r
        hi = _r(params, ctx=params.ctx.escalated())
        fp_hi = type(fp)(fp.qvec, tuple(hi.ctx.mpf(v) for v in fp.R), tuple(hi.ctx.mpf(v) for v in fp.C),
                         fp.residual, fp.converged, fp.source, fp.info)
        return classify(fp_hi, hi, _escalated=True)
    if abs(second - thr) <= MARGIN:
        verdict = "marginal"
    else:
        verdict = "stable" if second < thr else "unstable"
    kind, coords = _detect(fp, params)
    closed, extras = [], {}
    if kind == "half_half":
        closed, extras = spectrum_half_half(coords["x"], q, d, params.ctx)
    elif kind == "q00_asym":
        closed, extras = spectrum_q00_asym(coords["x"], coords["y"], q, d, t, params.ctx)
    elif kind == "q00_sym":
        closed, extras, _ = spectrum_q00_sym(coords["x"], q, d, t, params.ctx)
    extras.update(coords)
    delta = mp.zero
    if closed:
        if len(closed) != len(eig):
            delta = mp.inf
        else:
            for c, g in zip(closed, eig):
                den = max(abs(c), abs(g))
                if den > 0:
                    delta = max(delta, abs(c - g) / den)
    sym_err = max(abs(a + b) for a, b in zip(eig, reversed(eig)))
    pm_err = max(min(abs(v - 1) for v in eig), min(abs(v + 1) for v in eig))
    return StabilityReport(tuple(fp.qvec), eig, second, thr, verdict, kind, delta, closed, extras,
                           sym_err, pm_err, params.ctx.mantissa_bits)
