"""The matrix-norm objective Phi, its reduced form over types, derivatives
in the multiplicities, the phase map, and the dominant-type search."""
from dataclasses import dataclass, field

from .errors import InfeasiblePoint, NotConverged, NotCritical, ZeroInteraction
from .recursion import (
    RESIDUAL_TOL,
    FixpointRC,
    asymmetric_q00_fixpoint,
    canonical_qvec,
    default_inits,
    expand,
    is_integer_qvec,
    residual,
    solve_general_type,
    solve_half_half,
    symmetric_q00_fixpoint,
    validate_qvec,
)
from .spin import build_interaction_matrix


def phi_norm(R, C, params):
    """Delta * log(R^T B C / (|R|_p |C|_p)) with p = Delta/(Delta-1)."""
    mp = params.ctx.mp
    R, C = [mp.mpf(x) for x in R], [mp.mpf(x) for x in C]
    B = build_interaction_matrix(params).as_mp(mp)
    inter = sum(R[i] * B[i, j] * C[j] for i in range(len(R)) for j in range(len(C)))
    if inter <= 0:
        raise ZeroInteraction("R^T B C = 0")
    p = mp.mpf(params.Delta) / params.d

    def lnorm(v):
        # log |v|_p, scaled by the max entry first
        m = max(v)
        return mp.log(m) + mp.log(sum((x / m) ** p for x in v if x > 0)) / p

    return params.Delta * (mp.log(inter) - lnorm(R) - lnorm(C))


def interaction_sum(qvec, R, C, t):
    SR = sum(q * r for q, r in zip(qvec, R[1:]))
    SC = sum(q * c for q, c in zip(qvec, C[1:]))
    return (R[0] * C[0] * t * t + SR * C[0] * t + SC * R[0] * t + SR * SC
            - sum(q * r * c for q, r, c in zip(qvec, R[1:], C[1:])))


def phi_S_bar(qvec, R4, C4, params, validate=True):
    """(d+1) log S - d log(R_0^p + sum q_i R_i^p) - d log(same for C),
    p = (d+1)/d. validate=False skips the qvec and sign checks so finite
    differences may step q_i below zero."""
    mp = params.ctx.mp
    d, t = params.d, params.t
    qv = [mp.mpf(v) for v in qvec]
    R, C = [mp.mpf(x) for x in R4], [mp.mpf(x) for x in C4]
    if validate:
        validate_qvec(qvec, params.q)
        if min(R) < 0 or min(C) < 0:
            raise InfeasiblePoint("negative entry")
    S = interaction_sum(qv, R, C, t)
    if S <= 0:
        raise InfeasiblePoint("interaction sum is not positive")
    p = mp.mpf(d + 1) / d

    def lnorm(v):
        # log(v_0^p + sum q_i v_i^p), scaled by the max entry first
        m = max(v)
        tot = sum(w * (x / m) ** p for w, x in zip([1] + qv, v) if x > 0)
        return p * mp.log(m) + mp.log(tot)

    return (d + 1) * mp.log(S) - d * lnorm(R) - d * lnorm(C)


def value(fp, params):
    return phi_S_bar(fp.qvec, fp.R, fp.C, params)


def phi_bar(qvec, params, n_starts=6, seed=0):
    """Best critical value of phi_S_bar for one type over several starts.

    Each start runs alternating best responses (monotone ascent), then
    Newton. Returns (value, R4, C4, fixpoint) of the best converged start.
    """
    mp = params.ctx.mp
    best = None
    for R0, C0 in default_inits(qvec, n_starts, seed):
        try:
            fp = solve_general_type(qvec, params, (R0, C0), mode="alternating")
        except NotConverged:
            continue
        v = value(fp, params)
        if best is None or v > best[0]:
            best = (v, fp.R, fp.C, fp)
    if best is None:
        raise NotConverged(f"no start converged for type {qvec}")
    fp = best[3]
    active = [0] + fp.active()
    if any(fp.R[i] <= 0 or fp.C[i] <= 0 for i in active):
        raise NotConverged("maximizer sits on the boundary")
    return best


def dS_dq(qvec, R, C, t, i):
    SR = sum(q * r for q, r in zip(qvec, R[1:]))
    SC = sum(q * c for q, c in zip(qvec, C[1:]))
    return R[i] * C[0] * t + R[0] * C[i] * t - R[i] * C[i] + R[i] * SC + C[i] * SR


def dphi_dq_partial(qvec, R4, C4, params):
    """Plain partial derivatives of phi_S_bar in q_1..q_3 at any point."""
    mp = params.ctx.mp
    d, t = params.d, params.t
    R, C = [mp.mpf(x) for x in R4], [mp.mpf(x) for x in C4]
    qv = [mp.mpf(v) for v in qvec]
    S = interaction_sum(qv, R, C, t)
    p = mp.mpf(d + 1) / d
    Rn = R[0] ** p + sum(q * r ** p for q, r in zip(qv, R[1:]))
    Cn = C[0] ** p + sum(q * c ** p for q, c in zip(qv, C[1:]))
    return tuple((d + 1) * dS_dq(qv, R, C, t, i) / S - d * (R[i] ** p / Rn + C[i] ** p / Cn)
                 for i in (1, 2, 3))


def dphi_dq(qvec, R4, C4, params, tol=RESIDUAL_TOL):
    """Closed form valid at critical points:
    [R_i C_0 t + R_0 C_i t + (d-1) R_i C_i + R_i S_C + C_i S_R] / S."""
    mp = params.ctx.mp
    res = residual(qvec, R4, C4, params)
    if res > tol:
        raise NotCritical(f"critical residual {mp.nstr(res, 5)} exceeds {tol}")
    d, t = params.d, params.t
    R, C = [mp.mpf(x) for x in R4], [mp.mpf(x) for x in C4]
    qv = [mp.mpf(v) for v in qvec]
    S = interaction_sum(qv, R, C, t)
    SR = sum(q * r for q, r in zip(qv, R[1:]))
    SC = sum(q * c for q, c in zip(qv, C[1:]))
    return tuple((R[i] * C[0] * t + R[0] * C[i] * t + (d - 1) * R[i] * C[i] + R[i] * SC + C[i] * SR) / S
                 for i in (1, 2, 3))


def dphi_dq_fd(qvec, R4, C4, params, h=1e-8):
    """Central differences of phi_S_bar in each q_i, R and C held fixed."""
    mp = params.ctx.mp
    h = mp.mpf(h)
    out = []
    for i in range(3):
        up = [mp.mpf(v) for v in qvec]
        dn = list(up)
        up[i] += h
        dn[i] -= h
        out.append((phi_S_bar(up, R4, C4, params, validate=False)
                    - phi_S_bar(dn, R4, C4, params, validate=False)) / (2 * h))
    return tuple(out)


def g_sign_function(r1, c3, d):
    """(r1-c3)(r1^d-1)(c3^d-1) - d(r1-1)(c3-1)(r1^d-c3^d); sign equals sign(r1-c3)."""
    return (r1 - c3) * (r1**d - 1) * (c3**d - 1) - d * (r1 - 1) * (c3 - 1) * (r1**d - c3**d)


@dataclass
class PhasePoint:
    alpha: list
    beta: list

    def balanced(self, tol=1e-12):
        scale = sum(abs(a) for a in self.alpha)
        return max(abs(a - b) for a, b in zip(self.alpha, self.beta)) <= tol * scale


def to_phase(R, C, params):
    """alpha_i = R_i^p / |R|_p^p, beta likewise."""
    mp = params.ctx.mp
    p = mp.mpf(params.Delta) / params.d

    def one(v):
        v = [mp.mpf(x) for x in v]
        m = max(v)
        w = [(x / m) ** p if x > 0 else mp.zero for x in v]
        s = sum(w)
        return [x / s for x in w]

    return PhasePoint(one(R), one(C))


def swap_is_permutation(ph, tol=1e-12):
    """True if (beta, alpha) equals (alpha, beta) after permuting the pure
    colours, i.e. the sorted pure parts match and the mixed parts agree."""
    a, b = ph.alpha, ph.beta
    if abs(a[0] - b[0]) > tol:
        return False
    return all(abs(x - y) <= tol for x, y in zip(sorted(a[1:]), sorted(b[1:])))


# ---- dominance ------------------------------------------------------------------

@dataclass
class Candidate:
    label: str
    fixpoint: FixpointRC
    value: object
    verdict: str = "n/a"
    note: str = ""


@dataclass
class DominanceReport:
    candidates: list
    winner: int
    balanced: bool
    permutation_symmetric: bool
    margin: object
    heuristic: bool
    failures: list = field(default_factory=list)

    @property
    def winner_candidate(self):
        return self.candidates[self.winner]


def qvec_lattice(q, step_div=16):
    """Canonical (descending) triples on the q/step_div lattice of the
    simplex, plus every integer triple."""
    n = step_div
    pts = set()
    for i in range(n + 1):
        for j in range(n + 1 - i):
            k = n - i - j
            pts.add(canonical_qvec((q * i / n, q * j / n, q * k / n)))
    for i in range(q + 1):
        for j in range(q + 1 - i):
            pts.add(canonical_qvec((float(i), float(j), float(q - i - j))))
    return sorted(pts, reverse=True)


def _collapses_to(fp, tol=1e-20):
    """Type reached after merging classes with equal (R_i, C_i)."""
    groups = []
    for i in range(1, 4):
        qi = fp.qvec[i - 1]
        if qi <= 0:
            continue
        for g in groups:
            if abs(fp.R[i] - g[1]) <= tol and abs(fp.C[i] - g[2]) <= tol:
                g[0] += qi
                break
        else:
            groups.append([qi, fp.R[i], fp.C[i]])
    qs = [float(g[0]) for g in groups] + [0.0] * (3 - len(groups))
    return canonical_qvec(qs)


def dominant_search(params, step_div=16, n_starts=4, classify_fn=None):
    """Rank the three closed-form families and every lattice type by
    phi_S_bar. Lattice candidates that merge into the winner's type are
    the same phase and are reported but not used for the margin."""
    from .stability import classify

    classify_fn = classify if classify_fn is None else classify_fn
    q = params.q
    cands, failures = [], []
    try:
        hh = solve_half_half(params)
        cands.append(Candidate("half-half", hh, value(hh, params)))
    except Exception as exc:  # recorded, not fatal
        failures.append(("half-half", repr(exc)))
    for label, fn in (("q00-sym", symmetric_q00_fixpoint), ("q00-asym", asymmetric_q00_fixpoint)):
        try:
            fp = fn(params)
            cands.append(Candidate(label, fp, value(fp, params)))
        except Exception as exc:
            failures.append((label, repr(exc)))
    for qvec in qvec_lattice(q, step_div):
        try:
            v, R, C, fp = phi_bar(qvec, params, n_starts=n_starts)
        except Exception as exc:
            failures.append((f"lattice{qvec}", repr(exc)))
            continue
        cands.append(Candidate(f"lattice{tuple(round(x, 6) for x in qvec)}", fp, v,
                               note=f"collapses to {_collapses_to(fp)}"))
    for c in cands:
        if is_integer_qvec(c.fixpoint.qvec) and c.fixpoint.converged:
            try:
                c.verdict = classify_fn(c.fixpoint, params).verdict
            except Exception as exc:
                c.verdict = f"error: {exc!r}"
    cands.sort(key=lambda c: c.value, reverse=True)
    # among numerically tied values prefer a closed-form family, then an integer type
    top = cands[0].value
    tie = abs(top) * params.ctx.mp.mpf(10) ** -40
    tied = [c for c in cands if top - c.value <= tie]
    tied.sort(key=lambda c: (not c.label.startswith(("half", "q00")), not is_integer_qvec(c.fixpoint.qvec)))
    cands = tied + [c for c in cands if c not in tied]
    win = cands[0]
    win_type = _collapses_to(win.fixpoint)
    others = [c for c in cands[1:] if _collapses_to(c.fixpoint) != win_type
              or c.label in ("q00-sym", "q00-asym")]
    margin = win.value - others[0].value if others else None
    fp = win.fixpoint
    ph = to_phase(expand(fp.qvec, fp.R), expand(fp.qvec, fp.C), params) if is_integer_qvec(fp.qvec) else None
    return DominanceReport(
        candidates=cands,
        winner=0,
        balanced=ph.balanced() if ph else False,
        permutation_symmetric=swap_is_permutation(ph) if ph else False,
        margin=margin,
        heuristic=not params.in_proven_regime,
        failures=failures,
    )
