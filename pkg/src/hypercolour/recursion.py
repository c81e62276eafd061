"""Fixpoints of the tree recursion.

The recursion is R_i proportional to (B C)_i**d, and symmetrically for C,
where B is the interaction matrix; written out,
    R_0 ~ (t(t C_0 + sum_j C_j))**d,   R_i ~ (t C_0 + sum_{j != i} C_j)**d.
Reduced points group the q pure colours into three classes with
multiplicities qvec = (q1, q2, q3), so only 4 numbers per side remain.
A class with zero multiplicity still carries the value the recursion would
give it, which is what the q-derivatives need.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParams, NoAsymmetricFixpoint, NotConverged
from .numerics import Bracket, bracketed_root, certified_unique_root, sign

RESIDUAL_TOL = 1e-30


@dataclass
class FixpointRC:
    qvec: tuple
    R: tuple
    C: tuple
    residual: object
    converged: bool = True
    source: str = ""
    info: dict = field(default_factory=dict)

    def active(self):
        return [i for i in range(1, 4) if self.qvec[i - 1] > 0]

    def distinct_active(self, rel=1e-12):
        vals = []
        for i in self.active():
            if not any(abs(self.R[i] - v) <= rel * abs(v) for v in vals):
                vals.append(self.R[i])
        return len(vals)


def canonical_qvec(qvec):
    return tuple(sorted(qvec, reverse=True))


def validate_qvec(qvec, q, tol=1e-12):
    if len(qvec) != 3 or any(v < 0 for v in qvec) or abs(sum(qvec) - q) > tol:
        raise InvalidParams(f"qvec {qvec} must be three nonnegative numbers summing to {q}")


def is_integer_qvec(qvec):
    return all(float(v).is_integer() for v in qvec)


def expand(qvec, v4):
    """Full (q+1)-vector: slot 0 then each class repeated q_i times."""
    out = [v4[0]]
    for i in range(3):
        out += [v4[i + 1]] * int(qvec[i])
    return out


# ---- coefficient vector a(C): R_i ~ a_i(C)**d ---------------------------

def coeffs(qvec, C, t):
    S = sum(q * c for q, c in zip(qvec, C[1:]))
    base = t * C[0] + S
    return [t * base] + [base - c for c in C[1:]]


def normalize(qvec, v):
    s = v[0] + sum(q * x for q, x in zip(qvec, v[1:]))
    return tuple(x / s for x in v)


def residual(qvec, R, C, params):
    """Max violation of R ~ a(C)**d and C ~ a(R)**d in the chart where
    R_0 + sum q_i R_i = C_0 + sum q_i C_i = 1 (all four slots)."""
    mp = params.ctx.mp
    d, t = params.d, params.t
    R, C = normalize(qvec, [mp.mpf(x) for x in R]), normalize(qvec, [mp.mpf(x) for x in C])
    worst = mp.zero
    for X, Y in ((R, C), (C, R)):
        a = coeffs(qvec, Y, t)
        if min(a) <= 0:
            return mp.inf
        la = [mp.log(v) for v in a]
        top = max(la)
        img = normalize(qvec, [mp.exp(d * (v - top)) for v in la])
        worst = max(worst, max(abs(p - r) for p, r in zip(img, X)))
    return worst


# ---- full (q+1)-dimensional step ----------------------------------------

def tree_step(C, params):
    """One application of the recursion to a full vector C; output sums to 1."""
    mp = params.ctx.mp
    t, d, q = params.t, params.d, params.q
    C = [mp.mpf(c) for c in C]
    if len(C) != q + 1:
        raise InvalidParams(f"C must have length q+1 = {q + 1}")
    tot = sum(C[1:])
    bc = [t * (t * C[0] + tot)] + [t * C[0] + tot - c for c in C[1:]]
    logs = [mp.log(v) if v > 0 else None for v in bc]
    top = max(v for v in logs if v is not None)
    R = [mp.exp(d * (v - top)) if v is not None else mp.zero for v in logs]
    s = sum(R)
    return [r / s for r in R]


def iterate_full(R, C, params, damping=0.5, iters=20000, tol=1e-13):
    """Damped Jacobi iteration on the full system in float64 log domain.
    Returns (R, C, converged) as numpy arrays summing to 1."""
    t, d, q = params.t_float, params.d, params.q
    lr, lc = np.log(np.asarray(R, float)), np.log(np.asarray(C, float))

    def img(lx):
        x = np.exp(lx - lx.max())
        tot = x[1:].sum()
        bc = np.concatenate(([t * (t * x[0] + tot)], t * x[0] + tot - x[1:]))
        ly = d * np.log(np.maximum(bc, 1e-300))
        return ly - np.logaddexp.reduce(ly)

    for _ in range(iters):
        nr, nc = img(lc), img(lr)
        step = max(np.abs(nr - lr).max(), np.abs(nc - lc).max())
        lr = (1 - damping) * lr + damping * nr
        lc = (1 - damping) * lc + damping * nc
        lr -= np.logaddexp.reduce(lr)
        lc -= np.logaddexp.reduce(lc)
        if step < tol:
            return np.exp(lr), np.exp(lc), True
    return np.exp(lr), np.exp(lc), False


# ---- the (q,0,0) two-spin system ------------------------------------------

def two_spin_map(z, params):
    """y(z) = t^d (1 + 1/(t z + q - 1))^d."""
    mp = params.ctx.mp
    t, d = params.t, params.d
    return mp.exp(d * (mp.log(t) + mp.log1p(1 / (t * z + params.q - 1))))


def ising_map(z, params):
    """The same map written as a 2-spin recursion with beta = t/q,
    gamma = (q-1)/t, lambda = q^d: lambda ((beta z + 1)/(z + gamma))^d."""
    mp = params.ctx.mp
    t, q, d = params.t, params.q, params.d
    beta, gamma, lam = t / q, mp.mpf(q - 1) / t, mp.power(q, d)
    return lam * mp.power((beta * z + 1) / (z + gamma), d)


def _u_equation(params):
    mp = params.ctx.mp
    T, d, q = params.T, params.d, params.q
    return lambda u: u - 1 - 1 / (T * mp.exp(d * mp.log(u)) + q - 1)


def solve_symmetric_u(params):
    """u = x^(1/d)/t for the symmetric point; the u-equation is increasing."""
    mp = params.ctx.mp
    f = _u_equation(params)
    return certified_unique_root(f, mp.one, 1 + mp.mpf(1) / params.q, params.ctx)


def solve_symmetric_q00(params):
    """Unique x > 0 with x = ((t^2 x + q t)/(t x + q - 1))^d."""
    mp = params.ctx.mp
    u = solve_symmetric_u(params)
    return mp.exp(params.d * (mp.log(params.t) + mp.log(u)))


def symmetric_residual(x, params):
    mp = params.ctx.mp
    t, q, d = params.t, params.q, params.d
    rhs = mp.exp(d * (mp.log(t * t * x + q * t) - mp.log(t * x + q - 1)))
    return abs(rhs - x) / x


def solve_asymmetric_q00(params, n_grid=600):
    """Largest root of f(z) = y(y(z)) - z, found by scanning downward from
    10 d^2/T; returns (x, y) with x > y."""
    mp = params.ctx.mp
    f = lambda z: two_spin_map(two_spin_map(z, params), params) - z
    qs = solve_symmetric_q00(params)
    top = 10 * mp.mpf(params.d) ** 2 / params.T
    if not f(top) < 0:
        raise NoAsymmetricFixpoint("f(z0) is not negative; largest root not isolated")
    lo = qs * (1 + mp.mpf(10) ** -12)
    ratio = mp.exp((mp.log(top) - mp.log(lo)) / n_grid)
    hi_z, hi_s = top, -1
    z = top
    for _ in range(n_grid):
        z = z / ratio
        s = sign(f(z))
        if s == 0:
            x = z
            break
        if s != hi_s:
            x = bracketed_root(f, Bracket(z, hi_z, s, hi_s), params.ctx)
            break
        hi_z, hi_s = z, s
    else:
        raise NoAsymmetricFixpoint("only the symmetric two-spin solution was found")
    if abs(x - qs) <= 1e-20 * qs:
        raise NoAsymmetricFixpoint("largest root coincides with the symmetric solution")
    y = two_spin_map(x, params)
    if not x > y:
        raise NoAsymmetricFixpoint("largest root does not satisfy x > y")
    return x, y


def q00_fixpoint(x, y, params, source):
    mp = params.ctx.mp
    qvec = (params.q, 0, 0)
    R = normalize(qvec, [mp.mpf(x), mp.one, mp.one, mp.one])
    C = normalize(qvec, [mp.mpf(y), mp.one, mp.one, mp.one])
    return FixpointRC(qvec, R, C, residual(qvec, R, C, params), True, source, {"x": x, "y": y})


def symmetric_q00_fixpoint(params):
    x = solve_symmetric_q00(params)
    return q00_fixpoint(x, x, params, "q00-sym")


def asymmetric_q00_fixpoint(params):
    x, y = solve_asymmetric_q00(params)
    return q00_fixpoint(x, y, params, "q00-asym")


# ---- half-half -------------------------------------------------------------

def solve_half_half(params):
    """The (q/2, q/2, 0) point from the root x of h: r1 = c3 = x.

    With rho = t^d ((x^(d+1)-1)/(x^d-1))^d,
    R = (rho, x^d, 1) and C = (rho, 1, x^d); slot 3 copies class 1.
    """
    from .scalar import root_h

    if params.q % 2:
        raise InvalidParams("half-half type needs even q")
    mp = params.ctx.mp
    d, t = params.d, params.t
    x = root_h(params)
    u = x - 1
    lX = d * mp.log(x)
    X = mp.exp(lX)
    # (x^(d+1)-1)/(x^d-1) = 1 + u X/(X-1)
    rho = mp.exp(d * (mp.log(t) + mp.log1p(u * X / mp.expm1(lX))))
    qvec = (mp.mpf(params.q) / 2, mp.mpf(params.q) / 2, mp.zero)
    R = normalize(qvec, [rho, X, mp.one, X])
    C = normalize(qvec, [rho, mp.one, X, mp.one])
    res = residual(qvec, R, C, params)
    return FixpointRC(qvec, R, C, res, res <= RESIDUAL_TOL, "half-half", {"x": x})


# ---- general type ------------------------------------------------------------

def _iterate_reduced(qvec, R, C, t, d, damping, iters, tol, mode):
    """Float64 log-domain iteration of R ~ a(C)^d, C ~ a(R)^d."""
    w = np.concatenate(([1.0], np.asarray(qvec, float)))
    lr, lc = np.log(np.asarray(R, float)), np.log(np.asarray(C, float))

    def img(lx):
        x = np.exp(lx - lx.max())
        S = w[1:] @ x[1:]
        base = t * x[0] + S
        a = np.concatenate(([t * base], base - x[1:]))
        ly = d * np.log(np.maximum(a, 1e-300))
        return ly - np.log(w @ np.exp(ly - ly.max())) - ly.max()

    def renorm(lx):
        return lx - np.log(w @ np.exp(lx - lx.max())) - lx.max()

    step = np.inf
    for it in range(iters):
        if mode == "alternating":
            nr = img(lc)
            dr = np.abs(nr - lr).max()
            lr = nr
            nc = img(lr)
            step = max(dr, np.abs(nc - lc).max())
            lc = nc
        else:
            nr, nc = img(lc), img(lr)
            step = max(np.abs(nr - lr).max(), np.abs(nc - lc).max())
            lr = renorm((1 - damping) * lr + damping * nr)
            lc = renorm((1 - damping) * lc + damping * nc)
        if step < tol:
            return lr, lc, True, it + 1
    return lr, lc, False, iters


def _newton_reduced(qvec, R, C, params, max_steps=60):
    """Newton on rho_i = log R_i - log R_0, gamma_i = log C_i - log C_0:
    d (log a_i - log a_0) - rho_i = 0 for both sides, i = 1..3."""
    mp = params.ctx.mp
    t, d = params.t, params.d
    qv = [mp.mpf(v) for v in qvec]
    z = [mp.log(R[i]) - mp.log(R[0]) for i in range(1, 4)] + \
        [mp.log(C[i]) - mp.log(C[0]) for i in range(1, 4)]

    def system(z):
        F = [None] * 6
        J = mp.zeros(6, 6)
        for side in (0, 1):
            own = z[3 * side:3 * side + 3]
            other = z[3 - 3 * side:6 - 3 * side]
            Y = [mp.exp(g) for g in other]
            S = sum(q * y for q, y in zip(qv, Y))
            base = t + S
            a0 = t * base
            for i in range(3):
                ai = base - Y[i]
                if ai <= 0:
                    return None, None
                F[3 * side + i] = d * (mp.log(ai) - mp.log(a0)) - own[i]
                J[3 * side + i, 3 * side + i] = -1
                for j in range(3):
                    dai = (qv[j] - (1 if i == j else 0)) * Y[j]
                    da0 = t * qv[j] * Y[j]
                    J[3 * side + i, 3 - 3 * side + j] = d * (dai / ai - da0 / a0)
        return F, J

    tol = mp.mpf(params.ctx.abs_tol) * 1e-10
    for _ in range(max_steps):
        F, J = system(z)
        if F is None:
            return None
        if max(abs(v) for v in F) <= tol:
            break
        dz = mp.lu_solve(J, mp.matrix(F))
        z = [zi - dz[i] for i, zi in enumerate(z)]
    Rn = normalize(qvec, [mp.one] + [mp.exp(v) for v in z[:3]])
    Cn = normalize(qvec, [mp.one] + [mp.exp(v) for v in z[3:]])
    return Rn, Cn


def default_inits(qvec, n_starts, seed=0):
    """Deterministic starts: mixed-heavy, one random spread per remaining start."""
    rng = np.random.Generator(np.random.PCG64(seed))
    out = [(np.array([5.0, 3.0, 1.0, 0.5]), np.array([5.0, 0.5, 1.0, 3.0]))]
    while len(out) < n_starts:
        out.append((rng.uniform(0.1, 10, 4), rng.uniform(0.1, 10, 4)))
    return out[:n_starts]


def solve_general_type(qvec, params, init=None, damping=0.5, mode="jacobi",
                       max_iters=None, strict=True):
    """Fixpoint of the reduced system for one type, from one start.

    Float64 log-domain iteration (damped Jacobi by default, or alternating
    best responses) locates the point; Newton in extended precision then
    drives the full-system residual below 1e-30.
    """
    validate_qvec(qvec, params.q)
    mp = params.ctx.mp
    if init is None:
        init = default_inits(qvec, 1)[0]
    R0, C0 = init
    max_iters = params.ctx.max_iters * 10 if max_iters is None else max_iters
    lr, lc, ok, its = _iterate_reduced(qvec, R0, C0, params.t_float, params.d,
                                       damping, max_iters, 1e-13, mode)
    R = normalize(qvec, [mp.exp(mp.mpf(float(v))) for v in lr])
    C = normalize(qvec, [mp.exp(mp.mpf(float(v))) for v in lc])
    polished = _newton_reduced(qvec, R, C, params)
    if polished is not None:
        R, C = polished
    res = residual(qvec, R, C, params)
    fp = FixpointRC(tuple(qvec), R, C, res, res <= RESIDUAL_TOL, f"general-{mode}",
                    {"float_iters": its, "float_converged": ok})
    if strict and not fp.converged:
        raise NotConverged(f"type {qvec}: residual {mp.nstr(res, 5)} after {its} iterations")
    return fp


def same_point(a, b, rel=1e-15):
    """Equal after allowing a relabelling of the active classes."""
    from itertools import permutations

    for perm in permutations(range(3)):
        ok = True
        for i in range(3):
            j = perm[i]
            if abs(float(a.qvec[i]) - float(b.qvec[j])) > 1e-12:
                ok = False
                break
            if a.qvec[i] > 0 and (abs(a.R[i + 1] - b.R[j + 1]) > rel or abs(a.C[i + 1] - b.C[j + 1]) > rel):
                ok = False
                break
        if ok and abs(a.R[0] - b.R[0]) <= rel and abs(a.C[0] - b.C[0]) <= rel:
            return True
    return False
