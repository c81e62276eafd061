"""Scalar root systems near x = 1 and the two-curve system f1 = f2 = 0.

Notation: T = t**(d+1) = q**k - q, u = x - 1, X = x**d. Every power with
exponent d is formed as exp(d*log1p(.)) so nothing overflows and the
cancellations X - 1 stay accurate as x -> 1.
"""
from dataclasses import dataclass, field

from .errors import NoRoot, NoSignChange, RegimeMismatch, VerificationFailure
from .numerics import (
    Bracket,
    bracketed_root,
    certified_unique_root,
    geom_sum,
    make_bracket,
    pow1p,
    sign,
    sign_scan,
)


def _pw(params, x):
    """(x**d - 1, x**d) for x > 1."""
    mp = params.ctx.mp
    e = params.d * mp.log1p(mp.mpf(x) - 1)
    return mp.expm1(e), mp.exp(e)


def _ratio_pow(params, x):
    """((x**(d+1) - 1)/(x**d - 1))**d."""
    mp = params.ctx.mp
    u = mp.mpf(x) - 1
    Xm1, X = _pw(params, x)
    return pow1p(u * X / Xm1, params.d, params.ctx)


def _h_core(params, x):
    return _ratio_pow(params, x) * params.T - geom_sum(params.ctx.mp.mpf(x) - 1, params.d, params.ctx)


def eval_h(x, params):
    qp = params.q // 2 if params.q % 2 == 0 else params.ctx.mpf(params.q) / 2
    X = _pw(params, x)[1]
    return _h_core(params, x) + qp + (qp - 1) * X


def eval_h1(x, params):
    return _h_core(params, x) + params.q - _pw(params, x)[1]


def eval_h2(x, params):
    return _h_core(params, x) + (params.q - 1) * _pw(params, x)[1]


def eval_f1(x, y, params):
    mp = params.ctx.mp
    x, y = mp.mpf(x), mp.mpf(y)
    Xm1, X = _pw(params, x)
    Ym1, Y = _pw(params, y)
    inner = pow1p(X * (y - 1) / Xm1, params.d, params.ctx)
    return (x - 1) * (inner * params.T + params.q - Y) - Ym1


def eval_f2(x, y, params):
    mp = params.ctx.mp
    x, y = mp.mpf(x), mp.mpf(y)
    Xm1, X = _pw(params, x)
    Ym1, Y = _pw(params, y)
    inner = pow1p(Y * (x - 1) / Ym1, params.d, params.ctx)
    return (y - 1) * (inner * params.T + (params.q - 1) * X) - Xm1


def log_g(x, params):
    """log of (x**d - 1)**d / ((x**(d+1) - 1)**(d-1) (x - 1))."""
    mp = params.ctx.mp
    d = params.d
    u = mp.mpf(x) - 1
    a = mp.log(geom_sum(u, d, params.ctx))       # log((x^d-1)/u)
    b = mp.log(geom_sum(u, d + 1, params.ctx))   # log((x^(d+1)-1)/u)
    # (x^d-1)^d / ((x^(d+1)-1)^(d-1) u) = (A u)^d / ((B u)^(d-1) u)
    return d * a - (d - 1) * b


def g_limits(params):
    """(g(1+), g(inf)) = (d**d/(d+1)**(d-1), 1)."""
    mp = params.ctx.mp
    d = params.d
    return mp.exp(d * mp.log(d) - (d - 1) * mp.log(d + 1)), mp.one


def right_edge(params):
    """1 + 1/(T - 1); every zero of f1 has x below it, every zero of f2 has y below it."""
    return 1 + params.ctx.mpf(1) / (params.T - 1)


def y_exterior(params):
    return 1 + params.ctx.mpf("0.5") / (params.T - 1)


def _left(params):
    # a point just right of 1 where the scalar limits have already settled
    return 1 + params.ctx.mp.power(2, -60) / params.d


def root_h(params):
    """Unique root of h on (1, 1 + 1/(T-1)], certified by a sign scan."""
    f = lambda x: eval_h(x, params)
    lo, hi = _left(params), right_edge(params)
    try:
        return certified_unique_root(f, lo, hi, params.ctx, spacing="geometric")
    except NoSignChange as exc:
        raise NoRoot(f"h has no sign change on (1, 1+1/(T-1)]: {exc}") from exc


def root_h2(params):
    """x**: unique root of h2 on (1, 1 + 1/(T-1)]."""
    f = lambda x: eval_h2(x, params)
    try:
        return certified_unique_root(f, _left(params), right_edge(params), params.ctx, spacing="geometric")
    except NoSignChange as exc:
        raise NoRoot(f"h2 has no sign change: {exc}") from exc


def root_h1_smallest(params):
    """x*: smallest root of h1, with h1 < 0 on the scanned part of (1, x*)."""
    f = lambda x: eval_h1(x, params)
    brackets = sign_scan(f, _left(params), right_edge(params), params.ctx, spacing="geometric")
    if not brackets:
        raise NoRoot("h1 has no sign change on (1, 1+1/(T-1)]")
    first = brackets[0]
    if first.f_lo_sign != -1:
        raise VerificationFailure("h1 is not negative to the left of its smallest root")
    return bracketed_root(f, first, params.ctx)


def x0_crossing(params):
    """Unique x0 > 1 with g(x0) = T. g is decreasing, so the scan also
    checks that log g - log T changes sign once."""
    mp = params.ctx.mp
    logT = mp.log(params.T)
    f = lambda x: log_g(x, params) - logT
    g1, _ = g_limits(params)
    if not g1 > params.T:
        raise NoRoot("g(1+) <= T: no crossing (d below regime)")
    # g -> 1 slowly; grow the right end until the sign flips
    hi = 1 + mp.mpf(1) / params.d
    while f(hi) > 0:
        hi = 1 + 2 * (hi - 1)
        if hi > 1e6:
            raise NoRoot("g did not cross T")
    return certified_unique_root(f, _left(params), hi, params.ctx, spacing="geometric")


def g_is_decreasing(params, lo, hi, n=256):
    pts = [lo + (hi - lo) * i / n for i in range(1, n + 1)]
    vals = [log_g(x, params) for x in pts]
    return all(b < a for a, b in zip(vals, vals[1:]))


@dataclass
class LandmarkSet:
    x_hat: object
    x_star: object
    x_2star: object
    x_0: object
    y_E: object
    x_E: object
    u: object
    edge: object

    def ordering_ok(self):
        return self.x_0 > self.x_star > self.x_2star > 1

    def as_dict(self):
        return {k: getattr(self, k) for k in ("x_hat", "x_star", "x_2star", "x_0", "y_E", "x_E", "u", "edge")}


def landmarks(params):
    from .recursion import solve_symmetric_q00

    yE = y_exterior(params)
    roots = solve_f2_for_x(yE, params)
    above = [r for r in roots if r > yE]
    xs = solve_symmetric_q00(params)
    u = params.ctx.mp.exp(params.ctx.mp.log(xs) / params.d) / params.t
    return LandmarkSet(
        x_hat=root_h(params) if params.q % 2 == 0 else None,
        x_star=root_h1_smallest(params),
        x_2star=root_h2(params),
        x_0=x0_crossing(params),
        y_E=yE,
        x_E=above[0] if len(above) == 1 else None,
        u=u,
        edge=right_edge(params),
    )


@dataclass
class CurveTrace:
    which: str
    points: list = field(default_factory=list)  # (x, y, residual)
    skipped: list = field(default_factory=list)

    def max_residual(self):
        return max((abs(r) for _, _, r in self.points), default=0)


def f1_y_on_P1(x, params):
    """The y in (1, x] with f1(x, y) = 0; f1 decreases in y there."""
    mp = params.ctx.mp
    x = mp.mpf(x)
    f = lambda y: eval_f1(x, y, params)
    lo = 1 + (x - 1) * mp.power(2, -80)
    br = make_bracket(f, lo, x, params.ctx)
    return bracketed_root(f, br, params.ctx)


def trace_P1_plus(params, n_points=200, x_star=None):
    """Points of the branch of f1 = 0 below the diagonal, one per x.

    x runs over a grid on (1, x*] that is geometric in x-1 so the start of
    the curve near (1, 1) is resolved.
    """
    mp = params.ctx.mp
    xs = root_h1_smallest(params) if x_star is None else x_star
    trace = CurveTrace("f1")
    w = xs - 1
    for i in range(1, n_points + 1):
        x = 1 + w * mp.power(2, -30 * (1 - mp.mpf(i) / n_points))
        if i == n_points:
            trace.points.append((xs, xs, eval_f1(xs, xs, params)))
            continue
        try:
            y = f1_y_on_P1(x, params)
        except NoSignChange as exc:
            trace.skipped.append((x, str(exc)))
            continue
        trace.points.append((x, y, eval_f1(x, y, params)))
    return trace


def chi(y, params):
    mp = params.ctx.mp
    y = mp.mpf(y)
    Y = _pw(params, y)[1]
    den = y - params.q * (y - 1)
    return mp.exp((mp.log(Y) - mp.log(den)) / (params.d - 1))


def solve_f2_for_x(y, params, n=None):
    """All x > 1 with f2(x, y) = 0; there are at most two.

    Sign scan from 1+ to a right end past chi where f2 is positive again,
    then Brent on each bracket.
    """
    mp = params.ctx.mp
    y = mp.mpf(y)
    f = lambda x: eval_f2(x, y, params)
    c = chi(y, params)
    hi = max(c, y, right_edge(params))
    hi = 1 + 2 * (hi - 1)
    while f(hi) <= 0:
        hi = 1 + 2 * (hi - 1)
    n = params.ctx.scan_points if n is None else n
    lo = 1 + (y - 1) * mp.power(2, -40)
    # geometric near 1 and linear out to hi, merged
    pts = sorted(set(
        [1 + (hi - 1) * mp.power(2, -40 * (1 - mp.mpf(i) / n)) for i in range(n + 1)]
        + [lo + (hi - lo) * i / n for i in range(n + 1)]
    ))
    roots = []
    prev_x, prev_s = None, 0
    for x in pts:
        s = sign(f(x))
        if s == 0:
            roots.append(x)
            continue
        if prev_s and s != prev_s:
            roots.append(bracketed_root(f, Bracket(prev_x, x, prev_s, s), params.ctx))
        prev_x, prev_s = x, s
    return roots


@dataclass
class ExteriorReport:
    s: object
    f2_a: object   # f2(1+s/d, 1+s/(2d))
    f2_b: object   # f2(y_E, y_E)

    @property
    def ok(self):
        return self.f2_a < 0 and self.f2_b < 0


def exterior_report(params):
    if params.d != 5 * params.q**params.k:
        raise RegimeMismatch(f"exterior check is stated for d = 5q^k = {5 * params.q**params.k}")
    mp = params.ctx.mp
    s = mp.mpf(params.d) / (params.T - 1)
    yE = y_exterior(params)
    a = eval_f2(1 + s / params.d, 1 + s / (2 * params.d), params)
    b = eval_f2(yE, yE, params)
    return ExteriorReport(s, a, b)


def exterior_point_check(params):
    return exterior_report(params).ok


@dataclass
class Intersection:
    x: object
    y: object
    f1: object
    f2: object
    x_M: object
    r0: object
    c0: object
    R: tuple
    C: tuple
    ratios: tuple  # (R0/R1, C0/C1)


def _x_M(params, yE, x_star):
    """Largest x in (y_E, x*] with f1(x, y_E) = 0."""
    f = lambda x: eval_f1(x, yE, params)
    brackets = sign_scan(f, yE, x_star, params.ctx)
    if not brackets:
        raise NoSignChange("f1(., y_E) has no zero on (y_E, x*]")
    return bracketed_root(f, brackets[-1], params.ctx)


def find_intersection_near_diagonal(params, tol=1e-25):
    """Zero of f2 along the f1 = 0 branch between M and (x*, x*), polished
    by 2-D Newton, then lifted to a (q, 0, 0) critical point."""
    mp = params.ctx.mp
    if not exterior_point_check(params):
        raise VerificationFailure("exterior check failed; intersection not guaranteed")
    yE = y_exterior(params)
    xs = root_h1_smallest(params)
    xM = _x_M(params, yE, xs)
    F = lambda x: eval_f2(x, f1_y_on_P1(x, params), params)
    FM, Fs = F(xM), eval_f2(xs, xs, params)
    if not (FM < 0 < Fs):
        raise NoSignChange(f"f2 along the branch: {mp.nstr(FM, 8)} at M, {mp.nstr(Fs, 8)} at (x*, x*)")
    # the endpoint x* itself sits on the diagonal; approach it from the left
    hi = xs - (xs - xM) * mp.power(2, -100)
    x = bracketed_root(F, make_bracket(F, xM, hi, params.ctx), params.ctx)
    y = f1_y_on_P1(x, params)
    x, y = _newton2(params, x, y)
    r0, c0, R, C = lift_r1_c3(x, y, params)
    ratios = (R[0] / R[1], C[0] / C[1])
    return Intersection(x, y, eval_f1(x, y, params), eval_f2(x, y, params), xM, r0, c0, R, C, ratios)


def _newton2(params, x, y, steps=40):
    mp = params.ctx.mp
    tol = mp.mpf(params.ctx.abs_tol)
    for _ in range(steps):
        F1, F2 = eval_f1(x, y, params), eval_f2(x, y, params)
        if max(abs(F1), abs(F2)) <= tol:
            break
        J = mp.matrix([[mp.diff(lambda s: eval_f1(s, y, params), x), mp.diff(lambda s: eval_f1(x, s, params), y)],
                       [mp.diff(lambda s: eval_f2(s, y, params), x), mp.diff(lambda s: eval_f2(x, s, params), y)]])
        dx = mp.lu_solve(J, mp.matrix([F1, F2]))
        x, y = x - dx[0], y - dx[1]
    return x, y


def lift_r1_c3(r1, c3, params):
    """r0, c0 from the reconstruction r0/t = (r1-1)/(c3^d-1) + r1 and its
    mirror; returns them with the 4-vectors R = (r0^d, r1^d, R3, 1) and
    C = (c0^d, 1, C1-class, c3^d) in the R3 = C1 = 1 chart. Slot 2 copies
    slot 3 (a second class with zero multiplicity)."""
    mp = params.ctx.mp
    t, d = params.t, params.d
    C3m1, C3 = _pw(params, c3)
    R1m1, R1 = _pw(params, r1)
    r0 = t * ((r1 - 1) / C3m1 + r1)
    c0 = t * ((c3 - 1) / R1m1 + c3)
    R0 = mp.exp(d * mp.log(r0))
    C0 = mp.exp(d * mp.log(c0))
    R = (R0, R1, mp.one, mp.one)
    C = (C0, mp.one, C3, C3)
    return r0, c0, R, C


def sym_bound_value(q, k, ctx):
    """1 + 3q - 2q^k + (q^k - q)(1 + 1/(2q^k - 2(q+1)))^(5q^k)."""
    mp = ctx.mp
    Q = q**k
    return 1 + 3 * q - 2 * Q + (Q - q) * pow1p(mp.mpf(1) / (2 * Q - 2 * (q + 1)), 5 * Q, ctx)


@dataclass
class SymBoundReport:
    value: object
    u: object
    y_E: object

    @property
    def ok(self):
        return self.value > 0 and self.u < self.y_E


def sym_bound_report(params):
    from .recursion import solve_symmetric_q00

    mp = params.ctx.mp
    xs = solve_symmetric_q00(params)
    u = mp.exp(mp.log(xs) / params.d) / params.t
    return SymBoundReport(sym_bound_value(params.q, params.k, params.ctx), u, y_exterior(params))


def sym_bound_check(params):
    return sym_bound_report(params).ok
