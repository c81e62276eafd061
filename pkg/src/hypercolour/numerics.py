"""Extended-precision kernels and certified scalar root finding.

Everything here works on mpmath numbers owned by a ``PrecisionContext``.
Each context carries its own ``MPContext`` so no global precision is ever
touched; two threads with different contexts do not interfere.
"""
from dataclasses import dataclass, field, replace
from functools import cached_property

import mpmath

from .errors import (
    DegenerateLeadingCoefficient,
    DomainError,
    MaxIters,
    NoSignChange,
    VerificationFailure,
)

GUARD_BITS = 64


@dataclass(frozen=True)
class PrecisionContext:
    mantissa_bits: int = 256
    abs_tol: float = 1e-60
    rel_tol: float = 1e-65
    max_iters: int = 4000
    scan_points: int = 2048

    def __post_init__(self):
        if self.mantissa_bits < 53:
            raise DomainError("mantissa_bits must be >= 53")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.max_iters < 1 or self.scan_points < 2:
            raise DomainError("max_iters >= 1 and scan_points >= 2 required")

    @cached_property
    def mp(self):
        ctx = mpmath.MPContext()
        ctx.prec = self.mantissa_bits
        return ctx

    @cached_property
    def guard(self):
        # same arithmetic with extra bits, for kernels that amplify rounding
        ctx = mpmath.MPContext()
        ctx.prec = self.mantissa_bits + GUARD_BITS
        return ctx

    def mpf(self, x):
        return self.mp.mpf(x)

    def escalated(self):
        """Copy with doubled mantissa (used to re-run marginal verdicts)."""
        return replace(self, mantissa_bits=2 * self.mantissa_bits)

    def as_dict(self):
        return {
            "mantissa_bits": self.mantissa_bits,
            "abs_tol": repr(self.abs_tol),
            "rel_tol": repr(self.rel_tol),
            "max_iters": self.max_iters,
            "scan_points": self.scan_points,
        }


DEFAULT_CONTEXT = PrecisionContext()
DOUBLE_CONTEXT = PrecisionContext(mantissa_bits=53, abs_tol=1e-14, rel_tol=1e-15)


def _ctx(ctx):
    return DEFAULT_CONTEXT if ctx is None else ctx


@dataclass(frozen=True)
class Bracket:
    lo: object
    hi: object
    f_lo_sign: int
    f_hi_sign: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"bracket needs lo < hi, got {self.lo}, {self.hi}")
        if self.f_lo_sign not in (-1, 1) or self.f_hi_sign not in (-1, 1):
            raise DomainError("bracket signs must be +1 or -1")
        if self.f_lo_sign == self.f_hi_sign:
            raise NoSignChange(f"no sign change on [{self.lo}, {self.hi}]")


def sign(v):
    return (v > 0) - (v < 0)


def make_bracket(f, lo, hi, ctx=None):
    """Evaluate f at both ends and build a Bracket, or raise NoSignChange."""
    mp = _ctx(ctx).mp
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    slo, shi = sign(f(lo)), sign(f(hi))
    if slo == 0 or shi == 0 or slo == shi:
        raise NoSignChange(f"f has signs ({slo}, {shi}) at [{mp.nstr(lo, 20)}, {mp.nstr(hi, 20)}]")
    return Bracket(lo, hi, slo, shi)


def pow1p(a, b, ctx=None):
    """(1+a)**b as exp(b*log1p(a)), evaluated with guard bits."""
    ctx = _ctx(ctx)
    g = ctx.guard
    a, b = g.mpf(a), g.mpf(b)
    if a <= -1:
        raise DomainError("pow1p needs 1+a > 0")
    return ctx.mp.mpf(g.exp(b * g.log1p(a)))


def log1p_pow(a, b, ctx=None):
    """log((1+a)**b) without exponentiating."""
    ctx = _ctx(ctx)
    a = ctx.mp.mpf(a)
    if a <= -1:
        raise DomainError("log1p_pow needs 1+a > 0")
    return ctx.mp.mpf(b) * ctx.mp.log1p(a)


def geom_sum(u, n, ctx=None):
    """((1+u)**n - 1)/u, i.e. 1 + x + ... + x**(n-1) with x = 1+u.

    expm1 and log1p keep full relative accuracy as u -> 0, so no series switch
    is needed near x = 1.
    """
    ctx = _ctx(ctx)
    g = ctx.guard
    u = g.mpf(u)
    if u == 0:
        return ctx.mp.mpf(n)
    return ctx.mp.mpf(g.expm1(g.mpf(n) * g.log1p(u)) / u)


def check_exp_sandwich(a, b, ctx=None):
    """exp(a) > (1 + a/b)**b > exp(ab/(a+b)) for a, b > 0."""
    ctx = _ctx(ctx)
    mp = ctx.mp
    a, b = mp.mpf(a), mp.mpf(b)
    if a <= 0 or b <= 0:
        raise DomainError("check_exp_sandwich needs a, b > 0")
    mid = b * mp.log1p(a / b)
    return bool(a > mid > a * b / (a + b))


def bracketed_root(f, bracket, ctx=None):
    """Brent's method on a certified bracket. The iterate never leaves it."""
    ctx = _ctx(ctx)
    mp = ctx.mp
    a, b = mp.mpf(bracket.lo), mp.mpf(bracket.hi)
    fa, fb = f(a), f(b)
    if sign(fa) == 0:
        return a
    if sign(fb) == 0:
        return b
    if sign(fa) == sign(fb):
        raise NoSignChange("endpoint signs agree")
    eps = mp.eps
    abs_tol = mp.mpf(ctx.abs_tol)
    rel_tol = mp.mpf(ctx.rel_tol)
    c, fc = a, fa
    d = e = b - a
    for _ in range(ctx.max_iters):
        if sign(fb) == sign(fc):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2 * eps * abs(b) + rel_tol * abs(b) / 2
        xm = (c - b) / 2
        if abs(xm) <= tol1 or abs(fb) <= abs_tol:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p, qq = 2 * xm * s, 1 - s
            else:
                qq, r = fa / fc, fb / fc
                p = s * (2 * xm * qq * (qq - r) - (b - a) * (r - 1))
                qq = (qq - 1) * (r - 1) * (s - 1)
            if p > 0:
                qq = -qq
            else:
                p = -p
            if 2 * p < min(3 * xm * qq - abs(tol1 * qq), abs(e * qq)):
                e, d = d, p / qq
            else:
                d = e = xm
        else:
            d = e = xm
        a, fa = b, fb
        b = b + d if abs(d) > tol1 else b + (tol1 if xm > 0 else -tol1)
        fb = f(b)
    raise MaxIters(f"bracketed_root did not converge in {ctx.max_iters} iterations")


def scan_grid(lo, hi, n, ctx=None, spacing="linear"):
    """n+1 points from lo to hi. 'geometric' spaces x-lo geometrically, which
    resolves features crowded near the left end."""
    mp = _ctx(ctx).mp
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    if spacing == "linear":
        return [lo + (hi - lo) * i / n for i in range(n + 1)]
    if spacing == "geometric":
        w = hi - lo
        # smallest offset 2^-40 of the width
        pts = [lo + w * mp.power(2, -40 * (1 - mp.mpf(i) / n)) for i in range(1, n + 1)]
        return [lo] + pts
    raise DomainError(f"unknown spacing {spacing!r}")


def sign_scan(f, lo, hi, ctx=None, n=None, spacing="linear", open_left=False):
    """All grid brackets where f changes sign on [lo, hi].

    Exact zeros on the grid are skipped over (the bracket spans them).
    With open_left the point lo itself is not evaluated.
    """
    ctx = _ctx(ctx)
    n = ctx.scan_points if n is None else n
    pts = scan_grid(lo, hi, n, ctx, spacing)
    if open_left:
        pts = pts[1:]
    out = []
    prev_x, prev_s = None, 0
    for x in pts:
        s = sign(f(x))
        if s == 0:
            continue
        if prev_s and s != prev_s:
            out.append(Bracket(prev_x, x, prev_s, s))
        prev_x, prev_s = x, s
    return out


def certified_unique_root(f, lo, hi, ctx=None, n=None, spacing="linear", open_left=False):
    """Root of f on [lo, hi] plus the scan certificate that it is the only
    sign change on the grid. Raises NoSignChange or VerificationFailure."""
    brackets = sign_scan(f, lo, hi, ctx, n, spacing, open_left)
    if not brackets:
        raise NoSignChange(f"no sign change found on [{lo}, {hi}]")
    if len(brackets) > 1:
        raise VerificationFailure(f"{len(brackets)} sign changes found where one was expected")
    return bracketed_root(f, brackets[0], ctx)


def real_polynomial_roots(coeffs, ctx=None):
    """Real roots of sum(c[i] z**(n-i)), highest degree first, ascending.

    mpmath.polyroots (Durand-Kerner) at extended precision, real filter, then a
    few Newton steps to polish each real root.
    """
    ctx = _ctx(ctx)
    mp = ctx.mp
    c = [mp.mpf(v) for v in coeffs]
    scale = max((abs(v) for v in c), default=mp.zero)
    if scale == 0:
        raise DegenerateLeadingCoefficient("all coefficients are zero")
    c = [v / scale for v in c]
    if abs(c[0]) <= mp.eps:
        raise DegenerateLeadingCoefficient("leading coefficient vanishes")
    if len(c) == 1:
        return []
    roots = mp.polyroots(c, maxsteps=400, extraprec=2 * ctx.mantissa_bits, error=False, cleanup=True)
    imag_tol = mp.power(2, -ctx.mantissa_bits // 3)
    out = []
    for r in roots:
        r = mp.mpc(r)
        if abs(r.imag) > imag_tol * (1 + abs(r.real)):
            continue
        x = r.real
        for _ in range(8):
            val, der = mp.polyval(c, x, derivative=True)
            if der == 0:
                break
            step = val / der
            x -= step
            if abs(step) <= mp.eps * (1 + abs(x)):
                break
        out.append(x)
    return sorted(out)
