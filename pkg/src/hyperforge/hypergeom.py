"""Generalized hypergeometric functions with exact rational parameters.

Three evaluation routes live here:

* pfq: direct summation of sum_n prod(a_i)_n / prod(b_j)_n x^n / n! with a
  proven geometric tail bound.  For p = q+1 the series needs |x| < 1; the
  term-ratio majorant comes from an exact rational scan (see _ratio_start).
* pfq_unit: the value at x = 1 when sum(b) - sum(a) > 0, by Richardson
  extrapolation of partial sums in half-integer powers of 1/N.
* pfq_continued_real: analytic continuation of a p = q+1 series to real
  x < -1 by Taylor-stepping the hypergeometric ODE down the negative axis,
  which carries no branch cut (the only finite branch point is x = 1).

Parameters are exact Fractions end to end; only the argument is approximate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import DomainError
from .precision import (
    HEURISTIC,
    RIGOROUS,
    AppValue,
    PrecisionContext,
    sum_with_tail,
)

ParamList = Sequence[Union[Fraction, int]]


def _as_fractions(params: ParamList) -> tuple:
    return tuple(Fraction(a) for a in params)


@dataclass(frozen=True)
class HypergeometricSpec:
    """Numerator/denominator parameter lists plus the argument."""

    upper: tuple
    lower: tuple
    argument: object

    def __init__(self, upper: ParamList, lower: ParamList, argument):
        up = _as_fractions(upper)
        lo = _as_fractions(lower)
        for b in lo:
            if b.denominator == 1 and b <= 0:
                raise DomainError(f"lower parameter {b} is zero or a negative integer")
        if len(up) > len(lo) + 1:
            raise DomainError("p > q + 1: series has zero radius of convergence")
        object.__setattr__(self, "upper", up)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "argument", argument)

    @property
    def gap(self) -> Fraction:
        """sum(lower) - sum(upper); positive means convergence at x = 1."""
        return sum(self.lower, Fraction(0)) - sum(self.upper, Fraction(0))


def _ratio_start(upper: tuple, lower: tuple) -> int:
    """Smallest m* with prod(m+a) <= prod(m+b)(m+1) for all m >= m*.

    Past m*, |t_{m+1}/t_m| <= |x|, giving a geometric tail.  The difference
    D(m) = prod(m+b)(m+1) - prod(m+a) is a polynomial with positive leading
    coefficient whenever p <= q+1 and gap > -1; a Cauchy bound on its roots
    makes the exact integer scan finite.
    """
    # polynomial coefficients of D over Q, low to high degree
    def poly_mul(c, root):
        out = [Fraction(0)] * (len(c) + 1)
        for i, v in enumerate(c):
            out[i] += v * root
            out[i + 1] += v
        return out

    cb = [Fraction(1)]
    for b in lower:
        cb = poly_mul(cb, b)
    cb = poly_mul(cb, Fraction(1))
    ca = [Fraction(1)]
    for a in upper:
        ca = poly_mul(ca, a)
    n = max(len(ca), len(cb))
    ca += [Fraction(0)] * (n - len(ca))
    cb += [Fraction(0)] * (n - len(cb))
    d = [b - a for a, b in zip(ca, cb)]
    while d and d[-1] == 0:
        d.pop()
    if not d:
        return 0
    lead = d[-1]
    if lead < 0:
        raise DomainError("term ratio does not fall below |x|; series diverges")
    cauchy = 1 + max(abs(c / lead) for c in d[:-1]) if len(d) > 1 else 0
    m_star = 0
    m = 0
    limit = int(cauchy) + 2
    while m <= limit:
        val = Fraction(0)
        for c in reversed(d):
            val = val * m + c
        if val <= 0:
            m_star = m + 1
        m += 1
    return m_star


def _term_generator(ctx: PrecisionContext, upper, lower, x):
    """Yield the series terms using an exact-rational ratio times x."""
    mp = ctx.mp
    t = mp.mpf(1)
    n = 0
    while True:
        yield t
        num = 1
        den = 1
        for a in upper:
            num *= a.numerator + n * a.denominator
            den *= a.denominator
        for b in lower:
            num *= b.denominator
            den *= b.numerator + n * b.denominator
        den *= n + 1
        if num == 0:
            return  # terminating series: a polynomial
        t = t * x * num / den
        n += 1


def pfq(spec: HypergeometricSpec, ctx: PrecisionContext) -> AppValue:
    """Evaluate pFq by direct summation.

    Rigorous when |x| <= 1/2 (geometric majorant from the term ratio past an
    exactly-computed index); labeled heuristic for larger arguments even
    though the same bound drives the stopping rule.  Raises DomainError for
    p = q+1 with |x| >= 1.
    """
    mp = ctx.mp
    x = ctx.number(spec.argument)
    ax = abs(x)
    p, q = len(spec.upper), len(spec.lower)
    if p == q + 1 and ax >= 1:
        raise DomainError("p = q+1 series requires |x| < 1")
    if ax == 0:
        return AppValue(mp.mpf(1), ctx.ulp, RIGOROUS)

    m_star = _ratio_start(spec.upper, spec.lower)
    gen = _term_generator(ctx, spec.upper, spec.lower, x)

    if ax < 1:
        # past m_star the ratio is bounded by |x| (p = q+1) or by |x| * R(m)
        # with R(m) <= 1, so a geometric tail in |x| applies; for p < q+1 and
        # |x| >= 1 fall back to the heuristic stopping rule.
        terms = []

        def capture(g):
            for t in g:
                terms.append(t)
                yield t

        ratio = ax

        def majorant(n):
            if n < m_star or not terms:
                return mp.mpf(1)
            return abs(terms[-1]) * ratio / (1 - ratio)

        out = sum_with_tail(capture(gen), ctx, tail_majorant=majorant)
        if ax > mp.mpf("0.5"):
            out.rigor = HEURISTIC
        return out
    out = sum_with_tail(gen, ctx)
    return out


def pfq_unit(upper: ParamList, lower: ParamList, ctx: PrecisionContext) -> AppValue:
    """pFq at argument 1 via Richardson extrapolation of partial sums.

    Terms decay like n^(-1-gap) with gap = sum(b) - sum(a), so the partial
    sums carry an asymptotic expansion in powers N^(-gap-k).  Extrapolating
    over N, 2N, 4N, ... removes those layers one by one.  Requires gap > 0;
    heuristic, with the err taken from the last extrapolation level.
    """
    up = _as_fractions(upper)
    lo = _as_fractions(lower)
    spec = HypergeometricSpec(up, lo, 1)  # validates parameters
    gap = spec.gap
    if gap <= 0:
        raise DomainError(f"series diverges at x = 1 (gap = {gap})")

    mp = ctx.mp
    levels = 10
    base = 128
    checkpoints = [base * 2**j for j in range(levels)]
    if checkpoints[-1] > ctx.max_terms:
        raise DomainError("max_terms too small for unit-argument extrapolation")

    sums = []
    partial = mp.mpf(0)
    gen = _term_generator(ctx, up, lo, mp.mpf(1))
    idx = 0
    for n, t in enumerate(gen):
        partial = partial + t
        if n + 1 == checkpoints[idx]:
            sums.append(partial)
            idx += 1
            if idx == len(checkpoints):
                break
    if idx < len(checkpoints):
        # the series terminated early: the partial sum is already exact
        return AppValue(partial, len(checkpoints) * ctx.ulp * abs(partial), RIGOROUS)

    g = ctx.mpf(gap)
    table = list(sums)
    level_estimates = [table[-1]]
    for k in range(levels - 1):
        w = mp.mpf(2) ** (g + k)
        table = [(w * table[j + 1] - table[j]) / (w - 1) for j in range(len(table) - 1)]
        level_estimates.append(table[-1])
    value = table[0]
    err_extrap = abs(level_estimates[-1] - level_estimates[-2])
    err = 8 * err_extrap + checkpoints[-1] * ctx.ulp * abs(value)
    return AppValue(value, err, HEURISTIC)


# -- analytic continuation along the negative real axis -----------------------

_ODE_CACHE: dict = {}


def _stirling2(m: int):
    S = [[Fraction(0)] * (m + 1) for _ in range(m + 1)]
    S[0][0] = Fraction(1)
    for k in range(1, m + 1):
        for j in range(1, k + 1):
            S[k][j] = S[k - 1][j - 1] + Fraction(j) * S[k - 1][j]
    return S


def _theta_poly(roots):
    cs = [Fraction(1)]
    for r in roots:
        new = [Fraction(0)] * (len(cs) + 1)
        for j, c in enumerate(cs):
            new[j + 1] += c
            new[j] += c * Fraction(r)
        cs = new
    return cs


def _ode_coefficients(upper: tuple, lower: tuple):
    """Coefficient polynomials p_k(x) of the pFq ODE sum_k p_k F^(k) = 0.

    The operator is theta * prod(theta + b - 1) - x * prod(theta + a) with
    theta = x d/dx, rewritten via theta^k = sum_j S2(k, j) x^j D^j.
    Returned as a list of {x-power: Fraction} dicts indexed by k.
    """
    key = (upper, lower)
    if key in _ODE_CACHE:
        return _ODE_CACHE[key]
    A = _theta_poly(upper)
    B = _theta_poly([Fraction(0)] + [b - 1 for b in lower])
    m = max(len(A), len(B)) - 1
    S = _stirling2(m)
    P = [dict() for _ in range(m + 1)]
    for k, c in enumerate(B):
        if c == 0:
            continue
        for j in range(k + 1):
            if S[k][j]:
                P[j][j] = P[j].get(j, Fraction(0)) + c * S[k][j]
    for k, c in enumerate(A):
        if c == 0:
            continue
        for j in range(k + 1):
            if S[k][j]:
                P[j][j + 1] = P[j].get(j + 1, Fraction(0)) - c * S[k][j]
    _ODE_CACHE[key] = P
    return P


def _series_taylor_at(ctx: PrecisionContext, upper, lower, x0, m: int):
    """Taylor coefficients F^(d)(x0)/d! for d < m by direct summation (|x0| < 1)."""
    mp = ctx.mp
    out = [mp.mpf(0)] * m
    inv_pow = [x0 ** (-d) for d in range(m)]
    c = mp.mpf(1)
    x0n = mp.mpf(1)
    thresh = mp.mpf(2) ** (-(ctx.working_bits + ctx.guard_bits + 30))
    n = 0
    while True:
        mx = mp.mpf(0)
        for d in range(min(n, m - 1) + 1):
            contrib = c * mp.binomial(n, d) * x0n * inv_pow[d]
            out[d] += contrib
            ac = abs(contrib)
            if ac > mx:
                mx = ac
        if n > 4 * m and mx < thresh:
            break
        num = 1
        den = 1
        for a in upper:
            num *= a.numerator + n * a.denominator
            den *= a.denominator
        for b in lower:
            num *= b.denominator
            den *= b.numerator + n * b.denominator
        den *= n + 1
        if num == 0:
            break
        c = c * num / den
        x0n = x0n * x0
        n += 1
    return out


def _taylor_step(ctx: PrecisionContext, P, x0, taylor0, nterms: int):
    """Grow the local Taylor series at x0 from the ODE recurrence and return
    a function that re-expands it (value and derivatives) at x0 + h."""
    mp = ctx.mp
    m = len(taylor0)
    qs = []
    for k in range(m + 1):
        maxi = max(P[k].keys()) if P[k] else 0
        co = [mp.mpf(0)] * (maxi + 1)
        for i, frac in P[k].items():
            v = mp.mpf(frac.numerator) / frac.denominator
            for j in range(i + 1):
                co[j] += v * mp.binomial(i, j) * x0 ** (i - j)
        qs.append(co)
    c = list(taylor0) + [mp.mpf(0)] * (nterms - m)
    lead = qs[m][0]
    for N in range(nterms - m):
        acc = mp.mpf(0)
        for k in range(m + 1):
            for j, qkj in enumerate(qs[k]):
                if qkj == 0:
                    continue
                n = N - j
                if n < 0:
                    continue
                idx = n + k
                if idx >= nterms or (k == m and j == 0):
                    continue
                f = mp.mpf(1)
                for t in range(n + 1, n + k + 1):
                    f *= t
                acc += qkj * f * c[idx]
        f = mp.mpf(1)
        for t in range(N + 1, N + m + 1):
            f *= t
        c[N + m] = -acc / (lead * f)

    def reexpand(h):
        vals = []
        for d in range(m):
            v = mp.mpf(0)
            hp = mp.mpf(1)
            for n in range(d, nterms):
                v += c[n] * mp.binomial(n, d) * hp
                hp *= h
            vals.append(v)
        # crude truncation estimate from the last few contributions
        tail = sum(abs(c[n]) * abs(h) ** n for n in range(nterms - 4, nterms))
        return vals, tail

    return reexpand


def pfq_continued_real(
    upper: ParamList, lower: ParamList, x, ctx: PrecisionContext
) -> AppValue:
    """p = q+1 hypergeometric series continued to real x < 1.

    For |x| small the direct series is used.  For x <= -3/4 the value is
    obtained by integrating the hypergeometric ODE from x = -1/2 along the
    negative real axis with geometrically growing Taylor steps (half the
    distance to the singular point at 0).  No cut is crossed: the function's
    only finite branch point sits at x = +1.
    """
    up = _as_fractions(upper)
    lo = _as_fractions(lower)
    if len(up) != len(lo) + 1:
        raise DomainError("continuation applies to p = q+1 only")
    mp = ctx.mp
    xv = ctx.mpf(x)
    if xv >= 1:
        raise DomainError("continuation is restricted to the cut-free ray x < 1")
    if abs(xv) < mp.mpf("0.75"):
        return pfq(HypergeometricSpec(up, lo, xv), ctx)
    if xv > 0:
        # 0.75 <= x < 1: still inside the disc, direct summation converges
        return pfq(HypergeometricSpec(up, lo, xv), ctx)

    P = _ode_coefficients(up, lo)
    m = len(P) - 1
    x0 = mp.mpf(-1) / 2
    taylor = _series_taylor_at(ctx, up, lo, x0, m)
    nterms = ctx.working_bits + ctx.guard_bits + 64
    acc_err = mp.mpf(0)
    pos = x0
    while pos > xv:
        step = -abs(pos) / 2
        if pos + step < xv:
            step = xv - pos
        reexpand = _taylor_step(ctx, P, pos, taylor, nterms)
        taylor, tail = reexpand(step)
        acc_err += tail
        pos = pos + step
    value = taylor[0]
    err = acc_err + 64 * nterms * ctx.ulp * (abs(value) + 1)
    return AppValue(value, err, HEURISTIC)
