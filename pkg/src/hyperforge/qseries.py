"""q-Pochhammer products, eta quotients, Eisenstein-type series, the elliptic
nome, and the modular parameterizing functions used by the identity catalog.

All series accept complex q inside the punctured unit disk.  Fractional powers
and logarithms take principal branches throughout; for the level-2 multiplier
family evaluated at negative real arguments, the half-integral power of q is
genuinely branch-ambiguous, so v_func/t_func expose an explicit branch switch
(see sqrt_branch) and the catalog reports branch-dependent agreement as a
distinct verdict instead of silently flipping signs.

The G function here is the real-valued potential

    G(q) = Re[-log q + 240 sum_{n>=1} n^2 log(1 - q^n)],

whose q-derivative is -M(q)/q with M the weight-4 Eisenstein series.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .errors import DomainError
from .hypergeom import HypergeometricSpec, pfq
from .precision import (
    HEURISTIC,
    RIGOROUS,
    AppValue,
    PrecisionContext,
    combine_rigor,
)


@dataclass(frozen=True)
class QPoint:
    """A point q with 0 < |q| < 1 (q = 0 only where a limit is intended)."""

    q: object

    @staticmethod
    def coerce(q, ctx: PrecisionContext, allow_zero: bool = False):
        qv = ctx.number(q.q if isinstance(q, QPoint) else q)
        aq = abs(qv)
        if aq >= 1:
            raise DomainError(f"|q| = {aq} >= 1")
        if aq == 0 and not allow_zero:
            raise DomainError("q = 0 is outside the series domain")
        return qv


@dataclass(frozen=True)
class EtaQuotientSpec:
    """A formal product q^q_power prod_d (q^d; q^d)_inf^e_d."""

    factors: tuple
    q_power: Fraction

    def __init__(self, factors: Mapping[int, int], q_power: Union[Fraction, int]):
        items = tuple(sorted((int(d), int(e)) for d, e in factors.items() if e != 0))
        if not items:
            raise ValueError("eta quotient needs at least one nonzero exponent")
        for d, _ in items:
            if d <= 0:
                raise ValueError("divisors must be positive")
        object.__setattr__(self, "factors", items)
        object.__setattr__(self, "q_power", Fraction(q_power))

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(e for _, e in self.factors), 2)


# cusp forms and parameterizing functions used throughout the catalog
G12_CUSP = EtaQuotientSpec({2: 3, 6: 3}, 1)
F8_CUSP = EtaQuotientSpec({1: 2, 2: 1, 4: 1, 8: 2}, 1)
F15_CUSP = EtaQuotientSpec({1: 1, 3: 1, 5: 1, 15: 1}, 1)
V1_SPEC = EtaQuotientSpec({1: 6, 2: -6, 3: -6, 6: 6}, Fraction(1, 2))
S2_SPEC = EtaQuotientSpec({1: -24, 2: 48, 4: -24}, -1)


def qpoch_inf(x, q, ctx: PrecisionContext) -> AppValue:
    """(x; q)_inf = prod_{n>=0} (1 - x q^n), truncated with a rigorous bound.

    The truncation index N satisfies |x| |q|^N / (1 - |q|) < 2^-working_bits,
    and the dropped factors multiply the result by 1 + delta with
    |delta| <= 2 * that bound, giving a relative error bound.
    """
    mp = ctx.mp
    qv = QPoint.coerce(q, ctx, allow_zero=True)
    xv = ctx.number(x)
    if xv == 0:
        return AppValue(mp.mpf(1), mp.mpf(0), RIGOROUS)
    aq = abs(qv)
    ax = abs(xv)
    target = ctx.eps / 4
    if aq == 0:
        v = 1 - xv
        return AppValue(v, ctx.ulp * abs(v), RIGOROUS)
    # smallest N with ax * aq^N / (1 - aq) < target
    import math

    bound0 = ax / (1 - aq)
    if bound0 <= target:
        N = 0
    else:
        N = int(math.ceil(float(mp.log(bound0 / target) / mp.log(1 / aq)))) + 1
    prod = mp.mpf(1)
    xqn = xv
    for n in range(N):
        prod = prod * (1 - xqn)
        xqn = xqn * qv
    tail_rel = 2 * ax * aq**N / (1 - aq)
    err = abs(prod) * (tail_rel + (N + 2) * ctx.ulp)
    return AppValue(prod, err, RIGOROUS)


def eta_quotient_value(spec: EtaQuotientSpec, q, ctx: PrecisionContext) -> AppValue:
    """Evaluate q^q_power prod_d (q^d; q^d)_inf^e_d with principal branches."""
    mp = ctx.mp
    if not isinstance(spec, EtaQuotientSpec):
        raise TypeError("spec must be an EtaQuotientSpec")
    qv = QPoint.coerce(q, ctx, allow_zero=True)
    if qv == 0:
        if spec.q_power == 0:
            return AppValue(mp.mpf(1), mp.mpf(0), RIGOROUS)
        raise DomainError("q = 0 with a nonzero leading power")
    value = mp.mpf(1)
    rel_err = mp.mpf(0)
    for d, e in spec.factors:
        base = qpoch_inf(qv**d, qv**d, ctx)
        value = value * base.value**e
        rel_err += abs(e) * (base.err / abs(base.value) if base.value != 0 else mp.mpf(1))
    p = spec.q_power
    if p != 0:
        if isinstance(qv, mp.mpf) and qv > 0:
            lead = qv ** ctx.mpf(p)
        else:
            lead = mp.exp(ctx.mpf(p) * mp.log(qv))  # principal branch
        value = value * lead
    err = abs(value) * (rel_err + 16 * ctx.ulp)
    return AppValue(value, err, RIGOROUS)


def _lambert_tail_start(ctx: PrecisionContext, aq, power: int):
    """N with (N+1)^power * aq^(N+1) summable below eps, plus the bound ratio.

    Uses n^k <= (N+1)^k * rho^(n-N-1) for n > N with rho = ((N+2)/(N+1))^k,
    valid since n^k is log-concave in n; requires aq * rho < 1.
    """
    import math

    mp = ctx.mp
    target = ctx.eps / 4
    N = 8
    while True:
        rho = (mp.mpf(N + 2) / (N + 1)) ** power
        if aq * rho < 1:
            bound = (mp.mpf(N + 1)) ** power * aq ** (N + 1) / (1 - aq * rho)
            if bound < target:
                return N, bound
        N = int(math.ceil(N * 1.5)) + 1
        if N > ctx.max_terms:
            raise DomainError("|q| too close to 1 for the Eisenstein tail bound")


def eisenstein_G(q, ctx: PrecisionContext) -> AppValue:
    """G(q) = Re[-log q + 240 sum n^2 log(1 - q^n)] with a rigorous tail."""
    mp = ctx.mp
    qv = QPoint.coerce(q, ctx)
    aq = abs(qv)
    N, tail_n2 = _lambert_tail_start(ctx, aq, 2)
    total = -mp.log(qv)
    qn = qv
    for n in range(1, N + 1):
        total = total + 240 * n * n * mp.log(1 - qn)
        qn = qn * qv
    # |log(1 - q^n)| <= |q|^n / (1 - |q|)
    tail = 240 * tail_n2 / (1 - aq)
    err = tail + (N + 4) * ctx.ulp * (abs(total) + 1)
    return AppValue(mp.re(total), err, RIGOROUS)


def eisenstein_M(q, ctx: PrecisionContext) -> AppValue:
    """M(q) = 1 + 240 sum n^3 q^n / (1 - q^n), the weight-4 Eisenstein series."""
    mp = ctx.mp
    qv = QPoint.coerce(q, ctx, allow_zero=True)
    if qv == 0:
        return AppValue(mp.mpf(1), mp.mpf(0), RIGOROUS)
    aq = abs(qv)
    N, tail_n3 = _lambert_tail_start(ctx, aq, 3)
    total = mp.mpf(1)
    qn = qv
    for n in range(1, N + 1):
        total = total + 240 * n**3 * qn / (1 - qn)
        qn = qn * qv
    tail = 240 * tail_n3 / (1 - aq)
    err = tail + (N + 4) * ctx.ulp * (abs(total) + 1)
    return AppValue(total, err, RIGOROUS)


def nome(j: int, alpha, ctx: PrecisionContext) -> AppValue:
    """The elliptic nome q_j(alpha) in Ramanujan's theory of signature j.

    q_j(alpha) = exp(-pi/sin(pi/j) * 2F1(1/j,1-1/j;1;1-alpha)/2F1(1/j,1-1/j;1;alpha))
    for alpha in (0, 1) and j in {2, 3, 4}.
    """
    if j not in (2, 3, 4):
        raise DomainError("signature j must be 2, 3 or 4")
    mp = ctx.mp
    a = ctx.mpf(alpha)
    if not (0 < a < 1):
        raise DomainError("alpha must lie in (0, 1)")
    aj = Fraction(1, j)
    top = pfq(HypergeometricSpec([aj, 1 - aj], [1], 1 - a), ctx)
    bot = pfq(HypergeometricSpec([aj, 1 - aj], [1], a), ctx)
    ratio = top.value / bot.value
    rel = top.err / top.value + bot.err / bot.value
    expo = -mp.pi / mp.sin(mp.pi / j) * ratio
    value = mp.exp(expo)
    err = abs(value) * (abs(expo) * rel + 8 * ctx.ulp)
    return AppValue(value, err, combine_rigor(top.rigor, bot.rigor))


# -- modular parameterizing functions -----------------------------------------


def _qp(x, q, ctx):
    return qpoch_inf(x, q, ctx)


def v_func(j: int, q, ctx: PrecisionContext, sqrt_branch: str = "principal") -> AppValue:
    """The half-integral-weight multipliers v1, v2 from the g1/g2 expansions.

    v1 = q^(1/2) (q;q^2)^6 / (q^3;q^6)^6
    v2 = q^(1/2) (q^2;q^2)^6 (q^3;q^3)^2 (q^12;q^12)^4
               / ((q;q)^2 (q^4;q^4)^4 (q^6;q^6)^6)

    sqrt_branch picks the branch of q^(1/2) at negative real q: "principal"
    gives i sqrt(|q|); "positive" uses sqrt(|q|), which is the convention the
    rational parameterizations of t2 at -q follow.
    """
    mp = ctx.mp
    qv = QPoint.coerce(q, ctx)
    if j == 1:
        parts = [(_qp(qv, qv**2, ctx), 6), (_qp(qv**3, qv**6, ctx), -6)]
    elif j == 2:
        parts = [
            (_qp(qv**2, qv**2, ctx), 6),
            (_qp(qv**3, qv**3, ctx), 2),
            (_qp(qv**12, qv**12, ctx), 4),
            (_qp(qv, qv, ctx), -2),
            (_qp(qv**4, qv**4, ctx), -4),
            (_qp(qv**6, qv**6, ctx), -6),
        ]
    else:
        raise DomainError("v_func index must be 1 or 2")
    value = mp.mpf(1)
    rel = mp.mpf(0)
    for av, e in parts:
        value = value * av.value**e
        rel += abs(e) * av.err / abs(av.value)
    if sqrt_branch == "positive":
        root = mp.sqrt(abs(qv))
    elif sqrt_branch == "principal":
        root = mp.sqrt(qv)
    else:
        raise ValueError("sqrt_branch must be 'principal' or 'positive'")
    value = value * root
    err = abs(value) * (rel + 16 * ctx.ulp)
    return AppValue(value, err, RIGOROUS)


def t_func(j: int, q, ctx: PrecisionContext, sqrt_branch: str = "principal") -> AppValue:
    """t1 = v1 + 1/v1 and t2 = -(v2 - 1/v2)^2."""
    v = v_func(j, q, ctx, sqrt_branch=sqrt_branch)
    mp = ctx.mp
    rel = v.err / abs(v.value)
    if j == 1:
        value = v.value + 1 / v.value
        err = (abs(v.value) + 1 / abs(v.value)) * rel + 8 * ctx.ulp * (abs(value) + 1)
    else:
        w = v.value - 1 / v.value
        value = -(w**2)
        err = 2 * abs(w) * (abs(v.value) + 1 / abs(v.value)) * rel + 8 * ctx.ulp * (abs(value) + 1)
    return AppValue(value, err, v.rigor)


def s_func(j: int, q, ctx: PrecisionContext) -> AppValue:
    """The degree-j multiplier functions s2, s3, s4.

    s2 = q^-1 (-q; q^2)^24
    s3 = q^-1 (27 q C + 1/C)^2          with C = (q^3;q^3)^6 / (q;q)^6
    s4 = q^-1 (q^2;q^2)^24 / (q;q)^24 * (16 q A + 1/A)^4
                                         with A = (q;q)^4 (q^4;q^4)^8 / (q^2;q^2)^12
    """
    mp = ctx.mp
    qv = QPoint.coerce(q, ctx)
    if j == 2:
        base = _qp(-qv, qv**2, ctx)
        value = base.value**24 / qv
        rel = 24 * base.err / abs(base.value)
    elif j == 3:
        e1 = _qp(qv**3, qv**3, ctx)
        e2 = _qp(qv, qv, ctx)
        C = e1.value**6 / e2.value**6
        relC = 6 * (e1.err / abs(e1.value) + e2.err / abs(e2.value))
        inner = 27 * qv * C + 1 / C
        d_inner = (abs(27 * qv * C) + abs(1 / C)) * relC
        value = inner**2 / qv
        rel = 2 * d_inner / abs(inner)
    elif j == 4:
        e1 = _qp(qv, qv, ctx)
        e2 = _qp(qv**2, qv**2, ctx)
        e4 = _qp(qv**4, qv**4, ctx)
        r1 = e1.err / abs(e1.value)
        r2 = e2.err / abs(e2.value)
        r4 = e4.err / abs(e4.value)
        A = e1.value**4 * e4.value**8 / e2.value**12
        relA = 4 * r1 + 8 * r4 + 12 * r2
        inner = 16 * qv * A + 1 / A
        d_inner = (abs(16 * qv * A) + abs(1 / A)) * relA
        pref = e2.value**24 / e1.value**24
        rel_pref = 24 * (r1 + r2)
        value = pref * inner**4 / qv
        rel = rel_pref + 4 * d_inner / abs(inner)
    else:
        raise DomainError("s_func index must be 2, 3 or 4")
    err = abs(value) * (rel + 32 * ctx.ulp)
    return AppValue(value, err, RIGOROUS)
