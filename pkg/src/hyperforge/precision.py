"""Arbitrary-precision arithmetic substrate and error-controlled summation.

Every numeric operation in the package runs against a PrecisionContext, which
owns a private mpmath context set to working_bits + guard_bits of binary
precision.  Contexts are immutable after construction and never share mutable
state, so any number of them can be used concurrently.

Values travel as AppValue: a high-precision real or complex number paired with
an error-radius estimate and a rigor flag.  err is "rigorous" only when it was
derived from a proven tail majorant plus a rounding budget; otherwise the
value is labeled "heuristic" (typically: two precisions agreed, or a
geometric-ratio tail estimate was used).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Union

from mpmath.ctx_mp import MPContext

from .errors import DomainError, NonConvergent, TermCapExceeded

RIGOROUS = "rigorous"
HEURISTIC = "heuristic"

Number = Union[int, float, Fraction, str]


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision, guard bits, and the global series-term cap.

    working_bits is the precision at which results are reported; all internal
    arithmetic runs at working_bits + guard_bits.  max_terms bounds every
    series loop in the package so that divergent inputs cannot spin forever.
    Identical (inputs, context) pairs produce bit-identical results.
    """

    working_bits: int = 128
    guard_bits: int = 64
    max_terms: int = 10_000_000

    def __post_init__(self):
        if self.working_bits < 64:
            raise ValueError("working_bits must be >= 64")
        if self.guard_bits < 1:
            raise ValueError("guard_bits must be >= 1")
        if self.max_terms < 16:
            raise ValueError("max_terms must be >= 16")
        mp = MPContext()
        mp.prec = self.working_bits + self.guard_bits
        object.__setattr__(self, "_mp", mp)

    # -- raw mpmath access ---------------------------------------------------

    @property
    def mp(self) -> MPContext:
        """The private mpmath context (prec = working_bits + guard_bits)."""
        return self._mp  # type: ignore[attr-defined]

    def mpf(self, x: Number):
        if isinstance(x, Fraction):
            return self.mp.mpf(x.numerator) / x.denominator
        return self.mp.mpf(x)

    def mpc(self, re: Number = 0, im: Number = 0):
        return self.mp.mpc(self.mpf(re), self.mpf(im))

    def number(self, x):
        """Coerce an int/float/Fraction/str/complex/mpf/mpc to this context."""
        if isinstance(x, complex) or hasattr(x, "_mpc_"):
            return self.mp.mpc(x)
        if isinstance(x, Fraction):
            return self.mpf(x)
        return self.mp.mpf(x)

    @property
    def eps(self):
        """2^-working_bits, the reporting-precision unit."""
        return self.mp.mpf(2) ** (-self.working_bits)

    @property
    def ulp(self):
        """2^-(working_bits + guard_bits), the internal rounding unit."""
        return self.mp.mpf(2) ** (-self.working_bits - self.guard_bits)

    def with_bits(self, working_bits: int) -> "PrecisionContext":
        return PrecisionContext(working_bits, self.guard_bits, self.max_terms)

    def bumped(self, extra_bits: int) -> "PrecisionContext":
        return PrecisionContext(self.working_bits + extra_bits, self.guard_bits, self.max_terms)


@dataclass
class AppValue:
    """An approximate value with an error radius and a rigor label.

    For complex values err bounds the modulus of the total error.
    """

    value: object
    err: object
    rigor: str = HEURISTIC

    @property
    def is_complex(self) -> bool:
        return hasattr(self.value, "imag") and self.value.imag != 0

    def abs_value(self):
        return abs(self.value)

    def scaled(self, factor) -> "AppValue":
        """Multiply by an exactly-known constant."""
        return AppValue(self.value * factor, self.err * abs(factor), self.rigor)

    def __repr__(self):
        return f"AppValue({self.value} +- {self.err}, {self.rigor})"


def combine_rigor(*flags: str) -> str:
    return RIGOROUS if all(f == RIGOROUS for f in flags) else HEURISTIC


def app_add(ctx: PrecisionContext, *vals: AppValue) -> AppValue:
    total = ctx.mpf(0)
    err = ctx.mpf(0)
    for v in vals:
        total = total + v.value
        err = err + v.err
    err = err + len(vals) * ctx.ulp * (abs(total) + 1)
    return AppValue(total, err, combine_rigor(*[v.rigor for v in vals]))


def exact_value(ctx: PrecisionContext, x) -> AppValue:
    """Wrap a context-rounded exact quantity (err = one ulp)."""
    v = ctx.number(x)
    return AppValue(v, ctx.ulp * (abs(v) + 1), RIGOROUS)


# -- exact combinatorics -----------------------------------------------------


def binomial(n: int, k: int) -> int:
    """C(n, k) for n >= 0, with out-of-range k giving 0."""
    if n < 0:
        raise DomainError("binomial: n must be nonnegative")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def pochhammer(a: Union[Fraction, int], n: int) -> Fraction:
    """Rising factorial a (a+1) ... (a+n-1) over exact rationals; (a)_0 = 1."""
    if n < 0:
        raise DomainError("pochhammer: n must be nonnegative")
    a = Fraction(a)
    out = Fraction(1)
    for j in range(n):
        out *= a + j
    return out


# -- error-controlled summation ----------------------------------------------


def sum_with_tail(
    terms: Iterable,
    ctx: PrecisionContext,
    tail_majorant: Optional[Callable[[int], object]] = None,
) -> AppValue:
    """Sum a series with either a proven tail majorant or heuristic stopping.

    terms yields term n (n = 0, 1, ...) at full internal precision.  When
    tail_majorant is given, tail_majorant(n) must bound |sum_{m>n} term_m|;
    summation stops once it drops below 2^-working_bits and the result is
    rigorous.  Without a majorant, summation stops once two successive
    partial sums agree to working_bits, and the reported err combines a
    geometric tail estimate with the rounding budget (heuristic).

    Raises TermCapExceeded at ctx.max_terms and NonConvergent when the terms
    grow beyond any reasonable magnitude for many steps in a row.
    """
    mp = ctx.mp
    partial = mp.mpf(0)
    max_abs = mp.mpf(0)
    n = -1
    agree_streak = 0
    growth_streak = 0
    prev_abs_term = None
    last_abs_term = mp.mpf(0)
    prev_nonzero_ratio = None
    huge = mp.mpf(2) ** (ctx.working_bits + 64)

    it: Iterator = iter(terms)
    exhausted = False
    while True:
        n += 1
        if n >= ctx.max_terms:
            raise TermCapExceeded(f"series did not converge within {ctx.max_terms} terms")
        try:
            t = next(it)
        except StopIteration:
            exhausted = True
            break
        partial = partial + t
        a = abs(partial)
        if a > max_abs:
            max_abs = a
        at = abs(t)

        if prev_abs_term is not None and at > prev_abs_term:
            growth_streak += 1
            # only heuristic mode polices divergence: a caller-provided
            # majorant asserts the series structure (terms may legitimately
            # grow for a while, e.g. Bessel series at large argument)
            if tail_majorant is None and growth_streak >= 64 and at > huge:
                raise NonConvergent("partial sums diverge in magnitude")
        else:
            growth_streak = 0
        if prev_abs_term is not None and prev_abs_term > 0 and at > 0:
            prev_nonzero_ratio = at / prev_abs_term
        prev_abs_term = at
        last_abs_term = at

        if tail_majorant is not None:
            bound = mp.mpf(tail_majorant(n))
            if bound < ctx.eps:
                rounding = (n + 2) * ctx.ulp * max_abs
                return AppValue(partial, bound + rounding, RIGOROUS)
        else:
            # two successive partial sums agreeing to working_bits; a stream
            # that has produced nothing but zeros so far proves nothing, so
            # the scale test requires a nonzero partial-sum history
            if max_abs > 0 and at <= ctx.eps * max(a, ctx.eps):
                agree_streak += 1
                if agree_streak >= 2 and n >= 4:
                    break
            else:
                agree_streak = 0

    rounding = (n + 2) * ctx.ulp * max_abs
    if exhausted:
        # finite series summed completely: only rounding remains
        return AppValue(partial, rounding, RIGOROUS)
    # geometric tail estimate from the observed term ratio
    r = prev_nonzero_ratio if prev_nonzero_ratio is not None else mp.mpf("0.5")
    r = min(max(r, mp.mpf("0.01")), mp.mpf("0.9"))
    tail_est = 8 * last_abs_term * r / (1 - r)
    return AppValue(partial, tail_est + rounding, HEURISTIC)
