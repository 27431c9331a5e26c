"""Mahler-measure functions as convergent series, a direct torus-quadrature
oracle, binomial-sum sequences, and the Bessel Laplace-transform identity.

The five functions are the log-Mahler measures of the three-variable families

    g1(u) = m(u + x + 1/x + y + 1/y + z + 1/z)                      |u| > 6
    g2(u) = m(-u + 4 + (x+1/x)(y+1/y) + (x+1/x)(z+1/z) + (y+1/y)(z+1/z))
                                                                    |u| > 16
    f2(u) = 2 m(u^(1/2) + (x+1/x)(y+1/y)(z+1/z))                    |u| > 64
    f3(u) = m(u - (x+1/x)^2 (y+1/y)^2 (1+z)^3 z^-2)                 |u| > 108
    f4(u) = 4 m(x^4 + y^4 + z^4 + 1 + u^(1/4) x y z)                |u| > 256

f2, f3, f4 reduce to log(u) minus a 5F4 tail; g1 and g2 expand in the
central binomial sums b_n and the Domb numbers a_n.  The quadrature oracle
integrates log|P| over the unit torus with a tensor trapezoid rule, which is
spectrally accurate for torus-nonvanishing P.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Tuple

import numpy as np

from .errors import DomainError, NearZeroOnTorus
from .hypergeom import HypergeometricSpec, pfq, pfq_continued_real
from .precision import (
    HEURISTIC,
    RIGOROUS,
    AppValue,
    PrecisionContext,
    binomial,
    sum_with_tail,
)


# -- binomial-sum sequences ----------------------------------------------------


class BinomialSumCache:
    """Append-only caches for the Domb numbers a_n and the sequence b_n.

    a_n = sum_k C(2n-2k, n-k) C(2k, k) C(n, k)^2
    b_n = C(2n, n) sum_k C(2k, k) C(n, k)^2

    Rows of Pascal's triangle are grown incrementally so that extending the
    cache by one index costs O(n) big-integer operations.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._a = [1]
        self._b = [1]
        self._inner = [1]          # sum_k C(2k,k) C(n,k)^2 for current top n
        self._row = [1]            # C(n, k) row
        self._central = [1]        # C(2k, k), k = 0..n
        self._n = 0

    def _extend_to(self, n: int):
        while self._n < n:
            m = self._n + 1
            row = self._row
            new_row = [1] * (m + 1)
            for k in range(1, m):
                new_row[k] = row[k - 1] + row[k]
            self._central.append(binomial(2 * m, m))
            inner = 0
            a_val = 0
            for k in range(m + 1):
                c = self._central[k] * new_row[k] * new_row[k]
                inner += c
                a_val += self._central[m - k] * c
            self._row = new_row
            self._a.append(a_val)
            self._b.append(self._central[m] * inner)
            self._n = m

    def domb(self, n: int) -> int:
        if n < 0:
            raise DomainError("sequence index must be nonnegative")
        with self._lock:
            self._extend_to(n)
            return self._a[n]

    def bseq(self, n: int) -> int:
        if n < 0:
            raise DomainError("sequence index must be nonnegative")
        with self._lock:
            self._extend_to(n)
            return self._b[n]


_SHARED_CACHE = BinomialSumCache()


def domb_a(n: int, cache: BinomialSumCache = None) -> int:
    """Domb number a_n (1, 4, 28, 256, 2716, ...)."""
    return (cache or _SHARED_CACHE).domb(n)


def seq_b(n: int, cache: BinomialSumCache = None) -> int:
    """b_n = C(2n,n) sum_k C(2k,k) C(n,k)^2 (1, 6, 90, 1860, ...)."""
    return (cache or _SHARED_CACHE).bseq(n)


# -- series representations ----------------------------------------------------

_F_PARAMS = {
    2: ((Fraction(3, 2), Fraction(3, 2), Fraction(3, 2), Fraction(1), Fraction(1)), 8, 64),
    3: ((Fraction(4, 3), Fraction(3, 2), Fraction(5, 3), Fraction(1), Fraction(1)), 12, 108),
    4: ((Fraction(5, 4), Fraction(3, 2), Fraction(7, 4), Fraction(1), Fraction(1)), 24, 256),
}
_F_LOWER = (Fraction(2), Fraction(2), Fraction(2), Fraction(2))


def f_series(j: int, u, ctx: PrecisionContext) -> AppValue:
    """f_j(u) = Re[log u - (c_j/u) 5F4(...; x_j/u)] for u outside the cut.

    Real u must satisfy |u| > x_j (the series radius, which is also the edge
    of the real cut interval); complex u needs |x_j / u| < 1.  For real
    u < -x_j the hypergeometric argument lies in (-1, 0) and the direct
    series applies.
    """
    if j not in _F_PARAMS:
        raise DomainError("f_series index must be 2, 3 or 4")
    upper, c, x = _F_PARAMS[j]
    mp = ctx.mp
    uv = ctx.number(u)
    if abs(uv) <= x:
        raise DomainError(f"f{j} series needs |u| > {x}")
    arg = ctx.mpf(x) / uv
    F = pfq(HypergeometricSpec(upper, _F_LOWER, arg), ctx)
    tailval = (ctx.mpf(c) / uv) * F.value
    value = mp.re(mp.log(uv) - tailval)
    err = abs(ctx.mpf(c) / uv) * F.err + 8 * ctx.ulp * (abs(value) + 1)
    return AppValue(value, err, F.rigor)


def f_series_continued(j: int, u, ctx: PrecisionContext) -> AppValue:
    """The hypergeometric side of f_j continued to real u < 0 of any size.

    For 0 > u > -x_j the Mahler-measure interpretation fails (u is inside the
    cut) but the function log|u| - (c_j/u) F(x_j/u), with F the continuation
    of the 5F4 along the negative axis, is still the analytic object the
    g2/g1 transformation formulas refer to.
    """
    if j not in _F_PARAMS:
        raise DomainError("f_series index must be 2, 3 or 4")
    upper, c, x = _F_PARAMS[j]
    mp = ctx.mp
    uv = ctx.mpf(u)
    if uv >= 0:
        raise DomainError("continued evaluation applies to real u < 0")
    arg = ctx.mpf(x) / uv
    F = pfq_continued_real(upper, _F_LOWER, arg, ctx)
    value = mp.log(abs(uv)) - (ctx.mpf(c) / uv) * F.value
    err = abs(ctx.mpf(c) / uv) * F.err + 8 * ctx.ulp * (abs(value) + 1)
    return AppValue(value, err, HEURISTIC)


def g_series(j: int, u, ctx: PrecisionContext) -> AppValue:
    """g1 (|u| > 6) and g2 (|u| > 16) by their binomial-sum expansions."""
    mp = ctx.mp
    uv = ctx.number(u)
    au = abs(uv)
    if j == 1:
        if au <= 6:
            raise DomainError("g1 series needs |u| > 6")

        def terms():
            n = 1
            w = 1 / (uv * uv)
            wn = w
            while True:
                yield -mp.mpf(seq_b(n)) / (2 * n) * wn
                wn = wn * w
                n += 1

        ratio = 36 / (au * au)
    elif j == 2:
        if au <= 16:
            raise DomainError("g2 series needs |u| > 16")

        def terms():
            n = 1
            w = 1 / uv
            wn = w
            while True:
                yield -mp.mpf(domb_a(n)) / n * wn
                wn = wn * w
                n += 1

        ratio = 16 / au
    else:
        raise DomainError("g_series index must be 1 or 2")

    tail = sum_with_tail(terms(), ctx)
    # sharpen the heuristic tail with the known asymptotic term ratio
    value = mp.re(mp.log(uv)) + mp.re(tail.value)
    err = tail.err * (1 + 4 * ratio / (1 - ratio)) + 8 * ctx.ulp * (abs(value) + 1)
    return AppValue(value, err, HEURISTIC)


# -- torus quadrature oracle ---------------------------------------------------


@dataclass(frozen=True)
class LaurentPolynomial:
    """A Laurent polynomial in up to four variables: exponent vector -> coeff."""

    nvars: int
    terms: tuple

    def __init__(self, nvars: int, terms: Dict[Tuple[int, ...], complex]):
        if not (1 <= nvars <= 4):
            raise ValueError("1 to 4 variables supported")
        items = tuple(sorted((tuple(int(e) for e in k), complex(v))
                             for k, v in terms.items() if v != 0))
        if not items:
            raise ValueError("polynomial needs a nonzero coefficient")
        for k, _ in items:
            if len(k) != nvars:
                raise ValueError("exponent vector arity mismatch")
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", items)


def _eval_log_abs_grid(poly: LaurentPolynomial, N: int) -> np.ndarray:
    """log|P| on the tensor grid theta_i = j/N, evaluated in complex128."""
    theta = np.arange(N) / N
    axes = []
    # distinct exponents per axis, with per-axis phase arrays
    for v in range(poly.nvars):
        exps = sorted({t[v] for t, _ in poly.terms})
        table = {e: np.exp(2j * np.pi * e * theta) for e in exps}
        axes.append(table)
    shape = [N] * poly.nvars
    total = np.zeros(shape, dtype=np.complex128)
    for exps, coeff in poly.terms:
        term = np.asarray(coeff, dtype=np.complex128)
        for v, e in enumerate(exps):
            vec = axes[v][e]
            idx = [None] * poly.nvars
            idx[v] = slice(None)
            term = term * vec[tuple(idx)]
        total = total + term
    return np.log(np.abs(total)), np.min(np.abs(total))


def mahler_torus_integral(poly: LaurentPolynomial, grid_per_dim: int,
                          ctx: PrecisionContext) -> AppValue:
    """Tensor-trapezoid approximation of m(P) = mean of log|P| on the torus.

    Spectrally accurate when P has no torus zeros.  The error estimate
    compares the N and N/2 grids.  Raises NearZeroOnTorus when the min-|P|
    scan drops below 2^(-working_bits/2).  Grids are capped at 256 per
    dimension in 3D/4D; the high-precision path is reserved for 1D/2D.
    """
    mp = ctx.mp
    N = int(grid_per_dim)
    if N < 4:
        raise ValueError("grid_per_dim must be at least 4")
    if poly.nvars >= 3 and N > 256:
        raise ValueError("3D/4D grids are capped at 256 per dimension")

    if poly.nvars <= 2:
        vals = []
        for n in (N // 2, N):
            total = mp.mpf(0)
            mn = None
            pts = [mp.mpf(j) / n for j in range(n)]
            if poly.nvars == 1:
                for t in pts:
                    z = mp.e ** (2j * mp.pi * t)
                    val = sum(c * z**e[0] for e, c in poly.terms)
                    a = abs(val)
                    mn = a if mn is None or a < mn else mn
                    total += mp.log(a) if a > 0 else mp.mpf("-inf")
                vals.append(total / n)
            else:
                for t1 in pts:
                    z1 = mp.e ** (2j * mp.pi * t1)
                    for t2 in pts:
                        z2 = mp.e ** (2j * mp.pi * t2)
                        val = sum(c * z1 ** e[0] * z2 ** e[1] for e, c in poly.terms)
                        a = abs(val)
                        mn = a if mn is None or a < mn else mn
                        total += mp.log(a) if a > 0 else mp.mpf("-inf")
                vals.append(total / (n * n))
            if mn is not None and mn < mp.mpf(2) ** (-ctx.working_bits / 2):
                raise NearZeroOnTorus(f"min |P| on grid = {mn}")
        coarse, fine = vals
    else:
        la_half, mn_half = _eval_log_abs_grid(poly, N // 2)
        la, mn = _eval_log_abs_grid(poly, N)
        thresh = float(mp.mpf(2) ** (-ctx.working_bits / 2))
        if min(mn, mn_half) < thresh:
            raise NearZeroOnTorus(f"min |P| on grid = {min(mn, mn_half)}")
        coarse = mp.mpf(float(np.mean(la_half)))
        fine = mp.mpf(float(np.mean(la)))

    err = abs(fine - coarse) + mp.mpf(1e-14) * (1 + abs(fine))
    return AppValue(fine, err, HEURISTIC)


# -- polynomial builders for the cross-checks ----------------------------------


def g1_polynomial(u) -> LaurentPolynomial:
    return LaurentPolynomial(3, {
        (0, 0, 0): complex(u),
        (1, 0, 0): 1, (-1, 0, 0): 1,
        (0, 1, 0): 1, (0, -1, 0): 1,
        (0, 0, 1): 1, (0, 0, -1): 1,
    })


def g2_polynomial(u) -> LaurentPolynomial:
    # -u + 4 + (x+1/x)(y+1/y) + (x+1/x)(z+1/z) + (y+1/y)(z+1/z), expanded
    terms = {(0, 0, 0): 4.0 - complex(u)}
    for a in (1, -1):
        for b in (1, -1):
            terms[(a, b, 0)] = terms.get((a, b, 0), 0) + 1
            terms[(a, 0, b)] = terms.get((a, 0, b), 0) + 1
            terms[(0, a, b)] = terms.get((0, a, b), 0) + 1
    return LaurentPolynomial(3, terms)


def f4_polynomial(u) -> LaurentPolynomial:
    # x^4 + y^4 + z^4 + 1 + u^(1/4) x y z, real u > 0, positive real root
    r = float(u) ** 0.25
    return LaurentPolynomial(3, {
        (4, 0, 0): 1, (0, 4, 0): 1, (0, 0, 4): 1,
        (0, 0, 0): 1, (1, 1, 1): r,
    })


# -- modified Bessel function and the Laplace-transform identity ---------------


def bessel_I0(u, ctx: PrecisionContext) -> AppValue:
    """I0(2u) = sum_n u^(2n) / n!^2 (note the doubled argument convention)."""
    mp = ctx.mp
    uv = ctx.number(u)
    if uv == 0:
        return AppValue(mp.mpf(1), mp.mpf(0), RIGOROUS)
    w = uv * uv
    aw = abs(w)

    terms_list = []

    def terms():
        t = mp.mpf(1)
        n = 0
        while True:
            terms_list.append(t)
            yield t
            n += 1
            t = t * w / (n * n)

    def majorant(n):
        # ratio |w|/(n+1)^2 < 1/2 once (n+1)^2 > 2|w|
        r = aw / (n + 1) ** 2
        if r >= mp.mpf("0.5"):
            return mp.mpf(1)
        return abs(terms_list[-1]) * r / (1 - r)

    return sum_with_tail(terms(), ctx, tail_majorant=majorant)


def _legendre_nodes(n: int, ctx: PrecisionContext):
    """Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration."""
    mp = ctx.mp

    def legendre_and_derivative(x):
        p0, p1 = mp.mpf(1), x
        for k in range(2, n + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = n * (x * p1 - p0) / (x * x - 1)
        return p1, dp

    nodes = []
    weights = []
    for i in range(1, n // 2 + 1):
        x = mp.cos(mp.pi * (i - mp.mpf(1) / 4) / (n + mp.mpf(1) / 2))
        for _ in range(100):
            p, dp = legendre_and_derivative(x)
            dx = p / dp
            x = x - dx
            if abs(dx) < ctx.ulp * 4:
                break
        _, dp = legendre_and_derivative(x)
        nodes.append(x)
        weights.append(2 / ((1 - x * x) * dp * dp))
    out_x = [-x for x in nodes] + nodes[::-1]
    out_w = list(weights) + weights[::-1]
    if n % 2:
        _, dp = legendre_and_derivative(mp.mpf(0))
        out_x = [-x for x in nodes] + [mp.mpf(0)] + nodes[::-1]
        out_w = list(weights) + [2 / (dp * dp)] + weights[::-1]
    return out_x, out_w


_GL_CACHE: dict = {}


def _gl_rule(n: int, ctx: PrecisionContext):
    key = (n, ctx.working_bits + ctx.guard_bits)
    if key not in _GL_CACHE:
        _GL_CACHE[key] = _legendre_nodes(n, ctx)
    return _GL_CACHE[key]


def gauss_legendre_integrate(f, a, b, ctx: PrecisionContext, panels: int = 4,
                             degree: int = 48) -> AppValue:
    """Integrate f on [a, b] with Gauss-Legendre panels, doubling the panel
    count until two successive passes agree; heuristic err from the last gap."""
    mp = ctx.mp
    a = ctx.mpf(a)
    b = ctx.mpf(b)
    xs, ws = _gl_rule(degree, ctx)
    prev = None
    value = None
    for _ in range(8):
        total = mp.mpf(0)
        h = (b - a) / panels
        for p in range(panels):
            lo = a + p * h
            mid = lo + h / 2
            half = h / 2
            for x, w in zip(xs, ws):
                total += w * f(mid + half * x)
            # accumulate scaled at the end of the panel loop
        total = total * (h / 2)
        prev, value = value, total
        if prev is not None and abs(value - prev) < ctx.eps * (1 + abs(value)):
            return AppValue(value, abs(value - prev) + 8 * ctx.ulp * (1 + abs(value)), HEURISTIC)
        panels *= 2
    return AppValue(value, abs(value - prev), HEURISTIC)


def bessel_laplace_sides(x, ctx: PrecisionContext):
    """Both sides of int_0^inf e^(-3(x+1/x)u) I0(2u)^3 du =
    (x / (3(1+3x^2))) 3F2(1/4,1/2,3/4;1,1; 256 x^2 / (9 (1+3x^2)^4)).

    The integrand decays like e^((6-3(x+1/x))u), so x must keep
    3(x + 1/x) > 6; truncation at U makes the dropped tail < 2^-working_bits.
    """
    mp = ctx.mp
    xv = ctx.mpf(x)
    if not (0 < xv < 1):
        raise DomainError("x must lie in (0, 1)")
    # the 3F2 argument 256 x^2 / (9 (1+3x^2)^4) reaches 1 at x = 1/3; past
    # that point the right side continues onto a second sheet and the
    # identity no longer holds as written
    if 3 * xv >= 1:
        raise DomainError("identity holds for x < 1/3 only")
    decay = 3 * (xv + 1 / xv) - 6
    if decay <= 0:
        raise DomainError("integrand does not decay for this x")
    U = (ctx.working_bits * mp.log(2) + 30) / decay
    rate = 3 * (xv + 1 / xv)

    def integrand(u):
        return mp.exp(-rate * u) * bessel_I0(u, ctx).value ** 3

    lhs = gauss_legendre_integrate(integrand, 0, U, ctx, panels=8)
    # dropped tail: int_U^inf e^(-decay u) du times the subexponential factor
    lhs = AppValue(lhs.value, lhs.err + mp.exp(-decay * U) / decay, lhs.rigor)

    arg = 256 * xv**2 / (9 * (1 + 3 * xv**2) ** 4)
    F = pfq(HypergeometricSpec(
        [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)], [1, 1], arg), ctx)
    pref = xv / (3 * (1 + 3 * xv**2))
    rhs = AppValue(pref * F.value, pref * F.err + 4 * ctx.ulp, F.rigor)
    return lhs, rhs
