"""Tests for binomial-sum sequences, Mahler series, quadrature, Bessel."""

import math
from fractions import Fraction as Fr

import mpmath
import pytest

from hyperforge.errors import DomainError, NearZeroOnTorus
from hyperforge.mahler import (
    BinomialSumCache,
    LaurentPolynomial,
    bessel_I0,
    bessel_laplace_sides,
    domb_a,
    f4_polynomial,
    f_series,
    f_series_continued,
    g1_polynomial,
    g2_polynomial,
    g_series,
    gauss_legendre_integrate,
    mahler_torus_integral,
    seq_b,
)
from hyperforge.precision import PrecisionContext

CTX = PrecisionContext(128)


def brute_domb(n):
    return sum(
        math.comb(2 * n - 2 * k, n - k) * math.comb(2 * k, k) * math.comb(n, k) ** 2
        for k in range(n + 1)
    )


def brute_b(n):
    return math.comb(2 * n, n) * sum(
        math.comb(2 * k, k) * math.comb(n, k) ** 2 for k in range(n + 1)
    )


def test_sequences_match_brute_force():
    cache = BinomialSumCache()
    for n in range(40):
        assert domb_a(n, cache) == brute_domb(n)
        assert seq_b(n, cache) == brute_b(n)
    assert domb_a(0) == 1 and domb_a(1) == 4 and domb_a(2) == 28
    assert seq_b(1) == 6 and seq_b(2) == 90
    assert domb_a(4) == 2716


def test_sequence_radius_consistency():
    # a_n^(1/n) stays below 16 + 1
    cache = BinomialSumCache()
    for n in range(2, 120, 7):
        assert domb_a(n, cache) ** (1.0 / n) <= 17.0


def test_g_series_domain_guards():
    with pytest.raises(DomainError):
        g_series(1, 5.0, CTX)
    with pytest.raises(DomainError):
        g_series(2, 16.0, CTX)
    with pytest.raises(DomainError):
        g_series(3, 100.0, CTX)


def test_f_series_domain_guards():
    with pytest.raises(DomainError):
        f_series(2, 64.0, CTX)
    with pytest.raises(DomainError):
        f_series(3, -50.0, CTX)  # inside the cut
    with pytest.raises(DomainError):
        f_series(5, 1000.0, CTX)


def test_g2_large_u_limit():
    u = CTX.mpf(10) ** 8
    v = g_series(2, u, CTX)
    assert abs(v.value - CTX.mp.log(u)) < CTX.mp.mpf(10) ** (-7)


def test_f2_matches_raw_central_binomial_sum():
    # f2(u) = log u - sum C(2n,n)^3 u^-n / n, an independent rearrangement
    u = CTX.mpf(128)
    v = f_series(2, u, CTX)
    mp = CTX.mp
    s = mp.log(u)
    for n in range(1, 400):
        t = mp.mpf(math.comb(2 * n, n)) ** 3 / n * u ** (-n)
        s -= t
        if t < mp.mpf(10) ** -45:
            break
    assert abs(v.value - s) < CTX.mp.mpf(10) ** (-36)


def test_f3_cross_representation():
    # f3 via the 5F4 equals log u minus the raw sum of (108/u)-type terms;
    # checked through mpmath's hyper as the independent route
    for u in (200, 500):
        v = f_series(3, u, CTX)
        with mpmath.workdps(50):
            ref = mpmath.log(u) - mpmath.mpf(12) / u * mpmath.hyper(
                [(4, 3), (3, 2), (5, 3), (1, 1), (1, 1)], [2, 2, 2, 2],
                mpmath.mpf(108) / u)
        assert abs(v.value - CTX.mpf(ref)) < CTX.mp.mpf(10) ** (-40)


def test_f_series_complex_argument():
    z = CTX.mpc(150, 80)
    v = f_series(3, z, CTX)
    with mpmath.workdps(50):
        zz = mpmath.mpc(150, 80)
        ref = mpmath.re(mpmath.log(zz) - 12 / zz * mpmath.hyper(
            [(4, 3), (3, 2), (5, 3), (1, 1), (1, 1)], [2, 2, 2, 2], 108 / zz))
    assert abs(v.value - CTX.mpf(ref)) < CTX.mp.mpf(10) ** (-40)


def test_f_series_continued_negative_u():
    # inside-the-cut continuation agrees with the outside-the-cut series
    # where both exist (u < -108)
    u = CTX.mpf(-150)
    a = f_series_continued(3, u, CTX)
    b = f_series(3, u, CTX)
    assert abs(a.value - b.value) < CTX.mp.mpf(10) ** (-34)


def test_quadrature_monomial_and_jensen():
    mp = CTX.mp
    v = mahler_torus_integral(LaurentPolynomial(1, {(1,): 5}), 64, CTX)
    assert abs(v.value - mp.log(5)) < mp.mpf(10) ** (-30)
    v = mahler_torus_integral(LaurentPolynomial(1, {(0,): 2, (1,): 1}), 128, CTX)
    assert abs(v.value - mp.log(2)) < mp.mpf(10) ** (-20)


def test_quadrature_2d():
    # m(4 + x + y) : Jensen in x gives int log max(|4+y|... ) -- instead use
    # the simple product bound m(4 + x + y) vs direct fine-grid value
    mp = CTX.mp
    a = mahler_torus_integral(LaurentPolynomial(2, {(0, 0): 4, (1, 0): 1, (0, 1): 1}), 48, CTX)
    b = mahler_torus_integral(LaurentPolynomial(2, {(0, 0): 4, (1, 0): 1, (0, 1): 1}), 96, CTX)
    assert abs(a.value - b.value) < mp.mpf(10) ** (-12)


def test_quadrature_cross_method_g1():
    s = g_series(1, 8, CTX)
    q = mahler_torus_integral(g1_polynomial(8.0), 64, CTX)
    assert abs(s.value - q.value) < CTX.mp.mpf(10) ** (-6)


def test_quadrature_cross_method_g2():
    s = g_series(2, 32, CTX)
    q = mahler_torus_integral(g2_polynomial(32.0), 64, CTX)
    assert abs(s.value - q.value) < CTX.mp.mpf(10) ** (-6)


def test_quadrature_cross_method_f4():
    s = f_series(4, 512, CTX)
    q = mahler_torus_integral(f4_polynomial(512.0), 64, CTX)
    assert abs(s.value - 4 * q.value) < CTX.mp.mpf(10) ** (-6)


def test_near_zero_scan():
    # P = 1 - x vanishes at the grid point theta = 0
    with pytest.raises(NearZeroOnTorus):
        mahler_torus_integral(LaurentPolynomial(1, {(0,): 1, (1,): -1}), 64, CTX)


def test_gauss_legendre_against_closed_form():
    mp = CTX.mp
    v = gauss_legendre_integrate(lambda t: mp.exp(-t) * t, 0, 10, CTX)
    ref = 1 - 11 * mp.exp(-10)
    assert abs(v.value - ref) < mp.mpf(10) ** (-30)


def test_bessel_I0_trivia():
    assert bessel_I0(0, CTX).value == 1
    # 30-term truncation oracle at u = 1
    mp = CTX.mp
    s = mp.mpf(0)
    for n in range(30):
        s += mp.mpf(1) / mp.factorial(n) ** 2
    v = bessel_I0(1, CTX)
    assert abs(v.value - s) <= v.err + mp.mpf(10) ** (-30)


def test_bessel_I0_squared_coefficients():
    # [u^(2n)] I0(2u)^2 = C(2n,n)/n!^2 : check numerically via finite diffs
    # at tiny u by polynomial fitting on exact series terms instead
    mp = CTX.mp
    u = mp.mpf(1) / 1000
    lhs = bessel_I0(u, CTX).value ** 2
    rhs = sum(mp.mpf(math.comb(2 * n, n)) / mp.factorial(n) ** 2 * u ** (2 * n)
              for n in range(12))
    assert abs(lhs - rhs) < mp.mpf(10) ** (-36)


def test_bessel_laplace_identity():
    lhs, rhs = bessel_laplace_sides(Fr(1, 10), CTX)
    assert abs(lhs.value - rhs.value) < CTX.mp.mpf(10) ** (-10)
    lhs, rhs = bessel_laplace_sides(Fr(1, 4), CTX)
    assert abs(lhs.value - rhs.value) < CTX.mp.mpf(10) ** (-10)


def test_bessel_laplace_domain():
    with pytest.raises(DomainError):
        bessel_laplace_sides(2.0, CTX)
    # past x = 1/3 the hypergeometric argument has crossed its branch point
    # (measured residual there is ~5e-2, so the identity is really gone)
    with pytest.raises(DomainError):
        bessel_laplace_sides(Fr(1, 2), CTX)


def test_bessel_laplace_small_x_linear():
    # both sides vanish linearly in x as x -> 0+
    l1, r1 = bessel_laplace_sides(Fr(1, 100), CTX)
    l2, r2 = bessel_laplace_sides(Fr(1, 200), CTX)
    assert abs(l1.value / l2.value - 2) < 0.05
    assert abs(r1.value / r2.value - 2) < 0.05
