"""Tests for the precision core: contexts, combinatorics, summation."""

import math
from fractions import Fraction

import pytest

from hyperforge.errors import NonConvergent, TermCapExceeded
from hyperforge.precision import (
    HEURISTIC,
    RIGOROUS,
    AppValue,
    PrecisionContext,
    binomial,
    pochhammer,
    sum_with_tail,
)


def test_context_validation():
    with pytest.raises(ValueError):
        PrecisionContext(working_bits=32)
    with pytest.raises(ValueError):
        PrecisionContext(max_terms=4)
    ctx = PrecisionContext(128)
    assert ctx.working_bits == 128
    assert ctx.mp.prec == 128 + 64


def test_contexts_are_independent():
    a = PrecisionContext(64)
    b = PrecisionContext(512)
    pa = a.mp.pi
    pb = b.mp.pi
    assert a.mp.prec == 128 and b.mp.prec == 576
    # the two pi values agree on their common prefix
    assert abs(a.mp.mpf(pb) - pa) < a.mp.mpf(2) ** (-120)


def test_determinism():
    for _ in range(3):
        c1 = PrecisionContext(192)
        c2 = PrecisionContext(192)
        x1 = c1.mp.exp(c1.mpf(1) / 3)
        x2 = c2.mp.exp(c2.mpf(1) / 3)
        assert x1 == x2  # bit-identical


def test_binomial_small_cases():
    assert binomial(4, 2) == 6
    assert binomial(0, 0) == 1
    assert binomial(7, 9) == 0
    assert binomial(7, -1) == 0
    # against math.comb on a grid
    for n in range(12):
        for k in range(n + 1):
            assert binomial(n, k) == math.comb(n, k)


def test_pochhammer():
    assert pochhammer(Fraction(1, 2), 3) == Fraction(15, 8)
    assert pochhammer(Fraction(7, 3), 0) == 1
    for n in range(8):
        assert pochhammer(1, n) == math.factorial(n)
    # zero factors propagate exactly
    assert pochhammer(Fraction(-2), 4) == 0


def test_sum_geometric_rigorous():
    ctx = PrecisionContext(128)
    mp = ctx.mp

    def terms():
        t = mp.mpf(1)
        while True:
            yield t
            t = t / 2

    out = sum_with_tail(terms(), ctx, tail_majorant=lambda n: mp.mpf(2) ** (-n))
    assert out.rigor == RIGOROUS
    assert abs(out.value - 2) <= out.err
    assert out.err < mp.mpf(2) ** (-120)


def test_sum_all_zero():
    ctx = PrecisionContext(128)
    out = sum_with_tail(iter([ctx.mpf(0)] * 10), ctx)
    assert out.value == 0
    assert out.err == 0
    assert out.rigor == RIGOROUS


def test_sum_exponential_vs_independent_exp():
    # oracle: mpmath's exp(1), an independent path
    ctx = PrecisionContext(192)
    mp = ctx.mp

    def terms():
        t = mp.mpf(1)
        n = 0
        while True:
            yield t
            n += 1
            t = t / n

    # factorial tail: sum_{m>n} 1/m! < 2/(n+1)!
    fact = [1]
    for i in range(1, 400):
        fact.append(fact[-1] * i)

    out = sum_with_tail(terms(), ctx, tail_majorant=lambda n: mp.mpf(2) / fact[n + 1])
    assert out.rigor == RIGOROUS
    assert abs(out.value - mp.e) <= out.err + 10 * ctx.ulp


def test_sum_heuristic_mode():
    ctx = PrecisionContext(128)
    mp = ctx.mp

    def terms():
        t = mp.mpf(1)
        while True:
            yield t
            t = t / 3

    out = sum_with_tail(terms(), ctx)
    assert out.rigor == HEURISTIC
    assert abs(out.value - mp.mpf(3) / 2) <= out.err


def test_sum_term_cap():
    ctx = PrecisionContext(128, max_terms=100)
    mp = ctx.mp

    def slow():
        n = 0
        while True:
            n += 1
            yield mp.mpf(1) / n

    with pytest.raises(TermCapExceeded):
        sum_with_tail(slow(), ctx)


def test_sum_divergence_detected():
    ctx = PrecisionContext(128)
    mp = ctx.mp

    def bad():
        t = mp.mpf(1)
        while True:
            yield t
            t = t * 4

    with pytest.raises(NonConvergent):
        sum_with_tail(bad(), ctx)


def test_monotone_refinement():
    # increasing working_bits by 64 moves the value by less than the old err
    base = PrecisionContext(128)
    fine = PrecisionContext(192)

    def geom(ctx):
        mp = ctx.mp

        def terms():
            t = mp.mpf(1)
            while True:
                yield t
                t = t * mp.mpf("0.7")

        return sum_with_tail(terms(), ctx, tail_majorant=lambda n: mp.mpf("0.7") ** n * 4)

    v1 = geom(base)
    v2 = geom(fine)
    assert abs(v2.value - v1.value) < v1.err


def test_appvalue_scaled():
    ctx = PrecisionContext(128)
    v = AppValue(ctx.mpf(3), ctx.mpf("1e-30"), RIGOROUS)
    w = v.scaled(ctx.mpf(-2))
    assert w.value == -6
    assert w.err == ctx.mpf("2e-30")
