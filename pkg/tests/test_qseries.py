"""Tests for q-Pochhammer products, eta quotients, G/M, nome, and the
modular parameterizing functions."""

from fractions import Fraction as Fr

import mpmath
import pytest

from hyperforge.errors import DomainError
from hyperforge.precision import PrecisionContext
from hyperforge.qseries import (
    EtaQuotientSpec,
    G12_CUSP,
    QPoint,
    S2_SPEC,
    V1_SPEC,
    eisenstein_G,
    eisenstein_M,
    eta_quotient_value,
    nome,
    qpoch_inf,
    s_func,
    t_func,
    v_func,
)

CTX = PrecisionContext(192)


def test_qpoint_domain():
    with pytest.raises(DomainError):
        QPoint.coerce(1.2, CTX)
    with pytest.raises(DomainError):
        QPoint.coerce(0, CTX)
    assert QPoint.coerce(0, CTX, allow_zero=True) == 0


def test_qpoch_trivial():
    assert qpoch_inf(0, 0.5, CTX).value == 1
    v = qpoch_inf(1, 0.5, CTX)
    assert v.value == 0


def test_qpoch_pentagonal_signs():
    # (q;q)_inf = 1 - q - q^2 + q^5 + q^7 - q^12 - ... ; compare against the
    # direct truncated polynomial product as an independent oracle
    q = CTX.mpf(1) / 10
    v = qpoch_inf(q, q, CTX)
    N = 40
    coeffs = [0] * (N + 1)
    coeffs[0] = 1
    for n in range(1, N + 1):
        # multiply by (1 - q^n)
        for m in range(N, n - 1, -1):
            coeffs[m] -= coeffs[m - n]
    oracle = sum(CTX.mpf(c) * q**i for i, c in enumerate(coeffs))
    assert abs(v.value - oracle) < CTX.mp.mpf(10) ** (-38)  # truncated at q^41
    expected_signs = {0: 1, 1: -1, 2: -1, 5: 1, 7: 1, 12: -1, 15: -1, 22: 1, 26: 1}
    for i, s in expected_signs.items():
        assert coeffs[i] == s
    for i in range(27):
        if i not in expected_signs:
            assert coeffs[i] == 0


def test_qpoch_vs_mpmath():
    with mpmath.workdps(70):
        ref = mpmath.qp(mpmath.mpf(1) / 7, mpmath.mpf(1) / 7)
    v = qpoch_inf(Fr(1, 7), Fr(1, 7), CTX)
    assert abs(v.value - CTX.mpf(ref)) < CTX.mp.mpf(10) ** (-55)
    assert abs(v.value - CTX.mpf(ref)) <= v.err


def test_eta_quotient_empty_and_trivial():
    with pytest.raises(ValueError):
        EtaQuotientSpec({}, 0)
    spec = EtaQuotientSpec({1: 1}, 0)
    v = eta_quotient_value(spec, 0, CTX)
    assert v.value == 1


def test_eta_quotient_v1_matches_direct_composition():
    # v1 = q^(1/2) (q;q^2)^6 / (q^3;q^6)^6, assembled here from qpoch_inf
    # directly; the spec form uses (q;q^2) = (q;q)/(q^2;q^2) etc.
    q = CTX.mpf(1) / 10
    direct = (
        CTX.mp.sqrt(q)
        * qpoch_inf(q, q**2, CTX).value ** 6
        / qpoch_inf(q**3, q**6, CTX).value ** 6
    )
    v = eta_quotient_value(V1_SPEC, q, CTX)
    assert abs(v.value - direct) < CTX.mp.mpf(10) ** (-50)
    # and v_func agrees with both
    w = v_func(1, q, CTX)
    assert abs(w.value - direct) < CTX.mp.mpf(10) ** (-50)


def test_eta_quotient_g_cusp_form_coefficients():
    # g = q (q^2;q^2)^3 (q^6;q^6)^3 = q - 3q^3 + 2q^7 + 9q^9 - 22q^13 + ...
    # oracle: direct truncated polynomial expansion
    q = CTX.mpf(1) / 10
    N = 40
    arr = [0] * (N + 1)
    arr[0] = 1
    for d, e in ((2, 3), (6, 3)):
        for _ in range(e):
            for n in range(1, N // d + 1):
                for m in range(N, d * n - 1, -1):
                    arr[m] -= arr[m - d * n]
    poly = sum(CTX.mpf(c) * q ** (i + 1) for i, c in enumerate(arr))
    v = eta_quotient_value(G12_CUSP, q, CTX)
    assert abs(v.value - poly) < CTX.mp.mpf(10) ** (-38)
    assert arr[:13] == [1, 0, -3, 0, 0, 0, 2, 0, 9, 0, 0, 0, -22]


def test_s2_spec_matches_s_func():
    q = CTX.mpf(1) / 20
    a = eta_quotient_value(S2_SPEC, q, CTX)
    b = s_func(2, q, CTX)
    assert abs(a.value - b.value) < CTX.mp.mpf(10) ** (-50)


def test_G_small_q_leading_term():
    q = CTX.mpf(10) ** (-6)
    v = eisenstein_G(q, CTX)
    assert abs(v.value + CTX.mp.log(q)) / abs(v.value) < CTX.mp.mpf(10) ** (-3)


def test_G_p2_functional_equation():
    q = CTX.mpf(1) / 20
    r = (
        eisenstein_G(q, CTX).value
        + eisenstein_G(-q, CTX).value
        - 9 * eisenstein_G(q**2, CTX).value
        + 4 * eisenstein_G(q**4, CTX).value
    )
    errs = sum(eisenstein_G(w, CTX).err for w in (q, -q, q**2, q**4))
    assert abs(r) < 10 * errs + CTX.mp.mpf(10) ** (-50)


def test_G_p3_functional_equation_complex():
    q = CTX.mpf(1) / 20
    w = CTX.mp.exp(2j * CTX.mp.pi / 3)
    total = (
        eisenstein_G(q, CTX).value
        + eisenstein_G(w * q, CTX).value
        + eisenstein_G(w * w * q, CTX).value
        - 28 * eisenstein_G(q**3, CTX).value
        + 9 * eisenstein_G(q**9, CTX).value
    )
    assert abs(total) < CTX.mp.mpf(10) ** (-48)


def test_G_derivative_is_minus_M_over_q():
    q = CTX.mpf(1) / 20
    h = CTX.mpf(2) ** (-64)
    dG = (eisenstein_G(q + h, CTX).value - eisenstein_G(q - h, CTX).value) / (2 * h)
    M = eisenstein_M(q, CTX).value
    assert abs(q * dG + M) < CTX.mp.mpf(10) ** (-25)


def test_M_trivia_and_refinement():
    assert eisenstein_M(0, CTX).value == 1
    a = eisenstein_M(CTX.mpf(1) / 2, CTX)
    b = eisenstein_M(PrecisionContext(384).mpf(1) / 2, PrecisionContext(384))
    assert abs(a.value - CTX.mpf(b.value)) <= a.err


def test_M_weight4_identity():
    # 1 - 16 sum n^3 q^n/(1-q^n) + 256 sum n^3 q^(4n)/(1-q^(4n))
    #   = (1-2a) 2F1(1/2,1/2;1;a)^4 at q = q_2(a)
    from hyperforge.hypergeom import HypergeometricSpec, pfq

    a = CTX.mpf(1) / 10
    q = nome(2, a, CTX).value
    M1 = eisenstein_M(q, CTX).value
    M4 = eisenstein_M(q**4, CTX).value
    # rebuild the two Lambert sums from M values: M = 1 + 240 S  =>  S = (M-1)/240
    S1 = (M1 - 1) / 240
    S4 = (M4 - 1) / 240
    lhs = 1 - 16 * S1 + 256 * S4
    f = pfq(HypergeometricSpec([Fr(1, 2), Fr(1, 2)], [1], a), CTX)
    rhs = (1 - 2 * a) * f.value**4
    assert abs(lhs - rhs) < CTX.mp.mpf(10) ** (-45)


def test_nome_symmetric_point():
    v = nome(2, CTX.mpf(1) / 2, CTX)
    assert abs(v.value - CTX.mp.exp(-CTX.mp.pi)) < CTX.mp.mpf(10) ** (-50)


def test_nome_domain():
    with pytest.raises(DomainError):
        nome(2, 0, CTX)
    with pytest.raises(DomainError):
        nome(5, 0.3, CTX)


def test_multiplier_at_nome_is_rational():
    # s_j(q_j(alpha)) = {16, 27, 64} / (alpha (1 - alpha))
    a = CTX.mpf(1) / 10
    for j, c in ((2, 16), (3, 27), (4, 64)):
        q = nome(j, a, CTX).value
        v = s_func(j, q, CTX)
        target = c / (a * (1 - a))
        assert abs(v.value - target) / target < CTX.mp.mpf(10) ** (-45)


def test_t2_rational_point():
    # t2 at q = q_2(alpha(p)) with alpha = p(2+p)^3/(1+2p)^3
    p = CTX.mpf(1) / 100
    alpha = p * (2 + p) ** 3 / (1 + 2 * p) ** 3
    q = nome(2, alpha, CTX).value
    v = t_func(2, q, CTX)
    target = -4 * (1 - p**2) ** 2 / (p * (2 + p) * (1 + 2 * p))
    assert abs(v.value - target) / abs(target) < CTX.mp.mpf(10) ** (-45)


def test_v_reciprocal_roundtrip():
    q = CTX.mpf(1) / 10
    v = v_func(1, q, CTX)
    assert abs(v.value * (1 / v.value) - 1) < 8 * CTX.ulp


def test_v_branches_at_negative_q():
    q = CTX.mpf(1) / 10
    principal = v_func(2, -q, CTX)
    positive = v_func(2, -q, CTX, sqrt_branch="positive")
    # principal branch is purely imaginary, positive branch real
    assert abs(CTX.mp.re(principal.value)) < CTX.mp.mpf(10) ** (-50)
    assert abs(CTX.mp.im(principal.value) - positive.value) < CTX.mp.mpf(10) ** (-50)


def test_truncation_soundness():
    # halving the truncation threshold (via more working bits) stays within err
    q = CTX.mpf(1) / 5
    coarse = qpoch_inf(q, q, PrecisionContext(128))
    fine = qpoch_inf(q, q, PrecisionContext(256))
    assert abs(coarse.value - fine.value) <= coarse.err
