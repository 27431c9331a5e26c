"""hyperforge: high-precision special functions and a verification catalog
for hypergeometric, q-series, Mahler-measure and L-series identities."""

from .precision import AppValue, PrecisionContext, binomial, pochhammer, sum_with_tail
from .hypergeom import HypergeometricSpec, pfq, pfq_continued_real, pfq_unit
from .qseries import (
    EtaQuotientSpec,
    QPoint,
    eisenstein_G,
    eisenstein_M,
    eta_quotient_value,
    nome,
    qpoch_inf,
    s_func,
    t_func,
    v_func,
)
from .mahler import (
    LaurentPolynomial,
    bessel_I0,
    domb_a,
    f_series,
    g_series,
    mahler_torus_integral,
    seq_b,
)
from .lseries import CoefficientSeries, eta_coeffs, lvalue_direct, lvalue_smoothed
from .catalog import list_checks, run_all, run_check
from .result import CheckResult

__version__ = "0.1.0"

__all__ = [
    "AppValue", "PrecisionContext", "binomial", "pochhammer", "sum_with_tail",
    "HypergeometricSpec", "pfq", "pfq_continued_real", "pfq_unit",
    "EtaQuotientSpec", "QPoint", "eisenstein_G", "eisenstein_M",
    "eta_quotient_value", "nome", "qpoch_inf", "s_func", "t_func", "v_func",
    "LaurentPolynomial", "bessel_I0", "domb_a", "f_series", "g_series",
    "mahler_torus_integral", "seq_b",
    "CoefficientSeries", "eta_coeffs", "lvalue_direct", "lvalue_smoothed",
    "list_checks", "run_all", "run_check", "CheckResult",
    "__version__",
]
