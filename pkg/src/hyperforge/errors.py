"""Exception types shared across the package."""


class HyperforgeError(Exception):
    """Base class for all package-specific errors."""


class DomainError(HyperforgeError):
    """An argument lies outside the mathematical domain of an operation."""


class TermCapExceeded(HyperforgeError):
    """A series loop hit the configured max_terms cap before converging."""


class NonConvergent(HyperforgeError):
    """Partial sums diverge in magnitude."""


class NearZeroOnTorus(HyperforgeError):
    """The torus-quadrature integrand came too close to a zero of P."""


class FractionalLeadingPower(HyperforgeError):
    """An eta quotient cannot be expanded with integer exponents."""


class DivergesError(HyperforgeError):
    """An L-series does not converge at the requested point."""


class InconsistentFunctionalEquation(HyperforgeError):
    """Smoothed L-value is unstable under the free smoothing parameter."""


class UnknownIdError(HyperforgeError):
    """No catalog entry with the requested id."""


class CacheCorrupt(HyperforgeError):
    """A coefficient cache file failed its integrity check."""
