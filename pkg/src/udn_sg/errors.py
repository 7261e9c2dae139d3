"""Exception hierarchy shared by all modules."""


class UDNError(Exception):
    """Base class for every error raised by udn_sg."""


class DomainError(UDNError, ValueError):
    """An argument lies outside the domain of the function."""


class SingularityError(DomainError):
    """A path-loss function was evaluated at its singular point."""


class DivergenceError(DomainError):
    """An infinite sum or integral does not converge for these parameters."""


class UnsupportedCaseError(UDNError, ValueError):
    """No formula is available for the requested scenario."""


class ConvergenceError(UDNError, RuntimeError):
    """A series or quadrature exhausted its budget before reaching tolerance."""


class TruncationError(ConvergenceError):
    """A lattice product or sum did not converge within the maximum radius."""
