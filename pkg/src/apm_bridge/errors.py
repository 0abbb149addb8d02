"""Exception hierarchy shared by every module."""


class ApmBridgeError(Exception):
    """Base class for library errors."""


class DomainError(ApmBridgeError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class IntegrationError(ApmBridgeError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Carries the best estimate and its error bound so callers can decide
    whether a degraded answer is still usable.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf"), subdivisions=0):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r}, subdivisions={subdivisions})")
        self.estimate = estimate
        self.error = error
        self.subdivisions = subdivisions


class UnsupportedVariantError(ApmBridgeError, NotImplementedError):
    """The fading model variant does not provide the requested quantity."""


class DivergentMomentError(DomainError):
    """The requested SNR moment does not exist."""


class CapabilityError(ApmBridgeError, TypeError):
    """An input lacks a capability the operation needs (e.g. complex continuation)."""


class ExistenceError(DomainError):
    """A Hurst exponent outside the convergence window of a curve."""


class RangeError(DomainError):
    """A value is outside the range an operation accepts."""


class SetParseError(ApmBridgeError, ValueError):
    """Malformed measurement-set file."""

    def __init__(self, message, path=None, line=None, field=None):
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.line = line
        self.field = field
