"""Exception hierarchy shared by all modules."""


class HardyOpsError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(HardyOpsError):
    """A numerical procedure failed to reach its declared tolerance."""


class SamplingRadiusFailure(NumericalError):
    """No admissible sampling circle was found for a composition."""


class ToleranceFailure(NumericalError):
    """An error estimate exceeded the requested tolerance."""


class QuadratureError(NumericalError):
    """A quadrature did not converge under node doubling."""


class RootFindingFailure(NumericalError):
    """A computed root failed its residual check."""


class MapError(HardyOpsError):
    """Problems with a self-map description."""


class MapSyntaxError(MapError):
    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class MapSemanticError(MapError):
    def __init__(self, message, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.message = message
        self.line = line
        self.column = column


class NotSelfMap(MapError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class UnsupportedMap(MapError):
    """The map has no preimage procedure."""


class NotInImage(MapError):
    """No preimage of the requested point lies in the disk."""


class NotUnivalent(MapError):
    """A univalent-only procedure was given a map not declared univalent."""


class PreconditionFailure(HardyOpsError):
    """An operation's documented precondition does not hold."""
