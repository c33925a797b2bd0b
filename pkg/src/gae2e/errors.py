"""Exception hierarchy shared across the package."""


class GAE2EError(Exception):
    """Base class for all package errors."""


class ConfigError(GAE2EError, ValueError):
    """Invalid configuration or arguments."""


class DuplicateName(ConfigError):
    pass


class InvalidBounds(ConfigError):
    pass


class DimensionMismatch(GAE2EError, ValueError):
    pass


class OutOfBounds(GAE2EError, ValueError):
    pass


class BadBitWidth(GAE2EError, ValueError):
    pass


class LengthMismatch(GAE2EError, ValueError):
    pass


class PopulationTooSmall(ConfigError):
    pass


class UnevaluatedIndividual(GAE2EError):
    pass


class DegenerateLabels(GAE2EError, ValueError):
    """AUC requested for single-class data."""


class EmptyHistory(GAE2EError, ValueError):
    pass


class NonFiniteInput(GAE2EError, ValueError):
    pass


class Diverged(GAE2EError, ArithmeticError):
    """Surrogate training produced a non-finite loss."""


class EvaluatorFailure(GAE2EError):
    """An evaluation attempt failed (timeout, bad exit, malformed reply)."""


class Timeout(EvaluatorFailure):
    pass


class MalformedResponse(EvaluatorFailure):
    pass


class NonZeroExit(EvaluatorFailure):
    pass


class BindFailure(GAE2EError, OSError):
    pass


class MasterUnreachable(GAE2EError, ConnectionError):
    pass


class ProtocolError(GAE2EError):
    pass


class MalformedLog(GAE2EError, ValueError):
    pass
