"""Shared exception types.

Every error carries a stable machine-readable ``code`` so the HTTP layer
can map failures onto {code, message, retriable} bodies without string
matching.
"""


class DietwiseError(Exception):
    """Base class; subclasses set a stable code and retriable hint."""

    code = "internal"
    retriable = False

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ValidationError(DietwiseError):
    code = "validation"


class NotFoundError(DietwiseError):
    code = "not_found"


class ConflictError(DietwiseError):
    code = "conflict"


class AuthenticationError(DietwiseError):
    code = "authentication"


class AuthorizationError(DietwiseError):
    code = "authorization"


class ConfigurationError(DietwiseError):
    code = "configuration"


class ParseError(DietwiseError):
    code = "parse"


class ProtocolError(DietwiseError):
    """Remote detector returned a malformed or out-of-contract response."""

    code = "protocol"


class DetectorUnavailableError(DietwiseError):
    code = "detector_unavailable"
    retriable = True


class UpstreamError(DietwiseError):
    """Remote detector answered with a non-success status."""

    code = "upstream"
    retriable = True

    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


class UndefinedMetricError(DietwiseError):
    code = "undefined_metric"

    def __init__(self, message: str, metrics: list[str]):
        super().__init__(message)
        self.metrics = metrics
