"""Exception hierarchy shared by every ha_quotas module."""

from __future__ import annotations


class HAQuotasError(Exception):
    """Base class for all errors raised by ha_quotas."""


class InstanceError(HAQuotasError, ValueError):
    """The instance violates a structural invariant.

    ``subject`` names the applicant or project at fault, when there is one.
    """

    def __init__(self, message: str, subject: str | None = None) -> None:
        self.subject = subject
        super().__init__(message)


class MatchingError(HAQuotasError, ValueError):
    """A matching references unknown identifiers or is not feasible."""


class GuardExceededError(HAQuotasError, RuntimeError):
    """An exponential routine was asked to run past its configured guard."""


class QuotaShapeError(HAQuotasError, ValueError):
    """The instance has lower quotas the requested algorithm cannot handle."""


class FlowNetworkError(HAQuotasError, ValueError):
    """Malformed flow network."""


class X3CError(HAQuotasError, ValueError):
    """Invalid or unnormalized exact-cover instance."""


class ParseError(HAQuotasError, ValueError):
    """Text input could not be parsed; carries the offending line number."""

    def __init__(self, line_no: int, message: str) -> None:
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")
