"""Exception hierarchy. Each class maps onto one CLI exit status."""

from __future__ import annotations


class AbelTauberError(Exception):
    """Base class for all package errors."""

    exit_status = 3


class ConfigurationError(AbelTauberError, ValueError):
    """Malformed input: bad descriptor, missing bound, out-of-domain argument."""

    exit_status = 3


class BoundViolation(ConfigurationError):
    """A declared bound was contradicted by an actually computed value."""

    def __init__(self, what: str, index: int, value, bound):
        self.what = what
        self.index = index
        self.value = value
        self.bound = bound
        super().__init__(f"declared {what} bound {bound} violated at index {index}: {value}")


class ResourceLimitError(AbelTauberError):
    """A configured runtime guard (window length, iterate size, ...) was hit."""

    exit_status = 2

    def __init__(self, message: str, partial: dict | None = None):
        super().__init__(message)
        self.partial = partial or {}


class SearchExhausted(ResourceLimitError):
    """A bounded search reached its cap without finding a witness."""

    def __init__(self, stage: str, cap: int, partial: dict | None = None):
        self.stage = stage
        self.cap = cap
        super().__init__(f"search '{stage}' found nothing below cap {cap}", partial)


class SoundnessError(AbelTauberError):
    """A premise was verified but the matching conclusion failed.

    That would falsify the implementation, so callers are expected to stop.
    """

    exit_status = 1
