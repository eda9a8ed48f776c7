"""Exception hierarchy for trendrec."""

from __future__ import annotations


class TrendRecError(Exception):
    """Base class for all trendrec errors."""


class ValidationError(TrendRecError, ValueError):
    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


class ConfigurationError(TrendRecError, ValueError):
    pass


class ItemSkipped(TrendRecError):
    """Raised when an item yields no keywords and must be excluded."""

    def __init__(self, reference_id: str) -> None:
        super().__init__(f"item {reference_id} produced no keywords")
        self.reference_id = reference_id


class SentimentUnavailable(TrendRecError):
    def __init__(self, trend_name: str, cause: Exception | None = None) -> None:
        super().__init__(f"sentiment unavailable for trend {trend_name!r}: {cause}")
        self.trend_name = trend_name
        self.cause = cause


class DegenerateBatch(TrendRecError, ZeroDivisionError):
    pass


class FutureTrend(TrendRecError):
    pass


class EmptyStore(TrendRecError):
    pass


class IngestionError(TrendRecError):
    """A feed row could not be parsed; carries the 1-based line number."""

    def __init__(self, path: str, line: int, message: str) -> None:
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class CorruptFeed(TrendRecError):
    pass
