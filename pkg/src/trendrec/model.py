"""Core domain types and identifier/datetime normalization."""

from __future__ import annotations

import re
import statistics
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Optional

from .errors import ValidationError

_ADDRESS_RE = re.compile(r"^0x[0-9a-fA-F]{40}$")
_TOKEN_RE = re.compile(r"^[0-9]+$")
_LEADING_HASH_RE = re.compile(r"^[#\s]+")


def canonical_reference_id(contract_address: str, token_id: str) -> str:
    """Join a contract address and token id into ``<address>:<token_id>``."""
    contract_address = (contract_address or "").strip()
    token_id = str(token_id if token_id is not None else "").strip()
    if not _ADDRESS_RE.match(contract_address):
        raise ValidationError("contract_address", f"not a 0x-prefixed 40-hex address: {contract_address!r}")
    if not _TOKEN_RE.match(token_id):
        raise ValidationError("token_id", f"not a decimal digit string: {token_id!r}")
    return f"{contract_address.lower()}:{token_id}"


def split_reference_id(reference_id: str) -> tuple[str, str]:
    parts = reference_id.split(":")
    if len(parts) != 2:
        raise ValidationError("reference_id", f"expected exactly one ':' in {reference_id!r}")
    canonical = canonical_reference_id(parts[0], parts[1])
    address, token = canonical.split(":")
    return address, token


def normalize_trend_name(name_raw: str) -> str:
    """Lowercase, strip leading ``#``, trim and collapse internal whitespace."""
    text = _LEADING_HASH_RE.sub("", (name_raw or "").lower())
    text = " ".join(text.split())
    if not text:
        raise ValidationError("name", f"empty after normalization: {name_raw!r}")
    return text


def normalize_phrase(text: str) -> str:
    return " ".join(text.split()).lower()


def ensure_utc(dt: datetime, field_name: str = "datetime") -> datetime:
    if dt.tzinfo is None or dt.utcoffset() is None:
        raise ValidationError(field_name, "naive datetime; a UTC offset is required")
    return dt.astimezone(timezone.utc)


def parse_datetime(text: str, field_name: str = "datetime") -> datetime:
    """Parse an RFC 3339 timestamp (``Z`` or numeric offset) into UTC."""
    if not isinstance(text, str) or not text.strip():
        raise ValidationError(field_name, "missing timestamp")
    raw = text.strip()
    if raw[-1] in "zZ":
        raw = raw[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(raw)
    except ValueError as exc:
        raise ValidationError(field_name, f"not RFC 3339: {text!r}") from exc
    return ensure_utc(dt, field_name)


def format_datetime(dt: datetime) -> str:
    dt = ensure_utc(dt)
    if dt.microsecond:
        return dt.strftime("%Y-%m-%dT%H:%M:%S.%fZ")
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class Item:
    reference_id: str
    name: str
    description: str
    collection_name: str
    collection_description: str
    fetched_at: datetime

    def __post_init__(self) -> None:
        address, token = split_reference_id(self.reference_id)
        object.__setattr__(self, "reference_id", f"{address}:{token}")
        object.__setattr__(self, "fetched_at", ensure_utc(self.fetched_at, "fetched_at"))


@dataclass(frozen=True)
class ItemProfile:
    reference_id: str
    keywords: tuple[str, ...]

    def __post_init__(self) -> None:
        seen: dict[str, None] = {}
        for kw in self.keywords:
            norm = normalize_phrase(kw)
            if norm:
                seen.setdefault(norm, None)
        if not seen:
            raise ValidationError("keywords", f"profile {self.reference_id} has no keywords")
        object.__setattr__(self, "keywords", tuple(seen))


@dataclass(frozen=True)
class Trend:
    source: str
    name_raw: str
    captured_at: datetime
    volume: Optional[int] = None
    location: str = "worldwide"
    sample_texts: tuple[str, ...] = ()
    name_norm: str = field(init=False)

    def __post_init__(self) -> None:
        if not self.source:
            raise ValidationError("source", "empty source")
        if self.volume is not None:
            if isinstance(self.volume, bool) or int(self.volume) != self.volume or self.volume < 0:
                raise ValidationError("volume", f"must be a non-negative integer: {self.volume!r}")
            object.__setattr__(self, "volume", int(self.volume))
        object.__setattr__(self, "name_norm", normalize_trend_name(self.name_raw))
        object.__setattr__(self, "captured_at", ensure_utc(self.captured_at, "captured_at"))
        object.__setattr__(self, "sample_texts", tuple(self.sample_texts))


@dataclass(frozen=True)
class TrendBatch:
    source: str
    captured_at: datetime
    trends: tuple[Trend, ...]
    median_volume: Optional[float] = None
    min_volume: Optional[int] = None

    @classmethod
    def from_trends(cls, source: str, captured_at: datetime, trends) -> "TrendBatch":
        captured_at = ensure_utc(captured_at, "captured_at")
        trends = tuple(trends)
        for t in trends:
            if t.source != source or t.captured_at != captured_at:
                raise ValidationError("trends", f"trend {t.name_norm!r} does not belong to batch {source}@{captured_at}")
        volumes = [t.volume for t in trends if t.volume is not None]
        if volumes:
            median = float(statistics.median(volumes))
            minimum = min(volumes)
        else:
            median = minimum = None
        return cls(source, captured_at, trends, median, minimum)

    @property
    def key(self) -> tuple[str, datetime]:
        return (self.source, self.captured_at)


@dataclass(frozen=True)
class TrendSentiment:
    trend_name_norm: str
    neg: float
    neu: float
    pos: float
    adjusted_score: float


@dataclass(frozen=True)
class TrendMatch:
    reference_id: str
    keyword: str
    trend_name_norm: str
    source: str
    trend_captured_at: datetime
    impact: float
    sentiment: float
    match_flag: int = 1
    user_priority: float = 1.0
    # Raw trend volume, kept so impacts can be re-derived under another no-volume policy.
    volume: Optional[int] = None

    def __post_init__(self) -> None:
        if self.impact < 0:
            raise ValidationError("impact", f"negative impact {self.impact}")
        if self.match_flag != 1:
            raise ValidationError("match_flag", "only matches (m = 1) are materialized")
        if self.user_priority <= 0:
            raise ValidationError("user_priority", f"must be positive: {self.user_priority}")


class NoVolumePolicy(str, Enum):
    MIN_MINUS_ONE = "min"
    MEDIAN_OMIT = "omit"


class MatchMode(str, Enum):
    EXACT_PHRASE = "exact"
    TOKEN_CONTAINMENT = "token"


@dataclass(frozen=True)
class ScoringConfig:
    mu: float = 0.1
    novolume_policy: NoVolumePolicy = NoVolumePolicy.MEDIAN_OMIT
    positive_multiplier: float = 2.0
    include_negative_in_topn: bool = False
    match_mode: MatchMode = MatchMode.EXACT_PHRASE
    lookback_days: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.mu > 0:
            raise ValidationError("mu", f"must be > 0: {self.mu}")
        if not self.positive_multiplier > 0:
            raise ValidationError("positive_multiplier", f"must be > 0: {self.positive_multiplier}")
        if self.lookback_days is not None and self.lookback_days < 0:
            raise ValidationError("lookback_days", f"must be >= 0: {self.lookback_days}")
        object.__setattr__(self, "novolume_policy", NoVolumePolicy(self.novolume_policy))
        object.__setattr__(self, "match_mode", MatchMode(self.match_mode))


@dataclass(frozen=True)
class ContributingMatch:
    match: TrendMatch
    days: int
    term: float


@dataclass(frozen=True)
class ItemTrendScore:
    reference_id: str
    scored_at: datetime
    total_score: float
    n_sources: int
    contributing_matches: tuple[ContributingMatch, ...] = ()
