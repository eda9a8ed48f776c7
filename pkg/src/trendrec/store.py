"""Feed loading and the on-disk match store.

Store layout::

    <store>/
      config.json                     scoring defaults (optional)
      items.jsonl                     items with their extracted keywords
      batches/<source>-<time>.jsonl   one file per ingested trend batch
      matches.jsonl                   every persisted TrendMatch

Every write goes to a temp file in the same directory followed by
``os.replace``, so readers never observe a partial file.
"""

from __future__ import annotations

import json
import logging
import os
import re
import tempfile
from collections import defaultdict
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterable, Mapping, Optional

from .errors import CorruptFeed, IngestionError, ValidationError
from .matching import enumerate_matches
from .model import (
    Item,
    ItemProfile,
    NoVolumePolicy,
    ScoringConfig,
    Trend,
    TrendBatch,
    TrendMatch,
    TrendSentiment,
    canonical_reference_id,
    format_datetime,
    normalize_trend_name,
    parse_datetime,
)
from .scoring import impact_from_stats

log = logging.getLogger(__name__)

_UNSAFE_CHARS = re.compile(r"[^A-Za-z0-9_.-]")


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _read_jsonl(path: Path):
    """Yield ``(lineno, row_or_exception)`` for each non-blank line."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                if not isinstance(row, dict):
                    raise ValueError("row is not a JSON object")
            except ValueError as exc:
                yield lineno, exc
            else:
                yield lineno, row


def _check_corruption(path, bad: int, total: int) -> None:
    if total and bad * 2 > total:
        raise CorruptFeed(f"{path}: {bad} of {total} rows invalid")


# -- feeds -----------------------------------------------------------------


def item_from_row(row: Mapping) -> Item:
    if "reference_id" in row:
        ref = str(row["reference_id"])
        address, _, token = ref.partition(":")
        reference_id = canonical_reference_id(address, token)
    else:
        reference_id = canonical_reference_id(row.get("contract_address"), row.get("token_id"))

    def text(key):
        value = row.get(key) or ""
        if not isinstance(value, str):
            raise ValidationError(key, "must be a string")
        return value

    return Item(
        reference_id=reference_id,
        name=text("name"),
        description=text("description"),
        collection_name=text("collection_name"),
        collection_description=text("collection_description"),
        fetched_at=parse_datetime(row.get("fetched_at"), "fetched_at"),
    )


def item_to_row(item: Item) -> dict:
    row = asdict(item)
    row["fetched_at"] = format_datetime(item.fetched_at)
    return row


def load_items(path) -> list[Item]:
    """Validated items from a JSONL catalog; the latest ``fetched_at`` wins per id."""
    return read_items(path)[0]


def read_items(path) -> tuple[list[Item], int]:
    """Like :func:`load_items` but also returns the number of rejected rows."""
    items: dict[str, Item] = {}
    bad = total = 0
    for lineno, row in _read_jsonl(Path(path)):
        total += 1
        try:
            if isinstance(row, Exception):
                raise row
            item = item_from_row(row)
        except (ValueError, TypeError) as exc:
            bad += 1
            log.warning("%s:%d: skipping item row: %s", path, lineno, exc)
            continue
        prev = items.get(item.reference_id)
        if prev is None or item.fetched_at >= prev.fetched_at:
            items[item.reference_id] = item
    _check_corruption(path, bad, total)
    return list(items.values()), bad


def trend_from_row(row: Mapping) -> Trend:
    for key in ("source", "name", "captured_at"):
        if not row.get(key):
            raise ValidationError(key, "missing")
    volume = row.get("volume")
    if volume is not None and (isinstance(volume, bool) or not isinstance(volume, int)):
        raise ValidationError("volume", f"must be an integer or null: {volume!r}")
    samples = row.get("sample_texts") or []
    if not isinstance(samples, list) or not all(isinstance(s, str) for s in samples):
        raise ValidationError("sample_texts", "must be a list of strings")
    return Trend(
        source=str(row["source"]),
        name_raw=str(row["name"]),
        captured_at=parse_datetime(row["captured_at"], "captured_at"),
        volume=volume,
        location=str(row.get("location") or "worldwide"),
        sample_texts=tuple(samples),
    )


def trend_to_row(trend: Trend) -> dict:
    return {
        "source": trend.source,
        "name": trend.name_raw,
        "name_norm": trend.name_norm,
        "volume": trend.volume,
        "captured_at": format_datetime(trend.captured_at),
        "location": trend.location,
        "sample_texts": list(trend.sample_texts),
    }


def batches_from_trends(trends: Iterable[Trend]) -> list[TrendBatch]:
    groups: dict[tuple[str, datetime], list[Trend]] = defaultdict(list)
    for trend in trends:
        groups[(trend.source, trend.captured_at)].append(trend)
    return [
        TrendBatch.from_trends(source, captured, groups[(source, captured)])
        for source, captured in sorted(groups, key=lambda k: (k[1], k[0]))
    ]


def load_trend_batches(path) -> list[TrendBatch]:
    """Trend batches from a JSONL feed, grouped by ``(source, captured_at)``.

    Batches come back in capture order.
    """
    trends = []
    bad = total = 0
    for lineno, row in _read_jsonl(Path(path)):
        total += 1
        try:
            if isinstance(row, Exception):
                raise row
            trends.append(trend_from_row(row))
        except (ValueError, TypeError) as exc:
            bad += 1
            log.warning("%s:%d: skipping trend row: %s", path, lineno, exc)
    _check_corruption(path, bad, total)
    return batches_from_trends(trends)


def load_priorities(path) -> dict[str, float]:
    priorities = {}
    for lineno, row in _read_jsonl(Path(path)):
        try:
            if isinstance(row, Exception):
                raise row
            value = float(row["priority"])
            if not value > 0:
                raise ValueError(f"priority must be positive: {value}")
            priorities[normalize_trend_name(row["trend_name_norm"])] = value
        except (ValueError, KeyError, TypeError) as exc:
            raise IngestionError(str(path), lineno, f"bad priority row: {exc}") from exc
    return priorities


# -- matches ---------------------------------------------------------------


def match_to_row(match: TrendMatch) -> dict:
    row = asdict(match)
    row["trend_captured_at"] = format_datetime(match.trend_captured_at)
    return row


def match_from_row(row: Mapping) -> TrendMatch:
    data = dict(row)
    data["trend_captured_at"] = parse_datetime(data["trend_captured_at"], "trend_captured_at")
    return TrendMatch(**data)


@dataclass(frozen=True)
class BatchInfo:
    source: str
    captured_at: datetime
    median_volume: Optional[float]
    min_volume: Optional[int]
    n_trends: int

    @property
    def key(self) -> tuple[str, datetime]:
        return (self.source, self.captured_at)


@dataclass(frozen=True)
class IngestSummary:
    source: str
    captured_at: datetime
    matches_added: int
    items_newly_matched: int
    duplicate: bool = False


class _MatchView:
    """Batch and match accessors shared by the in-memory and on-disk stores."""

    def _batch_index(self) -> dict[tuple[str, datetime], BatchInfo]:
        raise NotImplementedError

    def _raw_matches(self) -> list[TrendMatch]:
        raise NotImplementedError

    def batches(self) -> list[BatchInfo]:
        return sorted(self._batch_index().values(), key=lambda b: (b.captured_at, b.source))

    def batch_keys(self) -> list[tuple[str, datetime]]:
        return [b.key for b in self.batches()]

    def batch_datetimes(self) -> list[datetime]:
        return sorted({b.captured_at for b in self.batches()})

    def has_batch(self, source: str, captured_at: datetime) -> bool:
        return (source, captured_at) in self._batch_index()

    def matches(self, policy: Optional[NoVolumePolicy] = None) -> list[TrendMatch]:
        """Persisted matches; with ``policy``, volume-less impacts are re-derived under it."""
        raw = self._raw_matches()
        if policy is None:
            return list(raw)
        index = self._batch_index()
        out = []
        for m in raw:
            if m.volume is None:
                info = index[(m.source, m.trend_captured_at)]
                impact = impact_from_stats(None, info.median_volume, info.min_volume, policy)
                if impact != m.impact:
                    m = TrendMatch(**{**asdict(m), "impact": impact})
            out.append(m)
        return out

    def matched_reference_ids(self) -> set[str]:
        return {m.reference_id for m in self._raw_matches()}


class MemoryStore(_MatchView):
    """In-memory store with the same read interface as :class:`Store`."""

    def __init__(self) -> None:
        self._batches: dict[tuple[str, datetime], BatchInfo] = {}
        self._matches: list[TrendMatch] = []
        self.profiles: list[ItemProfile] = []

    def _batch_index(self):
        return self._batches

    def _raw_matches(self):
        return self._matches

    def commit_batch(self, batch: TrendBatch, matches: list[TrendMatch]) -> None:
        self._matches.extend(matches)
        self._batches[batch.key] = _batch_info(batch)


def _batch_info(batch: TrendBatch) -> BatchInfo:
    return BatchInfo(batch.source, batch.captured_at, batch.median_volume, batch.min_volume, len(batch.trends))


class Store(_MatchView):
    """Directory-backed store. Single writer, any number of readers."""

    def __init__(self, root) -> None:
        self.root = Path(root)
        self._batch_cache: Optional[dict] = None
        self._match_cache: Optional[list] = None

    @property
    def items_path(self) -> Path:
        return self.root / "items.jsonl"

    @property
    def matches_path(self) -> Path:
        return self.root / "matches.jsonl"

    @property
    def batches_dir(self) -> Path:
        return self.root / "batches"

    @property
    def config_path(self) -> Path:
        return self.root / "config.json"

    def exists(self) -> bool:
        return self.root.is_dir()

    def batch_path(self, source: str, captured_at: datetime) -> Path:
        return self.batches_dir / f"{_UNSAFE_CHARS.sub('_', source)}-{format_datetime(captured_at)}.jsonl"

    # config

    def load_config(self) -> ScoringConfig:
        if not self.config_path.exists():
            return ScoringConfig()
        with open(self.config_path, encoding="utf-8") as fh:
            data = json.load(fh)
        return ScoringConfig(**data)

    def save_config(self, config: ScoringConfig) -> None:
        data = asdict(config)
        data["novolume_policy"] = config.novolume_policy.value
        data["match_mode"] = config.match_mode.value
        atomic_write_text(self.config_path, json.dumps(data, sort_keys=True, indent=2) + "\n")

    # items

    def load_items(self) -> list[tuple[Item, ItemProfile]]:
        if not self.items_path.exists():
            return []
        out = []
        for lineno, row in _read_jsonl(self.items_path):
            if isinstance(row, Exception):
                raise IngestionError(str(self.items_path), lineno, str(row))
            keywords = row.pop("keywords")
            item = item_from_row(row)
            out.append((item, ItemProfile(item.reference_id, tuple(keywords))))
        return out

    def profiles(self) -> list[ItemProfile]:
        return [p for _, p in self.load_items()]

    def save_items(self, entries: Iterable[tuple[Item, ItemProfile]]) -> int:
        """Merge items into the store (latest ``fetched_at`` wins). Returns the stored count."""
        merged = {item.reference_id: (item, profile) for item, profile in self.load_items()}
        for item, profile in entries:
            prev = merged.get(item.reference_id)
            if prev is None or item.fetched_at >= prev[0].fetched_at:
                merged[item.reference_id] = (item, profile)
        lines = []
        for ref in sorted(merged):
            item, profile = merged[ref]
            row = item_to_row(item)
            row["keywords"] = list(profile.keywords)
            lines.append(_dumps(row) + "\n")
        self.root.mkdir(parents=True, exist_ok=True)
        atomic_write_text(self.items_path, "".join(lines))
        return len(merged)

    # batches and matches

    def _batch_index(self):
        if self._batch_cache is None:
            index = {}
            if self.batches_dir.is_dir():
                for path in sorted(self.batches_dir.glob("*.jsonl")):
                    header, trends = self._read_batch_file(path)
                    captured = parse_datetime(header["captured_at"], "captured_at")
                    batch = TrendBatch.from_trends(header["source"], captured, trends)
                    index[batch.key] = _batch_info(batch)
            self._batch_cache = index
        return self._batch_cache

    def _read_batch_file(self, path: Path):
        header = None
        trends = []
        for lineno, row in _read_jsonl(path):
            if isinstance(row, Exception):
                raise IngestionError(str(path), lineno, str(row))
            if header is None:
                header = row
            else:
                trends.append(trend_from_row(row))
        if header is None:
            raise IngestionError(str(path), 1, "missing batch header")
        return header, trends

    def load_batch(self, source: str, captured_at: datetime) -> TrendBatch:
        header, trends = self._read_batch_file(self.batch_path(source, captured_at))
        return TrendBatch.from_trends(header["source"], parse_datetime(header["captured_at"]), trends)

    def _raw_matches(self):
        if self._match_cache is None:
            committed = self._batch_index()
            out = []
            if self.matches_path.exists():
                for lineno, row in _read_jsonl(self.matches_path):
                    if isinstance(row, Exception):
                        raise IngestionError(str(self.matches_path), lineno, str(row))
                    m = match_from_row(row)
                    # Rows of a batch whose file never landed are from an interrupted ingest.
                    if (m.source, m.trend_captured_at) in committed:
                        out.append(m)
            self._match_cache = out
        return self._match_cache

    def commit_batch(self, batch: TrendBatch, matches: list[TrendMatch]) -> None:
        existing = "".join(_dumps(match_to_row(m)) + "\n" for m in self._raw_matches())
        added = "".join(_dumps(match_to_row(m)) + "\n" for m in matches)
        header = {
            "source": batch.source,
            "captured_at": format_datetime(batch.captured_at),
            "median_volume": batch.median_volume,
            "min_volume": batch.min_volume,
        }
        body = _dumps(header) + "\n" + "".join(_dumps(trend_to_row(t)) + "\n" for t in batch.trends)
        self.root.mkdir(parents=True, exist_ok=True)
        atomic_write_text(self.matches_path, existing + added)
        # The batch file is written last and marks the batch as committed.
        atomic_write_text(self.batch_path(batch.source, batch.captured_at), body)
        self._batch_cache = None
        self._match_cache = None


def ingest_batch(
    store,
    batch: TrendBatch,
    profiles: Iterable[ItemProfile],
    sentiments: Mapping[str, TrendSentiment],
    priorities: Optional[Mapping[str, float]] = None,
    config: Optional[ScoringConfig] = None,
) -> IngestSummary:
    """Match a batch against all profiles and persist the result.

    Re-ingesting a ``(source, captured_at)`` that is already stored changes nothing.
    """
    if store.has_batch(batch.source, batch.captured_at):
        log.warning("batch %s@%s already ingested; skipping", batch.source, format_datetime(batch.captured_at))
        return IngestSummary(batch.source, batch.captured_at, 0, 0, duplicate=True)
    matches = enumerate_matches(profiles, batch, sentiments, priorities, config)
    seen = store.matched_reference_ids()
    newly = {m.reference_id for m in matches} - seen
    store.commit_batch(batch, matches)
    return IngestSummary(batch.source, batch.captured_at, len(matches), len(newly))
