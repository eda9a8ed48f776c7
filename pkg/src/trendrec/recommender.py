"""Top-N featured items, match-count reports and item x datetime score matrices."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .errors import ConfigurationError
from .model import ItemProfile, ItemTrendScore, ScoringConfig, ensure_utc, format_datetime
from .scoring import count_sources

_UTC_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
_ONE_US = timedelta(microseconds=1)


@dataclass(frozen=True)
class MatchReportRow:
    scored_at: datetime
    total_matched_items: int
    newly_matched_items: int


@dataclass(frozen=True)
class ScoreMatrix:
    item_ids: tuple[str, ...]
    datetimes: tuple[datetime, ...]
    values: np.ndarray
    cap: Optional[float] = None

    def row(self, reference_id: str) -> np.ndarray:
        return self.values[self.item_ids.index(reference_id)]


def recommend_top_n(scores: Sequence[ItemTrendScore], n: int, include_negative: bool = False) -> list[tuple[str, float]]:
    """Highest-scoring items, best first; zero scores are never recommended."""
    if n < 1:
        raise ConfigurationError(f"n must be a positive integer, got {n}")
    eligible = [
        (s.reference_id, s.total_score)
        for s in scores
        if s.total_score > 0 or (include_negative and s.total_score < 0)
    ]
    eligible.sort(key=lambda pair: (-pair[1], pair[0]))
    return eligible[:n]


def match_report(match_store, batch_datetimes: Optional[Sequence[datetime]] = None) -> list[MatchReportRow]:
    """Per batch datetime: items matched there, and how many had never matched before."""
    if batch_datetimes is None:
        batch_datetimes = match_store.batch_datetimes()
    by_time: dict[datetime, set[str]] = {}
    for m in match_store.matches():
        by_time.setdefault(m.trend_captured_at, set()).add(m.reference_id)

    rows = []
    for d in batch_datetimes:
        seen = set()
        for t, refs in by_time.items():
            if t < d:
                seen |= refs
        current = by_time.get(d, set())
        rows.append(MatchReportRow(d, len(current), len(current - seen)))
    return rows


def _to_us(dt: datetime) -> int:
    return (ensure_utc(dt) - _UTC_EPOCH) // _ONE_US


def score_matrix(
    profiles: Sequence[ItemProfile],
    match_store,
    datetimes: Sequence[datetime],
    config: Optional[ScoringConfig] = None,
    cap: Optional[float] = None,
    matched_only: bool = False,
    backend: Optional[str] = None,
) -> ScoreMatrix:
    """Total trend score of every item at every datetime.

    Rows are ordered by first match datetime, then reference id; items that
    never matched come last (or are dropped with ``matched_only``). With
    ``cap`` every cell is clipped from above. Datetimes preceding every batch
    give zero columns.
    """
    config = config or ScoringConfig()
    datetimes = tuple(ensure_utc(d) for d in datetimes)
    refs = {p.reference_id for p in profiles}
    matches = [m for m in match_store.matches(config.novolume_policy) if m.reference_id in refs]

    first_seen: dict[str, datetime] = {}
    for m in matches:
        if m.reference_id not in first_seen or m.trend_captured_at < first_seen[m.reference_id]:
            first_seen[m.reference_id] = m.trend_captured_at
    matched = sorted(first_seen, key=lambda r: (first_seen[r], r))
    unmatched = [] if matched_only else sorted(refs - set(first_seen))
    item_ids = tuple(matched + unmatched)
    index = {ref: i for i, ref in enumerate(item_ids)}

    keys = match_store.batch_keys()
    values = _kernels.score_grid(
        [index[m.reference_id] for m in matches],
        [m.sentiment * m.impact * m.match_flag * m.user_priority for m in matches],
        [_to_us(m.trend_captured_at) for m in matches],
        [_to_us(d) for d in datetimes],
        [count_sources(keys, d) for d in datetimes],
        len(item_ids),
        config.mu,
        config.lookback_days,
        backend=backend,
    )
    if cap is not None:
        values = np.minimum(values, cap)
    return ScoreMatrix(item_ids, datetimes, values, cap)


def _fmt(value: float) -> str:
    text = f"{value:.4f}"
    return "0.0000" if text == "-0.0000" else text


def matrix_to_csv(matrix: ScoreMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["reference_id", *(format_datetime(d) for d in matrix.datetimes)])
    for ref, row in zip(matrix.item_ids, matrix.values):
        writer.writerow([ref, *(_fmt(v) for v in row)])
    return buf.getvalue()


def report_to_csv(rows: Sequence[MatchReportRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["scored_at", "total_matched", "newly_matched"])
    for r in rows:
        writer.writerow([format_datetime(r.scored_at), r.total_matched_items, r.newly_matched_items])
    return buf.getvalue()


def recommendations_to_csv(ranked: Sequence[tuple[str, float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["rank", "reference_id", "total_score"])
    for rank, (ref, score) in enumerate(ranked, 1):
        writer.writerow([rank, ref, _fmt(score)])
    return buf.getvalue()
