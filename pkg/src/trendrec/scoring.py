"""Trend impact and total item trend scores.

A match contributes ``sentiment * impact * m * u / (mu + days)``, where
``impact`` is the trend's volume relative to its batch median and ``days`` is
the number of whole days between trend capture and the scoring instant. An
item's total is the sum of its contributions divided by the number of
information sources ingested so far.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from datetime import datetime, timedelta
from typing import Iterable, Optional, Sequence

from .errors import ConfigurationError, DegenerateBatch, EmptyStore, FutureTrend
from .model import (
    ContributingMatch,
    ItemProfile,
    ItemTrendScore,
    NoVolumePolicy,
    ScoringConfig,
    Trend,
    TrendBatch,
    TrendMatch,
    ensure_utc,
)

log = logging.getLogger(__name__)

_DAY = timedelta(days=1)


def impact_from_stats(volume: Optional[int], median: Optional[float], minimum: Optional[int], policy: NoVolumePolicy):
    if median is None:
        return 1.0
    policy = NoVolumePolicy(policy)
    if volume is None and policy is NoVolumePolicy.MEDIAN_OMIT:
        return 1.0
    if median == 0:
        raise DegenerateBatch("batch median volume is 0; impact is undefined")
    if volume is None:
        return max((minimum - 1) / median, 0.0)
    return volume / median


def trend_impact(trend: Trend, batch: TrendBatch, policy: NoVolumePolicy = NoVolumePolicy.MEDIAN_OMIT):
    """Volume of ``trend`` relative to the median volume of its batch.

    Volume-less trends get the batch minimum minus one (floored at 0) under
    ``MIN_MINUS_ONE``, or exactly 1 under ``MEDIAN_OMIT``. Batches without any
    volumes yield 1 for every trend.
    """
    if batch.median_volume is None:
        log.warning("batch %s@%s has no trend volumes; impact defaults to 1", batch.source, batch.captured_at)
    return impact_from_stats(trend.volume, batch.median_volume, batch.min_volume, policy)


def decay_factor(mu, n_m: int):
    if n_m < 0:
        raise ValueError(f"n_m must be >= 0, got {n_m}")
    return 1 / (mu + n_m)


def days_between(trend_captured_at: datetime, scored_at: datetime) -> int:
    elapsed = ensure_utc(scored_at) - ensure_utc(trend_captured_at)
    if elapsed < timedelta(0):
        raise FutureTrend(f"trend captured at {trend_captured_at} is after scoring instant {scored_at}")
    return elapsed // _DAY


def match_term(match: TrendMatch, days: int, mu):
    return match.sentiment * match.impact * match.match_flag * match.user_priority * decay_factor(mu, days)


def score_item(
    profile: ItemProfile,
    matches: Iterable[TrendMatch],
    scored_at: datetime,
    n_sources: int,
    config: Optional[ScoringConfig] = None,
) -> ItemTrendScore:
    config = config or ScoringConfig()
    if n_sources < 1:
        raise ConfigurationError(f"n_sources must be >= 1, got {n_sources}")
    contributions = []
    total = 0.0
    for match in matches:
        try:
            days = days_between(match.trend_captured_at, scored_at)
        except FutureTrend as exc:
            log.warning("skipping match %s/%s: %s", match.reference_id, match.trend_name_norm, exc)
            continue
        if config.lookback_days is not None and days > config.lookback_days:
            continue
        term = match_term(match, days, config.mu)
        total += term
        contributions.append(ContributingMatch(match, days, term))
    return ItemTrendScore(profile.reference_id, scored_at, total / n_sources, n_sources, tuple(contributions))


def count_sources(batch_keys: Iterable[tuple[str, datetime]], scored_at: datetime) -> int:
    return len({source for source, captured in batch_keys if captured <= scored_at})


def score_all(
    profiles: Sequence[ItemProfile],
    match_store,
    scored_at: datetime,
    config: Optional[ScoringConfig] = None,
) -> list[ItemTrendScore]:
    """Score every profile at ``scored_at`` from the store's persisted matches.

    ``match_store`` needs ``batch_keys()`` and ``matches(policy)``.
    """
    config = config or ScoringConfig()
    scored_at = ensure_utc(scored_at, "scored_at")
    n_sources = count_sources(match_store.batch_keys(), scored_at)
    if n_sources == 0:
        raise EmptyStore(f"no trend batches captured at or before {scored_at}")
    by_item: dict[str, list[TrendMatch]] = defaultdict(list)
    for m in match_store.matches(config.novolume_policy):
        if m.trend_captured_at <= scored_at:
            by_item[m.reference_id].append(m)
    return [
        score_item(p, by_item.get(p.reference_id, ()), scored_at, n_sources, config)
        for p in sorted(profiles, key=lambda p: p.reference_id)
    ]
