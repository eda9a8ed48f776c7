"""Keyword/trend matching (the ``m`` flag) and per-batch match enumeration."""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Mapping, Optional

from .model import ItemProfile, MatchMode, ScoringConfig, TrendBatch, TrendMatch, TrendSentiment
from .scoring import trend_impact


def _contains(haystack: list[str], needle: list[str]) -> bool:
    n = len(needle)
    return any(haystack[i : i + n] == needle for i in range(len(haystack) - n + 1))


def is_match(keyword: str, trend_name_norm: str, mode: MatchMode = MatchMode.EXACT_PHRASE) -> bool:
    mode = MatchMode(mode)
    if mode is MatchMode.EXACT_PHRASE:
        return keyword == trend_name_norm
    kw, tr = keyword.split(), trend_name_norm.split()
    if not kw or not tr:
        return False
    return _contains(kw, tr) or _contains(tr, kw)


def enumerate_matches(
    profiles: Iterable[ItemProfile],
    batch: TrendBatch,
    sentiments: Mapping[str, TrendSentiment],
    priorities: Optional[Mapping[str, float]] = None,
    config: Optional[ScoringConfig] = None,
) -> list[TrendMatch]:
    """Every (item, keyword, trend) triple in ``batch`` that matches.

    Sorted by ``(reference_id, keyword, trend_name_norm)``.
    """
    config = config or ScoringConfig()
    priorities = priorities or {}
    impacts = [trend_impact(t, batch, config.novolume_policy) for t in batch.trends]

    by_name: dict[str, list[int]] = defaultdict(list)
    for idx, trend in enumerate(batch.trends):
        by_name[trend.name_norm].append(idx)

    out = []
    for profile in profiles:
        for keyword in profile.keywords:
            if config.match_mode is MatchMode.EXACT_PHRASE:
                hits = by_name.get(keyword, ())
            else:
                hits = [i for i, t in enumerate(batch.trends) if is_match(keyword, t.name_norm, config.match_mode)]
            for idx in hits:
                trend = batch.trends[idx]
                out.append(
                    TrendMatch(
                        reference_id=profile.reference_id,
                        keyword=keyword,
                        trend_name_norm=trend.name_norm,
                        source=trend.source,
                        trend_captured_at=trend.captured_at,
                        impact=impacts[idx],
                        sentiment=sentiments[trend.name_norm].adjusted_score,
                        user_priority=float(priorities.get(trend.name_norm, 1.0)),
                        volume=trend.volume,
                    )
                )
    out.sort(key=lambda m: (m.reference_id, m.keyword, m.trend_name_norm))
    return out
