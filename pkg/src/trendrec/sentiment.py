"""Signed sentiment scores for trends.

A provider maps text to a ``(neg, neu, pos)`` distribution; :func:`adjust`
collapses the distribution to one signed number by taking the dominant class.
Negative wins give a negative score, neutral passes through and positive is
scaled by ``positive_multiplier``.
"""

from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass
from datetime import datetime
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Protocol, runtime_checkable

from .errors import IngestionError, SentimentUnavailable, ValidationError
from .model import Trend, TrendSentiment, normalize_trend_name, parse_datetime

log = logging.getLogger(__name__)

_WORD_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)?")
_SUM_TOL = 1e-6


@dataclass(frozen=True)
class SentimentTriple:
    neg: float
    neu: float
    pos: float

    def __post_init__(self) -> None:
        for name in ("neg", "neu", "pos"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0) or math.isnan(value):
                raise ValidationError(name, f"probability out of [0, 1]: {value}")
        total = self.neg + self.neu + self.pos
        if abs(total - 1.0) > _SUM_TOL:
            raise ValidationError("triple", f"neg + neu + pos = {total}, expected 1")


NEUTRAL = SentimentTriple(0.0, 1.0, 0.0)


@runtime_checkable
class SentimentProvider(Protocol):
    def score_text(self, text: str) -> SentimentTriple: ...


def adjust(triple: SentimentTriple, positive_multiplier: float = 2.0):
    """Collapse a class distribution to the signed score of its dominant class."""
    # Later entries win ties, so equal pos/neu resolves to pos.
    _, cls = max((triple.neg, 0), (triple.neu, 1), (triple.pos, 2))
    if cls == 0:
        return -triple.neg
    if cls == 1:
        return triple.neu
    return positive_multiplier * triple.pos


def trend_sentiment(trend: Trend, provider, positive_multiplier: float = 2.0) -> TrendSentiment:
    """Mean adjusted sentiment over a trend's sample texts.

    Providers exposing ``score_trend`` (precomputed sidecars) are asked for the
    trend directly. A trend with no sample texts is treated as fully neutral.
    """
    try:
        if hasattr(provider, "score_trend"):
            triples = [provider.score_trend(trend)]
        else:
            triples = [provider.score_text(text) for text in trend.sample_texts]
    except Exception as exc:
        raise SentimentUnavailable(trend.name_norm, exc) from exc

    if not triples:
        return TrendSentiment(trend.name_norm, 0.0, 1.0, 0.0, 1.0)
    n = len(triples)
    adjusted = [adjust(t, positive_multiplier) for t in triples]
    return TrendSentiment(
        trend.name_norm,
        math.fsum(t.neg for t in triples) / n,
        math.fsum(t.neu for t in triples) / n,
        math.fsum(t.pos for t in triples) / n,
        math.fsum(adjusted) / n,
    )


def neutral_sentiment(trend: Trend) -> TrendSentiment:
    return TrendSentiment(trend.name_norm, 0.0, 1.0, 0.0, 1.0)


def resolve_sentiments(trends: Iterable[Trend], provider, positive_multiplier: float = 2.0) -> dict[str, TrendSentiment]:
    """Sentiment per trend name; provider failures degrade to neutral with a warning."""
    out: dict[str, TrendSentiment] = {}
    for trend in trends:
        try:
            out[trend.name_norm] = trend_sentiment(trend, provider, positive_multiplier)
        except SentimentUnavailable as exc:
            log.warning("%s; using neutral default", exc)
            out[trend.name_norm] = neutral_sentiment(trend)
    return out


class LexiconProvider:
    """Scores text by the mean valence of lexicon words it contains."""

    def __init__(self, lexicon: Mapping[str, float]) -> None:
        if not lexicon:
            raise ValidationError("lexicon", "empty lexicon")
        for word, valence in lexicon.items():
            if not -1.0 <= valence <= 1.0:
                raise ValidationError("lexicon", f"valence for {word!r} out of [-1, 1]: {valence}")
        self._lexicon = {w.lower(): float(v) for w, v in lexicon.items()}

    def score_text(self, text: str) -> SentimentTriple:
        hits = [self._lexicon[w] for w in _WORD_RE.findall(text.lower()) if w in self._lexicon]
        v = math.fsum(hits) / len(hits) if hits else 0.0
        return SentimentTriple(max(-v, 0.0), 1.0 - abs(v), max(v, 0.0))


def lexicon_provider(lexicon: Mapping[str, float]) -> LexiconProvider:
    return LexiconProvider(lexicon)


def parse_lexicon(lines: Iterable[str], source: str = "<lexicon>") -> dict[str, float]:
    lexicon = {}
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        try:
            if len(parts) != 2:
                raise ValueError("expected word<TAB>valence")
            lexicon[parts[0].strip().lower()] = float(parts[1])
        except ValueError as exc:
            raise IngestionError(source, lineno, str(exc)) from exc
    return lexicon


def load_lexicon(path) -> dict[str, float]:
    with open(path, encoding="utf-8") as fh:
        return parse_lexicon(fh, str(path))


@lru_cache(maxsize=None)
def _default_lexicon_items() -> tuple[tuple[str, float], ...]:
    text = resources.files("trendrec.data").joinpath("lexicon.tsv").read_text(encoding="utf-8")
    return tuple(sorted(parse_lexicon(text.splitlines(), "lexicon.tsv").items()))


def default_lexicon_provider() -> LexiconProvider:
    return LexiconProvider(dict(_default_lexicon_items()))


class SidecarProvider:
    """Serves precomputed class distributions keyed by ``(trend name, captured_at)``."""

    def __init__(self, sidecar: Mapping[tuple[str, datetime], SentimentTriple]) -> None:
        self._table = dict(sidecar)

    def score_trend(self, trend: Trend) -> SentimentTriple:
        return self._table.get((trend.name_norm, trend.captured_at), NEUTRAL)

    def score_text(self, text: str) -> SentimentTriple:
        return NEUTRAL

    def __len__(self) -> int:
        return len(self._table)


def sidecar_provider(sidecar: Mapping[tuple[str, datetime], SentimentTriple]) -> SidecarProvider:
    return SidecarProvider(sidecar)


def load_sidecar(path) -> SidecarProvider:
    """Read a JSONL sidecar; any malformed row aborts with its line number."""
    path = Path(path)
    table = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                key = (normalize_trend_name(row["trend_name_norm"]), parse_datetime(row["captured_at"], "captured_at"))
                triple = SentimentTriple(float(row["neg"]), float(row["neu"]), float(row["pos"]))
            except (ValueError, KeyError, TypeError) as exc:
                raise IngestionError(str(path), lineno, f"bad sentiment row: {exc}") from exc
            table[key] = triple
    return SidecarProvider(table)
