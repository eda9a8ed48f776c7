"""RAKE keyword extraction and item profiling."""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Optional

from .errors import ItemSkipped, ValidationError
from .model import Item, ItemProfile, normalize_phrase

# A word token, or a single non-space, non-word character acting as a phrase boundary.
_TOKEN_RE = re.compile(r"([^\W_]+)|(\S)")


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    text = resources.files("trendrec.data").joinpath("stopwords.txt").read_text(encoding="utf-8")
    return frozenset(load_stopwords(text.splitlines()))


def load_stopwords(lines: Iterable[str]) -> set[str]:
    words = set()
    for line in lines:
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return words


@dataclass(frozen=True)
class RakeConfig:
    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    max_phrase_words: int = 3
    min_word_chars: int = 2
    top_k_phrases: Optional[int] = None

    def __post_init__(self) -> None:
        if self.max_phrase_words < 1:
            raise ValidationError("max_phrase_words", "must be >= 1")
        if self.min_word_chars < 1:
            raise ValidationError("min_word_chars", "must be >= 1")
        if self.top_k_phrases is not None and self.top_k_phrases < 1:
            raise ValidationError("top_k_phrases", "must be >= 1")
        object.__setattr__(self, "stopwords", frozenset(w.lower() for w in self.stopwords))


def candidate_phrases(text: str, config: RakeConfig) -> list[tuple[str, ...]]:
    """Split text into maximal runs of content words.

    Stopwords, punctuation and words shorter than ``min_word_chars`` all end
    the current run.
    """
    candidates: list[tuple[str, ...]] = []
    run: list[str] = []
    for m in _TOKEN_RE.finditer(text.lower()):
        word = m.group(1)
        if word is None or word in config.stopwords or len(word) < config.min_word_chars:
            if run:
                candidates.append(tuple(run))
                run = []
            continue
        run.append(word)
    if run:
        candidates.append(tuple(run))
    return [c for c in candidates if len(c) <= config.max_phrase_words]


def rake_extract(text: str, config: Optional[RakeConfig] = None) -> list[tuple[str, float]]:
    """Score candidate phrases with the classic RAKE degree/frequency measure.

    Returns ``(phrase, score)`` pairs sorted by score descending, ties broken
    by phrase. Repeated phrases appear once.
    """
    config = config or RakeConfig()
    candidates = candidate_phrases(text, config)
    if not candidates:
        return []

    freq: dict[str, int] = defaultdict(int)
    degree: dict[str, int] = defaultdict(int)
    for phrase in candidates:
        for word in phrase:
            freq[word] += 1
            degree[word] += len(phrase)
    word_score = {w: degree[w] / freq[w] for w in freq}

    scored = {}
    for phrase in candidates:
        key = " ".join(phrase)
        if key not in scored:
            scored[key] = float(sum(word_score[w] for w in phrase))
    ranked = sorted(scored.items(), key=lambda kv: (-kv[1], kv[0]))
    if config.top_k_phrases is not None:
        ranked = ranked[: config.top_k_phrases]
    return ranked


def _has_content_word(phrase: str, config: RakeConfig) -> bool:
    for m in _TOKEN_RE.finditer(phrase):
        word = m.group(1)
        if word and word not in config.stopwords and len(word) >= config.min_word_chars:
            return True
    return False


def build_item_profile(item: Item, config: Optional[RakeConfig] = None) -> ItemProfile:
    config = config or RakeConfig()
    text = f"{item.name}. {item.description}. {item.collection_name}. {item.collection_description}."
    keywords = [phrase for phrase, _ in rake_extract(text, config)]
    for name in (item.name, item.collection_name):
        phrase = normalize_phrase(name)
        if phrase and _has_content_word(phrase, config):
            keywords.append(phrase)
    if not keywords:
        raise ItemSkipped(item.reference_id)
    return ItemProfile(item.reference_id, tuple(keywords))
