"""Recommend catalog items from time-decayed social-media trend matches."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .keywords import RakeConfig, build_item_profile, rake_extract
from .matching import enumerate_matches, is_match
from .model import (
    Item,
    ItemProfile,
    ItemTrendScore,
    MatchMode,
    NoVolumePolicy,
    ScoringConfig,
    Trend,
    TrendBatch,
    TrendMatch,
    TrendSentiment,
    canonical_reference_id,
    normalize_trend_name,
)
from .recommender import match_report, recommend_top_n, score_matrix
from .scoring import days_between, decay_factor, score_all, score_item, trend_impact
from .sentiment import SentimentTriple, adjust, lexicon_provider, sidecar_provider, trend_sentiment
from .store import MemoryStore, Store, ingest_batch, load_items, load_trend_batches

__version__ = "0.1.0"
