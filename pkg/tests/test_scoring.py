import random
from datetime import timedelta
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracle
from trendrec.errors import ConfigurationError, DegenerateBatch, EmptyStore, FutureTrend
from trendrec.model import ItemProfile, NoVolumePolicy, ScoringConfig, TrendMatch
from trendrec.scoring import days_between, decay_factor, score_all, score_item, trend_impact
from trendrec.store import MemoryStore, ingest_batch

from conftest import T0, engine_store, fixed_sentiments, make_batch, random_instance, ref

A = ref("a", 1)


def _match(sentiment=1.6, impact=5.0, priority=1.0, captured=T0, source="twitter"):
    return TrendMatch(A, "alpha", "alpha", source, captured, impact, sentiment, 1, priority)


# Frozen from tests/oracle.py: 1.6*5/(0.1+n) for n = 0, 1, 2 -> 80, 80/11, 80/21.
ORACLE_DECAY_ROW = [80.0, 80 / 11, 80 / 21]


def test_impact_direct():
    batch = make_batch("twitter", T0, [("a", 10000), ("b", 20000), ("c", 50000)])
    assert trend_impact(batch.trends[2], batch) == 2.5
    assert trend_impact(batch.trends[1], batch) == 1.0


def test_impact_no_volume_policies():
    batch = make_batch("twitter", T0, [("a", 10000), ("b", 20000), ("c", 50000), ("d", None)])
    nov = batch.trends[3]
    assert trend_impact(nov, batch, NoVolumePolicy.MEDIAN_OMIT) == 1.0
    assert trend_impact(nov, batch, NoVolumePolicy.MIN_MINUS_ONE) == pytest.approx(9999 / 20000)


def test_impact_min_minus_one_floored():
    batch = make_batch("twitter", T0, [("a", 0), ("b", 4), ("c", None)])
    assert trend_impact(batch.trends[2], batch, NoVolumePolicy.MIN_MINUS_ONE) == 0.0


def test_impact_without_any_volume(caplog):
    batch = make_batch("twitter", T0, [("a", None), ("b", None)])
    assert trend_impact(batch.trends[0], batch, NoVolumePolicy.MIN_MINUS_ONE) == 1.0
    assert "no trend volumes" in caplog.text


def test_impact_degenerate_median():
    batch = make_batch("twitter", T0, [("a", 0), ("b", 0), ("c", 5)])
    with pytest.raises(DegenerateBatch):
        trend_impact(batch.trends[2], batch)


@given(st.integers(1, 10**6), st.integers(1, 12))
def test_equal_volumes_give_unit_impact(volume, n):
    batch = make_batch("twitter", T0, [(f"t{i}", volume) for i in range(n)])
    assert all(trend_impact(t, batch) == 1 for t in batch.trends)


def test_decay_factor():
    assert decay_factor(0.1, 0) == 10.0
    assert decay_factor(0.1, 1) == pytest.approx(0.9090909090909091, rel=1e-15)
    assert decay_factor(0.1, 9) == pytest.approx(1 / 9.1, rel=1e-15)
    assert decay_factor(Fraction(1, 10), 0) / decay_factor(Fraction(1, 10), 1) == 11


@given(st.floats(1e-3, 10), st.integers(0, 1000))
def test_decay_strictly_decreasing(mu, n):
    assert decay_factor(mu, n + 1) < decay_factor(mu, n)


def test_days_between():
    assert days_between(T0, T0) == 0
    assert days_between(T0, T0 + timedelta(hours=36)) == 1
    assert days_between(T0, T0 + timedelta(hours=23, minutes=59)) == 0
    with pytest.raises(FutureTrend):
        days_between(T0 + timedelta(hours=1), T0)


def test_score_item_examples():
    profile = ItemProfile(A, ("alpha",))
    assert score_item(profile, [_match()], T0, 1).total_score == pytest.approx(80.0, rel=1e-12)
    later = score_item(profile, [_match()], T0 + timedelta(days=1), 1)
    assert later.total_score == pytest.approx(ORACLE_DECAY_ROW[1], rel=1e-12)
    assert later.contributing_matches[0].days == 1
    empty = score_item(profile, [], T0, 1)
    assert empty.total_score == 0.0 and empty.contributing_matches == ()


def test_score_item_rejects_zero_sources():
    with pytest.raises(ConfigurationError):
        score_item(ItemProfile(A, ("alpha",)), [], T0, 0)


def test_score_item_skips_future_and_lookback(caplog):
    profile = ItemProfile(A, ("alpha",))
    matches = [_match(captured=T0 + timedelta(days=1)), _match(captured=T0 - timedelta(days=5)), _match()]
    s = score_item(profile, matches, T0, 1, ScoringConfig(lookback_days=3))
    assert [c.days for c in s.contributing_matches] == [0]
    assert "skipping match" in caplog.text


def test_total_is_sum_over_sources():
    profile = ItemProfile(A, ("alpha",))
    s = score_item(profile, [_match(), _match(sentiment=-0.5, impact=2.0)], T0, 3)
    assert s.total_score == pytest.approx(sum(c.term for c in s.contributing_matches) / 3, rel=1e-9)


def test_same_day_boost_exact():
    m = TrendMatch(A, "alpha", "alpha", "twitter", T0, Fraction(5), Fraction(8, 5), 1, Fraction(1))
    cfg_mu = Fraction(1, 10)
    from trendrec.scoring import match_term

    assert match_term(m, 0, cfg_mu) / match_term(m, 1, cfg_mu) == 11
    assert match_term(m, 0, cfg_mu) == 80


def test_linearity_and_sign():
    profile = ItemProfile(A, ("alpha",))
    base = [_match(), _match(sentiment=0.3, impact=1.5, captured=T0 - timedelta(days=2))]
    s = score_item(profile, base, T0, 1).total_score
    doubled = [TrendMatch(**{**m.__dict__, "user_priority": m.user_priority * 2}) for m in base]
    assert score_item(profile, doubled, T0, 1).total_score == pytest.approx(2 * s, rel=1e-12)
    scaled = [TrendMatch(**{**m.__dict__, "sentiment": m.sentiment * 3}) for m in base]
    assert score_item(profile, scaled, T0, 1).total_score == pytest.approx(3 * s, rel=1e-12)
    negative = [_match(sentiment=-0.6), _match(sentiment=-1.0, captured=T0 - timedelta(days=1))]
    assert score_item(profile, negative, T0, 1).total_score < 0


def _two_source_store():
    profiles = [ItemProfile(A, ("alpha",)), ItemProfile(ref("b", 2), ("beta",))]
    store = MemoryStore()
    tw = make_batch("twitter", T0, [("alpha", 50000), ("x", 10000), ("y", 10000)])
    rd = make_batch("reddit", T0, [("gamma", 5)])
    ingest_batch(store, tw, profiles, fixed_sentiments(tw, {"alpha": 1.6}))
    ingest_batch(store, rd, profiles, fixed_sentiments(rd, {}))
    return profiles, store


def test_score_all_divides_by_all_sources():
    profiles, store = _two_source_store()
    scores = score_all(profiles, store, T0)
    assert [s.reference_id for s in scores] == sorted(p.reference_id for p in profiles)
    assert scores[0].n_sources == 2
    assert scores[0].total_score == pytest.approx(40.0, rel=1e-12)  # oracle: 80 / 2
    assert scores[1].total_score == 0.0


def test_score_all_single_source():
    profiles = [ItemProfile(A, ("alpha",))]
    store = MemoryStore()
    batch = make_batch("twitter", T0, [("alpha", 1)])
    ingest_batch(store, batch, profiles, fixed_sentiments(batch, {}))
    assert score_all(profiles, store, T0)[0].n_sources == 1


def test_score_all_empty():
    profiles, store = _two_source_store()
    with pytest.raises(EmptyStore):
        score_all(profiles, store, T0 - timedelta(seconds=1))
    with pytest.raises(EmptyStore):
        score_all(profiles, MemoryStore(), T0)


def _check_against_oracle(seed, policy=NoVolumePolicy.MEDIAN_OMIT):
    rng = random.Random(seed)
    profiles, raw, priorities, scored_at = random_instance(rng)
    config = ScoringConfig(novolume_policy=policy)
    store = engine_store(profiles, raw, priorities, config)
    scores = {s.reference_id: s.total_score for s in score_all(profiles, store, scored_at, config)}
    for p in profiles:
        expected = oracle.total_score(
            set(p.keywords), raw, scored_at, Fraction(config.mu), priorities, policy.value
        )
        assert scores[p.reference_id] == pytest.approx(float(expected), rel=1e-9, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(list(NoVolumePolicy)))
def test_oracle_equivalence(seed, policy):
    _check_against_oracle(seed, policy)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_monotone_decay_between_batches(seed, steps):
    rng = random.Random(seed)
    profiles, raw, priorities, _ = random_instance(rng)
    for b in raw:
        b["trends"] = [(n, v, abs(s)) for n, v, s in b["trends"]]  # non-negative sentiments
    store = engine_store(profiles, raw, priorities, ScoringConfig())
    last = max(b["captured_at"] for b in raw)
    prev = None
    for k in range(steps + 1):
        at = last + timedelta(hours=12 * k)
        now = {s.reference_id: s.total_score for s in score_all(profiles, store, at)}
        if prev is not None:
            assert all(now[r] <= prev[r] + 1e-12 for r in now)
        prev = now
