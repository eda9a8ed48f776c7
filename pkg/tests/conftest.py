import random
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from trendrec.model import ItemProfile, TrendBatch, TrendSentiment, Trend  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
T0 = datetime(2021, 6, 1, 12, 0, tzinfo=timezone.utc)
ADDR_A = "0x" + "a" * 40
ADDR_B = "0x" + "b" * 40


def ref(addr_char: str, token: int) -> str:
    return f"0x{addr_char * 40}:{token}"


def make_batch(source, captured_at, trends):
    """``trends``: iterable of (name, volume) pairs."""
    return TrendBatch.from_trends(
        source, captured_at, [Trend(source, name, captured_at, volume) for name, volume in trends]
    )


def fixed_sentiments(batch, scores):
    """TrendSentiment map with a given adjusted score per trend name (default 1.0)."""
    return {
        t.name_norm: TrendSentiment(t.name_norm, 0.0, 1.0, 0.0, scores.get(t.name_norm, 1.0)) for t in batch.trends
    }


VOCAB = ["bitcoin", "ape", "dragon", "moon", "punk", "cat", "gold", "pixel", "wave", "nova", "bored ape", "moon cat"]
SOURCES = ["twitter", "reddit", "discord"]


def random_instance(rng: random.Random):
    """A random scoring world: profiles, raw batches for the oracle and a scoring instant."""
    n_items = rng.randint(1, 10)
    profiles = []
    for i in range(n_items):
        kws = rng.sample(VOCAB, rng.randint(1, 4))
        profiles.append(ItemProfile(f"0x{i:040x}:{i}", tuple(kws)))
    n_sources = rng.randint(1, 3)
    sources = SOURCES[:n_sources]
    scored_at = T0 + timedelta(days=30, hours=rng.randint(0, 23))
    budget = rng.randint(1, 20)
    raw_batches = []
    used = set()
    while budget > 0:
        source = rng.choice(sources)
        captured = T0 + timedelta(days=rng.randint(0, 30), hours=rng.randint(0, 11))
        if (source, captured) in used or captured > scored_at:
            continue
        used.add((source, captured))
        k = min(budget, rng.randint(1, 6))
        budget -= k
        names = rng.sample(VOCAB, k)
        trends = []
        for name in names:
            volume = None if rng.random() < 0.2 else rng.randint(1, 100_000)
            sentiment = round(rng.uniform(-1.0, 2.0), 6)
            trends.append((name, volume, sentiment))
        raw_batches.append({"source": source, "captured_at": captured, "trends": trends})
    priorities = {name: round(rng.uniform(0.25, 3.0), 3) for name in rng.sample(VOCAB, rng.randint(0, 4))}
    return profiles, raw_batches, priorities, scored_at


def engine_store(profiles, raw_batches, priorities, config):
    from trendrec.store import MemoryStore, ingest_batch

    store = MemoryStore()
    for raw in raw_batches:
        batch = make_batch(raw["source"], raw["captured_at"], [(n, v) for n, v, _ in raw["trends"]])
        sentiments = fixed_sentiments(batch, {n: s for n, _, s in raw["trends"]})
        ingest_batch(store, batch, profiles, sentiments, priorities, config)
    return store


@pytest.fixture
def t0():
    return T0


ACCEPTANCE_RESULTS: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        doc = ACCEPTANCE_DOCS.get(name, name)
        ACCEPTANCE_RESULTS[name] = ("PASS" if report.passed else "FAIL", doc)


ACCEPTANCE_DOCS: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (status, doc) in sorted(ACCEPTANCE_RESULTS.items()):
        terminalreporter.write_line(f"{status}  {doc}")
