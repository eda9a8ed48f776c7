import random

import pytest
from hypothesis import given, settings, strategies as st

from trendrec.errors import ItemSkipped
from trendrec.keywords import RakeConfig, build_item_profile, default_stopwords, rake_extract
from trendrec.model import Item

from conftest import ADDR_A, T0

SENTENCE = "Rare golden dragon, a unique collectible dragon"


def _item(**fields):
    base = dict(reference_id=ADDR_A + ":1", name="", description="", collection_name="", collection_description="", fetched_at=T0)
    base.update(fields)
    return Item(**base)


def test_rake_hand_computed_example():
    # dragon: freq 2, degree 3 + 3 = 6 -> 3; every other word: freq 1, degree 3 -> 3.
    out = rake_extract(SENTENCE, RakeConfig(stopwords=frozenset({"a"})))
    assert out == [("rare golden dragon", 9.0), ("unique collectible dragon", 9.0)]


def test_rake_mixed_scores():
    # candidates: "moon cat", "cat" -> cat: freq 2, degree 3 -> 1.5; moon: 2/1 = 2.
    out = rake_extract("moon cat and cat", RakeConfig(stopwords=frozenset({"and"})))
    assert out == [("moon cat", 3.5), ("cat", 1.5)]


@pytest.mark.parametrize("text", ["", "the of and", "   ", "!!! ..."])
def test_rake_no_candidates(text):
    assert rake_extract(text, RakeConfig()) == []


def test_rake_drops_long_phrases_and_short_words():
    cfg = RakeConfig(stopwords=frozenset({"the"}), max_phrase_words=2, min_word_chars=2)
    out = dict(rake_extract("one two three the big x cat", cfg))
    assert "one two three" not in out
    assert set(out) == {"big", "cat"}


def test_rake_keeps_digits():
    assert ("year 2021", 4.0) in rake_extract("year 2021", RakeConfig())


def test_top_k():
    cfg = RakeConfig(stopwords=frozenset({"a"}), top_k_phrases=1)
    assert rake_extract(SENTENCE, cfg) == [("rare golden dragon", 9.0)]


def test_default_stopwords_loaded():
    words = default_stopwords()
    assert {"the", "a", "of", "and"} <= words
    assert len(words) == 179


words = st.sampled_from(["the", "of", "a", "dragon", "gold", "moon", "cat", "rare", "x", "2021", ",", "."])


@given(st.lists(words, max_size=30))
def test_rake_properties(tokens):
    text = " ".join(tokens)
    cfg = RakeConfig()
    out = rake_extract(text, cfg)
    assert out == rake_extract(text, cfg)
    for phrase, score in out:
        parts = phrase.split()
        assert 1 <= len(parts) <= cfg.max_phrase_words
        assert not set(parts) & cfg.stopwords
        assert score > 0
    scores = [(-s, p) for p, s in out]
    assert scores == sorted(scores)


@settings(max_examples=50)
@given(st.randoms(use_true_random=False))
def test_sentence_permutation_keeps_phrase_set(rnd):
    sentences = ["Rare golden dragon.", "Unique collectible dragon.", "Moon cat rises.", "Bored ape yacht."]
    shuffled = sentences[:]
    rnd.shuffle(shuffled)
    a = rake_extract(" ".join(sentences))
    b = rake_extract(" ".join(shuffled))
    assert {p for p, _ in a} == {p for p, _ in b}
    assert dict(a) == dict(b)


def test_profile_includes_verbatim_names():
    profile = build_item_profile(_item(name="Bored Ape", collection_name="Bored Ape Yacht Club"))
    assert "bored ape" in profile.keywords
    assert "bored ape yacht club" in profile.keywords


def test_profile_union_of_rake_and_name():
    cfg = RakeConfig(stopwords=frozenset({"a"}))
    profile = build_item_profile(_item(name="Dragon", description=SENTENCE), cfg)
    assert {"rare golden dragon", "unique collectible dragon", "dragon"} <= set(profile.keywords)
    assert profile.keywords.index("rare golden dragon") < profile.keywords.index("dragon")


def test_profile_all_stopwords_skipped():
    with pytest.raises(ItemSkipped) as exc:
        build_item_profile(_item(name="The", description="of the", collection_name="And", collection_description="a"))
    assert exc.value.reference_id == ADDR_A + ":1"
