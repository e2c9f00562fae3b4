import random
import string

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tstsim.text import (
    Lemmatizer,
    char_ngrams,
    default_lemmatizer,
    lemmatize,
    read_exception_table,
    tokenize,
    word_ngrams,
)


def lowers(text):
    return [t.lower for t in tokenize(text).tokens]


def test_empty_input():
    assert tokenize("").tokens == ()


def test_departure_sentence():
    toks = tokenize("I will depart from Vancouver.").tokens
    assert [t.lower for t in toks] == ["i", "will", "depart", "from", "vancouver", "."]
    assert toks[-1].is_punct
    assert not any(t.is_punct for t in toks[:-1])


def test_lowercase_sentence_has_no_punct():
    toks = tokenize("yes i wanna book the tickets").tokens
    assert len(toks) == 6
    assert not any(t.is_punct for t in toks)


def test_each_punct_char_is_a_token():
    assert lowers("Hi!!, ok") == ["hi", "!", "!", ",", "ok"]
    assert lowers("i'll") == ["i", "'", "ll"]


@given(st.text())
def test_offsets_round_trip(text):
    tt = tokenize(text)
    pos = 0
    rebuilt = []
    for tok in tt.tokens:
        assert tok.char_start < tok.char_end
        assert tok.char_start >= pos
        assert text[tok.char_start : tok.char_end] == tok.surface
        assert tok.lower == tok.surface.casefold()
        assert tok.lemma
        gap = text[pos : tok.char_start]
        assert gap.strip() == ""
        rebuilt.append(gap + tok.surface)
        pos = tok.char_end
    assert text[pos:].strip() == ""
    assert "".join(rebuilt) + text[pos:] == text


@given(st.text())
def test_tokenize_is_deterministic(text):
    assert tokenize(text) == tokenize(text)


@pytest.mark.parametrize(
    "word, lemma",
    [("tickets", "ticket"), ("vancouver", "vancouver"), ("restaurants", "restaurant"),
     ("cities", "city"), ("booking", "book"), ("planned", "plan"), ("went", "go"),
     ("buses", "bus"), ("hundred", "hundred"), ("14th", "14th"), ("march", "march")],
)
def test_lemmatize_examples(word, lemma):
    assert lemmatize(word) == lemma


def test_lemmatize_token_and_unknown_form():
    tok = tokenize("Tickets").tokens[0]
    assert lemmatize(tok) == "ticket"
    assert lemmatize("xyz") == "xyz"


def _sample_words(k=1000):
    lem = default_lemmatizer()
    words = sorted(set(lem.exceptions) | set(lem.exceptions.values()))
    rng = random.Random(7)
    suffixes = ["", "s", "es", "ies", "ing", "ed", "ied", "ss", "us", "eed", "ning", "tted"]
    while len(words) < k:
        stem = "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randint(1, 7)))
        words.append(stem + rng.choice(suffixes))
    return words[:k]


def test_lemmatizer_idempotent_on_sample():
    sample = _sample_words()
    assert len(sample) == 1000
    for w in sample:
        once = lemmatize(w)
        assert lemmatize(once) == once, w


def test_exception_table_entries_are_honoured():
    lem = default_lemmatizer()
    for form, lemma in lem.exceptions.items():
        assert lem.lemma(form) == lemma


def test_exception_table_file(tmp_path):
    path = tmp_path / "exc.tsv"
    path.write_text("# comment\nmice\tmouse\n\ngeese\tgoose  # trailing\n", encoding="utf-8")
    lem = Lemmatizer.from_file(path)
    assert lem.lemma("geese") == "goose"
    assert lem.lemma("mice") == "mouse"
    with pytest.raises(ValueError, match="line 1"):
        read_exception_table("no tab here")


def test_word_ngrams_examples():
    assert word_ngrams(["a", "b", "c"], 2) == {("a", "b"): 1, ("b", "c"): 1}
    assert word_ngrams(["a"], 2) == {}
    assert word_ngrams(["a", "a", "a"], 1) == {("a",): 3}
    assert word_ngrams(tokenize("A b").tokens, 1) == {("a",): 1, ("b",): 1}
    with pytest.raises(ValueError):
        word_ngrams(["a"], 0)


@given(st.lists(st.sampled_from("abc"), max_size=12), st.integers(1, 5))
def test_word_ngram_count(tokens, n):
    assert sum(word_ngrams(tokens, n).values()) == max(0, len(tokens) - n + 1)


def test_char_ngrams_examples():
    assert char_ngrams("ab", 1) == {"a": 1, "b": 1}
    assert char_ngrams("ab", 3) == {}
    assert char_ngrams("aaa", 2) == {"aa": 2}
    assert char_ngrams("  A   B ", 3) == {"a b": 1}
    with pytest.raises(ValueError):
        char_ngrams("ab", 0)
