import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from tstsim.dataset import TextPair
from tstsim.metrics import (
    MeasureScore,
    ScoringConfig,
    VectorStore,
    analyze_pair,
    bleu,
    chrf,
    embed_cosine,
    merge_with_ne,
    meteor,
    ne_jaccard,
    ne_token_fraction,
    rouge_l,
    rouge_n,
    score_pair,
)
from tstsim.ner import EntitySpan, Gazetteer
from tstsim.text import lemmatize, tokenize

T = tokenize
VOCAB = "the a cat dog sat on mat ran to from paris city".split()


def random_sentence(rng, lo=1, hi=9):
    return " ".join(rng.choice(VOCAB) for _ in range(rng.randint(lo, hi)))


# ---------------------------------------------------------------------------
# BLEU


def test_bleu_identical():
    s = T("I need a flight to Boston tomorrow")
    assert bleu(s, s).value == 1.0


def test_bleu_disjoint():
    assert bleu(T("a b c"), T("x y z")).value == 0.0


def test_bleu_clipping_example():
    score = bleu(T("the cat"), T("the the the")).value
    # p1 = 1/3, p2 = (0+1)/(2+1), p3 = (0+1)/(1+1), p4 = 1/1, BP = 1 (hyp longer)
    hand = (1 / 3 * 1 / 3 * 1 / 2 * 1) ** 0.25
    assert score == pytest.approx(hand, abs=1e-15)
    assert score == pytest.approx(oracles.bleu("the cat", "the the the"), abs=1e-15)


def test_bleu_degenerate():
    s = bleu(T("..."), T("a b"))
    assert s.value == 0.0 and s.degenerate


def test_bleu_matches_oracle():
    rng = random.Random(5)
    for _ in range(200):
        r, h = random_sentence(rng), random_sentence(rng)
        assert bleu(T(r), T(h)).value == pytest.approx(oracles.bleu(r, h), abs=1e-12)


def _extends_all_orders(ref, hyp, tok):
    """True if every new n-gram ending at ``tok`` is still unclipped in ``ref``."""
    new = hyp + [tok]
    for n in range(1, min(4, len(new)) + 1):
        gram = tuple(new[-n:])
        if oracles.ngram_list(new, n).count(gram) > oracles.ngram_list(ref, n).count(gram):
            return False
    return True


def test_bleu_monotone_under_matched_append():
    rng = random.Random(9)
    checked = 0
    for _ in range(4000):
        ref = random_sentence(rng, 2, 10).split()
        start = rng.randrange(len(ref))
        hyp = ref[start : start + rng.randint(0, len(ref))]
        if rng.random() < 0.5:
            hyp = [rng.choice(VOCAB) for _ in range(rng.randint(0, 3))] + hyp
        if not hyp:
            continue
        for tok in set(ref):
            if _extends_all_orders(ref, hyp, tok):
                before = bleu(T(" ".join(ref)), T(" ".join(hyp))).value
                after = bleu(T(" ".join(ref)), T(" ".join(hyp + [tok]))).value
                assert after >= before - 1e-15
                checked += 1
    assert checked > 500


# ---------------------------------------------------------------------------
# ROUGE


def test_rouge_examples():
    s = T("book a table for two")
    for n in (1, 2, 3):
        assert rouge_n(s, s, n).value == 1.0
        assert rouge_n(T("a b c"), T("x y z"), n).value == 0.0
    assert rouge_n(T("the cat sat"), T("the cat"), 1).value == pytest.approx(0.8)
    assert rouge_l(s, s).value == 1.0
    assert rouge_l(T("a b"), T("c d")).value == 0.0
    assert rouge_l(T("the cat sat"), T("the cat")).value == pytest.approx(0.8)


def test_rouge_short_side_has_no_ngrams():
    s = rouge_n(T("a b"), T("a b"), 3)
    assert s.value == 0.0 and not s.degenerate
    with pytest.raises(ValueError):
        rouge_n(T("a"), T("a"), 4)


def test_rouge_n_matches_oracle():
    rng = random.Random(1)
    for _ in range(200):
        r, h = random_sentence(rng), random_sentence(rng)
        for n in (1, 2, 3):
            assert rouge_n(T(r), T(h), n).value == pytest.approx(oracles.rouge_n(r, h, n), abs=1e-12)
        assert rouge_l(T(r), T(h)).value == pytest.approx(oracles.rouge_l(r, h), abs=1e-12)


# ---------------------------------------------------------------------------
# chrF


def test_chrf_examples():
    assert chrf(T("abc def"), T("abc def")).value == 1.0
    assert chrf(T("abc"), T("xyz")).value == 0.0
    # orders 1..3; P = R = (2/3 + 1/2 + 0) / 3 = 7/18, so F = 7/18
    assert chrf(T("abc"), T("abd")).value == pytest.approx(7 / 18, abs=1e-15)
    assert chrf(T("abc"), T("abd")).value == pytest.approx(oracles.chrf("abc", "abd"), abs=1e-15)


def test_chrf_matches_oracle():
    rng = random.Random(2)
    for _ in range(200):
        r, h = random_sentence(rng), random_sentence(rng)
        assert chrf(T(r), T(h)).value == pytest.approx(oracles.chrf(r, h), abs=1e-12)


# ---------------------------------------------------------------------------
# METEOR


def test_meteor_identical_four_tokens():
    s = T("book the red car")
    assert meteor(s, s).value == pytest.approx(1 - 0.5 * (1 / 4) ** 3, abs=1e-15)


def test_meteor_no_matches():
    assert meteor(T("a b"), T("c d")).value == 0.0


def _forms_lemmas(text):
    forms = oracles.words(text)
    return forms, [lemmatize(w) for w in forms]


def test_meteor_example_matches_minimal_chunk_oracle():
    ref, hyp = "the cat sat on the mat", "the cat was sat on mat"
    rf, rl = _forms_lemmas(ref)
    hf, hl = _forms_lemmas(hyp)
    expected = oracles.meteor_bruteforce(rf, hf, rl, hl)
    # 5 matches, 3 chunks: (5/6) * (1 - 0.5 * (3/5)^3)
    assert expected == pytest.approx(5 / 6 * (1 - 0.5 * 0.216), abs=1e-15)
    assert meteor(T(ref), T(hyp)).value == pytest.approx(expected, abs=1e-15)


def test_meteor_lemma_stage():
    # "tickets" ~ "ticket" only through lemmas
    s = meteor(T("book the ticket"), T("book the tickets"))
    assert s.value == pytest.approx(1 - 0.5 * (1 / 3) ** 3)


def test_meteor_matches_greedy_oracle_and_bounded_by_bruteforce():
    rng = random.Random(4)
    for _ in range(200):
        r, h = random_sentence(rng, 1, 6), random_sentence(rng, 1, 6)
        rf, rl = _forms_lemmas(r)
        hf, hl = _forms_lemmas(h)
        got = meteor(T(r), T(h)).value
        assert got == pytest.approx(oracles.meteor_greedy(rf, hf, rl, hl), abs=1e-12)
        assert 0.0 <= got <= 1.0


# ---------------------------------------------------------------------------
# word vectors


@pytest.fixture
def store():
    return VectorStore.from_dict({"good": [1.0, 0.0], "day": [0.0, 1.0], "bad": [-1.0, 0.0], "zero": [0.0, 0.0]})


def test_embed_identical(store):
    s = T("good day")
    assert embed_cosine(s, s, store).value == pytest.approx(1.0)


def test_embed_oov(store):
    s = embed_cosine(T("good day"), T("unknown words"), store)
    assert s.value == 0.0 and s.degenerate


def test_embed_hand_arithmetic(store):
    # means (0.5, 0.5) and (-0.5, 0.5): dot 0 -> cosine 0 -> 0.5
    assert embed_cosine(T("good day"), T("bad day"), store).value == pytest.approx(0.5)
    # (1, 0) vs (-1, 0): cosine -1 -> 0.0
    assert embed_cosine(T("good"), T("bad"), store).value == pytest.approx(0.0)
    # (1, 0) vs (0.5, 0.5): cosine 1/sqrt(2)
    expected = (1 / math.sqrt(2) + 1) / 2
    assert embed_cosine(T("good"), T("good day !"), store).value == pytest.approx(expected)


def test_vector_store_loading(tmp_path):
    p = tmp_path / "v.txt"
    p.write_text("2 3\nparis 1 0 0\nlondon 0 1 0\n", encoding="utf-8")
    vs = VectorStore.load(p)
    assert vs.dim == 3 and len(vs) == 2 and "paris" in vs
    p.write_text("paris 1 0\nlondon 0 1\n", encoding="utf-8")
    assert VectorStore.load(p).dim == 2
    p.write_text("paris 1 0\nlondon 0 1 2\n", encoding="utf-8")
    with pytest.raises(ValueError, match="dimension"):
        VectorStore.load(p)
    with pytest.raises(ValueError):
        VectorStore.from_dict({"a": [1, 2], "b": [1]})


# ---------------------------------------------------------------------------
# entity signal and merge


def test_ne_jaccard_examples():
    assert ne_jaccard({"vancouver"}, {"vancouver"}).value == 1.0
    assert ne_jaccard({"lax"}, {"los angeles"}).value == 0.0
    src = {"sacramento", "fresno", "the 5th of march"}
    assert ne_jaccard(src, {"sacramento", "the 5th of march"}).value == pytest.approx(2 / 3)
    assert ne_jaccard(set(), set()).value == 1.0
    assert ne_jaccard(["a", "a"], ["a"]).value == 1.0


@given(st.sets(st.text(max_size=3), max_size=5), st.sets(st.text(max_size=3), max_size=5))
def test_ne_jaccard_symmetric(a, b):
    assert ne_jaccard(a, b).value == ne_jaccard(b, a).value
    if a:
        assert ne_jaccard(a, a).value == 1.0


def _span(start, end):
    return EntitySpan("LOCATION", start, end, "x")


def test_ne_token_fraction_examples():
    src, dst = T("a b c d e f"), T("a b c d e f g h")
    assert ne_token_fraction(src, [], dst, []) == 0.0
    assert ne_token_fraction(src, [_span(0, 6)], dst, [_span(0, 8)]) == 1.0
    assert ne_token_fraction(src, [_span(2, 3)], dst, [_span(0, 2)]) == pytest.approx(3 / 14)
    assert ne_token_fraction(T(""), [], T(""), []) == 0.0


def test_ne_token_fraction_ignores_punctuation():
    src = T("Paris !")
    assert ne_token_fraction(src, [_span(0, 2)], T("ok ."), []) == pytest.approx(1 / 2)


def ms(v, mid="bleu"):
    return MeasureScore(mid, "ngram", v)


def test_merge_examples():
    strong, ne = ms(0.8), MeasureScore("ne_jaccard", "ne", 0.5)
    assert merge_with_ne(strong, ne, 0.0).value == 0.8
    assert merge_with_ne(strong, ne, 1.0).value == 0.5
    out = merge_with_ne(strong, ne, 0.4)
    assert out.value == pytest.approx(0.68)
    assert out.measure_id == "bleu+NE" and out.kind == "ngram"


def test_merge_rejects_bad_inputs():
    ne = MeasureScore("ne_jaccard", "ne", 0.5)
    with pytest.raises(ValueError):
        merge_with_ne(ms(0.5), ne, 1.5)
    with pytest.raises(ValueError):
        merge_with_ne(MeasureScore("x", "pre-trained", 3.2, None), ne, 0.5)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_merge_is_convex(s, n, p):
    out = merge_with_ne(ms(s), MeasureScore("ne_jaccard", "ne", n), p).value
    assert min(s, n) <= out <= max(s, n)


# ---------------------------------------------------------------------------
# per-pair scoring


def test_score_pair_identical():
    pair = TextPair("x", "I need 2 tickets to Boston on Friday please", "I need 2 tickets to Boston on Friday please")
    cfg = ScoringConfig(gazetteer=Gazetteer.default())
    scores = score_pair(pair, cfg)
    assert [s.measure_id for s in scores] == sorted(s.measure_id for s in scores)
    for s in scores:
        if s.measure_id.startswith("meteor"):
            continue  # fragmentation penalty keeps one-chunk METEOR below 1
        assert s.value == pytest.approx(1.0), s.measure_id


def test_score_pair_only_bleu():
    cfg = ScoringConfig(measures=("bleu",), gazetteer=Gazetteer.default())
    scores = score_pair(TextPair("x", "a b", "a c"), cfg)
    assert [s.measure_id for s in scores] == ["bleu", "bleu+NE"]


def test_score_pair_vancouver_rewrite():
    pair = TextPair("t1", "I will depart from Vancouver.", "i'll go to Vancouver and get out of there.")
    res = analyze_pair(pair, ScoringConfig(gazetteer=Gazetteer.default()))
    by = {s.measure_id: s.value for s in res.scores}
    assert res.ne.value == 1.0
    assert by["ne_jaccard"] == 1.0
    assert by["bleu"] < 0.3 and by["rouge2"] == 0.0
    # 1 entity token in 5 + 1 in 10 content tokens
    assert res.p == pytest.approx(2 / 15)
    assert by["bleu+NE"] == pytest.approx(by["bleu"] * (1 - 2 / 15) + 2 / 15)


def test_score_pair_no_entities_keeps_strong_exactly():
    res = analyze_pair(TextPair("x", "yes book it", "yes please book"), ScoringConfig(gazetteer=Gazetteer.default()))
    by = {s.measure_id: s.value for s in res.scores}
    assert res.p == 0.0
    for mid in ("bleu", "chrf", "meteor", "rouge1", "rougeL"):
        assert by[mid + "+NE"] == by[mid]


def test_score_pair_with_vectors():
    vs = VectorStore.from_dict({"book": [1.0, 0.2], "reserve": [0.9, 0.3], "table": [0.1, 1.0]})
    cfg = ScoringConfig(measures=("w2v_cossim",), vector_stores={"w2v_cossim": vs})
    scores = score_pair(TextPair("x", "book a table", "reserve a table"), cfg)
    assert [s.measure_id for s in scores] == ["w2v_cossim", "w2v_cossim+NE"]
    assert scores[0].kind == "vect-sim" and 0.9 < scores[0].value <= 1.0


def test_score_pair_degenerate_flag_propagates():
    scores = score_pair(TextPair("x", "?!", "ok"), ScoringConfig(measures=("bleu",)))
    assert all(s.degenerate for s in scores)


def test_config_rejects_unknown_measure():
    with pytest.raises(ValueError):
        ScoringConfig(measures=("bogus",))
    with pytest.raises(ValueError):
        ScoringConfig(measures=())


def test_all_values_bounded():
    rng = random.Random(8)
    cfg = ScoringConfig(gazetteer=Gazetteer.default())
    for k in range(100):
        pair = TextPair(str(k), random_sentence(rng), random_sentence(rng))
        for s in score_pair(pair, cfg):
            assert 0.0 <= s.value <= 1.0


# ---------------------------------------------------------------------------
# frozen 50-pair fixture


@pytest.fixture(scope="module")
def fixture_results(fixtures_dir):
    from tstsim.dataset import load_dataset

    pairs = load_dataset(fixtures_dir / "synthetic50.tsv")
    cfg = ScoringConfig(gazetteer=Gazetteer.default())
    return {ap.id: analyze_pair(ap.pair, cfg) for ap in pairs}


def test_fixture_per_pair_scores(fixture_results, synthetic_expected):
    for pid, want in synthetic_expected["pairs"].items():
        res = fixture_results[pid]
        assert res.p == pytest.approx(want["p"], abs=1e-12), pid
        assert res.ne.value == pytest.approx(want["ne_jaccard"], abs=1e-12), pid
        for s in res.scores:
            assert s.value == pytest.approx(want[s.measure_id], abs=1e-12), (pid, s.measure_id)


def test_fixture_external_entities_agree(fixtures_dir, fixture_results):
    from tstsim.dataset import load_dataset
    from tstsim.ner import load_external_entities

    pairs = [ap.pair for ap in load_dataset(fixtures_dir / "synthetic50.tsv")]
    table = load_external_entities(fixtures_dir / "synthetic50_entities.jsonl", pairs)
    cfg = ScoringConfig(entities=table)
    for pair in pairs:
        res = analyze_pair(pair, cfg)
        assert res.p == pytest.approx(fixture_results[pair.id].p, abs=1e-15)
        assert [s.value for s in res.scores] == [s.value for s in fixture_results[pair.id].scores]
