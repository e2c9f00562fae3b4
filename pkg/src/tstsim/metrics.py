"""Content-similarity measures for one (original, rewrite) pair.

Pairwise functions take the original sentence as ``ref`` and the rewrite as
``hyp``; precision is measured on ``hyp`` and recall on ``ref``, so argument
order matters. Word-level measures ignore punctuation tokens and compare
case-folded forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable

import numpy as np

from .kernels import greedy_align, lcs_length
from .ner import EntityAnnotationTable, EntitySpan, Gazetteer, entity_set, extract_entities
from .text import TokenizedText, char_ngrams, tokenize, word_ngrams

UNIT = (0.0, 1.0)
NE_SUFFIX = "+NE"
KINDS = ("ngram", "vect-sim", "pre-trained", "ne")


@dataclass(frozen=True)
class MeasureScore:
    measure_id: str
    kind: str
    value: float
    natural_range: tuple[float, float] | None = UNIT
    degenerate: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}")


def _score(measure_id: str, kind: str, value: float, degenerate: bool = False) -> MeasureScore:
    return MeasureScore(measure_id, kind, float(value), UNIT, degenerate)


def _forms(text: TokenizedText) -> list[str]:
    return [t.lower for t in text.tokens if not t.is_punct]


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


# ---------------------------------------------------------------------------
# n-gram measures


def bleu(ref: TokenizedText, hyp: TokenizedText, max_n: int = 4) -> MeasureScore:
    """Sentence BLEU with add-one smoothing on orders >= 2."""
    r, h = _forms(ref), _forms(hyp)
    if not r or not h:
        return _score("bleu", "ngram", 0.0, degenerate=True)
    log_p = 0.0
    for n in range(1, max_n + 1):
        hc = word_ngrams(h, n)
        matched = sum((hc & word_ngrams(r, n)).values())
        total = sum(hc.values())
        if n == 1:
            if matched == 0:
                return _score("bleu", "ngram", 0.0)
            p = matched / total
        else:
            p = (matched + 1) / (total + 1)
        log_p += math.log(p) / max_n
    bp = 1.0 if len(h) > len(r) else math.exp(1 - len(r) / len(h))
    return _score("bleu", "ngram", min(1.0, bp * math.exp(log_p)))


def rouge_n(ref: TokenizedText, hyp: TokenizedText, n: int = 1) -> MeasureScore:
    if n not in (1, 2, 3):
        raise ValueError("rouge_n supports n in {1, 2, 3}")
    mid = f"rouge{n}"
    r, h = _forms(ref), _forms(hyp)
    if not r or not h:
        return _score(mid, "ngram", 0.0, degenerate=True)
    rc, hc = word_ngrams(r, n), word_ngrams(h, n)
    if not rc or not hc:
        return _score(mid, "ngram", 0.0)
    overlap = sum((rc & hc).values())
    return _score(mid, "ngram", _f1(overlap / sum(hc.values()), overlap / sum(rc.values())))


def _intern(*seqs: list[str]) -> list[list[int]]:
    vocab: dict[str, int] = {}
    return [[vocab.setdefault(s, len(vocab)) for s in seq] for seq in seqs]


def rouge_l(ref: TokenizedText, hyp: TokenizedText) -> MeasureScore:
    r, h = _forms(ref), _forms(hyp)
    if not r or not h:
        return _score("rougeL", "ngram", 0.0, degenerate=True)
    ri, hi = _intern(r, h)
    lcs = lcs_length(ri, hi)
    return _score("rougeL", "ngram", _f1(lcs / len(h), lcs / len(r)))


def chrf(ref: TokenizedText, hyp: TokenizedText, max_n: int = 6, beta: float = 2.0) -> MeasureScore:
    """Character n-gram F-score over whitespace-free, case-folded text.

    Precision and recall are averaged over the orders for which both sides
    have at least one n-gram, then combined with recall weighted by beta.
    """
    r = "".join(ref.original.split())
    h = "".join(hyp.original.split())
    if not r or not h:
        return _score("chrf", "ngram", 0.0, degenerate=True)
    p_sum = r_sum = 0.0
    orders = 0
    for n in range(1, max_n + 1):
        rc, hc = char_ngrams(r, n), char_ngrams(h, n)
        if not rc or not hc:
            continue
        common = sum((rc & hc).values())
        p_sum += common / sum(hc.values())
        r_sum += common / sum(rc.values())
        orders += 1
    p, rec = p_sum / orders, r_sum / orders
    b2 = beta * beta
    value = (1 + b2) * p * rec / (b2 * p + rec) if p + rec > 0 else 0.0
    return _score("chrf", "ngram", value)


def meteor(ref: TokenizedText, hyp: TokenizedText) -> MeasureScore:
    """METEOR with exact and lemma matching stages and no synonym stage."""
    rw = [t for t in ref.tokens if not t.is_punct]
    hw = [t for t in hyp.tokens if not t.is_punct]
    if not rw or not hw:
        return _score("meteor", "ngram", 0.0, degenerate=True)
    hf, rf = _intern([t.lower for t in hw], [t.lower for t in rw])
    hl, rl = _intern([t.lemma for t in hw], [t.lemma for t in rw])
    matches, chunks = greedy_align(hf, rf, hl, rl)
    if matches == 0:
        return _score("meteor", "ngram", 0.0)
    p, r = matches / len(hw), matches / len(rw)
    fmean = 10 * p * r / (r + 9 * p)
    penalty = 0.5 * (chunks / matches) ** 3
    return _score("meteor", "ngram", fmean * (1 - penalty))


# ---------------------------------------------------------------------------
# averaged word vectors


class VectorStore:
    """Word -> dense vector table with a fixed dimension."""

    def __init__(self, words: list[str], matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] < 1:
            raise ValueError("vector matrix must be 2-d with dimension >= 1")
        if len(words) != matrix.shape[0]:
            raise ValueError("word count does not match vector count")
        self.index = {w: i for i, w in enumerate(words)}
        self.matrix = matrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def __len__(self) -> int:
        return len(self.index)

    def get(self, word: str) -> np.ndarray | None:
        i = self.index.get(word)
        return None if i is None else self.matrix[i]

    @classmethod
    def from_dict(cls, vectors: dict[str, Iterable[float]]) -> "VectorStore":
        words = list(vectors)
        rows = [list(map(float, vectors[w])) for w in words]
        if len({len(r) for r in rows}) > 1:
            raise ValueError("vectors have different dimensions")
        return cls(words, np.array(rows, dtype=np.float64).reshape(len(words), -1))

    @classmethod
    def load(cls, path: str | Path) -> "VectorStore":
        """Read word2vec text format; the ``count dim`` header is optional."""
        words: list[str] = []
        rows: list[list[float]] = []
        dim = None
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                parts = line.rstrip("\n").rstrip().split(" ")
                if not parts or parts == [""]:
                    continue
                if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                    dim = int(parts[1])
                    continue
                try:
                    vec = [float(x) for x in parts[1:]]
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: non-numeric vector component") from None
                if dim is None:
                    dim = len(vec)
                if len(vec) != dim or dim < 1:
                    raise ValueError(f"{path}:{lineno}: expected dimension {dim}, got {len(vec)}")
                if parts[0] in words:
                    continue
                words.append(parts[0])
                rows.append(vec)
        if dim is None:
            raise ValueError(f"{path}: no vectors")
        return cls(words, np.array(rows, dtype=np.float64).reshape(len(words), dim))

    def mean_vector(self, text: TokenizedText) -> np.ndarray | None:
        vecs = []
        for tok in text.tokens:
            if tok.is_punct:
                continue
            v = self.get(tok.lower)
            if v is None:
                v = self.get(tok.surface)
            if v is not None:
                vecs.append(v)
        if not vecs:
            return None
        return np.mean(vecs, axis=0)


def embed_cosine(
    ref: TokenizedText, hyp: TokenizedText, store: VectorStore, measure_id: str = "embed_cossim"
) -> MeasureScore:
    """Cosine of mean word vectors, mapped from [-1, 1] onto [0, 1]."""
    a, b = store.mean_vector(ref), store.mean_vector(hyp)
    if a is None or b is None:
        return _score(measure_id, "vect-sim", 0.0, degenerate=True)
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return _score(measure_id, "vect-sim", 0.0, degenerate=True)
    cos = float(np.dot(a, b)) / (na * nb)
    return _score(measure_id, "vect-sim", min(1.0, max(0.0, (cos + 1) / 2)))


# ---------------------------------------------------------------------------
# named-entity signal and merging


def ne_jaccard(src_entities: Iterable[str], dst_entities: Iterable[str]) -> MeasureScore:
    a, b = set(src_entities), set(dst_entities)
    if not a and not b:
        return _score("ne_jaccard", "ne", 1.0)
    return _score("ne_jaccard", "ne", len(a & b) / len(a | b))


def ne_token_fraction(
    src: TokenizedText,
    src_spans: Iterable[EntitySpan],
    dst: TokenizedText,
    dst_spans: Iterable[EntitySpan],
) -> float:
    """Share of non-punctuation tokens, over both texts, inside entity spans."""
    inside = total = 0
    for text, spans in ((src, src_spans), (dst, dst_spans)):
        covered = set()
        for s in spans:
            covered.update(range(s.token_start, s.token_end))
        for k, tok in enumerate(text.tokens):
            if tok.is_punct:
                continue
            total += 1
            inside += k in covered
    return inside / total if total else 0.0


def merge_with_ne(strong: MeasureScore, ne: MeasureScore, p: float) -> MeasureScore:
    """Blend a measure with the entity signal, weighting the latter by ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if not 0.0 <= strong.value <= 1.0:
        raise ValueError(f"{strong.measure_id}: value {strong.value} is not normalized to [0, 1]")
    if p == 0.0:
        value = strong.value
    elif p == 1.0:
        value = ne.value
    else:
        # evaluated exactly and rounded once, so pairs whose merged values
        # are equal in exact arithmetic stay tied for the rank statistics
        w = Fraction(p)
        value = float(Fraction(strong.value) * (1 - w) + Fraction(ne.value) * w)
    return MeasureScore(
        strong.measure_id + NE_SUFFIX,
        strong.kind,
        value,
        UNIT,
        strong.degenerate or ne.degenerate,
    )


# ---------------------------------------------------------------------------
# per-pair scoring

NGRAM_MEASURES = ("bleu", "chrf", "meteor", "rouge1", "rouge2", "rouge3", "rougeL")
BUILTIN_MEASURES = NGRAM_MEASURES + ("ne_jaccard",)


@dataclass
class ScoringConfig:
    """What to compute for each pair.

    ``measures`` may name built-in measures or keys of ``vector_stores``.
    Entities come from ``entities`` (external annotations) when given,
    otherwise from the rule/gazetteer extractor.
    """

    measures: tuple[str, ...] = NGRAM_MEASURES + ("ne_jaccard",)
    gazetteer: Gazetteer | None = None
    vector_stores: dict[str, VectorStore] = field(default_factory=dict)
    entities: EntityAnnotationTable | None = None
    label_filter: frozenset[str] | None = None

    def __post_init__(self):
        if not self.measures:
            raise ValueError("at least one measure must be enabled")
        unknown = [m for m in self.measures if m not in BUILTIN_MEASURES and m not in self.vector_stores]
        if unknown:
            raise ValueError(f"unknown measures: {', '.join(unknown)}")


@dataclass(frozen=True)
class PairResult:
    id: str
    scores: tuple[MeasureScore, ...]
    p: float
    ne: MeasureScore
    src_entities: tuple[EntitySpan, ...]
    dst_entities: tuple[EntitySpan, ...]


def _filter(spans, labels):
    return [s for s in spans if labels is None or s.label in labels]


def _base_measure(mid: str, ref: TokenizedText, hyp: TokenizedText, config: ScoringConfig, ne: MeasureScore):
    if mid == "bleu":
        return bleu(ref, hyp)
    if mid.startswith("rouge") and mid[5:] in ("1", "2", "3"):
        return rouge_n(ref, hyp, int(mid[5:]))
    if mid == "rougeL":
        return rouge_l(ref, hyp)
    if mid == "chrf":
        return chrf(ref, hyp)
    if mid == "meteor":
        return meteor(ref, hyp)
    if mid == "ne_jaccard":
        return ne
    return embed_cosine(ref, hyp, config.vector_stores[mid], measure_id=mid)


def analyze_pair(pair, config: ScoringConfig) -> PairResult:
    """Score one pair with every enabled measure and its entity-merged variant."""
    pair = getattr(pair, "pair", pair)
    ref, hyp = tokenize(pair.source), tokenize(pair.target)
    if config.entities is not None:
        src_spans, dst_spans = config.entities.get(pair.id)
    else:
        src_spans = extract_entities(ref, config.gazetteer)
        dst_spans = extract_entities(hyp, config.gazetteer)
    src_spans = _filter(src_spans, config.label_filter)
    dst_spans = _filter(dst_spans, config.label_filter)
    ne = ne_jaccard(entity_set(src_spans), entity_set(dst_spans))
    p = ne_token_fraction(ref, src_spans, hyp, dst_spans)
    scores = []
    for mid in config.measures:
        base = _base_measure(mid, ref, hyp, config, ne)
        if base.measure_id != mid:
            base = replace(base, measure_id=mid)
        scores.append(base)
        scores.append(merge_with_ne(base, ne, p))
    scores.sort(key=lambda s: s.measure_id)
    return PairResult(pair.id, tuple(scores), p, ne, tuple(src_spans), tuple(dst_spans))


def score_pair(pair, config: ScoringConfig) -> list[MeasureScore]:
    return list(analyze_pair(pair, config).scores)
