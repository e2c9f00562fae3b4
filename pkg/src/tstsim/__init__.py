"""Content-preservation measures for text style transfer.

Scores an original sentence against its style-transferred rewrite with
n-gram, word-vector and named-entity measures, merges each measure with the
entity signal in proportion to the share of entity tokens, and evaluates the
measures against averaged crowd judgments.
"""

from .dataset import (
    AnnotatedPair,
    TextPair,
    VoteRecord,
    aggregate_votes,
    krippendorff_alpha,
    load_dataset,
)
from .kernels import BACKEND
from .metrics import (
    MeasureScore,
    ScoringConfig,
    VectorStore,
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
from .ner import EntitySpan, Gazetteer, extract_entities, load_external_entities, normalize_entity
from .stats import evaluate, minmax_normalize, rank_divergence, spearman, williams_test
from .text import Token, TokenizedText, char_ngrams, lemmatize, tokenize, word_ngrams

__version__ = "0.1.0"
