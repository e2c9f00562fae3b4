"""Tokenization, lemmatization and n-gram extraction.

Everything here is deterministic and model-free so that n-gram scores are
reproducible byte for byte. Tokens are runs of word characters; every other
non-space character becomes a one-character punctuation token.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)
_WORD_RE = re.compile(r"\w", re.UNICODE)
_VOWELS = set("aeiouy")
# doubled final consonants that are undone after stripping -ing / -ed
_UNDOUBLE = set("bdgmnprt")


@dataclass(frozen=True)
class Token:
    surface: str
    lower: str
    lemma: str
    is_punct: bool
    char_start: int
    char_end: int


@dataclass(frozen=True)
class TokenizedText:
    original: str
    tokens: tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def words(self) -> list[Token]:
        """Non-punctuation tokens."""
        return [t for t in self.tokens if not t.is_punct]


class Lemmatizer:
    """Suffix-rule English lemmatizer backed by an exception table.

    Any word that appears as a lemma in the table is returned untouched, and
    every suffix rule shortens the word, so repeated application reaches a
    fixed point; :meth:`lemma` iterates to it, which makes the lemmatizer
    idempotent on its own outputs.
    """

    def __init__(self, exceptions: dict[str, str]):
        self.exceptions = dict(exceptions)
        self._protected = set(self.exceptions.values())
        self._cache: dict[str, str] = {}

    @classmethod
    def from_file(cls, path: str | Path) -> "Lemmatizer":
        return cls(read_exception_table(Path(path).read_text(encoding="utf-8")))

    @classmethod
    def default(cls) -> "Lemmatizer":
        text = resources.files("tstsim").joinpath("data/lemma_exceptions.tsv").read_text(
            encoding="utf-8"
        )
        return cls(read_exception_table(text))

    def _step(self, word: str) -> str:
        if word in self._protected:
            return word
        if word in self.exceptions:
            return self.exceptions[word]
        if len(word) <= 3 or not word.isalpha():
            return word
        if word.endswith("ies") and len(word) > 4:
            return word[:-3] + "y"
        if word.endswith(("sses", "shes", "ches", "xes", "zzes")):
            return word[:-2]
        if word.endswith("s") and not word.endswith(("ss", "us", "is", "ous")):
            return word[:-1]
        if word.endswith("ied") and len(word) > 4:
            return word[:-3] + "y"
        if word.endswith("ing"):
            return _strip_verb_suffix(word, 3)
        if word.endswith("ed") and not word.endswith("eed"):
            return _strip_verb_suffix(word, 2)
        return word

    def lemma(self, word: str) -> str:
        word = word.lower()
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        out = word
        while True:
            nxt = self._step(out)
            if nxt == out:
                break
            out = nxt
        self._cache[word] = out
        return out


def _strip_verb_suffix(word: str, k: int) -> str:
    stem = word[:-k]
    if len(stem) < 3 or not _VOWELS.intersection(stem):
        return word
    if len(stem) >= 4 and stem[-1] == stem[-2] and stem[-1] in _UNDOUBLE:
        stem = stem[:-1]
    return stem


def read_exception_table(text: str) -> dict[str, str]:
    """Parse ``form<TAB>lemma`` lines; ``#`` starts a comment."""
    table: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise ValueError(f"exception table line {lineno}: expected 'form<TAB>lemma'")
        table[parts[0].strip().lower()] = parts[1].strip().lower()
    return table


@lru_cache(maxsize=1)
def default_lemmatizer() -> Lemmatizer:
    return Lemmatizer.default()


def lemmatize(token: Token | str, lemmatizer: Lemmatizer | None = None) -> str:
    """Lowercase lemma of a token (or of a bare word)."""
    lem = lemmatizer or default_lemmatizer()
    word = token.lower if isinstance(token, Token) else token.lower()
    return lem.lemma(word)


def tokenize(text: str, lemmatizer: Lemmatizer | None = None) -> TokenizedText:
    lem = lemmatizer or default_lemmatizer()
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        surface = m.group()
        lower = surface.casefold()
        is_punct = _WORD_RE.match(surface) is None
        tokens.append(
            Token(
                surface=surface,
                lower=lower,
                lemma=lower if is_punct else lem.lemma(lower),
                is_punct=is_punct,
                char_start=m.start(),
                char_end=m.end(),
            )
        )
    return TokenizedText(original=text, tokens=tuple(tokens))


def word_ngrams(tokens, n: int) -> Counter:
    """Multiset of contiguous n-grams over the lowercase forms.

    ``tokens`` may be :class:`Token` objects or plain strings.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    forms = [t.lower if isinstance(t, Token) else t for t in tokens]
    return Counter(tuple(forms[i : i + n]) for i in range(len(forms) - n + 1))


def normalize_whitespace(text: str) -> str:
    return " ".join(text.split()).casefold()


def char_ngrams(text: str, n: int) -> Counter:
    if n < 1:
        raise ValueError("n must be >= 1")
    s = normalize_whitespace(text)
    return Counter(s[i : i + n] for i in range(len(s) - n + 1))
