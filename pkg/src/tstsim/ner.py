"""Named-entity extraction and normalization.

Two sources of entities are supported: a deterministic rule + gazetteer
extractor (:func:`extract_entities`) and ingestion of spans produced by an
external tagger (:func:`load_external_entities`).
"""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from .text import TokenizedText, tokenize

logger = logging.getLogger(__name__)

LABELS = ("DATE", "TIME", "MONEY", "CARDINAL", "LOCATION", "ORG", "MISC")

# spaCy/OntoNotes labels folded onto our label set
EXTERNAL_LABEL_MAP = {
    "GPE": "LOCATION",
    "LOC": "LOCATION",
    "FAC": "LOCATION",
    "LOCATION": "LOCATION",
    "ORG": "ORG",
    "DATE": "DATE",
    "TIME": "TIME",
    "MONEY": "MONEY",
    "CARDINAL": "CARDINAL",
}


@dataclass(frozen=True)
class EntitySpan:
    label: str
    token_start: int
    token_end: int
    normalized: str


class Gazetteer:
    """Label -> lowercase phrases, matched longest-first over token forms."""

    def __init__(self, entries: dict[str, Iterable[str]] | None = None):
        self.entries: dict[str, set[str]] = defaultdict(set)
        # first token -> {phrase tuple: label}
        self._index: dict[str, dict[tuple[str, ...], str]] = defaultdict(dict)
        self.max_len = 0
        for label, phrases in (entries or {}).items():
            for phrase in phrases:
                self.add(label, phrase)

    def add(self, label: str, phrase: str) -> None:
        if label not in LABELS:
            raise ValueError(f"unknown gazetteer label {label!r}")
        key = tuple(t.lower for t in tokenize(phrase).tokens)
        if not key:
            raise ValueError("empty gazetteer phrase")
        self.entries[label].add(" ".join(key))
        bucket = self._index[key[0]]
        # a phrase listed under several labels resolves to the smallest label
        # so the result does not depend on file order
        if key not in bucket or label < bucket[key]:
            bucket[key] = label
        self.max_len = max(self.max_len, len(key))

    @classmethod
    def from_file(cls, path: str | Path) -> "Gazetteer":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def from_text(cls, text: str) -> "Gazetteer":
        gaz = cls()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"gazetteer line {lineno}: expected 'label<TAB>phrase'")
            gaz.add(parts[0].strip().upper(), parts[1].strip())
        return gaz

    @classmethod
    def default(cls) -> "Gazetteer":
        return cls.from_text(
            resources.files("tstsim").joinpath("data/gazetteer.tsv").read_text(encoding="utf-8")
        )

    def matches(self, forms: list[str]) -> list[tuple[int, int, str]]:
        """Longest phrase starting at each position, as (start, end, label)."""
        found = []
        for i, form in enumerate(forms):
            bucket = self._index.get(form)
            if not bucket:
                continue
            for n in range(min(self.max_len, len(forms) - i), 0, -1):
                label = bucket.get(tuple(forms[i : i + n]))
                if label is not None:
                    found.append((i, i + n, label))
                    break
        return found


# ---------------------------------------------------------------------------
# rule patterns

WEEKDAYS = {"monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"}
MONTHS = {
    "january", "february", "march", "april", "may", "june", "july", "august",
    "september", "october", "november", "december",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec",
}
# month abbreviations / "may" that double as common words need a day number
AMBIGUOUS_MONTHS = {"may", "mar", "jan", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec", "feb", "apr"}
RELATIVE_DAYS = {"today", "tomorrow", "tonight", "yesterday"}
DATE_MODIFIERS = {"next", "this", "last", "coming"}
ORDINAL_WORDS = {
    "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth",
    "ninth", "tenth", "eleventh", "twelfth", "thirteenth", "fourteenth", "fifteenth",
    "sixteenth", "seventeenth", "eighteenth", "nineteenth", "twentieth", "thirtieth",
}
NUMBER_WORDS = {
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
    "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
    "seventeen", "eighteen", "nineteen", "twenty", "thirty", "forty", "fifty",
    "sixty", "seventy", "eighty", "ninety", "hundred", "thousand", "million",
    "billion", "dozen",
}
CURRENCY_WORDS = {
    "dollar", "dollars", "buck", "bucks", "usd", "cent", "cents", "euro", "euros",
    "pound", "pounds", "eur", "gbp",
}
CURRENCY_SYMBOLS = {"$", "€", "£"}
TIME_WORDS = {"noon", "midnight"}
MERIDIEM = {"am", "pm"}
DAY_SUFFIXES = ("st", "nd", "rd", "th")


def _is_ordinal_day(form: str) -> bool:
    if form in ORDINAL_WORDS:
        return True
    return (
        form.endswith(DAY_SUFFIXES)
        and form[:-2].isdigit()
        and 1 <= int(form[:-2]) <= 31
    )


def _is_day_number(form: str) -> bool:
    return _is_ordinal_day(form) or (form.isdigit() and 1 <= int(form) <= 31)


def _number_run(forms: list[str], i: int) -> int:
    """End of the number expression starting at ``i`` (``i`` if none).

    Accepts digit groups joined by ``,`` or ``.`` and number-word sequences
    that may contain a linking "and" ("two hundred and forty").
    """
    n = len(forms)
    if i < n and forms[i].isdigit():
        j = i + 1
        while j + 1 < n and forms[j] in {",", "."} and forms[j + 1].isdigit():
            j += 2
        return j
    j = i
    while j < n:
        if forms[j] in NUMBER_WORDS:
            j += 1
        elif forms[j] == "-" and j > i and j + 1 < n and forms[j + 1] in NUMBER_WORDS:
            j += 2
        elif forms[j] == "and" and j > i and j + 1 < n and forms[j + 1] in NUMBER_WORDS:
            j += 2
        else:
            break
    return j


def _match_date(forms: list[str], i: int) -> int:
    n = len(forms)
    f = forms[i]
    if f in RELATIVE_DAYS:
        return i + 1
    if f in DATE_MODIFIERS and i + 1 < n and forms[i + 1] in WEEKDAYS:
        return i + 2
    if f in WEEKDAYS:
        return i + 1
    # month [day] / month-the-ordinal
    if f in MONTHS:
        if i + 1 < n and _is_day_number(forms[i + 1]):
            return i + 2
        if i + 2 < n and forms[i + 1] == "the" and _is_ordinal_day(forms[i + 2]):
            return i + 3
        if f not in AMBIGUOUS_MONTHS:
            return i + 1
        return i
    # [the] ordinal [of month]
    j = i + 1 if f == "the" else i
    if j < n and _is_ordinal_day(forms[j]):
        if j + 2 < n and forms[j + 1] == "of" and forms[j + 2] in MONTHS:
            return j + 3
        if j + 1 < n and forms[j + 1] in MONTHS:
            return j + 2
        if forms[j] not in ORDINAL_WORDS:
            return j + 1
        return i
    # day-number month ("5 march")
    if f.isdigit() and i + 1 < n and forms[i + 1] in MONTHS and _is_day_number(f):
        return i + 2
    return i


def _match_time(forms: list[str], i: int) -> int:
    n = len(forms)
    f = forms[i]
    if f in TIME_WORDS:
        return i + 1
    if f.isdigit() and i + 2 < n and forms[i + 1] == ":" and forms[i + 2].isdigit():
        j = i + 3
        if j < n and forms[j] in MERIDIEM:
            j += 1
        return j
    end = _number_run(forms, i)
    if end > i and end < n:
        if forms[end] in MERIDIEM:
            return end + 1
        if forms[end] == "o" and end + 2 < n and forms[end + 1] == "'" and forms[end + 2] == "clock":
            return end + 3
    # "4pm" style tokens
    if len(f) > 2 and f[-2:] in MERIDIEM and f[:-2].isdigit():
        return i + 1
    return i


def _match_money(forms: list[str], i: int) -> int:
    n = len(forms)
    if forms[i] in CURRENCY_SYMBOLS:
        end = _number_run(forms, i + 1)
        return end if end > i + 1 else i
    end = _number_run(forms, i)
    if end > i and end < n and forms[end] in CURRENCY_WORDS:
        return end + 1
    return i


def _match_cardinal(forms: list[str], i: int) -> int:
    return _number_run(forms, i)


_RULES = (("MONEY", _match_money), ("TIME", _match_time), ("DATE", _match_date), ("CARDINAL", _match_cardinal))


def _rule_candidates(forms: list[str]) -> list[tuple[int, int, str]]:
    found = []
    for i in range(len(forms)):
        for label, rule in _RULES:
            end = rule(forms, i)
            if end > i:
                found.append((i, end, label))
    return found


def _resolve(candidates: list[tuple[int, int, str, int]]) -> list[tuple[int, int, str]]:
    """Greedy non-overlapping selection: longer, then earlier, then rules first."""
    order = sorted(candidates, key=lambda c: (-(c[1] - c[0]), c[0], c[3], LABELS.index(c[2])))
    taken: set[int] = set()
    chosen = []
    for start, end, label, _ in order:
        if any(k in taken for k in range(start, end)):
            continue
        taken.update(range(start, end))
        chosen.append((start, end, label))
    chosen.sort()
    return chosen


def normalize_entity(span: EntitySpan | tuple[int, int], text: TokenizedText) -> str:
    """Space-joined lowercase lemmas of the span's non-punctuation tokens."""
    start, end = (span.token_start, span.token_end) if isinstance(span, EntitySpan) else span
    if not 0 <= start < end <= len(text.tokens):
        raise ValueError(f"span [{start}, {end}) out of range for {len(text.tokens)} tokens")
    return " ".join(t.lemma for t in text.tokens[start:end] if not t.is_punct)


def _make_span(label: str, start: int, end: int, text: TokenizedText) -> EntitySpan | None:
    normalized = normalize_entity((start, end), text)
    if not normalized:
        return None
    return EntitySpan(label, start, end, normalized)


def extract_entities(text: TokenizedText, gaz: Gazetteer | None = None) -> list[EntitySpan]:
    forms = [t.lower for t in text.tokens]
    candidates = [(s, e, lab, 0) for s, e, lab in _rule_candidates(forms)]
    if gaz is not None:
        candidates += [(s, e, lab, 1) for s, e, lab in gaz.matches(forms)]
    spans = []
    for start, end, label in _resolve(candidates):
        span = _make_span(label, start, end, text)
        if span is not None:
            spans.append(span)
    return spans


def entity_set(spans: Iterable[EntitySpan], labels: Iterable[str] | None = None) -> frozenset[str]:
    """Normalized entity strings, optionally restricted to ``labels``."""
    keep = None if labels is None else set(labels)
    return frozenset(s.normalized for s in spans if keep is None or s.label in keep)


# ---------------------------------------------------------------------------
# external annotations


@dataclass
class EntityAnnotationTable:
    """Per-pair entity lists ingested from an external tagger."""

    entries: dict[str, tuple[list[EntitySpan], list[EntitySpan]]] = field(default_factory=dict)
    skipped: list[tuple[int, str]] = field(default_factory=list)

    def get(self, pair_id: str) -> tuple[list[EntitySpan], list[EntitySpan]]:
        return self.entries.get(pair_id, ([], []))

    def __len__(self) -> int:
        return len(self.entries)


class EntityFileError(ValueError):
    pass


def _token_range(text: TokenizedText, start: int, end: int) -> tuple[int, int] | None:
    first = last = None
    for k, tok in enumerate(text.tokens):
        if tok.char_start == start:
            first = k
        if tok.char_end == end:
            last = k
    if first is None or last is None or last < first:
        return None
    return first, last + 1


def load_external_entities(path: str | Path, pairs) -> EntityAnnotationTable:
    """Read JSON-lines entity records and map character offsets to tokens.

    ``pairs`` is the loaded dataset (anything with ``id``, ``source`` and
    ``target`` attributes, or AnnotatedPair objects). Records whose offsets
    do not fall on token boundaries, that overlap an earlier span, or that
    name an unknown pair are skipped and listed in ``table.skipped``.
    Malformed lines raise :class:`EntityFileError` with the line number.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"entity file not found: {path}")
    texts: dict[str, tuple[TokenizedText, TokenizedText]] = {}
    for p in pairs:
        pair = getattr(p, "pair", p)
        texts[pair.id] = (tokenize(pair.source), tokenize(pair.target))

    table = EntityAnnotationTable()
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
                pair_id = str(rec["id"])
                side = rec["side"]
                start, end = int(rec["start"]), int(rec["end"])
                raw_label = str(rec["label"]).upper()
            except (ValueError, KeyError, TypeError) as exc:
                raise EntityFileError(f"{path}:{lineno}: malformed entity record ({exc})") from None
            if side not in ("src", "dst"):
                raise EntityFileError(f"{path}:{lineno}: side must be 'src' or 'dst'")
            if pair_id not in texts:
                table.skipped.append((lineno, f"unknown pair id {pair_id!r}"))
                continue
            text = texts[pair_id][0 if side == "src" else 1]
            rng = _token_range(text, start, end)
            if rng is None:
                table.skipped.append((lineno, f"offsets [{start}, {end}) not on token boundaries"))
                continue
            spans = table.entries.setdefault(pair_id, ([], []))[0 if side == "src" else 1]
            if any(s.token_start < rng[1] and rng[0] < s.token_end for s in spans):
                table.skipped.append((lineno, "overlaps an earlier span"))
                continue
            span = _make_span(EXTERNAL_LABEL_MAP.get(raw_label, "MISC"), rng[0], rng[1], text)
            if span is None:
                table.skipped.append((lineno, "span contains only punctuation"))
                continue
            spans.append(span)
    for src, dst in table.entries.values():
        src.sort(key=lambda s: s.token_start)
        dst.sort(key=lambda s: s.token_start)
    if table.skipped:
        logger.warning("%s: skipped %d entity records", path, len(table.skipped))
    return table
