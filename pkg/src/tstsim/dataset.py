"""Sentence pairs with crowd votes: loading, vote averaging, agreement."""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

LABEL_VALUES = (1, 2, 3)  # different, similar, same
FIELDS = ("id", "source", "target", "n_different", "n_similar", "n_same", "score")


class DatasetError(ValueError):
    pass


class AlphaUndefined(ValueError):
    """Raised when Krippendorff's alpha has a zero expected disagreement."""


@dataclass(frozen=True)
class TextPair:
    id: str
    source: str
    target: str


@dataclass(frozen=True)
class VoteRecord:
    n_different: int
    n_similar: int
    n_same: int

    def __post_init__(self):
        if min(self.counts) < 0:
            raise ValueError("vote counts must be non-negative")

    @property
    def counts(self) -> tuple[int, int, int]:
        return (self.n_different, self.n_similar, self.n_same)

    @property
    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class AnnotatedPair:
    pair: TextPair
    votes: VoteRecord | None
    human_score: float

    @property
    def id(self) -> str:
        return self.pair.id


def aggregate_votes(votes: VoteRecord | Sequence[int]) -> float:
    """Mean vote on the 1 (different) .. 3 (same) scale."""
    counts = votes.counts if isinstance(votes, VoteRecord) else tuple(votes)
    total = sum(counts)
    if total < 1:
        raise ValueError("cannot average zero votes")
    return sum(v * c for v, c in zip(LABEL_VALUES, counts)) / total


# ---------------------------------------------------------------------------
# I/O


def _parse_int(value, field, where):
    if value is None or str(value).strip() == "":
        return None
    try:
        n = int(str(value).strip())
    except ValueError:
        raise DatasetError(f"{where}: {field} is not an integer: {value!r}") from None
    if n < 0:
        raise DatasetError(f"{where}: {field} is negative")
    return n


def _make_pair(rec: dict, where: str) -> AnnotatedPair:
    pid = str(rec.get("id", "")).strip()
    if not pid:
        raise DatasetError(f"{where}: missing id")
    source, target = rec.get("source"), rec.get("target")
    if not source or not str(source).strip() or not target or not str(target).strip():
        raise DatasetError(f"{where}: empty source or target")
    counts = [_parse_int(rec.get(f), f, where) for f in FIELDS[3:6]]
    score = rec.get("score")
    votes = None
    if any(c is not None for c in counts):
        if any(c is None for c in counts):
            raise DatasetError(f"{where}: incomplete vote columns")
        votes = VoteRecord(*counts)
        if votes.total == 0:
            raise DatasetError(f"{where}: vote total is 0")
        human = aggregate_votes(votes)
    elif score is not None and str(score).strip() != "":
        try:
            human = float(score)
        except ValueError:
            raise DatasetError(f"{where}: score is not a number: {score!r}") from None
    else:
        raise DatasetError(f"{where}: row has neither votes nor score")
    return AnnotatedPair(TextPair(pid, str(source), str(target)), votes, human)


def _records(path: Path):
    text = path.read_text(encoding="utf-8")
    if path.suffix in (".jsonl", ".json", ".ndjson"):
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(rec, dict):
                raise DatasetError(f"{path}:{lineno}: expected a JSON object")
            yield f"{path}:{lineno}", rec
        return
    if not text.strip():
        return
    reader = csv.DictReader(io.StringIO(text), delimiter="\t", quoting=csv.QUOTE_NONE)
    missing = {"id", "source", "target"} - set(reader.fieldnames or ())
    if missing:
        raise DatasetError(f"{path}: header lacks columns {sorted(missing)}")
    for rec in reader:
        yield f"{path}:{reader.line_num}", rec


def load_dataset(path: str | Path) -> list[AnnotatedPair]:
    """Read a TSV (with header) or JSON-lines dataset.

    The human score is recomputed from the vote columns when they are
    present and read from ``score`` otherwise.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"dataset not found: {path}")
    pairs: list[AnnotatedPair] = []
    seen: set[str] = set()
    for where, rec in _records(path):
        ap = _make_pair(rec, where)
        if ap.id in seen:
            raise DatasetError(f"{where}: duplicate id {ap.id!r}")
        seen.add(ap.id)
        pairs.append(ap)
    return pairs


def _row(ap: AnnotatedPair) -> dict:
    counts = ap.votes.counts if ap.votes else (None, None, None)
    return {
        "id": ap.id,
        "source": ap.pair.source,
        "target": ap.pair.target,
        "n_different": counts[0],
        "n_similar": counts[1],
        "n_same": counts[2],
        "score": None if ap.votes else ap.human_score,
    }


def dump_dataset(pairs: Iterable[AnnotatedPair], path: str | Path) -> None:
    """Write pairs in the format implied by the suffix (TSV unless .jsonl)."""
    path = Path(path)
    rows = [_row(ap) for ap in pairs]
    if path.suffix in (".jsonl", ".json", ".ndjson"):
        with path.open("w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row, ensure_ascii=False) + "\n")
        return
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write("\t".join(FIELDS) + "\n")
        for row in rows:
            for key in ("source", "target"):
                if "\t" in row[key] or "\n" in row[key]:
                    raise DatasetError(f"{row['id']}: {key} contains a tab or newline")
            fh.write("\t".join("" if row[f] is None else str(row[f]) for f in FIELDS) + "\n")


# ---------------------------------------------------------------------------
# agreement


def _delta2(metric: str, marginals: dict[int, float]):
    values = sorted(marginals)

    if metric == "nominal":
        return lambda c, k: 0.0 if c == k else 1.0
    if metric == "interval":
        return lambda c, k: float(c - k) ** 2
    if metric == "ordinal":
        cache = {}
        for a in values:
            for b in values:
                lo, hi = min(a, b), max(a, b)
                s = sum(marginals[g] for g in values if lo <= g <= hi)
                cache[a, b] = (s - (marginals[a] + marginals[b]) / 2) ** 2
        return lambda c, k: cache[c, k]
    raise ValueError(f"unknown metric {metric!r}")


def krippendorff_alpha(items: Iterable[VoteRecord | Sequence[int]], metric: str = "ordinal") -> float:
    """Krippendorff's alpha from per-item vote counts over labels 1, 2, 3.

    Coder identities are not needed: each item contributes its within-item
    value pairs to the coincidence matrix with weight 1 / (m - 1), where m is
    the number of votes on the item. Items with a single vote are not
    pairable and are ignored.
    """
    counts = [v.counts if isinstance(v, VoteRecord) else tuple(v) for v in items]
    if len(counts) < 2:
        raise ValueError("need at least two items")
    coincidence: dict[tuple[int, int], float] = Counter()
    for row in counts:
        m = sum(row)
        if m < 2:
            continue
        for c, nc in zip(LABEL_VALUES, row):
            for k, nk in zip(LABEL_VALUES, row):
                pairs = nc * (nc - 1) if c == k else nc * nk
                if pairs:
                    coincidence[c, k] += pairs / (m - 1)
    if not coincidence:
        raise ValueError("no item has two or more votes")
    marginals = {c: 0.0 for c in LABEL_VALUES}
    for (c, _), w in coincidence.items():
        marginals[c] += w
    n = sum(marginals.values())
    delta2 = _delta2(metric, marginals)
    observed = sum(w * delta2(c, k) for (c, k), w in coincidence.items())
    expected = sum(
        marginals[c] * marginals[k] * delta2(c, k) for c in LABEL_VALUES for k in LABEL_VALUES
    )
    if expected == 0:
        raise AlphaUndefined("expected disagreement is zero; alpha is undefined")
    return 1.0 - (n - 1) * observed / expected


def vote_histogram(pairs: Iterable[AnnotatedPair]) -> dict[int, int]:
    """Number of items per total vote count."""
    hist = Counter(ap.votes.total for ap in pairs if ap.votes is not None)
    return dict(sorted(hist.items()))
