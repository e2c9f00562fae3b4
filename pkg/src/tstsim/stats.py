"""Correlation with human judgments, significance testing and rank divergence."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

SIGNIFICANCE_LEVEL = 0.05


class UndefinedCorrelation(ValueError):
    """Raised when a correlation is requested for a constant sequence."""


# ---------------------------------------------------------------------------
# ranks and Spearman


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the mean of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    n = len(xs)
    mx, my = math.fsum(xs) / n, math.fsum(ys) / n
    dx = [x - mx for x in xs]
    dy = [y - my for y in ys]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0 or syy == 0:
        raise UndefinedCorrelation("correlation is undefined for a constant sequence")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 3:
        raise ValueError("spearman needs at least 3 observations")
    return pearson(average_ranks(xs), average_ranks(ys))


# ---------------------------------------------------------------------------
# Student t distribution via the regularized incomplete beta function


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 10000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_sf_two_sided(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if t == 0:
        return 1.0
    return min(1.0, betainc(df / 2.0, 0.5, df / (df + t * t)))


def williams_test(r12: float, r13: float, r23: float, n: int) -> tuple[float, float]:
    """Williams t-test for two dependent correlations sharing variable 1.

    Variable 1 is the human score, 2 and 3 the competing measures and
    ``r23`` their mutual correlation. Returns ``(t, two_sided_p)`` with
    n - 3 degrees of freedom; positive t means r12 > r13.
    """
    for name, r in (("r12", r12), ("r13", r13), ("r23", r23)):
        if not -1.0 < r < 1.0:
            raise ValueError(f"{name} must lie strictly inside (-1, 1), got {r}")
    if n <= 3:
        raise ValueError("williams_test needs n > 3")
    # written symmetrically in r12/r13 so swapping them negates t exactly
    det = 1.0 - (r12 * r12 + r13 * r13) - r23 * r23 + 2.0 * (r12 * r13) * r23
    rbar = (r12 + r13) / 2.0
    denom = 2.0 * (n - 1) / (n - 3) * det + rbar * rbar * (1.0 - r23) ** 3
    t = (r12 - r13) * math.sqrt((n - 1) * (1.0 + r23)) / math.sqrt(denom)
    return t, t_sf_two_sided(t, n - 3)


# ---------------------------------------------------------------------------
# rescaling and rank divergence


def minmax_normalize(values: Sequence[float]) -> tuple[list[float], bool]:
    """Map values linearly onto [0, 1]; returns ``(scaled, degenerate)``.

    Constant input maps to 0.5 everywhere with ``degenerate`` set.
    """
    if not values:
        raise ValueError("cannot normalize an empty list")
    lo, hi = min(values), max(values)
    if hi == lo:
        return [0.5] * len(values), True
    span = hi - lo
    return [(v - lo) / span for v in values], False


@dataclass(frozen=True)
class DivergenceEntry:
    id: str
    auto_rank: float
    human_rank: float
    divergence: float
    direction: str  # "over" when the measure scores the pair above humans
    auto_score: float
    human_score: float


def rank_divergence(
    auto: Sequence[tuple[str, float]], human: Sequence[tuple[str, float]], k: int
) -> list[DivergenceEntry]:
    """Top-``k`` pairs by |automatic rank - human rank|.

    Ties in divergence are broken by id. The direction compares min-max
    rescaled scores: "over" if the measure is higher than humans, "under"
    otherwise.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    auto_map, human_map = dict(auto), dict(human)
    if len(auto_map) != len(auto) or len(human_map) != len(human):
        raise ValueError("duplicate ids")
    if set(auto_map) != set(human_map):
        raise ValueError("automatic and human scores cover different ids")
    ids = sorted(auto_map)
    a = [auto_map[i] for i in ids]
    h = [human_map[i] for i in ids]
    ra, rh = average_ranks(a), average_ranks(h)
    sa, _ = minmax_normalize(a)
    sh, _ = minmax_normalize(h)
    entries = [
        DivergenceEntry(
            id=pid,
            auto_rank=ra[j],
            human_rank=rh[j],
            divergence=abs(ra[j] - rh[j]),
            direction="over" if sa[j] > sh[j] else "under",
            auto_score=a[j],
            human_score=h[j],
        )
        for j, pid in enumerate(ids)
    ]
    entries.sort(key=lambda e: (-e.divergence, e.id))
    return entries[:k]


# ---------------------------------------------------------------------------
# evaluation report


@dataclass
class MeasureRow:
    measure_id: str
    kind: str
    rho_base: float | None
    rho_merged: float | None
    delta: float | None
    williams_t: float | None
    williams_p: float | None
    n: int

    @property
    def significant(self) -> bool:
        return self.williams_p is not None and self.williams_p < SIGNIFICANCE_LEVEL


@dataclass
class CorrelationReport:
    rows: list[MeasureRow]
    metadata: dict = field(default_factory=dict)

    def row(self, measure_id: str) -> MeasureRow:
        for r in self.rows:
            if r.measure_id == measure_id:
                return r
        raise KeyError(measure_id)

    TSV_FIELDS = ("measure_id", "kind", "rho_base", "rho_merged", "delta", "williams_t", "williams_p", "n")

    def to_tsv(self) -> str:
        lines = ["\t".join(self.TSV_FIELDS)]
        for r in self.rows:
            cells = []
            for f in self.TSV_FIELDS:
                v = getattr(r, f)
                cells.append("" if v is None else (f"{v:.6f}" if isinstance(v, float) else str(v)))
            lines.append("\t".join(cells))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        rows = []
        for r in self.rows:
            d = asdict(r)
            d["significant"] = r.significant
            rows.append(d)
        return json.dumps({"measures": rows, "metadata": self.metadata}, indent=2, sort_keys=True) + "\n"

    @classmethod
    def read_tsv(cls, text: str) -> "CorrelationReport":
        rows = []
        for rec in csv.DictReader(text.splitlines(), delimiter="\t"):
            def num(key):
                return None if rec[key] == "" else float(rec[key])

            rows.append(
                MeasureRow(
                    rec["measure_id"], rec["kind"], num("rho_base"), num("rho_merged"),
                    num("delta"), num("williams_t"), num("williams_p"), int(rec["n"]),
                )
            )
        return cls(rows)


def _safe_spearman(xs, ys):
    try:
        return spearman(xs, ys)
    except UndefinedCorrelation:
        return None


def evaluate_measure(
    measure_id: str,
    kind: str,
    base: Mapping[str, float],
    merged: Mapping[str, float],
    human: Mapping[str, float],
) -> MeasureRow:
    """Correlate one measure and its merged variant with human scores.

    Only ids present in all three mappings are used; callers drop pairs
    with degenerate-input flags before calling.
    """
    ids = sorted(set(base) & set(merged) & set(human))
    n = len(ids)
    if n < 3:
        raise ValueError(f"{measure_id}: only {n} overlapping items, need at least 3")
    h = [human[i] for i in ids]
    b = [base[i] for i in ids]
    m = [merged[i] for i in ids]
    rho_b, rho_m = _safe_spearman(b, h), _safe_spearman(m, h)
    delta = t = p = None
    if rho_b is not None and rho_m is not None:
        delta = rho_m - rho_b
        if rho_m == rho_b:
            t, p = 0.0, 1.0
        elif n > 3:
            r23 = _safe_spearman(b, m)
            if r23 is not None and abs(r23) < 1 and abs(rho_b) < 1 and abs(rho_m) < 1:
                t, p = williams_test(rho_m, rho_b, r23, n)
    return MeasureRow(measure_id, kind, rho_b, rho_m, delta, t, p, n)


def evaluate(
    measures: Mapping[str, tuple[str, Mapping[str, float], Mapping[str, float]]],
    human: Mapping[str, float],
    metadata: dict | None = None,
) -> CorrelationReport:
    """Build a report from ``{measure_id: (kind, base_scores, merged_scores)}``.

    Rows are ordered by descending baseline correlation, then id.
    """
    rows = [evaluate_measure(mid, kind, b, m, human) for mid, (kind, b, m) in measures.items()]
    rows.sort(key=lambda r: (-(r.rho_base if r.rho_base is not None else -2.0), r.measure_id))
    return CorrelationReport(rows, dict(metadata or {}))
