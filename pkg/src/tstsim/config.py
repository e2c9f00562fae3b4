"""Run configuration in a plain ``key = value`` text format.

Example::

    # measures to compute; names of vector stores are measures too
    measures = bleu, rouge1, rouge2, rouge3, rougeL, chrf, meteor, ne_jaccard, w2v_cossim
    gazetteer = gazetteer.tsv          # or "default" for the bundled list
    vectors.w2v_cossim = vectors/w2v.txt
    entities = spacy_entities.jsonl    # optional; replaces the built-in extractor
    external_scores = bleurt.jsonl, bertscore.jsonl
    label_filter = DATE, LOCATION      # optional
    out = results
    top_k = 35

Relative paths are resolved against the directory holding the config file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .metrics import BUILTIN_MEASURES
from .ner import LABELS

DEFAULT_TOP_K = 35


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    measures: tuple[str, ...] = BUILTIN_MEASURES
    gazetteer: Path | None = None  # None -> bundled gazetteer
    vectors: dict[str, Path] = field(default_factory=dict)
    entities: Path | None = None
    external_scores: tuple[Path, ...] = ()
    label_filter: frozenset[str] | None = None
    out: Path = Path(".")
    top_k: int = DEFAULT_TOP_K

    def validate(self) -> "RunConfig":
        if not self.measures:
            raise ConfigError("at least one measure must be enabled")
        unknown = [m for m in self.measures if m not in BUILTIN_MEASURES and m not in self.vectors]
        if unknown:
            raise ConfigError(f"unknown measures (no vectors.<id> entry): {', '.join(unknown)}")
        if len(set(self.measures)) != len(self.measures):
            raise ConfigError("measures are listed more than once")
        paths = [self.gazetteer, self.entities, *self.vectors.values(), *self.external_scores]
        for p in paths:
            if p is not None and not p.exists():
                raise ConfigError(f"path does not exist: {p}")
        if self.top_k < 1:
            raise ConfigError("top_k must be >= 1")
        if self.label_filter is not None:
            bad = self.label_filter - set(LABELS)
            if bad:
                raise ConfigError(f"unknown entity labels: {', '.join(sorted(bad))}")
        return self


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def parse_config(text: str, base_dir: Path | str = ".") -> RunConfig:
    base = Path(base_dir)

    def resolve(value: str) -> Path:
        p = Path(value).expanduser()
        return p if p.is_absolute() else base / p

    cfg = RunConfig()
    measures_given = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "measures":
            cfg.measures = tuple(_split(value))
            measures_given = True
        elif key == "gazetteer":
            cfg.gazetteer = None if value in ("", "default") else resolve(value)
        elif key.startswith("vectors."):
            name = key[len("vectors."):]
            if not name:
                raise ConfigError(f"config line {lineno}: vectors.<measure_id> needs a name")
            cfg.vectors[name] = resolve(value)
        elif key == "entities":
            cfg.entities = resolve(value) if value else None
        elif key == "external_scores":
            cfg.external_scores = tuple(resolve(v) for v in _split(value))
        elif key == "label_filter":
            cfg.label_filter = frozenset(v.upper() for v in _split(value)) or None
        elif key == "out":
            cfg.out = resolve(value)
        elif key == "top_k":
            try:
                cfg.top_k = int(value)
            except ValueError:
                raise ConfigError(f"config line {lineno}: top_k must be an integer") from None
        else:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
    if not measures_given:
        cfg.measures = BUILTIN_MEASURES + tuple(cfg.vectors)
    return cfg


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"), path.parent)
