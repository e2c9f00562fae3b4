"""Command-line entry point.

Subcommands::

    tstsim score     --dataset D [--config C] [--out DIR]
    tstsim evaluate  --dataset D --scores S [--config C] [--out DIR]
    tstsim diagnose  --dataset D --scores S --measure ID [--top-k K] [--out DIR]
    tstsim agreement --dataset D [--out DIR]

Exit codes: 0 success, 1 usage or configuration error, 2 data error. Errors
are printed to stderr as ``tstsim: error: <config|data>: <message>``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import defaultdict
from pathlib import Path

from .config import ConfigError, RunConfig, load_config
from .dataset import AlphaUndefined, DatasetError, krippendorff_alpha, load_dataset, vote_histogram
from .metrics import (
    NE_SUFFIX,
    MeasureScore,
    ScoringConfig,
    VectorStore,
    analyze_pair,
    merge_with_ne,
)
from .ner import EntityFileError, Gazetteer, load_external_entities
from .stats import CorrelationReport, evaluate, minmax_normalize, rank_divergence

logger = logging.getLogger("tstsim")

SCORES_FILE = "scores.jsonl"
HUMAN = "human"

PREPROCESSING = {
    "tokenizer": "regex word/punctuation split",
    "case": "case-folded before all measures",
    "punctuation": "dropped from word-level measures and from the entity token fraction",
    "bleu": "sentence BLEU, n=1..4, add-one smoothing on orders >= 2",
    "chrf": "n=1..6, beta=2, whitespace removed",
    "meteor": "exact + lemma stages, greedy monotone alignment",
    "entity_sets": "set semantics over lemmatized surface strings",
    "ranks": "average ranks for ties",
    "williams": "two-sided, alpha=0.05",
}


class DataError(Exception):
    pass


# ---------------------------------------------------------------------------
# score


def build_scoring_config(cfg: RunConfig, pairs) -> ScoringConfig:
    gazetteer = Gazetteer.from_file(cfg.gazetteer) if cfg.gazetteer else Gazetteer.default()
    stores = {name: VectorStore.load(path) for name, path in cfg.vectors.items()}
    entities = load_external_entities(cfg.entities, pairs) if cfg.entities else None
    return ScoringConfig(
        measures=cfg.measures,
        gazetteer=gazetteer,
        vector_stores=stores,
        entities=entities,
        label_filter=cfg.label_filter,
    )


def _dump(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, ensure_ascii=False)


def cmd_score(cfg: RunConfig, dataset_path: Path) -> Path:
    """Score every pair; one JSON line per measure value and one per pair."""
    pairs = load_dataset(dataset_path)
    scoring = build_scoring_config(cfg, pairs)
    cfg.out.mkdir(parents=True, exist_ok=True)
    out = cfg.out / SCORES_FILE
    flagged = 0
    with out.open("w", encoding="utf-8") as fh:
        for ap in pairs:
            res = analyze_pair(ap, scoring)
            fh.write(
                _dump(
                    {
                        "id": res.id,
                        "p": res.p,
                        "ne": res.ne.value,
                        "src_entities": [[s.label, s.normalized] for s in res.src_entities],
                        "dst_entities": [[s.label, s.normalized] for s in res.dst_entities],
                    }
                )
                + "\n"
            )
            for s in res.scores:
                if s.degenerate:
                    flagged += 1
                    logger.debug("%s: %s flagged degenerate input", res.id, s.measure_id)
                fh.write(
                    _dump(
                        {
                            "id": res.id,
                            "measure_id": s.measure_id,
                            "kind": s.kind,
                            "value": s.value,
                            "degenerate": s.degenerate,
                        }
                    )
                    + "\n"
                )
    if flagged:
        logger.info("%d score values carry a degenerate-input flag", flagged)
    logger.info("wrote %s (%d pairs)", out, len(pairs))
    return out


# ---------------------------------------------------------------------------
# evaluate


def read_scores(path: Path):
    """Return ``(pair_info, scores)`` from a scores file.

    ``scores`` maps measure id to ``(kind, {pair id: value})`` with flagged
    values omitted.
    """
    if not path.exists():
        raise DataError(f"scores file not found: {path}")
    pair_info: dict[str, dict] = {}
    scores: dict[str, tuple[str, dict[str, float]]] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                pid = str(rec["id"])
                if "measure_id" in rec:
                    kind, values = scores.setdefault(rec["measure_id"], (rec["kind"], {}))
                    if not rec.get("degenerate"):
                        values[pid] = float(rec["value"])
                else:
                    pair_info[pid] = {"p": float(rec["p"]), "ne": float(rec["ne"])}
            except (ValueError, KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: malformed score record ({exc})") from None
    return pair_info, scores


def read_external_scores(path: Path) -> dict[str, dict[str, float]]:
    if not path.exists():
        raise DataError(f"external score file not found: {path}")
    out: dict[str, dict[str, float]] = defaultdict(dict)
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                out[str(rec["measure_id"])][str(rec["id"])] = float(rec["value"])
            except (ValueError, KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: malformed external score ({exc})") from None
    return dict(out)


def merge_external(values: dict[str, float], pair_info: dict[str, dict], measure_id: str):
    """Min-max normalize ingested scores, then merge them with the entity signal."""
    ids = sorted(i for i in values if i in pair_info)
    if not ids:
        return {}, {}, False
    scaled, degenerate = minmax_normalize([values[i] for i in ids])
    base, merged = {}, {}
    for pid, v in zip(ids, scaled):
        strong = MeasureScore(measure_id, "pre-trained", v)
        ne = MeasureScore("ne_jaccard", "ne", pair_info[pid]["ne"])
        base[pid] = v
        merged[pid] = merge_with_ne(strong, ne, pair_info[pid]["p"]).value
    return base, merged, degenerate


def build_report(cfg: RunConfig, dataset_path: Path, scores_path: Path) -> CorrelationReport:
    pairs = load_dataset(dataset_path)
    human = {ap.id: ap.human_score for ap in pairs}
    pair_info, scores = read_scores(scores_path)
    measures = {}
    for mid, (kind, values) in scores.items():
        if mid.endswith(NE_SUFFIX):
            continue
        merged = scores.get(mid + NE_SUFFIX, (kind, {}))[1]
        measures[mid] = (kind, values, merged)
    normalized = []
    for path in cfg.external_scores:
        for mid, values in read_external_scores(path).items():
            if mid in measures:
                raise DataError(f"{path}: external measure {mid!r} clashes with a computed measure")
            base, merged, degenerate = merge_external(values, pair_info, mid)
            measures[mid] = ("pre-trained", base, merged)
            normalized.append(mid)
            if degenerate:
                logger.warning("%s: constant external scores", mid)
    if not measures:
        raise DataError("no measures found in the scores file")
    metadata = {
        "preprocessing": PREPROCESSING,
        "entity_source": "external" if cfg.entities else "rule+gazetteer",
        "label_filter": sorted(cfg.label_filter) if cfg.label_filter else None,
        "minmax_normalized_before_merge": sorted(normalized),
        "dataset_size": len(pairs),
    }
    try:
        return evaluate(measures, human, metadata)
    except ValueError as exc:
        raise DataError(str(exc)) from None


def cmd_evaluate(cfg: RunConfig, dataset_path: Path, scores_path: Path) -> tuple[Path, Path]:
    report = build_report(cfg, dataset_path, scores_path)
    cfg.out.mkdir(parents=True, exist_ok=True)
    tsv, js = cfg.out / "report.tsv", cfg.out / "report.json"
    tsv.write_text(report.to_tsv(), encoding="utf-8")
    js.write_text(report.to_json(), encoding="utf-8")
    return tsv, js


# ---------------------------------------------------------------------------
# diagnose

WORKSHEET_FIELDS = (
    "rank", "id", "divergence", "auto_rank", "human_rank", "direction", "auto_score",
    "human_score", "source", "target", "ne_error", "pos_error", "sentence_type_error",
)


def cmd_diagnose(cfg: RunConfig, dataset_path: Path, scores_path: Path, measure_id: str, k: int) -> Path:
    """Write the top-k rank-divergence worksheet with empty annotation columns."""
    pairs = load_dataset(dataset_path)
    by_id = {ap.id: ap for ap in pairs}
    human = {ap.id: ap.human_score for ap in pairs}
    if measure_id == HUMAN:
        auto = dict(human)
    else:
        _, scores = read_scores(scores_path)
        extra = {}
        for path in cfg.external_scores:
            extra.update(read_external_scores(path))
        if measure_id in scores:
            auto = scores[measure_id][1]
        elif measure_id in extra:
            auto = extra[measure_id]
        else:
            known = ", ".join(sorted([HUMAN, *scores, *extra]))
            raise ConfigError(f"unknown measure {measure_id!r}; available: {known}")
    ids = sorted(set(auto) & set(human))
    if not ids:
        raise DataError(f"{measure_id}: no scored pairs overlap the dataset")
    entries = rank_divergence([(i, auto[i]) for i in ids], [(i, human[i]) for i in ids], k)
    cfg.out.mkdir(parents=True, exist_ok=True)
    out = cfg.out / f"diagnose_{measure_id.replace('/', '_')}.tsv"
    with out.open("w", encoding="utf-8") as fh:
        fh.write("\t".join(WORKSHEET_FIELDS) + "\n")
        for rank, e in enumerate(entries, 1):
            ap = by_id[e.id]
            row = [
                str(rank), e.id, f"{e.divergence:g}", f"{e.auto_rank:g}", f"{e.human_rank:g}",
                e.direction, f"{e.auto_score:.6f}", f"{e.human_score:.6f}",
                ap.pair.source.replace("\t", " "), ap.pair.target.replace("\t", " "), "", "", "",
            ]
            fh.write("\t".join(row) + "\n")
    return out


# ---------------------------------------------------------------------------
# agreement


def agreement_report(dataset_path: Path) -> dict:
    pairs = load_dataset(dataset_path)
    votes = [ap.votes for ap in pairs if ap.votes is not None]
    if not votes:
        raise DataError("dataset has no vote columns")
    alphas = {}
    for metric in ("ordinal", "interval", "nominal"):
        try:
            alphas[metric] = krippendorff_alpha(votes, metric)
        except (AlphaUndefined, ValueError) as exc:
            raise DataError(f"alpha ({metric}): {exc}") from None
    return {
        "alpha": alphas,
        "items": len(votes),
        "vote_histogram": {str(k): v for k, v in vote_histogram(pairs).items()},
    }


def cmd_agreement(dataset_path: Path, out_dir: Path | None = None) -> dict:
    report = agreement_report(dataset_path)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "agreement.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    return report


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tstsim", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scores=False):
        p.add_argument("--config", type=Path)
        p.add_argument("--dataset", type=Path, required=True)
        if scores:
            p.add_argument("--scores", type=Path, required=True)
        p.add_argument("--out", type=Path)

    common(sub.add_parser("score", help="compute measures for every pair"))
    common(sub.add_parser("evaluate", help="correlate measures with human scores"), scores=True)
    diag = sub.add_parser("diagnose", help="rank-divergence worksheet for one measure")
    common(diag, scores=True)
    diag.add_argument("--measure", required=True)
    diag.add_argument("--top-k", type=int)
    agr = sub.add_parser("agreement", help="inter-annotator agreement of the votes")
    agr.add_argument("--dataset", type=Path, required=True)
    agr.add_argument("--out", type=Path)
    return parser


def _run_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.out is not None:
        cfg.out = args.out
    if getattr(args, "top_k", None) is not None:
        cfg.top_k = args.top_k
    return cfg.validate()


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "agreement":
            report = cmd_agreement(args.dataset, args.out)
            print(json.dumps(report, indent=2))
            return 0
        cfg = _run_config(args)
        if args.command == "score":
            print(cmd_score(cfg, args.dataset))
        elif args.command == "evaluate":
            for path in cmd_evaluate(cfg, args.dataset, args.scores):
                print(path)
        elif args.command == "diagnose":
            print(cmd_diagnose(cfg, args.dataset, args.scores, args.measure, cfg.top_k))
    except ConfigError as exc:
        print(f"tstsim: error: config: {exc}", file=sys.stderr)
        return 1
    except (DataError, DatasetError, EntityFileError, FileNotFoundError, ValueError) as exc:
        print(f"tstsim: error: data: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
