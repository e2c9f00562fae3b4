"""Regenerate synthetic50.tsv, synthetic50_entities.jsonl and synthetic50_expected.json.

Expected values come from tests/oracles.py and the hand entity annotations
in synthetic50_source.py; only the lemmatizer is borrowed from the package
(for the METEOR lemma stage). Run from the repository root:

    python tests/fixtures/make_synthetic_expected.py
"""

import json
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
sys.path[:0] = [str(HERE), str(HERE.parent)]

import oracles  # noqa: E402
from synthetic50_source import PAIRS  # noqa: E402
from tstsim.text import lemmatize  # noqa: E402

MEASURES = ("bleu", "chrf", "meteor", "rouge1", "rouge2", "rouge3", "rougeL")


def base_scores(src, dst):
    rf, hf = oracles.words(src), oracles.words(dst)
    return {
        "bleu": oracles.bleu(src, dst),
        "chrf": oracles.chrf(src, dst),
        "meteor": oracles.meteor_greedy(rf, hf, [lemmatize(w) for w in rf], [lemmatize(w) for w in hf]),
        "rouge1": oracles.rouge_n(src, dst, 1),
        "rouge2": oracles.rouge_n(src, dst, 2),
        "rouge3": oracles.rouge_n(src, dst, 3),
        "rougeL": oracles.rouge_l(src, dst),
    }


def entity_records(pid, side, text, entities):
    """Character-offset records for the external-entity ingestion path."""
    from tstsim import tokenize
    from tstsim.ner import Gazetteer, extract_entities

    toks = tokenize(text)
    spans = extract_entities(toks, Gazetteer.default())
    assert [s.normalized for s in spans] == list(entities), (pid, side)
    for s in spans:
        yield {
            "id": pid,
            "side": side,
            "start": toks.tokens[s.token_start].char_start,
            "end": toks.tokens[s.token_end - 1].char_end,
            "label": s.label,
        }


def main():
    rows, expected, ent_lines = [], {}, []
    for pid, src, dst, votes, se, de in PAIRS:
        rows.append("\t".join([pid, src, dst, *map(str, votes), ""]))
        human = (votes[0] + 2 * votes[1] + 3 * votes[2]) / sum(votes)
        ne = oracles.jaccard(se, de)
        p = oracles.entity_fraction(src, dst, se, de)
        scores = base_scores(src, dst)
        rec = {"human": human, "ne_jaccard": ne, "p": p}
        for m, v in scores.items():
            rec[m] = v
            rec[m + "+NE"] = oracles.merge(v, ne, p)
        rec["ne_jaccard+NE"] = oracles.merge(ne, ne, p)
        expected[pid] = rec
        for side, text, ents in (("src", src, se), ("dst", dst, de)):
            ent_lines.extend(json.dumps(r, sort_keys=True) for r in entity_records(pid, side, text, ents))
    ids = [p[0] for p in PAIRS]
    human = [expected[i]["human"] for i in ids]
    correlations = {}
    for m in MEASURES + ("ne_jaccard",):
        base = [expected[i][m] for i in ids]
        merged = [expected[i][m + "+NE"] for i in ids]
        correlations[m] = {
            "rho_base": oracles.spearman(base, human),
            "rho_merged": oracles.spearman(merged, human),
        }
    votes = [p[3] for p in PAIRS]
    alpha = {m: oracles.krippendorff_alpha(votes, m) for m in ("ordinal", "interval", "nominal")}
    header = "id\tsource\ttarget\tn_different\tn_similar\tn_same\tscore"
    (HERE / "synthetic50.tsv").write_text(header + "\n" + "\n".join(rows) + "\n", encoding="utf-8")
    (HERE / "synthetic50_entities.jsonl").write_text("\n".join(ent_lines) + "\n", encoding="utf-8")
    (HERE / "synthetic50_expected.json").write_text(
        json.dumps({"pairs": expected, "correlations": correlations, "alpha": alpha}, indent=1, sort_keys=True)
        + "\n",
        encoding="utf-8",
    )


if __name__ == "__main__":
    main()
