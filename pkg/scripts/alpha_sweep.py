#!/usr/bin/env python3
"""Sweep the text/keyword mixing weight and report mean IDF-recall.

Usage:  python3 scripts/alpha_sweep.py [--k 10] [--dim 128]

Reproduces, at fixture scale, the experiment that picks the mixing weight:
retrieval quality as a function of alpha, with alpha=1 ranking on snippet
text only and alpha=0 on header keywords only.
"""

import argparse
import dataclasses
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from slidegen.docmodel import ingest_deck, ingest_paper
from slidegen.evaluation import prepare_paper
from slidegen.retrieval import retrieve
from slidegen.textkit import idf_recall, idf_table, tokenize

ROOT = Path(__file__).resolve().parent.parent

ALPHAS = (0.0, 0.1, 0.2, 0.25, 0.5, 0.6, 0.7, 0.75, 0.8, 0.9, 1.0)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--dim", type=int, default=128)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    paper = ingest_paper((ROOT / "fixtures" / "sample_paper.json").read_bytes())
    deck = ingest_deck((ROOT / "fixtures" / "sample_deck.json").read_bytes())

    ctx = prepare_paper(paper, dim=args.dim, seed=args.seed)
    idf = idf_table([tokenize(s.text) for s in ctx.snippets])

    print(f"{'alpha':>6}  {'idf-recall':>10}")
    for alpha in ALPHAS:
        index = dataclasses.replace(ctx.index, alpha=alpha)
        values = []
        for slide in deck:
            reference = tokenize(slide.content_text())
            if not reference:
                continue
            candidates = retrieve(index, slide.title, ctx.embedder, k=args.k)
            retrieved = " ".join(ctx.index.by_id(c.snippet_id).text for c in candidates)
            values.append(idf_recall(reference, tokenize(retrieved), idf))
        mean = math.fsum(values) / len(values)
        print(f"{alpha:>6.2f}  {mean:>10.4f}")


if __name__ == "__main__":
    main()
