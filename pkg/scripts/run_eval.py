#!/usr/bin/env python3
"""Run the full evaluation harness on the bundled fixture corpus.

Usage:  python3 scripts/run_eval.py [--report-dir reports/]

Equivalent to `slidegen eval --papers fixtures/sample_paper.json
--decks fixtures/sample_deck.json`, kept as a script so the measurement
protocol is runnable straight from a checkout.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from slidegen.docmodel import ingest_deck, ingest_paper
from slidegen.evaluation import full_report, render_text_report, write_reports

ROOT = Path(__file__).resolve().parent.parent


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--report-dir", default=None)
    parser.add_argument("--dim", type=int, default=128)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    paper = ingest_paper((ROOT / "fixtures" / "sample_paper.json").read_bytes())
    deck = ingest_deck((ROOT / "fixtures" / "sample_deck.json").read_bytes())
    report = full_report([paper], [deck], dim=args.dim, seed=args.seed)
    print(render_text_report(report), end="")
    if args.report_dir:
        write_reports(report, args.report_dir)
        print(f"reports written to {args.report_dir}")


if __name__ == "__main__":
    main()
