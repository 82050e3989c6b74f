"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error. The `generate`
subcommand prints a Markdown slide by default and the canonical SlideDraft
JSON with --json; that JSON is byte-identical to the HTTP API's response
for the same inputs and configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import derivability, evaluation
from .docmodel import (
    deck_stats,
    ingest_deck,
    ingest_paper,
    serialize_deck,
    serialize_paper,
)
from .embedding import (
    DEFAULT_DIM,
    HashedTfidfEmbedder,
    TrainConfig,
    build_training_pairs,
    embedder_from_env,
    load_embedder,
    save_embedder,
    train_contrastive,
)
from .errors import SlideGenError
from .figures import rank_figures, ranking_to_dict
from .generation import (
    GEN_URL_ENV,
    RemoteGeneratorClient,
    SlideOptions,
    build_slide,
    canonical_json,
    draft_to_dict,
    draft_to_markdown,
)
from .headertree import build_tree, match_title
from .retrieval import (
    DEFAULT_ALPHA,
    build_index,
    candidates_to_dict,
    load_index,
    retrieve,
    save_index,
    snippetize,
)
from .service import ServiceConfig, serve

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _read_paper(path: str):
    return ingest_paper(Path(path).read_bytes())


def _read_deck(path: str):
    return ingest_deck(Path(path).read_bytes())


def _load_context(args):
    """Paper, tree, embedder and index from CLI flags (index built or loaded)."""
    doc = _read_paper(args.paper)
    tree = build_tree(doc)
    if getattr(args, "index", None):
        index = load_index(args.index)
        snippets = index.snippets
    else:
        snippets = snippetize(doc, tree, window=args.window)
        index = None
    if getattr(args, "embedder", None):
        embedder = load_embedder(args.embedder)
    else:
        embedder = embedder_from_env(
            [s.text for s in snippets], dim=args.dim, seed=args.seed
        )
    if index is None:
        index = build_index(snippets, embedder, alpha=args.alpha)
    return doc, tree, embedder, index


def _add_paper_flags(p, with_index: bool = True):
    p.add_argument("--paper", required=True, help="paper-JSON file")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--dim", type=int, default=DEFAULT_DIM)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--embedder", help="load a trained embedder file instead of fitting")
    if with_index:
        p.add_argument("--index", help="load a prebuilt index file")


def build_parser() -> _Parser:
    parser = _Parser(prog="slidegen", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate paper-JSON and print a summary")
    p.add_argument("--paper", required=True)
    p.add_argument("--out", help="write canonical paper-JSON here")

    p = sub.add_parser("index", help="build and save a snippet index")
    _add_paper_flags(p, with_index=False)
    p.add_argument("--out", required=True)

    p = sub.add_parser("retrieve", help="top-k snippets for a title")
    _add_paper_flags(p)
    p.add_argument("--title", required=True)
    p.add_argument("--k", type=int, default=10)

    p = sub.add_parser("generate", help="draft one slide for a title")
    _add_paper_flags(p)
    p.add_argument("--title", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--min-tokens", type=int, default=64)
    p.add_argument("--max-tokens", type=int, default=128)
    p.add_argument("--generator", choices=["extractive", "remote"], default="extractive")
    p.add_argument("--gen-timeout-ms", type=int, default=30000)
    p.add_argument("--json", action="store_true", help="print SlideDraft JSON instead of Markdown")

    p = sub.add_parser("figures", help="rank figures for a title")
    _add_paper_flags(p)
    p.add_argument("--title", required=True)

    p = sub.add_parser("filter", help="drop underivable lines from decks")
    p.add_argument("--decks", nargs="+", required=True)
    p.add_argument("--papers", nargs="+", required=True)
    p.add_argument("--model", required=True, help="trained forest file")
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("train-embedder", help="contrastive training on deck titles")
    p.add_argument("--decks", nargs="+", required=True)
    p.add_argument("--papers", nargs="+", required=True, help="IDF corpus source")
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, default=DEFAULT_DIM)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--k-negatives", type=int, default=4)

    p = sub.add_parser("eval", help="run the evaluation harness")
    p.add_argument("--papers", nargs="+", required=True)
    p.add_argument("--decks", nargs="+", required=True)
    p.add_argument("--report-dir")
    p.add_argument("--dim", type=int, default=DEFAULT_DIM)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=10)

    p = sub.add_parser("stats", help="token-length and novelty statistics")
    p.add_argument("--decks", nargs="+", required=True)
    p.add_argument("--papers", nargs="*", default=[], help="enables novel n-gram table")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--embed-dim", type=int, default=DEFAULT_DIM)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--gen-timeout-ms", type=int, default=30000)
    p.add_argument("--papers", nargs="*", default=[], help="paper-JSON files to load at startup")

    return parser


def _cmd_ingest(args) -> int:
    doc = _read_paper(args.paper)
    if args.out:
        Path(args.out).write_text(
            json.dumps(serialize_paper(doc), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
    n_sentences = len(doc.all_sentences())
    print(
        f"{doc.paper_id}: {len(doc.sections)} sections, "
        f"{n_sentences} sentences, {len(doc.figures)} figures"
    )
    return 0


def _cmd_index(args) -> int:
    doc = _read_paper(args.paper)
    tree = build_tree(doc)
    snippets = snippetize(doc, tree, window=args.window)
    if args.embedder:
        embedder = load_embedder(args.embedder)
    else:
        embedder = embedder_from_env([s.text for s in snippets], dim=args.dim, seed=args.seed)
    index = build_index(snippets, embedder, alpha=args.alpha)
    save_index(index, args.out)
    print(f"indexed {len(index)} snippets -> {args.out}")
    return 0


def _cmd_retrieve(args) -> int:
    _, _, embedder, index = _load_context(args)
    candidates = retrieve(index, args.title, embedder, k=args.k)
    print(canonical_json(candidates_to_dict(candidates, index)))
    return 0


def _cmd_generate(args) -> int:
    doc, tree, embedder, index = _load_context(args)
    options = SlideOptions(
        k=args.k,
        min_tokens=args.min_tokens,
        max_tokens=args.max_tokens,
        generator=args.generator,
    )
    gen_client = None
    if args.generator == "remote":
        url = os.environ.get(GEN_URL_ENV)
        if not url:
            print(f"error: remote generation needs {GEN_URL_ENV}", file=sys.stderr)
            return DATA_ERROR
        gen_client = RemoteGeneratorClient(url, timeout_s=args.gen_timeout_ms / 1000.0)
    draft = build_slide(doc, tree, index, embedder, args.title, options, gen_client)
    if args.json:
        print(canonical_json(draft_to_dict(draft, index)))
    else:
        print(draft_to_markdown(draft), end="")
    return 0


def _cmd_figures(args) -> int:
    doc, tree, embedder, _ = _load_context(args)
    ranking = rank_figures(doc, args.title, match_title(tree, args.title), embedder)
    print(canonical_json(ranking_to_dict(ranking)))
    return 0


def _cmd_filter(args) -> int:
    decks = [_read_deck(p) for p in args.decks]
    papers = [_read_paper(p) for p in args.papers]
    forest = derivability.load_forest(args.model)
    filtered, report = derivability.filter_corpus(decks, papers, forest)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for deck in filtered:
        if not deck:
            continue
        path = out_dir / f"{deck[0].deck_id}.json"
        path.write_text(
            json.dumps(serialize_deck(deck), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
    print(json.dumps(report.to_dict()))
    return 0


def _cmd_train_embedder(args) -> int:
    decks = [_read_deck(p) for p in args.decks]
    papers = [_read_paper(p) for p in args.papers]
    snippet_texts = []
    for doc in papers:
        tree = build_tree(doc)
        snippet_texts.extend(s.text for s in snippetize(doc, tree, window=args.window))
    embedder = HashedTfidfEmbedder.fit(snippet_texts, dim=args.dim, seed=args.seed)
    slides = [(s.title, s.content_text()) for deck in decks for s in deck if s.content_lines]
    pairs = build_training_pairs(slides, k_negatives=args.k_negatives, seed=args.seed)
    config = TrainConfig(lr=args.lr, epochs=args.epochs, k_negatives=args.k_negatives, seed=args.seed)
    result = train_contrastive(embedder, pairs, config)
    save_embedder(result.embedder, args.out)
    print(
        f"trained on {len(pairs)} pairs: loss {result.loss_history[0]:.4f} "
        f"-> {result.loss_history[-1]:.4f}, saved {args.out}"
    )
    return 0


def _cmd_eval(args) -> int:
    papers = [_read_paper(p) for p in args.papers]
    decks = [_read_deck(p) for p in args.decks]
    report = evaluation.full_report(papers, decks, dim=args.dim, seed=args.seed, k=args.k)
    print(evaluation.render_text_report(report), end="")
    if args.report_dir:
        evaluation.write_reports(report, args.report_dir)
    return 0


def _cmd_stats(args) -> int:
    decks = [_read_deck(p) for p in args.decks]
    slides = [s for deck in decks for s in deck]
    stats = deck_stats(slides)
    print(
        f"slides {stats.n_slides}  avg title tokens {stats.avg_title_len:.2f}  "
        f"avg content tokens {stats.avg_content_len:.2f}"
    )
    if args.papers:
        papers = [_read_paper(p) for p in args.papers]
        table = evaluation.eval_abstractiveness(decks, papers)
        for side in ("titles", "contents"):
            cells = "  ".join(f"n={n} {v:.3f}" for n, v in sorted(table[side].items()))
            print(f"novel n-grams {side:<9} {cells}")
    return 0


def _cmd_serve(args) -> int:
    config = ServiceConfig.from_env(
        port=args.port,
        alpha=args.alpha,
        embed_dim=args.embed_dim,
        seed=args.seed,
        window=args.window,
        gen_timeout_ms=args.gen_timeout_ms,
        preload_papers=tuple(args.papers),
    )
    serve(config)
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "index": _cmd_index,
    "retrieve": _cmd_retrieve,
    "generate": _cmd_generate,
    "figures": _cmd_figures,
    "filter": _cmd_filter,
    "train-embedder": _cmd_train_embedder,
    "eval": _cmd_eval,
    "stats": _cmd_stats,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    try:
        return _COMMANDS[args.command](args)
    except SlideGenError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return DATA_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
