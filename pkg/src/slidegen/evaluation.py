"""Batch evaluation: IDF-recall of retrieval configurations, ROUGE of
generated slides, figure precision, and novel n-gram abstractiveness.

Decks pair with papers by id (deck_id == paper_id). All averages are macro
(per slide, then mean) and accumulate with math.fsum in corpus order, so
reports are deterministic and permutation-invariant.

The BM25 scorer below exists purely as the classical-IR comparator for
eval_retrieval; the serving path is always the dense index.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .docmodel import PaperDoc, SlideRecord
from .embedding import HashedTfidfEmbedder
from .errors import MisalignedCorpora, NoEligibleSlides, NoNgrams
from .figures import evaluate_figures
from .generation import SlideOptions, build_slide
from .headertree import HeaderTree, build_tree
from .retrieval import SnippetIndex, Snippet, build_index, retrieve, snippetize
from .textkit import (
    RougeReport,
    RougeScore,
    idf_recall,
    idf_table,
    novel_ngram_ratio,
    rouge,
    tokenize,
)


class Bm25Scorer:
    """Plain BM25 (k1 = 1.2, b = 0.75) over snippet-level documents."""

    def __init__(self, documents: Sequence[Sequence[str]], k1: float = 1.2, b: float = 0.75):
        self.k1 = k1
        self.b = b
        self.docs = [list(d) for d in documents]
        self.doc_lens = [len(d) for d in self.docs]
        self.avg_len = sum(self.doc_lens) / len(self.docs) if self.docs else 0.0
        df: dict[str, int] = {}
        for doc in self.docs:
            for token in set(doc):
                df[token] = df.get(token, 0) + 1
        n = len(self.docs)
        self.idf = {
            t: math.log((n - c + 0.5) / (c + 0.5) + 1.0) for t, c in df.items()
        }

    def score(self, query_tokens: Sequence[str], doc_index: int) -> float:
        doc = self.docs[doc_index]
        if not doc:
            return 0.0
        tf: dict[str, int] = {}
        for token in doc:
            tf[token] = tf.get(token, 0) + 1
        norm = self.k1 * (1 - self.b + self.b * self.doc_lens[doc_index] / self.avg_len)
        total = 0.0
        for token in query_tokens:
            if token not in tf:
                continue
            f = tf[token]
            total += self.idf.get(token, 0.0) * f * (self.k1 + 1) / (f + norm)
        return total

    def rank(self, query_tokens: Sequence[str], k: int) -> list[int]:
        scored = sorted(
            range(len(self.docs)),
            key=lambda i: (-self.score(query_tokens, i), i),
        )
        return scored[:k]


@dataclass
class PaperContext:
    """Everything needed to answer titles against one paper."""

    doc: PaperDoc
    tree: HeaderTree
    snippets: list[Snippet]
    index: SnippetIndex
    embedder: HashedTfidfEmbedder


def prepare_paper(
    doc: PaperDoc,
    dim: int = 128,
    seed: int = 0,
    alpha: float = 0.75,
    window: int = 4,
    embedder=None,
) -> PaperContext:
    """Build the tree, snippets, embedder (IDF from this paper's snippets)
    and index for one paper."""
    tree = build_tree(doc)
    snippets = snippetize(doc, tree, window=window)
    if embedder is None:
        embedder = HashedTfidfEmbedder.fit([s.text for s in snippets], dim=dim, seed=seed)
    index = build_index(snippets, embedder, alpha=alpha)
    return PaperContext(doc, tree, snippets, index, embedder)


def pair_corpora(
    papers: Sequence[PaperDoc], decks: Sequence[Sequence[SlideRecord]]
) -> list[tuple[PaperDoc, Sequence[SlideRecord]]]:
    by_id = {p.paper_id: p for p in papers}
    if len(by_id) != len(papers):
        raise MisalignedCorpora("duplicate paper ids in the corpus")
    pairs = []
    for deck in decks:
        if not deck:
            continue
        deck_id = deck[0].deck_id
        if deck_id not in by_id:
            raise MisalignedCorpora(f"deck '{deck_id}' has no paired paper")
        pairs.append((by_id[deck_id], deck))
    return pairs


RETRIEVAL_CONFIGS = (
    ("bm25", None),
    ("dense_text", 1.0),
    ("dense_keyword", 0.0),
    ("dense_mix", 0.75),
)


def eval_retrieval(
    papers: Sequence[PaperDoc],
    decks: Sequence[Sequence[SlideRecord]],
    k: int = 10,
    dim: int = 128,
    seed: int = 0,
    window: int = 4,
) -> dict[str, float]:
    """Mean IDF-recall of each retrieval configuration.

    For every slide, the top-k snippets for its title form the retrieved
    context; IDF-recall of the slide's own content against that context is
    macro-averaged over all slides with non-empty content. IDF weights come
    from the paired paper's snippet set.
    """
    pairs = pair_corpora(papers, decks)
    per_config: dict[str, list[float]] = {name: [] for name, _ in RETRIEVAL_CONFIGS}
    for doc, deck in pairs:
        base = prepare_paper(doc, dim=dim, seed=seed, window=window)
        # one shared embedding pass; the dense configs differ only by alpha
        indexes = {
            name: dataclasses.replace(base.index, alpha=alpha)
            for name, alpha in RETRIEVAL_CONFIGS
            if alpha is not None
        }
        snippet_tokens = [tokenize(s.text) for s in base.snippets]
        idf = idf_table(snippet_tokens)
        bm25 = Bm25Scorer(snippet_tokens)
        for slide in deck:
            reference = tokenize(slide.content_text())
            if not reference or not slide.title.strip():
                continue
            for name, alpha in RETRIEVAL_CONFIGS:
                if alpha is None:
                    top = bm25.rank(tokenize(slide.title), k)
                    retrieved_text = " ".join(base.snippets[i].text for i in top)
                else:
                    cands = retrieve(indexes[name], slide.title, base.embedder, k=k)
                    retrieved_text = " ".join(
                        base.index.by_id(c.snippet_id).text for c in cands
                    )
                per_config[name].append(idf_recall(reference, tokenize(retrieved_text), idf))
    return {
        name: (math.fsum(vals) / len(vals) if vals else 0.0)
        for name, vals in per_config.items()
    }


BulletGenerator = Callable[[PaperContext, SlideRecord], Sequence[str]]


def pipeline_generator(options: SlideOptions = SlideOptions()) -> BulletGenerator:
    """The production pipeline as an eval generator."""

    def generate(ctx: PaperContext, slide: SlideRecord) -> Sequence[str]:
        draft = build_slide(ctx.doc, ctx.tree, ctx.index, ctx.embedder, slide.title, options)
        return draft.bullets

    return generate


def copy_generator(ctx: PaperContext, slide: SlideRecord) -> Sequence[str]:
    """Oracle generator that returns the reference content; pins ROUGE = 1."""
    return list(slide.content_lines)


def _mean_reports(reports: Sequence[RougeReport]) -> RougeReport:
    if not reports:
        zero = RougeScore(0.0, 0.0, 0.0)
        return RougeReport(zero, zero, zero)
    n = len(reports)
    vals = [math.fsum(r.as_vector()[i] for r in reports) / n for i in range(9)]
    return RougeReport(
        r1=RougeScore(*vals[0:3]), r2=RougeScore(*vals[3:6]), rl=RougeScore(*vals[6:9])
    )


def eval_generation(
    papers: Sequence[PaperDoc],
    decks: Sequence[Sequence[SlideRecord]],
    generator: BulletGenerator,
    dim: int = 128,
    seed: int = 0,
    alpha: float = 0.75,
    window: int = 4,
) -> RougeReport:
    """Macro-averaged ROUGE of generated bullets against original content.

    Always runs on the corpus as given; evaluation data is never filtered.
    """
    pairs = pair_corpora(papers, decks)
    reports: list[RougeReport] = []
    for doc, deck in pairs:
        ctx = prepare_paper(doc, dim=dim, seed=seed, alpha=alpha, window=window)
        for slide in deck:
            if not slide.title.strip() or not slide.content_lines:
                continue
            bullets = generator(ctx, slide)
            reports.append(
                rouge(tokenize(" ".join(bullets)), tokenize(slide.content_text()))
            )
    return _mean_reports(reports)


def eval_abstractiveness(
    decks: Sequence[Sequence[SlideRecord]],
    papers: Sequence[PaperDoc],
    max_n: int = 3,
) -> dict[str, dict[int, float]]:
    """Macro-averaged novel n-gram ratios of titles and contents vs papers."""
    pairs = pair_corpora(papers, decks)
    title_ratios: dict[int, list[float]] = {n: [] for n in range(1, max_n + 1)}
    content_ratios: dict[int, list[float]] = {n: [] for n in range(1, max_n + 1)}
    for doc, deck in pairs:
        paper_tokens = tokenize(" ".join(doc.all_sentences()))
        for slide in deck:
            for target, sink in (
                (tokenize(slide.title), title_ratios),
                (tokenize(slide.content_text()), content_ratios),
            ):
                for n in range(1, max_n + 1):
                    try:
                        sink[n].append(novel_ngram_ratio(target, paper_tokens, n))
                    except NoNgrams:
                        pass
    def summarize(sink: dict[int, list[float]]) -> dict[int, float]:
        return {n: (math.fsum(v) / len(v) if v else 0.0) for n, v in sink.items()}

    return {"titles": summarize(title_ratios), "contents": summarize(content_ratios)}


def eval_figures_corpus(
    papers: Sequence[PaperDoc],
    decks: Sequence[Sequence[SlideRecord]],
    dim: int = 128,
    seed: int = 0,
) -> dict[str, float]:
    """Figure selection p@1/3/5 pooled over all paired decks."""
    pairs = pair_corpora(papers, decks)
    sums = {"p_at_1": 0.0, "p_at_3": 0.0, "p_at_5": 0.0}
    n_eligible = 0
    for doc, deck in pairs:
        if not doc.figures:
            continue
        eligible = [s for s in deck if s.linked_figures]
        if not eligible:
            continue
        ctx = prepare_paper(doc, dim=dim, seed=seed)
        result = evaluate_figures(doc, eligible, ctx.embedder, tree=ctx.tree)
        for key in sums:
            sums[key] += result[key] * len(eligible)
        n_eligible += len(eligible)
    if n_eligible == 0:
        raise NoEligibleSlides("no slide in the corpus links a figure")
    return {key: value / n_eligible for key, value in sums.items()}


def full_report(
    papers: Sequence[PaperDoc],
    decks: Sequence[Sequence[SlideRecord]],
    generator: BulletGenerator | None = None,
    dim: int = 128,
    seed: int = 0,
    k: int = 10,
) -> dict:
    """Run the whole measurement protocol and assemble one report dict."""
    generator = generator or pipeline_generator()
    report: dict = {
        "retrieval": {
            name: {"idf_recall": value}
            for name, value in eval_retrieval(papers, decks, k=k, dim=dim, seed=seed).items()
        },
        "generation": eval_generation(papers, decks, generator, dim=dim, seed=seed).to_dict(),
        "abstractiveness": {
            side: {f"novel_{n}": v for n, v in table.items()}
            for side, table in eval_abstractiveness(decks, papers).items()
        },
    }
    try:
        report["figures"] = eval_figures_corpus(papers, decks, dim=dim, seed=seed)
    except NoEligibleSlides:
        report["figures"] = None
    return report


def render_text_report(report: dict) -> str:
    """Aligned-column text rendering of full_report output."""
    lines = ["retrieval (mean IDF-recall)"]
    for name, values in report["retrieval"].items():
        lines.append(f"  {name:<14} {values['idf_recall']:.4f}")
    lines.append("generation (mean ROUGE)")
    gen = report["generation"]
    for prefix, label in (("r1", "ROUGE-1"), ("r2", "ROUGE-2"), ("rl", "ROUGE-L")):
        lines.append(
            f"  {label:<8} P {gen[f'{prefix}_p']:.4f}  R {gen[f'{prefix}_r']:.4f}  F {gen[f'{prefix}_f']:.4f}"
        )
    if report.get("figures"):
        figs = report["figures"]
        lines.append("figure selection")
        lines.append(
            f"  p@1 {figs['p_at_1']:.4f}  p@3 {figs['p_at_3']:.4f}  p@5 {figs['p_at_5']:.4f}"
        )
    lines.append("abstractiveness (novel n-gram ratio)")
    for side in ("titles", "contents"):
        table = report["abstractiveness"][side]
        cells = "  ".join(f"n={key[-1]} {value:.4f}" for key, value in sorted(table.items()))
        lines.append(f"  {side:<9} {cells}")
    return "\n".join(lines) + "\n"


def write_reports(report: dict, report_dir) -> None:
    out = Path(report_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(
        json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    (out / "report.txt").write_text(render_text_report(report), encoding="utf-8")
