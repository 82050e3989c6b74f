"""Caption-similarity ranking of a paper's figures and tables for a title."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .docmodel import FigureAsset, PaperDoc, SlideRecord
from .errors import NoEligibleSlides, NoFigures
from .headertree import HeaderTree, KeywordSet, build_tree, match_title
from .textkit import precision_at_k


@dataclass(frozen=True)
class RankedFigure:
    figure: FigureAsset
    score: float


def figure_query(title: str, keywords: Sequence[str]) -> str:
    """Query text for caption scoring: the title, extended with the comma
    separated keyword list when one exists."""
    if keywords:
        return title + ", " + ", ".join(keywords)
    return title


def rank_figures(
    doc: PaperDoc,
    title: str,
    keywords: KeywordSet | Sequence[str],
    embedder,
) -> list[RankedFigure]:
    """Rank every figure/table of the paper by caption similarity.

    The result is a permutation of the paper's figures, best first; ties
    keep document order. Raises NoFigures when the paper has none.
    """
    if not doc.figures:
        raise NoFigures(f"paper '{doc.paper_id}' has no figures")
    kw_list = keywords.keywords if isinstance(keywords, KeywordSet) else tuple(keywords)
    query_vec = embedder.embed(figure_query(title, kw_list))
    caption_vecs = embedder.embed_batch([f.caption for f in doc.figures])
    scored = [
        RankedFigure(figure=f, score=float(query_vec @ v))
        for f, v in zip(doc.figures, caption_vecs)
    ]
    order = sorted(range(len(scored)), key=lambda i: (-scored[i].score, i))
    return [scored[i] for i in order]


def evaluate_figures(
    doc: PaperDoc,
    slides: Sequence[SlideRecord],
    embedder,
    tree: HeaderTree | None = None,
) -> dict[str, float]:
    """Macro-averaged p@1/3/5 over the slides that link at least one figure.

    A slide's relevant set is its linked figure ids. Raises NoEligibleSlides
    when no slide links a figure.
    """
    if tree is None:
        tree = build_tree(doc)
    eligible = [s for s in slides if s.linked_figures]
    if not eligible:
        raise NoEligibleSlides("no slide links a figure or table")
    sums = {1: 0.0, 3: 0.0, 5: 0.0}
    for slide in eligible:
        ranking = rank_figures(doc, slide.title, match_title(tree, slide.title), embedder)
        ranked_ids = [r.figure.figure_id for r in ranking]
        relevant = set(slide.linked_figures)
        for k in sums:
            sums[k] += precision_at_k(ranked_ids, relevant, k)
    n = len(eligible)
    return {"p_at_1": sums[1] / n, "p_at_3": sums[3] / n, "p_at_5": sums[5] / n}


def ranking_to_dict(ranking: Sequence[RankedFigure]) -> dict:
    return {
        "figures": [
            {
                "id": r.figure.figure_id,
                "kind": r.figure.kind,
                "caption": r.figure.caption,
                "uri": r.figure.uri,
                "score": r.score,
            }
            for r in ranking
        ]
    }
