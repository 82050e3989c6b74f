"""Snippetization, the snippet index, and exact inner-product retrieval.

A paper is cut into snippets of up to four consecutive sentences that never
cross section boundaries; together the snippets partition the paper's
sentences. Each snippet carries two vectors (its text and its header
keyword) and a title is scored against both:

    score = alpha * (title . text) + (1 - alpha) * (title . keyword)

Scoring is exact: the matrix product is a speedup, never an approximation,
and ties break deterministically by ascending snippet id.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import binio
from .docmodel import PaperDoc
from .errors import (
    AlphaOutOfRange,
    DimensionMismatch,
    EmptySnippets,
    EmptyTitle,
    InvalidWindow,
    SchemaError,
)
from .headertree import HeaderTree, snippet_keyword
from .textkit import tokenize

DEFAULT_WINDOW = 4
DEFAULT_ALPHA = 0.75
DEFAULT_TOP_K = 10
CONTEXT_TOKEN_BUDGET = 1024

_MAGIC = b"D2SI"
_VERSION = 1


@dataclass(frozen=True)
class Snippet:
    snippet_id: int
    section_index: int
    sentence_range: tuple[int, int]
    sentences: tuple[str, ...]
    text: str
    keyword: str
    text_vec: np.ndarray | None = None
    kw_vec: np.ndarray | None = None


@dataclass(frozen=True)
class ScoredCandidate:
    snippet_id: int
    score: float
    text_score: float
    kw_score: float


@dataclass
class SnippetIndex:
    snippets: list[Snippet]
    dim: int
    alpha: float
    text_matrix: np.ndarray  # (n, dim)
    kw_matrix: np.ndarray  # (n, dim)

    def __len__(self) -> int:
        return len(self.snippets)

    def by_id(self, snippet_id: int) -> Snippet:
        return self.snippets[snippet_id]


def snippetize(doc: PaperDoc, tree: HeaderTree, window: int = DEFAULT_WINDOW) -> list[Snippet]:
    """Cut the paper into consecutive-sentence snippets, section by section.

    Windows never overlap or cross sections; the last window of a section
    may be shorter. Snippet ids are assigned in document order and
    partition the paper: every sentence lands in exactly one snippet.
    """
    if window < 1:
        raise InvalidWindow(f"window must be >= 1, got {window}")
    snippets: list[Snippet] = []
    for sec_idx, section in enumerate(doc.sections):
        for start in range(0, len(section.sentences), window):
            end = min(start + window, len(section.sentences))
            span = section.sentences[start:end]
            snippets.append(
                Snippet(
                    snippet_id=len(snippets),
                    section_index=sec_idx,
                    sentence_range=(start, end),
                    sentences=span,
                    text=" ".join(span),
                    keyword=snippet_keyword(tree, sec_idx, start, end),
                )
            )
    return snippets


def build_index(snippets: Sequence[Snippet], embedder, alpha: float = DEFAULT_ALPHA) -> SnippetIndex:
    """Embed every snippet's text and keyword and assemble the index."""
    if not snippets:
        raise EmptySnippets("cannot index zero snippets")
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must be in [0, 1], got {alpha}")
    text_vecs = embedder.embed_batch([s.text for s in snippets])
    kw_vecs = embedder.embed_batch([s.keyword for s in snippets])
    stored = [
        replace(s, text_vec=tv, kw_vec=kv)
        for s, tv, kv in zip(snippets, text_vecs, kw_vecs)
    ]
    return SnippetIndex(
        snippets=stored,
        dim=embedder.dim,
        alpha=alpha,
        text_matrix=np.stack(text_vecs),
        kw_matrix=np.stack(kw_vecs),
    )


def rank_candidates(index: SnippetIndex, query_vec: np.ndarray, k: int) -> list[ScoredCandidate]:
    """Exact top-k of the mixed ranking function for a query vector.

    Inner products are computed for every snippet (matrix form); the final
    score of each candidate is assembled from its two component floats so
    the decomposition invariant holds bit-exactly.
    """
    query_vec = np.asarray(query_vec, dtype=np.float64)
    if query_vec.shape != (index.dim,):
        raise DimensionMismatch(
            f"query vector has shape {query_vec.shape}, index dimension is {index.dim}"
        )
    text_scores = index.text_matrix @ query_vec
    kw_scores = index.kw_matrix @ query_vec
    alpha = index.alpha
    candidates = [
        ScoredCandidate(
            snippet_id=s.snippet_id,
            score=alpha * float(text_scores[i]) + (1.0 - alpha) * float(kw_scores[i]),
            text_score=float(text_scores[i]),
            kw_score=float(kw_scores[i]),
        )
        for i, s in enumerate(index.snippets)
    ]
    candidates.sort(key=lambda c: (-c.score, c.snippet_id))
    return candidates[: max(k, 0)]


def retrieve(index: SnippetIndex, title: str, embedder, k: int = DEFAULT_TOP_K) -> list[ScoredCandidate]:
    """Top-k snippets for a slide title, best first.

    The query side embeds the raw title only; keyword expansion influences
    generation, not the retrieval score. Raises EmptyTitle on blank input.
    """
    if not title.strip():
        raise EmptyTitle("cannot retrieve with a blank title")
    return rank_candidates(index, embedder.embed(title), k)


def context_text(
    candidates: Sequence[ScoredCandidate],
    index: SnippetIndex,
    max_tokens: int = CONTEXT_TOKEN_BUDGET,
) -> str:
    """Concatenate candidate snippets, in rank order, into the generator
    context.

    Truncates at the last whole sentence that fits the token budget; a
    budget smaller than the first sentence yields an empty context.
    """
    kept: list[str] = []
    used = 0
    for cand in candidates:
        for sentence in index.by_id(cand.snippet_id).sentences:
            cost = len(tokenize(sentence))
            if used + cost > max_tokens:
                return " ".join(kept)
            kept.append(sentence)
            used += cost
    return " ".join(kept)


def candidates_to_dict(candidates: Sequence[ScoredCandidate], index: SnippetIndex) -> dict:
    return {
        "candidates": [
            {
                "snippet_id": c.snippet_id,
                "score": c.score,
                "text": index.by_id(c.snippet_id).text,
            }
            for c in candidates
        ]
    }


def save_index(index: SnippetIndex, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        binio.write_u16(fh, _VERSION)
        binio.write_u32(fh, index.dim)
        binio.write_f64(fh, index.alpha)
        binio.write_u32(fh, len(index.snippets))
        for s in index.snippets:
            binio.write_u32(fh, s.snippet_id)
            binio.write_u32(fh, s.section_index)
            binio.write_u32(fh, s.sentence_range[0])
            binio.write_u32(fh, s.sentence_range[1])
            binio.write_str(fh, s.keyword)
            binio.write_u32(fh, len(s.sentences))
            for sentence in s.sentences:
                binio.write_str(fh, sentence)
            binio.write_f64_array(fh, s.text_vec)
            binio.write_f64_array(fh, s.kw_vec)


def load_index(path) -> SnippetIndex:
    with open(path, "rb") as fh:
        binio.expect_magic(fh, _MAGIC, _VERSION)
        dim = binio.read_u32(fh)
        alpha = binio.read_f64(fh)
        count = binio.read_u32(fh)
        snippets: list[Snippet] = []
        for _ in range(count):
            snippet_id = binio.read_u32(fh)
            section_index = binio.read_u32(fh)
            start = binio.read_u32(fh)
            end = binio.read_u32(fh)
            keyword = binio.read_str(fh)
            sentences = tuple(binio.read_str(fh) for _ in range(binio.read_u32(fh)))
            text_vec = binio.read_f64_array(fh, dim)
            kw_vec = binio.read_f64_array(fh, dim)
            snippets.append(
                Snippet(
                    snippet_id=snippet_id,
                    section_index=section_index,
                    sentence_range=(start, end),
                    sentences=sentences,
                    text=" ".join(sentences),
                    keyword=keyword,
                    text_vec=text_vec,
                    kw_vec=kw_vec,
                )
            )
    if snippets and any(s.snippet_id != i for i, s in enumerate(snippets)):
        raise SchemaError("snippet ids must be dense and ordered")
    return SnippetIndex(
        snippets=snippets,
        dim=dim,
        alpha=alpha,
        text_matrix=np.stack([s.text_vec for s in snippets]) if snippets else np.zeros((0, dim)),
        kw_matrix=np.stack([s.kw_vec for s in snippets]) if snippets else np.zeros((0, dim)),
    )
