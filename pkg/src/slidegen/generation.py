"""Query composition and slide bullet generation.

The wire form of a generation query is fixed:

    title[SEP1]keyword, keyword, ...[SEP2]context

The default generator is extractive and fully deterministic: context
sentences are scored against the title-plus-keywords embedding, selected
greedily under a no-repeated-trigram rule and a token budget, and emitted
in their original context order. Every bullet is therefore a verbatim
context sentence. An external seq2seq generator can be plugged in through
the /generate HTTP protocol (env var D2S_GEN_URL).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Sequence

import requests

from .docmodel import PaperDoc
from .errors import (
    EmptyContext,
    EmptyGeneration,
    EmptyTitle,
    ServiceUnavailable,
    Timeout,
)
from .figures import RankedFigure, rank_figures
from .headertree import HeaderTree, match_title
from .retrieval import (
    CONTEXT_TOKEN_BUDGET,
    DEFAULT_TOP_K,
    ScoredCandidate,
    SnippetIndex,
    context_text,
    retrieve,
)
from .textkit import ngrams, split_sentences, tokenize

SEP1 = "[SEP1]"
SEP2 = "[SEP2]"
GEN_URL_ENV = "D2S_GEN_URL"

DEFAULT_MIN_TOKENS = 64
DEFAULT_MAX_TOKENS = 128


@dataclass(frozen=True)
class GenerationQuery:
    title: str
    keywords: tuple[str, ...]
    context: str

    def wire(self) -> str:
        return f"{self.title}{SEP1}{', '.join(self.keywords)}{SEP2}{self.context}"


def compose_query(title: str, keywords: Sequence[str], context: str) -> GenerationQuery:
    if not title:
        raise EmptyTitle("query title must be non-empty")
    return GenerationQuery(title=title, keywords=tuple(keywords), context=context)


def parse_query(wire: str) -> GenerationQuery:
    """Inverse of GenerationQuery.wire()."""
    head, sep2, context = wire.partition(SEP2)
    title, sep1, keywords = head.partition(SEP1)
    if not sep1 or not sep2:
        raise EmptyTitle(f"malformed query wire form: {wire[:80]!r}")
    kw = tuple(k.strip() for k in keywords.split(",") if k.strip()) if keywords else ()
    return compose_query(title, kw, context)


def _scoring_text(title: str, keywords: Sequence[str]) -> str:
    return title + ", " + ", ".join(keywords) if keywords else title


def generate_extractive(
    query: GenerationQuery,
    embedder,
    min_tokens: int = DEFAULT_MIN_TOKENS,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> list[str]:
    """Greedy sentence selection from the query context.

    Sentences are ranked by similarity to the title (with keywords), taken
    best-first while skipping any sentence that would repeat an emitted
    trigram or overflow max_tokens, and stopping once min_tokens is
    reached. Selected sentences come back in context order, one bullet
    each. The max_tokens bound is hard: a pathological context whose every
    sentence alone overflows it yields no bullets.
    """
    sentences = split_sentences(query.context)
    if not sentences:
        raise EmptyContext("generator needs a non-empty context")

    query_vec = embedder.embed(_scoring_text(query.title, query.keywords))
    scores = [float(query_vec @ v) for v in embedder.embed_batch(sentences)]
    order = sorted(range(len(sentences)), key=lambda i: (-scores[i], i))

    chosen: list[int] = []
    seen_trigrams: set[tuple[str, ...]] = set()
    used_tokens = 0
    for i in order:
        tokens = tokenize(sentences[i])
        trigrams = set(ngrams(tokens, 3))
        if trigrams & seen_trigrams:
            continue
        if used_tokens + len(tokens) > max_tokens:
            continue  # drop the overflowing sentence, shorter ones may fit
        chosen.append(i)
        seen_trigrams |= trigrams
        used_tokens += len(tokens)
        if used_tokens >= min_tokens:
            break
    return [sentences[i] for i in sorted(chosen)]


class RemoteGeneratorClient:
    """Client for an external abstractive generator (HTTP POST /generate)."""

    def __init__(
        self,
        url: str,
        timeout_s: float = 30.0,
        retries: int = 2,
        backoff_s: float = 0.2,
        session: requests.Session | None = None,
    ):
        self.url = url.rstrip("/")
        self.timeout_s = timeout_s
        self.retries = retries
        self.backoff_s = backoff_s
        self.session = session or requests.Session()


def generation_request_body(query: GenerationQuery, min_tokens: int, max_tokens: int) -> bytes:
    """Exact request bytes for /generate; pinned for wire-compatibility."""
    payload = {"query": query.wire(), "min_tokens": min_tokens, "max_tokens": max_tokens}
    return json.dumps(payload).encode("utf-8")


def generate_remote(
    client: RemoteGeneratorClient,
    query: GenerationQuery,
    min_tokens: int = DEFAULT_MIN_TOKENS,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> list[str]:
    """Ask the remote generator for slide text; bullets are its lines."""
    body = generation_request_body(query, min_tokens, max_tokens)
    last_error: Exception | None = None
    for attempt in range(client.retries + 1):
        try:
            resp = client.session.post(
                client.url + "/generate",
                data=body,
                headers={"Content-Type": "application/json"},
                timeout=client.timeout_s,
            )
        except requests.Timeout as exc:
            raise Timeout(f"generator timed out after {client.timeout_s}s") from exc
        except requests.RequestException as exc:
            last_error = exc
            if attempt < client.retries:
                time.sleep(client.backoff_s)
            continue
        if resp.status_code >= 500:
            last_error = ServiceUnavailable(f"generator returned {resp.status_code}")
            if attempt < client.retries:
                time.sleep(client.backoff_s)
            continue
        if resp.status_code != 200:
            raise ServiceUnavailable(f"generator returned {resp.status_code}")
        text = resp.json().get("text", "")
        bullets = [line.strip() for line in text.splitlines() if line.strip()]
        if not bullets:
            raise EmptyGeneration("generator returned no text")
        return bullets
    raise ServiceUnavailable(f"generator unreachable: {last_error}")


@dataclass(frozen=True)
class SlideOptions:
    k: int = DEFAULT_TOP_K
    min_tokens: int = DEFAULT_MIN_TOKENS
    max_tokens: int = DEFAULT_MAX_TOKENS
    context_budget: int = CONTEXT_TOKEN_BUDGET
    generator: str = "extractive"  # or "remote"
    figure_count: int = 5
    match_threshold: float = 0.9


@dataclass(frozen=True)
class SlideDraft:
    title: str
    keywords: tuple[str, ...]
    candidates: tuple[ScoredCandidate, ...]
    bullets: tuple[str, ...]
    figures: tuple[RankedFigure, ...]
    generator_tag: str


def build_slide(
    doc: PaperDoc,
    tree: HeaderTree,
    index: SnippetIndex,
    embedder,
    title: str,
    options: SlideOptions = SlideOptions(),
    gen_client: RemoteGeneratorClient | None = None,
) -> SlideDraft:
    """Run the full per-title pipeline: keyword expansion, retrieval,
    context assembly, generation, figure ranking."""
    keyword_set = match_title(tree, title, options.match_threshold)
    candidates = retrieve(index, title, embedder, k=options.k)
    context = context_text(candidates, index, max_tokens=options.context_budget)
    query = compose_query(title, keyword_set.keywords, context)
    if options.generator == "remote":
        if gen_client is None:
            raise ServiceUnavailable("remote generation requested without a client")
        bullets = generate_remote(gen_client, query, options.min_tokens, options.max_tokens)
    else:
        bullets = generate_extractive(query, embedder, options.min_tokens, options.max_tokens)
    figures: tuple[RankedFigure, ...] = ()
    if doc.figures:
        ranking = rank_figures(doc, title, keyword_set, embedder)
        figures = tuple(ranking[: options.figure_count])
    return SlideDraft(
        title=title,
        keywords=keyword_set.keywords,
        candidates=tuple(candidates),
        bullets=tuple(bullets),
        figures=figures,
        generator_tag="remote" if options.generator == "remote" else "extractive",
    )


def draft_to_dict(draft: SlideDraft, index: SnippetIndex) -> dict:
    return {
        "title": draft.title,
        "keywords": list(draft.keywords),
        "candidates": [
            {
                "snippet_id": c.snippet_id,
                "score": c.score,
                "text": index.by_id(c.snippet_id).text,
            }
            for c in draft.candidates
        ],
        "bullets": list(draft.bullets),
        "figures": [
            {
                "id": r.figure.figure_id,
                "kind": r.figure.kind,
                "caption": r.figure.caption,
                "uri": r.figure.uri,
                "score": r.score,
            }
            for r in draft.figures
        ],
        "generator": draft.generator_tag,
    }


def canonical_json(obj) -> str:
    """Key-sorted, compact JSON; the byte-stable form shared by the CLI and
    the HTTP API."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def draft_to_markdown(draft: SlideDraft) -> str:
    lines = [f"# {draft.title}", ""]
    lines.extend(f"- {b}" for b in draft.bullets)
    if draft.figures:
        lines.append("")
        lines.extend(f"![{r.figure.figure_id}]({r.figure.uri})" for r in draft.figures)
    return "\n".join(lines) + "\n"


def drafts_to_deck_dict(deck_id: str, drafts: Sequence[SlideDraft]) -> dict:
    return {
        "deck_id": deck_id,
        "slides": [
            {
                "index": i,
                "title": d.title,
                "lines": list(d.bullets),
                "figures": [r.figure.figure_id for r in d.figures],
            }
            for i, d in enumerate(drafts)
        ],
    }
