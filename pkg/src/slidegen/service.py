"""HTTP surface for interactive slide drafting.

Endpoints:
    GET  /health
    POST /papers                      paper-JSON -> 201 {"paper_id": ...}
    GET  /papers/{id}/outline         header tree JSON
    POST /papers/{id}/slides          {"title", "k", "generator"} -> SlideDraft JSON
    GET  /papers/{id}/figures?title=  figure ranking JSON
    POST /decks/export                deck-JSON -> deck-JSON or Markdown (Accept)

Slide drafting is stateless per request; the only server-side state is the
ingested paper and its lazily built index, guarded by a per-paper lock so
concurrent first requests build it once. SlideDraft responses are the same
canonical bytes the CLI prints for identical inputs.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from .docmodel import PaperDoc, ingest_deck, ingest_paper, serialize_deck
from .embedding import (
    DEFAULT_DIM,
    EMBED_URL_ENV,
    HashedTfidfEmbedder,
    RemoteEmbeddingClient,
)
from .errors import EmptyDeck, SlideGenError
from .generation import (
    GEN_URL_ENV,
    RemoteGeneratorClient,
    SlideOptions,
    build_slide,
    canonical_json,
    draft_to_dict,
)
from .figures import rank_figures, ranking_to_dict
from .headertree import HeaderTree, build_tree, match_title, tree_to_dict
from .retrieval import DEFAULT_ALPHA, SnippetIndex, build_index, snippetize


@dataclass
class ServiceConfig:
    port: int = 8080
    alpha: float = DEFAULT_ALPHA
    embed_dim: int = DEFAULT_DIM
    seed: int = 0
    window: int = 4
    gen_timeout_ms: int = 30000
    embed_url: str | None = None
    gen_url: str | None = None
    preload_papers: tuple[str, ...] = ()  # paper-JSON paths ingested at startup

    @classmethod
    def from_env(cls, **overrides) -> "ServiceConfig":
        config = cls(**overrides)
        config.embed_url = config.embed_url or os.environ.get(EMBED_URL_ENV) or None
        config.gen_url = config.gen_url or os.environ.get(GEN_URL_ENV) or None
        return config


@dataclass
class _PaperEntry:
    doc: PaperDoc
    tree: HeaderTree
    lock: threading.Lock = field(default_factory=threading.Lock)
    index: SnippetIndex | None = None
    embedder: HashedTfidfEmbedder | RemoteEmbeddingClient | None = None


class PaperStore:
    """Ingested papers plus their lazily built per-paper indexes."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self._papers: dict[str, _PaperEntry] = {}
        self._lock = threading.Lock()

    def add(self, doc: PaperDoc) -> None:
        with self._lock:
            self._papers[doc.paper_id] = _PaperEntry(doc=doc, tree=build_tree(doc))

    def get(self, paper_id: str) -> _PaperEntry | None:
        with self._lock:
            return self._papers.get(paper_id)

    def ready(self, paper_id: str) -> _PaperEntry | None:
        """Entry with index built; the build runs at most once per paper."""
        entry = self.get(paper_id)
        if entry is None:
            return None
        with entry.lock:
            if entry.index is None:
                snippets = snippetize(entry.doc, entry.tree, window=self.config.window)
                if self.config.embed_url:
                    entry.embedder = RemoteEmbeddingClient(
                        self.config.embed_url, dim=self.config.embed_dim
                    )
                else:
                    entry.embedder = HashedTfidfEmbedder.fit(
                        [s.text for s in snippets],
                        dim=self.config.embed_dim,
                        seed=self.config.seed,
                    )
                entry.index = build_index(snippets, entry.embedder, alpha=self.config.alpha)
        return entry


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig.from_env()
    app = FastAPI(title="slidegen", docs_url=None, redoc_url=None)
    # the web UI may be served from another origin; there is no auth to leak
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = PaperStore(config)
    for path in config.preload_papers:
        with open(path, "rb") as fh:
            store.add(ingest_paper(fh.read()))
    app.state.store = store
    app.state.config = config

    def error_response(exc: SlideGenError, status: int = 400) -> JSONResponse:
        return JSONResponse({"error": type(exc).__name__, "detail": str(exc)}, status_code=status)

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/papers", status_code=201)
    async def add_paper(request: Request):
        try:
            doc = ingest_paper(await request.body())
        except SlideGenError as exc:
            return error_response(exc)
        store.add(doc)
        return {"paper_id": doc.paper_id}

    @app.get("/papers/{paper_id}/outline")
    def outline(paper_id: str):
        entry = store.get(paper_id)
        if entry is None:
            return JSONResponse({"error": "NotFound", "detail": paper_id}, status_code=404)
        return tree_to_dict(entry.tree)

    @app.post("/papers/{paper_id}/slides")
    async def draft_slide(paper_id: str, request: Request):
        entry = store.ready(paper_id)
        if entry is None:
            return JSONResponse({"error": "NotFound", "detail": paper_id}, status_code=404)
        body = await request.json()
        title = body.get("title", "")
        options = SlideOptions(
            k=int(body.get("k", 10)),
            generator=body.get("generator", "extractive"),
        )
        gen_client = None
        if options.generator == "remote":
            if not config.gen_url:
                return JSONResponse(
                    {"error": "ConfigError", "detail": "no generator endpoint configured"},
                    status_code=503,
                )
            gen_client = RemoteGeneratorClient(
                config.gen_url, timeout_s=config.gen_timeout_ms / 1000.0
            )
        try:
            draft = build_slide(
                entry.doc, entry.tree, entry.index, entry.embedder, title, options, gen_client
            )
        except SlideGenError as exc:
            return error_response(exc)
        return Response(
            content=canonical_json(draft_to_dict(draft, entry.index)),
            media_type="application/json",
        )

    @app.get("/papers/{paper_id}/figures")
    def figures(paper_id: str, title: str = ""):
        entry = store.ready(paper_id)
        if entry is None:
            return JSONResponse({"error": "NotFound", "detail": paper_id}, status_code=404)
        try:
            ranking = rank_figures(
                entry.doc, title, match_title(entry.tree, title), entry.embedder
            )
        except SlideGenError as exc:
            return error_response(exc)
        return Response(
            content=canonical_json(ranking_to_dict(ranking)),
            media_type="application/json",
        )

    @app.post("/decks/export")
    async def export_deck(request: Request):
        try:
            slides = ingest_deck(await request.body())
            if not slides:
                raise EmptyDeck("deck has no slides")
        except SlideGenError as exc:
            return error_response(exc)
        accept = request.headers.get("accept", "")
        if "text/markdown" in accept:
            parts = []
            for slide in slides:
                lines = [f"# {slide.title}", ""]
                lines.extend(f"- {line}" for line in slide.content_lines)
                if slide.linked_figures:
                    lines.append("")
                    lines.extend(f"![{fid}]({fid})" for fid in slide.linked_figures)
                parts.append("\n".join(lines))
            return PlainTextResponse("\n\n".join(parts) + "\n", media_type="text/markdown")
        return Response(
            content=canonical_json(serialize_deck(slides)),
            media_type="application/json",
        )

    return app


def serve(config: ServiceConfig) -> None:
    """Run the HTTP service until interrupted."""
    import uvicorn

    from .errors import BindError

    try:
        uvicorn.run(create_app(config), host="0.0.0.0", port=config.port, log_level="warning")
    except SystemExit as exc:  # uvicorn exits on bind failure
        raise BindError(f"could not serve on port {config.port}") from exc
