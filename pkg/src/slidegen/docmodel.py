"""Canonical in-memory model of papers and slide decks, plus JSON ingestion.

The package never touches PDFs. Papers arrive as paper-JSON:

    { "paper_id": str, "title": str,
      "sections": [ { "label": str, "header": str, "sentences": [str] } ],
      "figures": [ { "id": str, "kind": "figure"|"table",
                     "caption": str, "uri": str } ] }

and decks as deck-JSON:

    { "deck_id": str,
      "slides": [ { "index": int, "title": str,
                    "lines": [str], "figures": [str] } ] }

All types are frozen dataclasses with tuple fields: once ingested they are
immutable and safe to share across threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import EmptyCorpus, EmptyDocument, SchemaError
from .textkit import tokenize

_LABEL_RE = re.compile(r"^\d+(\.\d+)*$")

# Sentences where more than this fraction of characters is non-alphanumeric
# (spaces included) are treated as equation fragments and dropped.
_MAX_NON_ALNUM_FRACTION = 0.4


@dataclass(frozen=True)
class Section:
    header_label: str
    header_text: str
    sentences: tuple[str, ...]


@dataclass(frozen=True)
class FigureAsset:
    figure_id: str
    kind: str  # "figure" or "table"
    caption: str
    uri: str


@dataclass(frozen=True)
class PaperDoc:
    paper_id: str
    title: str
    sections: tuple[Section, ...]
    figures: tuple[FigureAsset, ...]

    def all_sentences(self) -> list[str]:
        return [s for sec in self.sections for s in sec.sentences]


@dataclass(frozen=True)
class SlideRecord:
    deck_id: str
    slide_index: int
    title: str
    content_lines: tuple[str, ...]
    linked_figures: tuple[str, ...]

    def content_text(self) -> str:
        return " ".join(self.content_lines)


def _require(obj: dict, field: str, kind, where: str):
    if field not in obj:
        raise SchemaError(f"{where}: missing required field '{field}'")
    value = obj[field]
    if not isinstance(value, kind):
        raise SchemaError(f"{where}: field '{field}' must be {kind.__name__}")
    return value


def _as_dict(raw) -> dict:
    if isinstance(raw, (bytes, bytearray)):
        raw = raw.decode("utf-8")
    if isinstance(raw, str):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError("top-level JSON value must be an object")
    return raw


def clean_sentence(sentence: str) -> str | None:
    """Normalize one sentence; None when it should be dropped.

    Drops blank sentences and equation fragments (over 40% non-alphanumeric
    characters). Newlines collapse to single spaces.
    """
    flat = " ".join(sentence.split())
    if not flat:
        return None
    non_alnum = sum(1 for ch in flat if not ch.isalnum())
    if non_alnum / len(flat) > _MAX_NON_ALNUM_FRACTION:
        return None
    return flat


def _clean_sentences(raw_sentences: Sequence[str], where: str) -> list[str]:
    cleaned: list[str] = []
    for s in raw_sentences:
        if not isinstance(s, str):
            raise SchemaError(f"{where}: sentences must be strings")
        flat = clean_sentence(s)
        if flat is None:
            continue
        if cleaned and cleaned[-1] == flat:  # consecutive duplicate line
            continue
        cleaned.append(flat)
    return cleaned


def ingest_paper(raw) -> PaperDoc:
    """Parse and validate paper-JSON (bytes, str or an already-parsed dict).

    Applies sentence cleaning: duplicate consecutive lines are dropped, as
    are equation-like fragments. Raises SchemaError on malformed input and
    EmptyDocument when no sentence survives cleaning.
    """
    data = _as_dict(raw)
    paper_id = _require(data, "paper_id", str, "paper")
    if not paper_id:
        raise SchemaError("paper: paper_id must be non-empty")
    title = _require(data, "title", str, "paper")
    raw_sections = _require(data, "sections", list, "paper")

    sections: list[Section] = []
    for i, sec in enumerate(raw_sections):
        if not isinstance(sec, dict):
            raise SchemaError(f"paper.sections[{i}]: must be an object")
        where = f"paper.sections[{i}]"
        label = _require(sec, "label", str, where)
        if label and not _LABEL_RE.match(label):
            raise SchemaError(f"{where}: label '{label}' is not dotted-numeric")
        header = _require(sec, "header", str, where)
        sentences = _clean_sentences(_require(sec, "sentences", list, where), where)
        sections.append(Section(label, header, tuple(sentences)))

    figures: list[FigureAsset] = []
    seen_ids: set[str] = set()
    for i, fig in enumerate(data.get("figures", [])):
        if not isinstance(fig, dict):
            raise SchemaError(f"paper.figures[{i}]: must be an object")
        where = f"paper.figures[{i}]"
        fig_id = _require(fig, "id", str, where)
        kind = _require(fig, "kind", str, where)
        if kind not in ("figure", "table"):
            raise SchemaError(f"{where}: kind must be 'figure' or 'table'")
        caption = _require(fig, "caption", str, where)
        if not caption:
            raise SchemaError(f"{where}: caption must be non-empty")
        if fig_id in seen_ids:
            raise SchemaError(f"{where}: duplicate figure id '{fig_id}'")
        seen_ids.add(fig_id)
        figures.append(FigureAsset(fig_id, kind, caption, _require(fig, "uri", str, where)))

    doc = PaperDoc(paper_id, title, tuple(sections), tuple(figures))
    if not doc.all_sentences():
        raise EmptyDocument(f"paper '{paper_id}' has no sentences after cleaning")
    return doc


def ingest_deck(raw) -> list[SlideRecord]:
    """Parse and validate deck-JSON into SlideRecords, in file order.

    Slide titles may repeat across slides; slide indexes may not. Lines are
    flattened to single-line strings but otherwise kept verbatim.
    """
    data = _as_dict(raw)
    deck_id = _require(data, "deck_id", str, "deck")
    if not deck_id:
        raise SchemaError("deck: deck_id must be non-empty")
    raw_slides = _require(data, "slides", list, "deck")

    slides: list[SlideRecord] = []
    seen_index: set[int] = set()
    for i, slide in enumerate(raw_slides):
        if not isinstance(slide, dict):
            raise SchemaError(f"deck.slides[{i}]: must be an object")
        where = f"deck.slides[{i}]"
        index = _require(slide, "index", int, where)
        if isinstance(index, bool) or index < 0:
            raise SchemaError(f"{where}: index must be an integer >= 0")
        if index in seen_index:
            raise SchemaError(f"{where}: duplicate slide index {index}")
        seen_index.add(index)
        title = _require(slide, "title", str, where)
        lines = []
        for line in _require(slide, "lines", list, where):
            if not isinstance(line, str):
                raise SchemaError(f"{where}: lines must be strings")
            flat = " ".join(line.split())
            if flat:
                lines.append(flat)
        figures = slide.get("figures", [])
        if not isinstance(figures, list) or any(not isinstance(f, str) for f in figures):
            raise SchemaError(f"{where}: figures must be a list of figure ids")
        slides.append(SlideRecord(deck_id, index, title, tuple(lines), tuple(figures)))
    return slides


def serialize_paper(doc: PaperDoc) -> dict:
    return {
        "paper_id": doc.paper_id,
        "title": doc.title,
        "sections": [
            {"label": s.header_label, "header": s.header_text, "sentences": list(s.sentences)}
            for s in doc.sections
        ],
        "figures": [
            {"id": f.figure_id, "kind": f.kind, "caption": f.caption, "uri": f.uri}
            for f in doc.figures
        ],
    }


def serialize_deck(slides: Sequence[SlideRecord]) -> dict:
    if not slides:
        raise EmptyCorpus("cannot serialize an empty deck")
    return {
        "deck_id": slides[0].deck_id,
        "slides": [
            {
                "index": s.slide_index,
                "title": s.title,
                "lines": list(s.content_lines),
                "figures": list(s.linked_figures),
            }
            for s in slides
        ],
    }


@dataclass(frozen=True)
class DeckStats:
    avg_title_len: float
    avg_content_len: float
    n_slides: int


def deck_stats(slides: Sequence[SlideRecord], tokenizer: Callable[[str], list[str]] = tokenize) -> DeckStats:
    """Mean token counts per slide title and per slide content."""
    if not slides:
        raise EmptyCorpus("deck_stats needs at least one slide")
    title_lens = [len(tokenizer(s.title)) for s in slides]
    content_lens = [len(tokenizer(s.content_text())) for s in slides]
    n = len(slides)
    return DeckStats(sum(title_lens) / n, sum(content_lens) / n, n)
