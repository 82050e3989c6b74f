"""Parent-child hierarchy of section headers and title-to-keyword expansion.

Numbered headers nest by their dotted labels ("2.1" under "2"); a header
whose ancestors are all missing attaches to the synthetic root, as do
unnumbered headers ("Abstract"). Snippets take the header text of their
enclosing section as keyword, falling back to the paper title when the
section carries no header text.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .docmodel import PaperDoc
from .errors import SpanOutOfRange
from .textkit import levenshtein_ratio


@dataclass
class HeaderNode:
    label: str
    text: str
    section_index: int  # -1 for the synthetic root
    depth: int = 0
    children: list["HeaderNode"] = field(default_factory=list)


@dataclass
class HeaderTree:
    root: HeaderNode
    nodes: list[HeaderNode]  # document order, root excluded
    doc_title: str
    section_headers: list[tuple[str, str]]  # (label, text) per section
    section_lengths: list[int]  # sentence count per section


def build_tree(doc: PaperDoc) -> HeaderTree:
    """Build the header tree of a validated paper.

    Every section becomes one node. A numbered node hangs off its nearest
    existing ancestor by label prefix; numbered headers with no present
    ancestor and all unnumbered headers become children of the synthetic
    root, in document order.
    """
    root = HeaderNode(label="", text=doc.title, section_index=-1, depth=0)
    nodes: list[HeaderNode] = []
    by_label: dict[str, HeaderNode] = {}

    for idx, sec in enumerate(doc.sections):
        node = HeaderNode(label=sec.header_label, text=sec.header_text, section_index=idx)
        parent = root
        if sec.header_label:
            parts = sec.header_label.split(".")
            for cut in range(len(parts) - 1, 0, -1):
                ancestor = by_label.get(".".join(parts[:cut]))
                if ancestor is not None:
                    parent = ancestor
                    break
        node.depth = parent.depth + 1
        parent.children.append(node)
        nodes.append(node)
        if sec.header_label and sec.header_label not in by_label:
            by_label[sec.header_label] = node

    return HeaderTree(
        root=root,
        nodes=nodes,
        doc_title=doc.title,
        section_headers=[(s.header_label, s.header_text) for s in doc.sections],
        section_lengths=[len(s.sentences) for s in doc.sections],
    )


def descendants(node: HeaderNode) -> list[HeaderNode]:
    """All recursive children of ``node``, in document order."""
    found: list[HeaderNode] = []
    stack = list(node.children)
    while stack:
        n = stack.pop()
        found.append(n)
        stack.extend(n.children)
    found.sort(key=lambda n: n.section_index)
    return found


def snippet_keyword(tree: HeaderTree, section_index: int, start: int, end: int) -> str:
    """Keyword for a snippet spanning sentences [start, end) of a section.

    The deepest header enclosing the span is the section's own; its text is
    the keyword. Sections without header text (untitled front matter) fall
    back to the paper title.
    """
    if not 0 <= section_index < len(tree.section_lengths):
        raise SpanOutOfRange(f"section {section_index} out of range")
    n = tree.section_lengths[section_index]
    if not (0 <= start < end <= n):
        raise SpanOutOfRange(
            f"span [{start}, {end}) outside section {section_index} of {n} sentences"
        )
    text = tree.section_headers[section_index][1]
    return text if text else tree.doc_title


@dataclass(frozen=True)
class KeywordSet:
    """A matched header and its recursive expansion, or empty when unmatched."""

    matched_header: HeaderNode | None
    keywords: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.matched_header is not None


EMPTY_KEYWORDS = KeywordSet(matched_header=None, keywords=())


def match_title(tree: HeaderTree, title: str, threshold: float = 0.9) -> KeywordSet:
    """Expand a slide title into keywords via fuzzy header matching.

    The best header with edit ratio >= threshold wins; ties break toward
    the shallower node, then document order. The keyword list is the
    matched header's text followed by all recursive descendants' texts in
    document order. Generic titles that match nothing yield an empty set.
    """
    best: HeaderNode | None = None
    best_key: tuple[float, int, int] | None = None
    for node in tree.nodes:
        if not node.text:
            continue
        ratio = levenshtein_ratio(title, node.text)
        if ratio < threshold:
            continue
        key = (-ratio, node.depth, node.section_index)
        if best_key is None or key < best_key:
            best, best_key = node, key
    if best is None:
        return EMPTY_KEYWORDS
    texts = [best.text] + [n.text for n in descendants(best) if n.text]
    return KeywordSet(matched_header=best, keywords=tuple(texts))


def tree_to_dict(tree: HeaderTree) -> dict:
    """Nested {label, text, children} form for the outline view."""

    def render(node: HeaderNode) -> dict:
        return {
            "label": node.label,
            "text": node.text,
            "children": [render(c) for c in node.children],
        }

    return render(tree.root)
