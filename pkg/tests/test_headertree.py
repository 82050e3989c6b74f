import random

import pytest

from slidegen.docmodel import PaperDoc, Section
from slidegen.errors import SpanOutOfRange
from slidegen.headertree import (
    build_tree,
    descendants,
    match_title,
    snippet_keyword,
    tree_to_dict,
)

from oracles import reachable_labels


def make_doc(labels, title="Test Paper", texts=None):
    sections = []
    for i, label in enumerate(labels):
        text = texts[i] if texts else (f"Header {label}" if label else "")
        sections.append(Section(label, text, (f"Sentence number {i} stands here.",)))
    return PaperDoc("doc", title, tuple(sections), ())


def label_shape(node):
    return {"label": node["label"], "children": [label_shape(c) for c in node["children"]]}


def test_nesting_of_basic_fixture():
    tree = build_tree(make_doc(["1", "1.1", "1.1.1", "1.2", "2"]))
    one = next(n for n in tree.nodes if n.label == "1")
    assert [c.label for c in one.children] == ["1.1", "1.2"]
    assert sorted(d.label for d in descendants(one)) == ["1.1", "1.1.1", "1.2"]
    assert [c.label for c in tree.root.children] == ["1", "2"]


def test_no_numbered_headers_flat_tree():
    tree = build_tree(make_doc(["", "", ""], texts=["Abstract", "Notes", "Thanks"]))
    assert [c.text for c in tree.root.children] == ["Abstract", "Notes", "Thanks"]
    assert all(not c.children for c in tree.root.children)


def test_orphan_attaches_to_root():
    tree = build_tree(make_doc(["1", "3.2"]))
    assert [c.label for c in tree.root.children] == ["1", "3.2"]


def test_orphan_attaches_to_nearest_ancestor():
    tree = build_tree(make_doc(["1", "1.1.1"]))
    one = next(n for n in tree.nodes if n.label == "1")
    assert [c.label for c in one.children] == ["1.1.1"]


def test_fixture_tree_matches_manifest(paper, manifest):
    tree = build_tree(paper)
    assert label_shape(tree_to_dict(tree)) == label_shape(manifest["tree"])


def test_every_numbered_header_appears_once(paper):
    tree = build_tree(paper)
    got = sorted(n.label for n in tree.nodes if n.label)
    expected = sorted(s.header_label for s in paper.sections if s.header_label)
    assert got == expected


def test_snippet_keyword_deep_section():
    doc = make_doc(["2", "2.1", "2.1.3"])
    tree = build_tree(doc)
    assert snippet_keyword(tree, 2, 0, 1) == "Header 2.1.3"


def test_snippet_keyword_front_matter_falls_back_to_title(paper, manifest):
    tree = build_tree(paper)
    for sample in manifest["keywords"]:
        got = snippet_keyword(tree, sample["section_index"], 0, 1)
        assert got == sample["keyword"]


def test_snippet_keyword_span_checks():
    tree = build_tree(make_doc(["1"]))
    with pytest.raises(SpanOutOfRange):
        snippet_keyword(tree, 5, 0, 1)
    with pytest.raises(SpanOutOfRange):
        snippet_keyword(tree, 0, 0, 9)


def test_match_title_exact():
    tree = build_tree(make_doc(["1", "2"], texts=["Introduction", "Results"]))
    match = match_title(tree, "Results")
    assert match.matched_header is not None
    assert match.matched_header.text == "Results"
    assert match.keywords == ("Results",)


def test_match_title_case_insensitive():
    tree = build_tree(make_doc(["1"], texts=["Gauge Network Encoding"]))
    assert match_title(tree, "GAUGE NETWORK ENCODING").matched_header is not None


def test_match_title_generic_title_empty():
    tree = build_tree(make_doc(["1", "2"], texts=["Introduction", "Results"]))
    match = match_title(tree, "Take Home Message")
    assert match.matched_header is None
    assert match.keywords == ()
    assert not match


def test_match_title_near_match_threshold():
    tree = build_tree(make_doc(["1"], texts=["Experiments"]))
    # one deleted character: ratio (10 + 11 - 1) / 21 >= 0.9
    assert match_title(tree, "Experiment").matched_header is not None
    assert match_title(tree, "Exp").matched_header is None


def test_match_title_expands_recursive_children(paper):
    tree = build_tree(paper)
    match = match_title(tree, "Forecasting Framework")
    assert match.keywords == (
        "Forecasting Framework",
        "Gauge Network Encoding",
        "Seasonal Decomposition",
        "Trend Residual Modeling",
        "Calibration Procedure",
    )


def test_match_title_tie_prefers_shallower():
    doc = make_doc(["1", "1.1"], texts=["Overview", "Overview"])
    tree = build_tree(doc)
    match = match_title(tree, "Overview")
    assert match.matched_header.label == "1"


def random_label_doc(rng):
    labels = set()
    for _ in range(rng.randrange(1, 14)):
        depth = rng.randrange(1, 4)
        labels.add(".".join(str(rng.randrange(1, 4)) for _ in range(depth)))
    ordered = sorted(labels, key=lambda l: [int(p) for p in l.split(".")])
    return make_doc(ordered)


def test_descendants_match_reachability_oracle_on_random_trees():
    rng = random.Random(40)
    for _ in range(50):
        tree = build_tree(random_label_doc(rng))
        index_of = {id(n): i for i, n in enumerate(tree.nodes)}
        children_of = {
            str(index_of[id(n)]): [str(index_of[id(c)]) for c in n.children]
            for n in tree.nodes
        }
        for node in tree.nodes:
            expected = reachable_labels(children_of, str(index_of[id(node)]))
            got = {str(index_of[id(d)]) for d in descendants(node)}
            assert got == expected


def test_tree_to_dict_shape(paper):
    rendered = tree_to_dict(build_tree(paper))
    assert set(rendered) == {"label", "text", "children"}
    assert rendered["text"] == paper.title
