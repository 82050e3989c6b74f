import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from slidegen.docmodel import PaperDoc, Section
from slidegen.embedding import HashedTfidfEmbedder
from slidegen.errors import (
    AlphaOutOfRange,
    EmptySnippets,
    EmptyTitle,
    InvalidWindow,
)
from slidegen.headertree import build_tree
from slidegen.retrieval import (
    Snippet,
    SnippetIndex,
    build_index,
    candidates_to_dict,
    context_text,
    load_index,
    rank_candidates,
    retrieve,
    save_index,
    snippetize,
)


def make_doc(sentence_counts):
    sections = tuple(
        Section(
            str(i + 1),
            f"Header {i + 1}",
            tuple(f"Sentence {i} {j} speaks plainly." for j in range(count)),
        )
        for i, count in enumerate(sentence_counts)
    )
    return PaperDoc("doc", "A Paper", sections, ())


def random_index(rng, n=40, dim=16, alpha=0.5):
    text = rng.normal(size=(n, dim))
    kw = rng.normal(size=(n, dim))
    snippets = [
        Snippet(i, 0, (i, i + 1), (f"s{i}.",), f"s{i}.", "kw", text[i], kw[i])
        for i in range(n)
    ]
    return SnippetIndex(snippets=snippets, dim=dim, alpha=alpha, text_matrix=text, kw_matrix=kw)


def brute_force_ids(index, query, k):
    scored = []
    for snippet in index.snippets:
        t = float(np.dot(query, snippet.text_vec))
        w = float(np.dot(query, snippet.kw_vec))
        scored.append((index.alpha * t + (1 - index.alpha) * w, snippet.snippet_id))
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    return [sid for _, sid in scored[:k]]


# --- snippetize ---

def test_window_arithmetic_nine_sentences():
    snippets = snippetize(make_doc([9]), build_tree(make_doc([9])), window=4)
    assert [s.sentence_range for s in snippets] == [(0, 4), (4, 8), (8, 9)]


def test_empty_section_yields_no_snippets():
    doc = PaperDoc(
        "doc", "T",
        (Section("1", "A", ()), Section("2", "B", ("Only one sentence here.",))),
        (),
    )
    snippets = snippetize(doc, build_tree(doc))
    assert len(snippets) == 1
    assert snippets[0].section_index == 1


def test_snippets_never_cross_sections():
    doc = make_doc([3, 5])
    snippets = snippetize(doc, build_tree(doc), window=4)
    assert [(s.section_index, s.sentence_range) for s in snippets] == [
        (0, (0, 3)), (1, (0, 4)), (1, (4, 5)),
    ]


def test_invalid_window():
    doc = make_doc([3])
    with pytest.raises(InvalidWindow):
        snippetize(doc, build_tree(doc), window=0)


def test_fixture_snippet_count(paper, manifest):
    snippets = snippetize(paper, build_tree(paper), window=manifest["snippets"]["window"])
    assert len(snippets) == manifest["snippets"]["count"]


@given(st.lists(st.integers(0, 11), min_size=1, max_size=6), st.integers(1, 5))
def test_snippetize_partitions_sentences(counts, window):
    doc = make_doc(counts)
    snippets = snippetize(doc, build_tree(doc), window=window)
    spans = sum(s.sentence_range[1] - s.sentence_range[0] for s in snippets)
    assert spans == sum(counts)
    assert all(
        s.sentence_range[1] - s.sentence_range[0] <= window for s in snippets
    )
    assert all(s.text == " ".join(s.sentences) for s in snippets)
    assert [s.snippet_id for s in snippets] == list(range(len(snippets)))


def test_snippet_keyword_assignment(paper, manifest):
    snippets = snippetize(paper, build_tree(paper))
    by_section = {}
    for s in snippets:
        by_section.setdefault(s.section_index, s.keyword)
    for sample in manifest["keywords"]:
        assert by_section[sample["section_index"]] == sample["keyword"]


# --- build_index ---

def test_single_snippet_index(paper):
    doc = make_doc([2])
    snippets = snippetize(doc, build_tree(doc))
    emb = HashedTfidfEmbedder.fit([s.text for s in snippets], dim=32)
    index = build_index(snippets, emb)
    assert len(index) == 1
    assert abs(np.linalg.norm(index.text_matrix[0]) - 1) < 1e-9
    assert abs(np.linalg.norm(index.kw_matrix[0]) - 1) < 1e-9


def test_alpha_out_of_range():
    doc = make_doc([2])
    snippets = snippetize(doc, build_tree(doc))
    emb = HashedTfidfEmbedder.fit(["x"], dim=8)
    with pytest.raises(AlphaOutOfRange):
        build_index(snippets, emb, alpha=1.3)


def test_empty_snippets():
    with pytest.raises(EmptySnippets):
        build_index([], HashedTfidfEmbedder.fit(["x"], dim=8))


def test_fixture_index_size(paper, manifest):
    snippets = snippetize(paper, build_tree(paper))
    emb = HashedTfidfEmbedder.fit([s.text for s in snippets], dim=64)
    index = build_index(snippets, emb)
    assert len(index) == manifest["snippets"]["count"]


# --- retrieve ---

def test_single_snippet_is_rank_one():
    doc = make_doc([2])
    snippets = snippetize(doc, build_tree(doc))
    emb = HashedTfidfEmbedder.fit([s.text for s in snippets], dim=32)
    index = build_index(snippets, emb)
    result = retrieve(index, "anything goes", emb, k=5)
    assert [c.snippet_id for c in result] == [0]


def test_empty_title_rejected():
    doc = make_doc([2])
    snippets = snippetize(doc, build_tree(doc))
    emb = HashedTfidfEmbedder.fit([s.text for s in snippets], dim=32)
    index = build_index(snippets, emb)
    with pytest.raises(EmptyTitle):
        retrieve(index, "   ", emb)


def test_rank_matches_brute_force_on_random_corpora():
    rng = np.random.default_rng(77)
    for _ in range(20):
        index = random_index(rng, n=50, dim=12, alpha=float(rng.uniform(0, 1)))
        query = rng.normal(size=12)
        got = [c.snippet_id for c in rank_candidates(index, query, 10)]
        assert got == brute_force_ids(index, query, 10)


def test_alpha_endpoints_reduce_to_single_component():
    rng = np.random.default_rng(5)
    base = random_index(rng, n=30, dim=8, alpha=1.0)
    query = rng.normal(size=8)
    text_only = [c.snippet_id for c in rank_candidates(base, query, 30)]
    by_text = sorted(
        range(30),
        key=lambda i: (-float(np.dot(query, base.text_matrix[i])), i),
    )
    assert text_only == by_text

    base.alpha = 0.0
    kw_only = [c.snippet_id for c in rank_candidates(base, query, 30)]
    by_kw = sorted(
        range(30),
        key=lambda i: (-float(np.dot(query, base.kw_matrix[i])), i),
    )
    assert kw_only == by_kw


def test_score_decomposition_bit_exact():
    rng = np.random.default_rng(3)
    index = random_index(rng, n=25, dim=10, alpha=0.62)
    query = rng.normal(size=10)
    for c in rank_candidates(index, query, 25):
        assert c.score == index.alpha * c.text_score + (1 - index.alpha) * c.kw_score


def test_shared_argmax_wins_for_any_alpha():
    rng = np.random.default_rng(11)
    index = random_index(rng, n=20, dim=6)
    query = rng.normal(size=6)
    # force snippet 7 to dominate both components
    index.text_matrix[7] = query * 10
    index.kw_matrix[7] = query * 10
    for snippet, tv, kv in zip(index.snippets, index.text_matrix, index.kw_matrix):
        object.__setattr__(snippet, "text_vec", tv)
        object.__setattr__(snippet, "kw_vec", kv)
    for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
        index.alpha = alpha
        assert rank_candidates(index, query, 1)[0].snippet_id == 7


def test_k_larger_than_corpus():
    rng = np.random.default_rng(1)
    index = random_index(rng, n=5, dim=4)
    assert len(rank_candidates(index, rng.normal(size=4), 50)) == 5


def test_mismatched_query_dimension():
    from slidegen.errors import DimensionMismatch

    rng = np.random.default_rng(2)
    index = random_index(rng, n=5, dim=4)
    with pytest.raises(DimensionMismatch):
        rank_candidates(index, rng.normal(size=7), 3)


# --- context_text ---

def cand_index(texts_sentences, dim=8):
    snippets = []
    for i, sentences in enumerate(texts_sentences):
        snippets.append(
            Snippet(i, 0, (0, len(sentences)), tuple(sentences), " ".join(sentences), "kw")
        )
    zeros = np.zeros((len(snippets), dim))
    return SnippetIndex(snippets, dim, 0.5, zeros, zeros)


def test_context_concatenation():
    index = cand_index([["a b."], ["c d."]])
    cands = rank_candidates(index, np.zeros(8), 2)
    assert context_text(cands, index) == "a b. c d."


def test_context_truncates_at_sentence_boundary():
    index = cand_index([["one two three.", "four five six."], ["seven eight nine."]])
    cands = rank_candidates(index, np.zeros(8), 2)
    assert context_text(cands, index, max_tokens=7) == "one two three. four five six."
    assert context_text(cands, index, max_tokens=5) == "one two three."
    assert context_text(cands, index, max_tokens=2) == ""


def test_fixture_context_sentence_volume(paper):
    tree = build_tree(paper)
    snippets = snippetize(paper, tree)
    emb = HashedTfidfEmbedder.fit([s.text for s in snippets], dim=64)
    index = build_index(snippets, emb)
    cands = retrieve(index, "Results", emb, k=10)
    ctx = context_text(cands, index)
    n_sentences = sum(
        index.by_id(c.snippet_id).sentence_range[1]
        - index.by_id(c.snippet_id).sentence_range[0]
        for c in cands
    )
    assert ctx.count(".") == n_sentences  # roughly 40 sentences for 10 windows
    assert 30 <= n_sentences <= 40


# --- serialization ---

def test_index_round_trip(tmp_path, paper):
    tree = build_tree(paper)
    snippets = snippetize(paper, tree)
    emb = HashedTfidfEmbedder.fit([s.text for s in snippets], dim=32, seed=4)
    index = build_index(snippets, emb, alpha=0.6)
    path = tmp_path / "index.bin"
    save_index(index, path)
    loaded = load_index(path)
    assert path.read_bytes()[:4] == b"D2SI"
    assert loaded.alpha == index.alpha and loaded.dim == index.dim
    assert np.array_equal(loaded.text_matrix, index.text_matrix)
    assert np.array_equal(loaded.kw_matrix, index.kw_matrix)
    assert [s.text for s in loaded.snippets] == [s.text for s in index.snippets]
    assert [s.keyword for s in loaded.snippets] == [s.keyword for s in index.snippets]

    query = emb.embed("Seasonal Decomposition")
    left = [c.snippet_id for c in rank_candidates(index, query, 10)]
    right = [c.snippet_id for c in rank_candidates(loaded, query, 10)]
    assert left == right


def test_candidates_json_shape():
    index = cand_index([["a b."]])
    cands = rank_candidates(index, np.zeros(8), 1)
    payload = candidates_to_dict(cands, index)
    assert payload == {"candidates": [{"snippet_id": 0, "score": 0.0, "text": "a b."}]}
