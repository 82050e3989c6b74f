import random

import numpy as np
import pytest

from slidegen.derivability import (
    DERIVABLE,
    UNDERIVABLE,
    Annotation,
    ForestConfig,
    annotation_samples,
    featurize,
    filter_corpus,
    fit,
    load_annotations,
    load_forest,
    predict,
    save_forest,
)
from slidegen.errors import (
    DegenerateLabels,
    EmptyLine,
    EmptyTraining,
    UnfittedModel,
)
from slidegen.textkit import tokenize

from oracles import rouge_by_counting


def blobs(n=200, margin=0.3, seed=0):
    """Separable 9-dim classes: class 1 above the margin band, class 0 below."""
    rng = np.random.default_rng(seed)
    low = (1 - margin) / 2
    samples = []
    for i in range(n):
        label = i % 2
        if label == 1:
            x = rng.uniform(low + margin, 1.0, size=9)
        else:
            x = rng.uniform(0.0, low, size=9)
        samples.append((x, label))
    return samples


# --- featurize ---

def test_verbatim_line_has_unit_recall():
    sentences = ["The model halves errors on every basin.", "Noise stays low."]
    vec = featurize("The model halves errors on every basin.", sentences)
    # order: r1_p r1_r r1_f r2_p r2_r r2_f rl_p rl_r rl_f
    assert vec[1] == vec[4] == vec[7] == 1.0


def test_disjoint_line_is_all_zero():
    vec = featurize("qq ww rr", ["aa bb cc.", "dd ee ff."])
    assert np.all(vec == 0.0)


def test_empty_line_rejected():
    with pytest.raises(EmptyLine):
        featurize("   ", ["a sentence."])


def test_fixture_line_matches_per_sentence_max_oracle(paper, deck):
    line = deck[1].content_lines[0]
    sentences = paper.all_sentences()
    expected = np.max(
        [rouge_by_counting(tokenize(line), tokenize(s)) for s in sentences], axis=0
    )
    assert featurize(line, sentences) == pytest.approx(expected)


def test_featurize_accepts_raw_text():
    vec = featurize("words overlap here.", "words overlap here. unrelated text follows.")
    assert vec[1] == 1.0


# --- fit / predict ---

def test_separable_one_feature_training_accuracy():
    samples = [([0.1] * 9, 0), ([0.2] * 9, 0), ([0.8] * 9, 1), ([0.9] * 9, 1)]
    forest = fit(samples, ForestConfig(n_trees=25, seed=1))
    for x, label in samples:
        assert predict(forest, x) == (DERIVABLE if label else UNDERIVABLE)


def test_identical_features_predict_majority():
    samples = [([0.5] * 9, 1)] * 3 + [([0.5] * 9, 0)] * 2
    forest = fit(samples, ForestConfig(n_trees=15, seed=2))
    assert predict(forest, [0.5] * 9) == DERIVABLE


def test_tie_vote_goes_to_derivable():
    samples = [([0.5] * 9, 1), ([0.5] * 9, 0)]
    forest = fit(samples, ForestConfig(n_trees=10, seed=3))
    assert predict(forest, [0.5] * 9) == DERIVABLE


def test_blobs_holdout_accuracy():
    samples = blobs(200, margin=0.3, seed=4)
    train, test = samples[:100], samples[100:]
    forest = fit(train, ForestConfig(n_trees=100, seed=4))
    hits = sum(
        predict(forest, x) == (DERIVABLE if y else UNDERIVABLE) for x, y in test
    )
    assert hits / len(test) >= 0.95
    assert forest.oob_accuracy is not None and forest.oob_accuracy >= 0.9


def test_fit_deterministic_and_tree_order_irrelevant():
    samples = blobs(60, seed=5)
    probes = [x for x, _ in blobs(30, seed=6)]
    f1 = fit(samples, ForestConfig(n_trees=30, seed=7))
    f2 = fit(samples, ForestConfig(n_trees=30, seed=7))
    preds1 = [predict(f1, p) for p in probes]
    preds2 = [predict(f2, p) for p in probes]
    assert preds1 == preds2

    shuffled = list(f1.trees)
    random.Random(0).shuffle(shuffled)
    f1.trees = shuffled
    assert [predict(f1, p) for p in probes] == preds1


def test_degenerate_labels():
    with pytest.raises(DegenerateLabels):
        fit([([0.1] * 9, 1), ([0.2] * 9, 1)])


def test_empty_training():
    with pytest.raises(EmptyTraining):
        fit([([0.1] * 9, 1)])


def test_unfitted_predict():
    from slidegen.derivability import RandomForest

    with pytest.raises(UnfittedModel):
        predict(RandomForest(config=ForestConfig()), [0.0] * 9)


def test_forest_round_trip(tmp_path):
    samples = blobs(80, seed=8)
    forest = fit(samples, ForestConfig(n_trees=20, seed=8))
    path = tmp_path / "forest.bin"
    save_forest(forest, path)
    loaded = load_forest(path)
    assert path.read_bytes()[:4] == b"D2SF"
    assert loaded.config == forest.config
    assert loaded.oob_accuracy == forest.oob_accuracy
    probes = [x for x, _ in blobs(40, seed=9)]
    assert [predict(loaded, p) for p in probes] == [predict(forest, p) for p in probes]


def test_golden_forest_predictions():
    # frozen at fit time: ForestConfig(n_trees=40, seed=11) on blobs(100, seed=10)
    forest = fit(blobs(100, seed=10), ForestConfig(n_trees=40, seed=11))
    probes = [x for x, _ in blobs(20, seed=12)]
    got = "".join("1" if predict(forest, p) == DERIVABLE else "0" for p in probes)
    assert got == "01010101010101010101"


# --- filter_corpus ---

def fixture_annotations(deck):
    annotations = []
    for slide in deck:
        for line_index in range(len(slide.content_lines)):
            novel = slide.slide_index == 7 and line_index in (1, 2)
            annotations.append(
                Annotation(slide.deck_id, slide.slide_index, line_index, 0 if novel else 1)
            )
    return annotations


def test_filter_fixture_corpus(paper, deck):
    annotations = fixture_annotations(deck)
    samples = annotation_samples(annotations, [deck], [paper])
    forest = fit(samples, ForestConfig(n_trees=60, seed=21))
    filtered, report = filter_corpus([deck], [paper], forest)

    assert report.lines_seen == sum(len(s.content_lines) for s in deck)
    assert report.lines_removed == 2
    assert report.slides_dropped == 0
    future = next(s for s in filtered[0] if s.title == "Future Directions")
    assert len(future.content_lines) == 1

    # idempotence
    refiltered, report2 = filter_corpus(filtered, [paper], forest)
    assert refiltered == filtered
    assert report2.lines_removed == 0


def test_filter_all_derivable_is_identity(paper, deck):
    # a forest that always says derivable: single leaf voting 1
    from slidegen.derivability import _Node, RandomForest

    forest = RandomForest(config=ForestConfig(n_trees=1, seed=0))
    forest.trees = [[_Node(vote=1)]]
    filtered, report = filter_corpus([deck], [paper], forest)
    assert filtered == [list(deck)]
    assert report.lines_removed == 0 and report.slides_dropped == 0


def test_filter_all_underivable_empties_decks(paper, deck):
    # a forest that never says derivable: single leaf voting 0
    from slidegen.derivability import _Node, RandomForest

    forest = RandomForest(config=ForestConfig(n_trees=1, seed=0))
    forest.trees = [[_Node(vote=0)]]
    filtered, report = filter_corpus([deck], [paper], forest)
    assert filtered == [[]]
    assert report.lines_removed == report.lines_seen
    assert report.slides_dropped == len(deck)


# --- annotations ---

def test_annotation_csv_round_trip(tmp_path, deck):
    path = tmp_path / "gold.csv"
    path.write_text(
        "deck_id,slide_index,line_index,label\n"
        "gauge-forecast-demo,7,1,0\n"
        "gauge-forecast-demo,0,0,1\n",
        encoding="utf-8",
    )
    annotations = load_annotations(path)
    assert annotations == [
        Annotation("gauge-forecast-demo", 7, 1, 0),
        Annotation("gauge-forecast-demo", 0, 0, 1),
    ]


def test_annotation_samples_featurize(paper, deck):
    annotations = [Annotation("gauge-forecast-demo", 0, 0, 1)]
    samples = annotation_samples(annotations, [deck], [paper])
    assert len(samples) == 1
    vec, label = samples[0]
    assert label == 1
    assert vec[1] == 1.0  # verbatim line
