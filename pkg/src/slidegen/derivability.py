"""Derivability classification of slide lines over ROUGE features.

A slide line is "derivable" when it can plausibly be produced from the
paired paper. The feature vector is the nine ROUGE-1/2/L precision,
recall and F values of the line, each taken as the max over the paper's
sentences. A small from-scratch random forest (axis-aligned splits, Gini
impurity, bootstrap per tree) votes on the label; ties go to "derivable"
so the filter never discards data on a coin flip.

Evaluation corpora must never be filtered; filtering is a training-data
concern only.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import binio
from .docmodel import PaperDoc, SlideRecord
from .errors import (
    DegenerateLabels,
    EmptyLine,
    EmptyTraining,
    MisalignedCorpora,
    SchemaError,
    UnfittedModel,
)
from .textkit import rouge, split_sentences, tokenize

DERIVABLE = "derivable"
UNDERIVABLE = "underivable"

N_FEATURES = 9

_MAGIC = b"D2SF"
_VERSION = 1


def featurize(line: str, paper_sentences: Sequence[str] | str) -> np.ndarray:
    """Nine ROUGE features of a slide line against a paper.

    Each component is the max over paper sentences, so a line copied
    verbatim from anywhere in the paper scores 1.0 recall across the
    board. Accepts pre-split sentences or raw paper text.
    """
    if not line.strip():
        raise EmptyLine("cannot featurize a blank line")
    if isinstance(paper_sentences, str):
        paper_sentences = split_sentences(paper_sentences)
    line_tokens = tokenize(line)
    best = np.zeros(N_FEATURES)
    for sentence in paper_sentences:
        vec = rouge(line_tokens, tokenize(sentence)).as_vector()
        np.maximum(best, vec, out=best)
    return best


@dataclass
class _Node:
    feature: int = -1
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    vote: int = -1  # leaf label (1 derivable, 0 underivable) or -1 internal

    @property
    def is_leaf(self) -> bool:
        return self.vote >= 0


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int | None = None  # unlimited
    features_per_split: int = 3  # floor(sqrt(9))
    min_samples_split: int = 2
    seed: int = 0


@dataclass
class RandomForest:
    config: ForestConfig
    trees: list[list[_Node]] = field(default_factory=list)
    oob_accuracy: float | None = None

    @property
    def fitted(self) -> bool:
        return bool(self.trees)


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return 1.0 - float((p * p).sum())


def _majority(labels: np.ndarray) -> int:
    ones = int(labels.sum())
    return 1 if 2 * ones >= len(labels) else 0


def _grow_tree(
    x: np.ndarray,
    y: np.ndarray,
    config: ForestConfig,
    rng: np.random.Generator,
) -> list[_Node]:
    nodes: list[_Node] = []

    def grow(indices: np.ndarray, depth: int) -> int:
        labels = y[indices]
        node_id = len(nodes)
        nodes.append(_Node())
        pure = labels.min() == labels.max()
        depth_capped = config.max_depth is not None and depth >= config.max_depth
        if pure or depth_capped or len(indices) < config.min_samples_split:
            nodes[node_id].vote = _majority(labels)
            return node_id

        features = rng.choice(x.shape[1], size=min(config.features_per_split, x.shape[1]), replace=False)
        parent_impurity = _gini(np.bincount(labels, minlength=2))
        best = None  # (gini, feature, threshold)
        for f in features:
            values = np.unique(x[indices, f])
            if len(values) < 2:
                continue
            for threshold in (values[:-1] + values[1:]) / 2.0:
                mask = x[indices, f] <= threshold
                left, right = labels[mask], labels[~mask]
                g = (
                    len(left) * _gini(np.bincount(left, minlength=2))
                    + len(right) * _gini(np.bincount(right, minlength=2))
                ) / len(indices)
                if best is None or g < best[0]:
                    best = (g, int(f), float(threshold))
        if best is None or best[0] >= parent_impurity:
            nodes[node_id].vote = _majority(labels)
            return node_id

        _, feature, threshold = best
        mask = x[indices, feature] <= threshold
        nodes[node_id].feature = feature
        nodes[node_id].threshold = threshold
        nodes[node_id].left = grow(indices[mask], depth + 1)
        nodes[node_id].right = grow(indices[~mask], depth + 1)
        return node_id

    grow(np.arange(len(y)), 0)
    return nodes


def _tree_predict(nodes: list[_Node], x: np.ndarray) -> int:
    node = nodes[0]
    while not node.is_leaf:
        node = nodes[node.left] if x[node.feature] <= node.threshold else nodes[node.right]
    return node.vote


def _label_to_int(label) -> int:
    if label in (1, "1", DERIVABLE, True):
        return 1
    if label in (0, "0", UNDERIVABLE, False):
        return 0
    raise SchemaError(f"unknown label {label!r}")


def fit(samples: Sequence[tuple[Sequence[float], object]], config: ForestConfig = ForestConfig()) -> RandomForest:
    """Fit the forest on (feature_vector, label) samples.

    Each tree sees a bootstrap resample and considers ``features_per_split``
    random features per node. Deterministic for a fixed seed; out-of-bag
    accuracy is estimated along the way.
    """
    if len(samples) < 2:
        raise EmptyTraining(f"need at least 2 samples, got {len(samples)}")
    x = np.array([np.asarray(s[0], dtype=np.float64) for s in samples])
    y = np.array([_label_to_int(s[1]) for s in samples])
    if y.min() == y.max():
        raise DegenerateLabels("training data contains a single class")

    seeds = np.random.SeedSequence(config.seed).spawn(config.n_trees)
    forest = RandomForest(config=config)
    n = len(y)
    oob_votes = np.zeros((n, 2))
    for tree_seed in seeds:
        rng = np.random.default_rng(tree_seed)
        boot = rng.integers(0, n, size=n)
        nodes = _grow_tree(x[boot], y[boot], config, rng)
        forest.trees.append(nodes)
        out_of_bag = np.setdiff1d(np.arange(n), boot)
        for i in out_of_bag:
            oob_votes[i, _tree_predict(nodes, x[i])] += 1

    covered = oob_votes.sum(axis=1) > 0
    if covered.any():
        # tie votes resolve to derivable (class 1), matching predict()
        oob_pred = np.where(oob_votes[covered, 1] >= oob_votes[covered, 0], 1, 0)
        forest.oob_accuracy = float((oob_pred == y[covered]).mean())
    return forest


def predict(forest: RandomForest, x: Sequence[float]) -> str:
    """Majority vote over the trees; ties resolve to derivable."""
    if not forest.fitted:
        raise UnfittedModel("forest has not been fitted")
    arr = np.asarray(x, dtype=np.float64)
    ones = sum(_tree_predict(nodes, arr) for nodes in forest.trees)
    return DERIVABLE if 2 * ones >= len(forest.trees) else UNDERIVABLE


@dataclass(frozen=True)
class FilterReport:
    lines_seen: int
    lines_removed: int
    slides_seen: int
    slides_dropped: int
    decks_seen: int

    def to_dict(self) -> dict:
        return {
            "lines_seen": self.lines_seen,
            "lines_removed": self.lines_removed,
            "slides_seen": self.slides_seen,
            "slides_dropped": self.slides_dropped,
            "decks_seen": self.decks_seen,
        }


def filter_corpus(
    decks: Sequence[Sequence[SlideRecord]],
    papers: Sequence[PaperDoc],
    forest: RandomForest,
) -> tuple[list[list[SlideRecord]], FilterReport]:
    """Drop slide lines predicted underivable from their paired paper.

    Decks pair with papers by id. Slides stripped of every line are
    dropped. Filtering is idempotent: surviving lines keep their features,
    so a second pass removes nothing.
    """
    papers_by_id = {p.paper_id: p for p in papers}
    if len(papers_by_id) != len(papers):
        raise MisalignedCorpora("duplicate paper ids in the corpus")
    lines_seen = lines_removed = slides_seen = slides_dropped = 0
    filtered_decks: list[list[SlideRecord]] = []
    for deck in decks:
        filtered: list[SlideRecord] = []
        for slide in deck:
            paper = papers_by_id.get(slide.deck_id)
            if paper is None:
                raise MisalignedCorpora(f"deck '{slide.deck_id}' has no paired paper")
            sentences = paper.all_sentences()
            slides_seen += 1
            kept = []
            for line in slide.content_lines:
                lines_seen += 1
                if predict(forest, featurize(line, sentences)) == DERIVABLE:
                    kept.append(line)
                else:
                    lines_removed += 1
            if kept:
                filtered.append(
                    SlideRecord(
                        deck_id=slide.deck_id,
                        slide_index=slide.slide_index,
                        title=slide.title,
                        content_lines=tuple(kept),
                        linked_figures=slide.linked_figures,
                    )
                )
            else:
                slides_dropped += 1
        filtered_decks.append(filtered)
    report = FilterReport(lines_seen, lines_removed, slides_seen, slides_dropped, len(decks))
    return filtered_decks, report


@dataclass(frozen=True)
class Annotation:
    deck_id: str
    slide_index: int
    line_index: int
    label: int  # 1 derivable, 0 underivable


def load_annotations(path) -> list[Annotation]:
    """Read the gold annotation CSV: deck_id,slide_index,line_index,label."""
    annotations = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for row_num, row in enumerate(reader, start=1):
            if not row or row[0] == "deck_id":  # optional header
                continue
            if len(row) != 4:
                raise SchemaError(f"annotation row {row_num}: expected 4 columns")
            try:
                annotations.append(
                    Annotation(row[0], int(row[1]), int(row[2]), _label_to_int(row[3].strip()))
                )
            except ValueError as exc:
                raise SchemaError(f"annotation row {row_num}: {exc}") from exc
    return annotations


def annotation_samples(
    annotations: Sequence[Annotation],
    decks: Sequence[Sequence[SlideRecord]],
    papers: Sequence[PaperDoc],
) -> list[tuple[np.ndarray, int]]:
    """Featurize annotated lines into (vector, label) training samples."""
    slides = {(s.deck_id, s.slide_index): s for deck in decks for s in deck}
    papers_by_id = {p.paper_id: p for p in papers}
    sentence_cache: dict[str, list[str]] = {}
    samples = []
    for ann in annotations:
        slide = slides.get((ann.deck_id, ann.slide_index))
        if slide is None:
            raise MisalignedCorpora(f"annotation points at unknown slide {ann.deck_id}#{ann.slide_index}")
        if not 0 <= ann.line_index < len(slide.content_lines):
            raise SchemaError(f"annotation line {ann.line_index} out of range for {ann.deck_id}#{ann.slide_index}")
        paper = papers_by_id.get(ann.deck_id)
        if paper is None:
            raise MisalignedCorpora(f"deck '{ann.deck_id}' has no paired paper")
        if ann.deck_id not in sentence_cache:
            sentence_cache[ann.deck_id] = paper.all_sentences()
        samples.append(
            (featurize(slide.content_lines[ann.line_index], sentence_cache[ann.deck_id]), ann.label)
        )
    return samples


def save_forest(forest: RandomForest, path) -> None:
    if not forest.fitted:
        raise UnfittedModel("cannot save an unfitted forest")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        binio.write_u16(fh, _VERSION)
        binio.write_u32(fh, forest.config.n_trees)
        binio.write_i32(fh, -1 if forest.config.max_depth is None else forest.config.max_depth)
        binio.write_u32(fh, forest.config.features_per_split)
        binio.write_u32(fh, forest.config.min_samples_split)
        binio.write_u64(fh, forest.config.seed)
        binio.write_f64(fh, math.nan if forest.oob_accuracy is None else forest.oob_accuracy)
        for nodes in forest.trees:
            binio.write_u32(fh, len(nodes))
            for node in nodes:
                binio.write_i32(fh, node.feature)
                binio.write_f64(fh, node.threshold)
                binio.write_i32(fh, node.left)
                binio.write_i32(fh, node.right)
                binio.write_i32(fh, node.vote)


def load_forest(path) -> RandomForest:
    with open(path, "rb") as fh:
        binio.expect_magic(fh, _MAGIC, _VERSION)
        n_trees = binio.read_u32(fh)
        max_depth = binio.read_i32(fh)
        config = ForestConfig(
            n_trees=n_trees,
            max_depth=None if max_depth < 0 else max_depth,
            features_per_split=binio.read_u32(fh),
            min_samples_split=binio.read_u32(fh),
            seed=binio.read_u64(fh),
        )
        oob = binio.read_f64(fh)
        forest = RandomForest(config=config, oob_accuracy=None if math.isnan(oob) else oob)
        for _ in range(n_trees):
            count = binio.read_u32(fh)
            nodes = []
            for _ in range(count):
                nodes.append(
                    _Node(
                        feature=binio.read_i32(fh),
                        threshold=binio.read_f64(fh),
                        left=binio.read_i32(fh),
                        right=binio.read_i32(fh),
                        vote=binio.read_i32(fh),
                    )
                )
            forest.trees.append(nodes)
    return forest
