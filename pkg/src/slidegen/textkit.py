"""Tokenization, n-gram machinery, string similarity, and evaluation metrics.

Everything here is a pure function over plain values, so calls are safe to
issue concurrently. Tokenization is deterministic: identical input text
always yields the identical token sequence.

Metric conventions (fixed, no flags):
  * ROUGE-1/2 count clipped n-gram overlap; ROUGE-L uses the longest common
    subsequence. No stemming, no stopword removal.
  * IDF uses the smoothed form ln((N + 1) / (df + 1)) + 1; tokens unseen in
    the corpus get ln(N + 1) + 1.
  * The edit-distance ratio uses insert = delete = 1, substitute = 2, and
    compares case-insensitively.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    EmptyCorpus,
    EmptyReference,
    InvalidK,
    InvalidN,
    NoNgrams,
)

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+")


def tokenize(text: str) -> list[str]:
    """Lowercase ``text`` and split at whitespace and punctuation boundaries.

    Punctuation-only runs produce no tokens; an empty input yields an empty
    list. "A B, c." -> ["a", "b", "c"].
    """
    return _TOKEN_RE.findall(text.lower())


def split_sentences(text: str) -> list[str]:
    """Split text into sentences at terminal punctuation followed by space.

    Deliberately simple and deterministic; good enough for cleaned prose
    where sentences end with ``.``, ``!`` or ``?``.
    """
    parts = _SENTENCE_SPLIT_RE.split(text.strip())
    return [p for p in (part.strip() for part in parts) if p]


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    """Multiset of all contiguous n-grams of ``tokens``.

    len(tokens) < n yields the empty multiset. Raises InvalidN for n < 1.
    """
    if n < 1:
        raise InvalidN(f"n-gram order must be >= 1, got {n}")
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


@dataclass(frozen=True)
class RougeScore:
    p: float
    r: float
    f: float


@dataclass(frozen=True)
class RougeReport:
    """ROUGE-1/2/L precision, recall and F1.

    Doubles as the 9-dimensional feature vector of the derivability filter;
    as_vector() fixes the component order used everywhere.
    """

    r1: RougeScore
    r2: RougeScore
    rl: RougeScore

    def as_vector(self) -> tuple[float, ...]:
        return (
            self.r1.p, self.r1.r, self.r1.f,
            self.r2.p, self.r2.r, self.r2.f,
            self.rl.p, self.rl.r, self.rl.f,
        )

    def to_dict(self) -> dict[str, float]:
        return dict(zip(ROUGE_FIELDS, self.as_vector()))


ROUGE_FIELDS = (
    "r1_p", "r1_r", "r1_f",
    "r2_p", "r2_r", "r2_f",
    "rl_p", "rl_r", "rl_f",
)


def _f_score(p: float, r: float) -> float:
    return 2.0 * p * r / (p + r) if p + r > 0 else 0.0


def _prf(overlap: int, n_candidate: int, n_reference: int) -> RougeScore:
    if n_candidate == 0 or n_reference == 0:
        return RougeScore(0.0, 0.0, 0.0)
    p = overlap / n_candidate
    r = overlap / n_reference
    return RougeScore(p, r, _f_score(p, r))


def _ngram_overlap(candidate: Sequence[str], reference: Sequence[str], n: int) -> RougeScore:
    cand = ngrams(candidate, n)
    ref = ngrams(reference, n)
    overlap = sum((cand & ref).values())
    return _prf(overlap, sum(cand.values()), sum(ref.values()))


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence, O(len(a) * len(b))."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            if x == y:
                curr[j] = prev[j - 1] + 1
            else:
                curr[j] = max(prev[j], curr[j - 1])
        prev = curr
    return prev[-1]


def rouge(candidate: Sequence[str], reference: Sequence[str]) -> RougeReport:
    """ROUGE-1/2/L of a candidate token sequence against a reference.

    An empty side zeroes the affected metric (a one-token sequence has no
    bigrams, so its ROUGE-2 is all zero).
    """
    r1 = _ngram_overlap(candidate, reference, 1)
    r2 = _ngram_overlap(candidate, reference, 2)
    rl = _prf(lcs_length(candidate, reference), len(candidate), len(reference))
    return RougeReport(r1=r1, r2=r2, rl=rl)


@dataclass(frozen=True)
class IdfTable:
    """Inverse document frequencies with a default for unseen tokens."""

    weights: dict[str, float]
    default: float
    n_documents: int

    def get(self, token: str) -> float:
        return self.weights.get(token, self.default)


def idf_table(corpus: Iterable[Sequence[str]]) -> IdfTable:
    """Smoothed IDF over a corpus of token sequences.

    idf(w) = ln((N + 1) / (df(w) + 1)) + 1 with N documents; unseen tokens
    get ln(N + 1) + 1. Raises EmptyCorpus for an empty corpus.
    """
    docs = list(corpus)
    if not docs:
        raise EmptyCorpus("idf table needs at least one document")
    n = len(docs)
    df: Counter = Counter()
    for doc in docs:
        df.update(set(doc))
    weights = {w: math.log((n + 1) / (c + 1)) + 1.0 for w, c in df.items()}
    return IdfTable(weights=weights, default=math.log(n + 1) + 1.0, n_documents=n)


def idf_recall(reference: Sequence[str], retrieved: Sequence[str], idf: IdfTable) -> float:
    """IDF-weighted recall of reference word types in the retrieved text.

    Works over word types, not occurrences, so adding retrieved text can
    never lower the score. Raises EmptyReference when the reference has no
    tokens.
    """
    ref_types = set(reference)
    if not ref_types:
        raise EmptyReference("reference has no tokens")
    got_types = set(retrieved)
    total = math.fsum(idf.get(w) for w in ref_types)
    hit = math.fsum(idf.get(w) for w in ref_types & got_types)
    return hit / total


def novel_ngram_ratio(target: Sequence[str], source: Sequence[str], n: int) -> float:
    """Fraction of target n-gram occurrences absent from the source.

    Raises NoNgrams when the target yields no n-grams at all.
    """
    target_grams = ngrams(target, n)
    total = sum(target_grams.values())
    if total == 0:
        raise NoNgrams(f"target of length {len(target)} has no {n}-grams")
    source_set = set(ngrams(source, n))
    novel = sum(c for g, c in target_grams.items() if g not in source_set)
    return novel / total


def levenshtein_ratio(a: str, b: str) -> float:
    """Similarity ratio in [0, 1] from the weighted edit distance.

    ratio = (|a| + |b| - D(a, b)) / (|a| + |b|) where D uses insert = 1,
    delete = 1, substitute = 2, computed on lowercased strings. Two empty
    strings are identical (ratio 1.0).
    """
    a = a.lower()
    b = b.lower()
    m, n = len(a), len(b)
    if m + n == 0:
        return 1.0
    prev = list(range(n + 1))
    for i in range(1, m + 1):
        curr = [i] + [0] * n
        ai = a[i - 1]
        for j in range(1, n + 1):
            sub = prev[j - 1] + (0 if ai == b[j - 1] else 2)
            curr[j] = min(prev[j] + 1, curr[j - 1] + 1, sub)
        prev = curr
    return (m + n - prev[n]) / (m + n)


def precision_at_k(ranked: Sequence, relevant: set, k: int) -> float:
    """|top-k intersect relevant| / k; short rankings still divide by k."""
    if k < 1:
        raise InvalidK(f"k must be >= 1, got {k}")
    return sum(1 for item in ranked[:k] if item in relevant) / k
