"""Dense text embeddings: a deterministic hashed TF-IDF embedder with a
trainable projection, plus a client for an external embedding service.

The in-repo embedder maps text to a d-dimensional unit vector:

    base[h(w)] += count(w) * idf(w)    for each token w
    output = normalize(projection @ base)

where h is a seeded stable hash into d buckets. The projection starts as
the identity and can be refined with a contrastive objective: the inner
products of a title embedding against one positive and k negative content
embeddings form softmax logits, and we descend the cross-entropy of the
positive class.

Setting the env var D2S_EMBED_URL switches callers to the remote service
(HTTP POST /embed, request {"texts": [...]}, response {"vectors": [[...]]}).
"""

from __future__ import annotations

import hashlib
import math
import os
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import requests

from . import binio
from .errors import (
    DegenerateConfig,
    DimensionMismatch,
    ServiceUnavailable,
    Timeout,
)
from .textkit import IdfTable, idf_table, tokenize

DEFAULT_DIM = 128
EMBED_URL_ENV = "D2S_EMBED_URL"

_MAGIC = b"D2SE"
_VERSION = 1


def _token_bucket(token: str, seed: int, dim: int) -> int:
    digest = hashlib.blake2b(
        token.encode("utf-8"), digest_size=8, key=seed.to_bytes(8, "little")
    ).digest()
    return int.from_bytes(digest, "little") % dim


class HashedTfidfEmbedder:
    """Deterministic stand-in for a neural sentence encoder.

    Identical text always embeds to the bit-identical vector for a fixed
    seed, corpus and projection. Instances are immutable in practice: embed
    never mutates state, so one embedder can serve concurrent callers.
    """

    def __init__(
        self,
        dim: int = DEFAULT_DIM,
        seed: int = 0,
        idf: IdfTable | None = None,
        projection: np.ndarray | None = None,
    ):
        self.dim = dim
        self.seed = seed
        self.idf = idf if idf is not None else IdfTable({}, 1.0, 0)
        if projection is None:
            projection = np.eye(dim)
        projection = np.asarray(projection, dtype=np.float64)
        if projection.shape != (dim, dim):
            raise DimensionMismatch(f"projection must be {dim}x{dim}, got {projection.shape}")
        if not np.all(np.isfinite(projection)):
            raise DegenerateConfig("projection contains non-finite values")
        self.projection = projection

    @classmethod
    def fit(cls, corpus_texts: Sequence[str], dim: int = DEFAULT_DIM, seed: int = 0) -> "HashedTfidfEmbedder":
        """Build an embedder whose IDF weights come from ``corpus_texts``."""
        table = idf_table([tokenize(t) for t in corpus_texts])
        return cls(dim=dim, seed=seed, idf=table)

    def base_vector(self, text: str) -> np.ndarray:
        """Un-projected hashed TF-IDF counts; zero vector for empty text."""
        base = np.zeros(self.dim)
        for token in tokenize(text):
            base[_token_bucket(token, self.seed, self.dim)] += self.idf.get(token)
        return base

    def embed(self, text: str) -> np.ndarray:
        """Unit-norm embedding of ``text``; empty text gives the zero vector."""
        v = self.projection @ self.base_vector(text)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            return np.zeros(self.dim)
        return v / norm

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [self.embed(t) for t in texts]

    def with_projection(self, projection: np.ndarray) -> "HashedTfidfEmbedder":
        return HashedTfidfEmbedder(dim=self.dim, seed=self.seed, idf=self.idf, projection=projection)


@dataclass(frozen=True)
class TrainingPair:
    title: str
    positive_content: str
    negatives: tuple[str, ...]

    def __post_init__(self):
        if not self.negatives:
            raise DegenerateConfig("a training pair needs at least one negative")


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.5
    epochs: int = 30
    k_negatives: int = 4
    seed: int = 0

    def validate(self) -> None:
        if self.lr <= 0:
            raise DegenerateConfig(f"lr must be > 0, got {self.lr}")
        if self.epochs < 1:
            raise DegenerateConfig(f"epochs must be >= 1, got {self.epochs}")
        if self.k_negatives < 1:
            raise DegenerateConfig(f"k_negatives must be >= 1, got {self.k_negatives}")


@dataclass
class TrainResult:
    embedder: HashedTfidfEmbedder
    loss_history: list[float] = field(default_factory=list)


def build_training_pairs(
    titles_and_contents: Sequence[tuple[str, str]],
    k_negatives: int = 4,
    seed: int = 0,
) -> list[TrainingPair]:
    """Sample negatives for each (title, content) pair from slides whose
    title differs, mirroring how the contrastive set is assembled from a
    deck corpus."""
    rng = np.random.default_rng(seed)
    pairs: list[TrainingPair] = []
    for i, (title, content) in enumerate(titles_and_contents):
        candidates = [
            c for j, (t, c) in enumerate(titles_and_contents)
            if j != i and t.strip().lower() != title.strip().lower()
        ]
        if not candidates:
            continue
        k = min(k_negatives, len(candidates))
        chosen = rng.choice(len(candidates), size=k, replace=False)
        pairs.append(TrainingPair(title, content, tuple(candidates[j] for j in chosen)))
    return pairs


def contrastive_loss_and_grad(
    projection: np.ndarray,
    title_base: np.ndarray,
    content_bases: np.ndarray,
) -> tuple[float, np.ndarray]:
    """Cross-entropy of the positive content under softmax-over-similarities.

    ``content_bases`` rows are the un-projected base vectors with the
    positive in row 0; similarities are cosine (embeddings are normalized
    after projection). Returns (loss, d loss / d projection).
    """
    eps = 1e-12
    u = projection @ title_base
    nu = np.linalg.norm(u)
    V = content_bases @ projection.T  # one row per content
    nv = np.linalg.norm(V, axis=1)

    u_hat = u / max(nu, eps)
    safe_nv = np.maximum(nv, eps)
    V_hat = V / safe_nv[:, None]
    scores = V_hat @ u_hat
    # zero-norm embeddings contribute nothing and get no gradient
    dead = (nv < eps) | (nu < eps)
    scores = np.where(dead, 0.0, scores)

    shifted = scores - scores.max()
    exp = np.exp(shifted)
    probs = exp / exp.sum()
    loss = -math.log(max(probs[0], eps))

    dscores = probs.copy()
    dscores[0] -= 1.0
    dscores = np.where(dead, 0.0, dscores)

    # d score_i / d u = (V_hat[i] - score_i * u_hat) / ||u||
    g_u = (dscores[:, None] * (V_hat - scores[:, None] * u_hat[None, :])).sum(axis=0)
    g_u = g_u / max(nu, eps) if nu >= eps else np.zeros_like(g_u)
    # d score_i / d V[i] = (u_hat - score_i * V_hat[i]) / ||V[i]||
    g_V = dscores[:, None] * (u_hat[None, :] - scores[:, None] * V_hat) / safe_nv[:, None]
    g_V[dead] = 0.0

    grad = np.outer(g_u, title_base) + g_V.T @ content_bases
    return loss, grad


def train_contrastive(
    embedder: HashedTfidfEmbedder,
    pairs: Sequence[TrainingPair],
    config: TrainConfig = TrainConfig(),
) -> TrainResult:
    """Full-batch gradient descent on the projection matrix.

    Deterministic for a fixed seed and pair order. The loss history holds
    the mean loss at the start of every epoch plus one final value, so
    history[i+1] <= history[i] indicates progress.
    """
    config.validate()
    if not pairs:
        raise DegenerateConfig("training needs at least one pair")

    title_bases = [embedder.base_vector(p.title) for p in pairs]
    content_bases = [
        np.stack(
            [embedder.base_vector(p.positive_content)]
            + [embedder.base_vector(n) for n in p.negatives[: config.k_negatives]]
        )
        for p in pairs
    ]

    projection = embedder.projection.copy()
    history: list[float] = []
    n = len(pairs)
    for _ in range(config.epochs):
        total_loss = 0.0
        grad = np.zeros_like(projection)
        for a, B in zip(title_bases, content_bases):
            loss, g = contrastive_loss_and_grad(projection, a, B)
            total_loss += loss
            grad += g
        history.append(total_loss / n)
        projection -= config.lr * grad / n

    final = sum(
        contrastive_loss_and_grad(projection, a, B)[0]
        for a, B in zip(title_bases, content_bases)
    )
    history.append(final / n)
    return TrainResult(embedder.with_projection(projection), history)


def save_embedder(embedder: HashedTfidfEmbedder, path) -> None:
    """Versioned binary: magic, version u16, dim u32, seed u64, projection
    (row-major f64), then the IDF table (default + length-prefixed entries)."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        binio.write_u16(fh, _VERSION)
        binio.write_u32(fh, embedder.dim)
        binio.write_u64(fh, embedder.seed)
        binio.write_f64_array(fh, embedder.projection)
        binio.write_f64(fh, embedder.idf.default)
        binio.write_u32(fh, embedder.idf.n_documents)
        binio.write_u32(fh, len(embedder.idf.weights))
        for token in sorted(embedder.idf.weights):
            binio.write_str(fh, token)
            binio.write_f64(fh, embedder.idf.weights[token])


def load_embedder(path) -> HashedTfidfEmbedder:
    with open(path, "rb") as fh:
        binio.expect_magic(fh, _MAGIC, _VERSION)
        dim = binio.read_u32(fh)
        seed = binio.read_u64(fh)
        projection = binio.read_f64_array(fh, dim * dim).reshape(dim, dim)
        default = binio.read_f64(fh)
        n_documents = binio.read_u32(fh)
        count = binio.read_u32(fh)
        weights = {}
        for _ in range(count):
            token = binio.read_str(fh)
            weights[token] = binio.read_f64(fh)
        idf = IdfTable(weights=weights, default=default, n_documents=n_documents)
    return HashedTfidfEmbedder(dim=dim, seed=seed, idf=idf, projection=projection)


def embedder_from_env(
    corpus_texts: Sequence[str], dim: int = DEFAULT_DIM, seed: int = 0
) -> "HashedTfidfEmbedder | RemoteEmbeddingClient":
    """The configured embedder: remote when D2S_EMBED_URL is set, otherwise
    the in-repo embedder fitted on ``corpus_texts``."""
    url = os.environ.get(EMBED_URL_ENV)
    if url:
        return RemoteEmbeddingClient(url, dim=dim)
    return HashedTfidfEmbedder.fit(corpus_texts, dim=dim, seed=seed)


class RemoteEmbeddingClient:
    """Client for an external embedding service speaking the /embed protocol.

    Safe to share between threads: per-call state lives on the stack and
    requests.Session is thread-safe for plain posts.
    """

    def __init__(
        self,
        url: str,
        dim: int = DEFAULT_DIM,
        timeout_s: float = 30.0,
        retries: int = 2,
        backoff_s: float = 0.2,
        session: requests.Session | None = None,
    ):
        self.url = url.rstrip("/")
        self.dim = dim
        self.timeout_s = timeout_s
        self.retries = retries
        self.backoff_s = backoff_s
        self.session = session or requests.Session()

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        return remote_embed(self, texts)

    def embed(self, text: str) -> np.ndarray:
        return remote_embed(self, [text])[0]


def remote_embed(client: RemoteEmbeddingClient, texts: Sequence[str]) -> list[np.ndarray]:
    """POST the batch to /embed and validate the returned vectors.

    5xx responses and connection failures are retried; a response of the
    wrong shape raises DimensionMismatch immediately.
    """
    payload = {"texts": list(texts)}
    last_error: Exception | None = None
    for attempt in range(client.retries + 1):
        try:
            resp = client.session.post(
                client.url + "/embed", json=payload, timeout=client.timeout_s
            )
        except requests.Timeout as exc:
            raise Timeout(f"embedding service timed out after {client.timeout_s}s") from exc
        except requests.RequestException as exc:
            last_error = exc
            if attempt < client.retries:
                time.sleep(client.backoff_s)
            continue
        if resp.status_code >= 500:
            last_error = ServiceUnavailable(f"embedding service returned {resp.status_code}")
            if attempt < client.retries:
                time.sleep(client.backoff_s)
            continue
        if resp.status_code != 200:
            raise ServiceUnavailable(f"embedding service returned {resp.status_code}")
        body = resp.json()
        vectors = body.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise DimensionMismatch(
                f"expected {len(texts)} vectors, got "
                f"{len(vectors) if isinstance(vectors, list) else type(vectors).__name__}"
            )
        out = []
        for vec in vectors:
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (client.dim,):
                raise DimensionMismatch(f"expected dimension {client.dim}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise DimensionMismatch("service returned non-finite values")
            out.append(arr)
        return out
    raise ServiceUnavailable(f"embedding service unreachable: {last_error}")
