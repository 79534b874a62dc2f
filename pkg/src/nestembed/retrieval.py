"""Brute-force and funnel retrieval over an embedded document corpus.

The funnel runs two exact stages: shortlist everything at a cheap truncated
dimension, then rerank only the shortlist at full dimension. No approximate
index is involved, so recall measurements isolate the dimension trade-off.

Corpus file layout (little-endian):

  model fingerprint (16 bytes) | N u64 | d u32
  | per document: id byte length u32, id UTF-8 bytes
  | embeddings: N rows x d columns of IEEE-754 float32
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .core import SimilarityMetric, truncate
from .encoder import DEFAULT_MAX_CHARS, EncoderModel, encode_batch, model_fingerprint
from .errors import (ConfigError, DimensionError, FingerprintError,
                     FormatError, ResultSizeError, ZeroVectorError)

FINGERPRINT_BYTES = 16


@dataclass
class Corpus:
    ids: tuple[str, ...]
    embeddings: np.ndarray          # (N, d) float32
    fingerprint: bytes

    def __post_init__(self):
        self.ids = tuple(self.ids)
        if len(self.ids) < 1:
            raise ConfigError("corpus must hold at least one document")
        if len(set(self.ids)) != len(self.ids):
            raise ConfigError("corpus ids must be unique")
        emb = np.asarray(self.embeddings, dtype=np.float32)
        if emb.ndim != 2 or emb.shape[0] != len(self.ids):
            raise ConfigError(f"embeddings shape {emb.shape} does not match "
                              f"{len(self.ids)} ids")
        if not np.all(np.isfinite(emb)):
            raise ConfigError("corpus embeddings contain NaN or Inf")
        if len(self.fingerprint) != FINGERPRINT_BYTES:
            raise ConfigError(f"fingerprint must be {FINGERPRINT_BYTES} bytes")
        self.embeddings = emb
        # ranks for deterministic tie-breaking: position of each row's id
        # in ascending id order
        order = sorted(range(len(self.ids)), key=lambda i: self.ids[i])
        ranks = np.empty(len(self.ids), dtype=np.int64)
        for rank, row in enumerate(order):
            ranks[row] = rank
        self._id_ranks = ranks

    @property
    def size(self) -> int:
        return self.embeddings.shape[0]

    @property
    def dim(self) -> int:
        return self.embeddings.shape[1]


@dataclass(frozen=True)
class SearchResult:
    entries: tuple[tuple[str, float], ...]   # (id, score), scores non-increasing
    metric: SimilarityMetric
    dimension: int
    truncated: bool = False

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(identifier for identifier, _ in self.entries)


@dataclass(frozen=True)
class FunnelConfig:
    shortlist_dim: int
    shortlist_size: int
    final_dim: int
    k: int

    def __post_init__(self):
        if self.shortlist_dim < 1 or self.final_dim < 1:
            raise ConfigError("dimensions must be >= 1")
        if self.shortlist_dim > self.final_dim:
            raise ConfigError(f"shortlist_dim {self.shortlist_dim} exceeds "
                              f"final_dim {self.final_dim}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.k > self.shortlist_size:
            raise ConfigError(f"k {self.k} exceeds shortlist_size {self.shortlist_size}")


def _scores(rows: np.ndarray, q: np.ndarray, metric: SimilarityMetric,
            row_label) -> np.ndarray:
    """Similarity of q against each row, float64. Distance metrics come back
    negated so every metric sorts descending-is-better."""
    x = rows.astype(np.float64)
    q = q.astype(np.float64)
    if metric == SimilarityMetric.DOT:
        return x @ q
    if metric == SimilarityMetric.COSINE:
        qn = np.sqrt((q * q).sum())
        if qn < 1e-12:
            raise ZeroVectorError("query has zero norm under cosine")
        norms = np.sqrt((x * x).sum(axis=1))
        bad = np.nonzero(norms < 1e-12)[0]
        if bad.size:
            raise ZeroVectorError(f"document {row_label(int(bad[0]))!r} has "
                                  f"zero norm under cosine")
        return (x @ q) / (norms * qn)
    if metric == SimilarityMetric.EUCLIDEAN:
        diff = x - q
        return -np.sqrt((diff * diff).sum(axis=1))
    if metric == SimilarityMetric.MANHATTAN:
        return -np.abs(x - q).sum(axis=1)
    raise ConfigError(f"unsupported metric {metric!r}")


def _top_entries(scores: np.ndarray, id_ranks: np.ndarray, ids, k: int):
    # primary key: descending score; secondary: ascending id
    order = np.lexsort((id_ranks, -scores))[:k]
    return tuple((ids[i], float(np.float32(scores[i]))) for i in order)


def exact_knn(query, corpus: Corpus, m: int, metric: SimilarityMetric,
              k: int) -> SearchResult:
    """Top-k documents by similarity at dimension m over the whole corpus.
    Asking for more results than documents returns everything with the
    truncated flag set."""
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if not 1 <= m <= corpus.dim:
        raise DimensionError(f"m={m} outside [1, {corpus.dim}]")
    metric = SimilarityMetric(metric)
    q = truncate(np.asarray(query, dtype=np.float32), m)
    scores = _scores(corpus.embeddings[:, :m], q, metric,
                     lambda i: corpus.ids[i])
    truncated = k > corpus.size
    entries = _top_entries(scores, corpus._id_ranks, corpus.ids,
                           min(k, corpus.size))
    return SearchResult(entries, metric, m, truncated)


def funnel_search(query, corpus: Corpus, config: FunnelConfig,
                  metric: SimilarityMetric) -> SearchResult:
    """Shortlist at config.shortlist_dim with k = shortlist_size, then rerank
    only those survivors at config.final_dim and keep config.k."""
    if config.final_dim > corpus.dim:
        raise ConfigError(f"final_dim {config.final_dim} exceeds corpus "
                          f"dimension {corpus.dim}")
    if config.shortlist_size > corpus.size:
        raise ConfigError(f"shortlist_size {config.shortlist_size} exceeds "
                          f"corpus size {corpus.size}")
    metric = SimilarityMetric(metric)
    stage1 = exact_knn(query, corpus, config.shortlist_dim, metric,
                       config.shortlist_size)
    survivors = stage1.ids
    index_of = {identifier: i for i, identifier in enumerate(corpus.ids)}
    rows = np.array([index_of[identifier] for identifier in survivors])
    q = truncate(np.asarray(query, dtype=np.float32), config.final_dim)
    scores = _scores(corpus.embeddings[rows, :config.final_dim], q, metric,
                     lambda i: survivors[i])
    entries = _top_entries(scores, corpus._id_ranks[rows], survivors, config.k)
    return SearchResult(entries, metric, config.final_dim)


def recall_at_k(result: SearchResult, exact_result: SearchResult, k: int) -> float:
    """Fraction of the exact top-k ids present in the candidate's top-k."""
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if len(result.entries) < k:
        raise ResultSizeError(f"result holds {len(result.entries)} entries, need {k}")
    if len(exact_result.entries) < k:
        raise ResultSizeError(f"exact result holds {len(exact_result.entries)} "
                              f"entries, need {k}")
    top = set(result.ids[:k])
    exact_top = set(exact_result.ids[:k])
    return len(top & exact_top) / k


def build_corpus(model: EncoderModel, ids, texts,
                 max_chars: int = DEFAULT_MAX_CHARS) -> Corpus:
    """Embed texts at full dimension and bind the result to the model via
    its fingerprint."""
    ids = tuple(ids)
    texts = list(texts)
    if len(ids) != len(texts):
        raise ConfigError(f"{len(ids)} ids vs {len(texts)} texts")
    embeddings = encode_batch(model, texts, None, max_chars)
    return Corpus(ids, embeddings, model_fingerprint(model))


def corpus_matches_model(corpus: Corpus, model: EncoderModel) -> bool:
    return corpus.fingerprint == model_fingerprint(model)


def require_matching_model(corpus: Corpus, model: EncoderModel) -> None:
    if not corpus_matches_model(corpus, model):
        raise FingerprintError("corpus was built with a different model "
                               "(fingerprint mismatch)")


def corpus_to_bytes(corpus: Corpus) -> bytes:
    parts = [corpus.fingerprint,
             struct.pack("<QI", corpus.size, corpus.dim)]
    for identifier in corpus.ids:
        raw = identifier.encode("utf-8")
        parts.append(struct.pack("<I", len(raw)))
        parts.append(raw)
    parts.append(np.ascontiguousarray(corpus.embeddings, dtype="<f4").tobytes())
    return b"".join(parts)


def corpus_from_bytes(data: bytes) -> Corpus:
    def need(offset: int, count: int, what: str):
        if len(data) < offset + count:
            raise FormatError(f"truncated corpus file while reading {what}", len(data))

    need(0, FINGERPRINT_BYTES + 12, "header")
    fingerprint = data[:FINGERPRINT_BYTES]
    n, d = struct.unpack_from("<QI", data, FINGERPRINT_BYTES)
    if n < 1:
        raise FormatError("corpus must hold at least one document", FINGERPRINT_BYTES)
    if d < 1:
        raise FormatError("dimension must be >= 1", FINGERPRINT_BYTES + 8)
    off = FINGERPRINT_BYTES + 12
    ids = []
    for i in range(n):
        need(off, 4, f"id length {i}")
        (id_len,) = struct.unpack_from("<I", data, off)
        off += 4
        need(off, id_len, f"id {i}")
        try:
            ids.append(data[off:off + id_len].decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise FormatError(f"id {i} is not valid UTF-8: {exc.reason}",
                              off + exc.start) from None
        off += id_len
    expected = off + 4 * n * d
    if len(data) < expected:
        raise FormatError(f"truncated embeddings: need {expected} bytes, "
                          f"have {len(data)}", len(data))
    if len(data) > expected:
        raise FormatError(f"{len(data) - expected} trailing bytes after "
                          f"embeddings", expected)
    emb = np.frombuffer(data, dtype="<f4", offset=off).reshape(n, d)
    if not np.all(np.isfinite(emb)):
        raise FormatError("embeddings contain NaN or Inf", off)
    if len(set(ids)) != len(ids):
        raise FormatError("duplicate document ids", FINGERPRINT_BYTES + 12)
    return Corpus(tuple(ids), emb.copy(), fingerprint)


def save_corpus(corpus: Corpus, path) -> None:
    with open(path, "wb") as fh:
        fh.write(corpus_to_bytes(corpus))


def load_corpus(path) -> Corpus:
    with open(path, "rb") as fh:
        return corpus_from_bytes(fh.read())
