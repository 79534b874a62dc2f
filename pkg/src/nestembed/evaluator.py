"""Embedding-similarity evaluation against gold-scored sentence pairs.

For each ladder dimension the evaluator encodes both sentences of every
pair, turns the four similarity metrics into predicted-similarity series
(distances are negated so larger always means more similar), and correlates
each series with the gold scores using Pearson and Spearman. A "max" column
aggregates the best metric per dimension and correlation type.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import encoder as enc
from .core import SimilarityMetric, similarity
from .errors import DimensionError, UndefinedCorrelationError, ZeroVectorError

METRIC_ORDER = (SimilarityMetric.COSINE, SimilarityMetric.MANHATTAN,
                SimilarityMetric.EUCLIDEAN, SimilarityMetric.DOT)

CSV_HEADER = ("dimension,pearson_cosine,spearman_cosine,"
              "pearson_manhattan,spearman_manhattan,"
              "pearson_euclidean,spearman_euclidean,"
              "pearson_dot,spearman_dot,pearson_max,spearman_max")


@dataclass(frozen=True)
class ScoredPair:
    sentence1: str
    sentence2: str
    gold: float   # in [0, 1]


def as_scored_pairs(rows) -> list[ScoredPair]:
    """Adapt scored CSV rows (sentence1/sentence2/score) to ScoredPair."""
    out = []
    for row in rows:
        gold = getattr(row, "gold", None)
        if gold is None:
            gold = row.score
        out.append(ScoredPair(row.sentence1, row.sentence2, float(gold)))
    return out


def _as_series(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be 1-d, got shape {arr.shape}")
    return arr


def pearson(xs, ys) -> float:
    """Two-pass sample Pearson correlation, float64 throughout."""
    x = _as_series(xs, "xs")
    y = _as_series(ys, "ys")
    if len(x) != len(y):
        raise DimensionError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise UndefinedCorrelationError(f"need at least 2 points, got {len(x)}")
    for name, s in (("xs", x), ("ys", y)):
        if np.all(s == s[0]):
            raise UndefinedCorrelationError(f"{name} is constant")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = np.sqrt((dx * dx).sum())
    sy = np.sqrt((dy * dy).sum())
    if sx == 0.0 or sy == 0.0:
        raise UndefinedCorrelationError("series variance underflowed to zero")
    return float(max(-1.0, min(1.0, (dx * dy).sum() / (sx * sy))))


def average_ranks(xs) -> np.ndarray:
    """1-based ranks; runs of equal values share the average of their ranks."""
    x = _as_series(xs, "xs")
    n = len(x)
    order = np.argsort(x, kind="stable")
    sorted_vals = x[order]
    ranks = np.empty(n, dtype=np.float64)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(xs, ys) -> float:
    """Pearson correlation of the average-rank transforms."""
    x = _as_series(xs, "xs")
    y = _as_series(ys, "ys")
    if len(x) != len(y):
        raise DimensionError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise UndefinedCorrelationError(f"need at least 2 points, got {len(x)}")
    for name, s in (("xs", x), ("ys", y)):
        if np.all(s == s[0]):
            raise UndefinedCorrelationError(f"{name} is constant")
    return pearson(average_ranks(x), average_ranks(y))


def _series_from_embeddings(za: np.ndarray, zb: np.ndarray,
                            metric: SimilarityMetric) -> list[float]:
    negate = metric in (SimilarityMetric.EUCLIDEAN, SimilarityMetric.MANHATTAN)
    series = []
    for i in range(za.shape[0]):
        try:
            value = similarity(za[i], zb[i], metric)
        except ZeroVectorError as exc:
            raise ZeroVectorError(f"pair {i}: {exc}") from None
        series.append(-value if negate else value)
    return series


def similarity_series(model, pairs, m: int, metric: SimilarityMetric,
                      max_chars: int = enc.DEFAULT_MAX_CHARS) -> list[float]:
    """Predicted similarity per pair at dimension m. Euclidean and manhattan
    distances come back negated so every metric correlates positively with
    gold similarity."""
    if m not in model.ladder:
        raise DimensionError(f"m={m} not in model ladder {model.ladder}")
    za = enc.encode_batch(model, [p.sentence1 for p in pairs], m, max_chars)
    zb = enc.encode_batch(model, [p.sentence2 for p in pairs], m, max_chars)
    return _series_from_embeddings(za, zb, SimilarityMetric(metric))


@dataclass(frozen=True)
class CorrelationPair:
    pearson: float
    spearman: float


@dataclass
class CorrelationReport:
    dimensions: tuple[int, ...]
    cells: dict[int, dict[str, CorrelationPair]]   # metric name -> values, plus "max"

    @classmethod
    def from_cells(cls, cells: dict[int, dict[str, CorrelationPair]]) -> "CorrelationReport":
        """Fill in the per-dimension max aggregation: element-wise maximum
        across the four metrics, separately for pearson and spearman."""
        dims = tuple(sorted(cells, reverse=True))
        full = {}
        for dim in dims:
            row = dict(cells[dim])
            row["max"] = CorrelationPair(
                max(row[m.value].pearson for m in METRIC_ORDER),
                max(row[m.value].spearman for m in METRIC_ORDER))
            full[dim] = row
        return cls(dims, full)

    def to_json_dict(self) -> dict:
        return {str(dim): {name: {"pearson": cp.pearson, "spearman": cp.spearman}
                           for name, cp in self.cells[dim].items()}
                for dim in self.dimensions}

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for dim in self.dimensions:
            row = self.cells[dim]
            values = [str(dim)]
            for name in [m.value for m in METRIC_ORDER] + ["max"]:
                values.append(repr(row[name].pearson))
                values.append(repr(row[name].spearman))
            lines.append(",".join(values))
        return "\n".join(lines) + "\n"


def evaluate(model, pairs, ladder=None,
             max_chars: int = enc.DEFAULT_MAX_CHARS) -> CorrelationReport:
    """Full dimension x metric correlation grid against gold scores."""
    if ladder is None:
        ladder = model.ladder
    for m in ladder:
        if m not in model.ladder:
            raise DimensionError(f"dimension {m} not in model ladder {model.ladder}")
    pairs = list(pairs)
    gold = []
    for p in pairs:
        value = getattr(p, "gold", None)
        if value is None:
            value = getattr(p, "score", None)
        if value is None:
            raise DimensionError("pairs must carry a gold or score field")
        gold.append(float(value))
    cells: dict[int, dict[str, CorrelationPair]] = {}
    for m in ladder:
        za = enc.encode_batch(model, [p.sentence1 for p in pairs], m, max_chars)
        zb = enc.encode_batch(model, [p.sentence2 for p in pairs], m, max_chars)
        row = {}
        for metric in METRIC_ORDER:
            series = _series_from_embeddings(za, zb, metric)
            row[metric.value] = CorrelationPair(pearson(series, gold),
                                                spearman(series, gold))
        cells[m] = row
    return CorrelationReport.from_cells(cells)
