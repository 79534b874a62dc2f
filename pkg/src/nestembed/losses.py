"""Training objectives with analytic gradients.

Four losses build on one another:

  softmax_ce        multi-class cross-entropy on a logit vector
  mrl_loss          weighted sum of cross-entropies over prefix-truncated
                    embeddings, one linear classifier per ladder dimension
  mrl_e_loss        the weight-tied variant: all classifiers share one L x d
                    matrix, the m-dim classifier using its first m columns
  mnrl              in-batch-negatives ranking loss over scaled cosine scores
  matryoshka_wrap   applies mnrl at every ladder dimension and sums with
                    per-dimension weights

Everything is computed in float64. Gradients are exact; the test suite checks
them against central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Mapping

import numpy as np

from .core import ZERO_NORM_EPS, validate_ladder
from .errors import (ConfigError, DimensionError, EmptyBatchError, LabelError,
                     ZeroVectorError)


@dataclass
class LossResult:
    """Scalar loss plus gradients keyed by the differentiated quantity."""

    value: float
    grads: dict


@dataclass(frozen=True)
class LabeledExample:
    embedding: np.ndarray  # (d,)
    label: int


@dataclass(frozen=True)
class LossWeights:
    """Per-ladder-dimension importance weights c_m >= 0."""

    by_dim: Mapping[int, float]

    def __post_init__(self):
        for m, c in self.by_dim.items():
            if c < 0:
                raise ConfigError(f"weight for dimension {m} must be >= 0, got {c}")

    @classmethod
    def uniform(cls, ladder, value: float = 1.0) -> "LossWeights":
        return cls({int(m): float(value) for m in ladder})

    def weight_for(self, m: int) -> float:
        try:
            return float(self.by_dim[m])
        except KeyError:
            raise ConfigError(f"no loss weight configured for ladder dimension {m}") from None


@dataclass(frozen=True)
class ClassifierStack:
    """Linear classifiers for every ladder dimension.

    independent mode stores one (L, m) matrix per ladder entry; weight_tied
    mode stores a single (L, d) matrix whose first m columns serve dimension m.
    """

    mode: Literal["independent", "weight_tied"]
    n_classes: int
    full_dim: int
    weights: Mapping[int, np.ndarray] | np.ndarray

    @classmethod
    def independent(cls, weights: Mapping[int, np.ndarray]) -> "ClassifierStack":
        if not weights:
            raise ConfigError("independent stack needs at least one classifier")
        dims = sorted(weights)
        n_classes = weights[dims[0]].shape[0]
        for m, w in weights.items():
            if w.shape != (n_classes, m):
                raise ConfigError(f"classifier for dimension {m} must be "
                                  f"({n_classes}, {m}), got {w.shape}")
        return cls("independent", n_classes, dims[-1], dict(weights))

    @classmethod
    def weight_tied(cls, shared: np.ndarray) -> "ClassifierStack":
        if shared.ndim != 2:
            raise ConfigError(f"shared classifier must be 2-d, got shape {shared.shape}")
        return cls("weight_tied", shared.shape[0], shared.shape[1], shared)

    def parameter_count(self) -> int:
        if self.mode == "weight_tied":
            return self.n_classes * self.full_dim
        return sum(w.size for w in self.weights.values())


def _softmax_ce_raw(logits: np.ndarray, y: int) -> tuple[float, np.ndarray]:
    """Stable cross-entropy and its logit gradient; accepts any L >= 1."""
    z = logits.astype(np.float64)
    zmax = z.max()
    exp = np.exp(z - zmax)
    total = exp.sum()
    p = exp / total
    value = float(np.log(total) - (z[y] - zmax))
    grad = p.copy()
    grad[y] -= 1.0
    return value, grad


def softmax_ce(logits, y: int) -> LossResult:
    """Multi-class softmax cross-entropy, max-subtracted for stability.

    value = -log softmax(logits)[y]; grads["logits"] = softmax(logits) - onehot(y).
    """
    z = np.asarray(logits, dtype=np.float64)
    if z.ndim != 1 or z.size < 2:
        raise ConfigError(f"logits must be a vector with L >= 2 entries, got shape {z.shape}")
    if not 0 <= y < z.size:
        raise LabelError(f"label {y} outside [0, {z.size})")
    value, grad = _softmax_ce_raw(z, y)
    return LossResult(value, {"logits": grad})


def _stack_weight(stack: ClassifierStack, m: int) -> np.ndarray:
    if stack.mode == "weight_tied":
        return np.asarray(stack.weights)[:, :m]
    try:
        return np.asarray(stack.weights[m])
    except KeyError:
        raise ConfigError(f"stack has no classifier for dimension {m}") from None


def mrl_loss(example: LabeledExample, stack: ClassifierStack,
             weights: LossWeights, ladder) -> LossResult:
    """Sum over ladder dimensions m of c_m * CE(W^(m) z_{1:m}, y).

    grads["weights"] mirrors the stack (per-dimension dict, or one shared
    matrix whose column j accumulates contributions from every m > j);
    grads["embedding"] is the gradient w.r.t. the full embedding z.
    """
    ladder = validate_ladder(ladder)
    z = np.asarray(example.embedding, dtype=np.float64)
    if z.ndim != 1:
        raise DimensionError(f"embedding must be 1-d, got shape {z.shape}")
    if stack.full_dim != z.size or ladder[0] != z.size:
        raise DimensionError(f"embedding dim {z.size}, stack dim {stack.full_dim} "
                             f"and max ladder {ladder[0]} must agree")
    if not 0 <= example.label < stack.n_classes:
        raise LabelError(f"label {example.label} outside [0, {stack.n_classes})")

    grad_z = np.zeros_like(z)
    tied = stack.mode == "weight_tied"
    if tied:
        grad_w: np.ndarray | dict[int, np.ndarray] = np.zeros((stack.n_classes, stack.full_dim))
    else:
        grad_w = {}

    value = 0.0
    for m in ladder:
        c = weights.weight_for(m)
        w = _stack_weight(stack, m).astype(np.float64)
        if not tied:
            grad_w[m] = np.zeros_like(w)
        if c == 0.0:
            continue
        ce, g_logits = _softmax_ce_raw(w @ z[:m], example.label)
        value += c * ce
        g_w = c * np.outer(g_logits, z[:m])
        if tied:
            grad_w[:, :m] += g_w
        else:
            grad_w[m] += g_w
        grad_z[:m] += c * (w.T @ g_logits)

    return LossResult(value, {"weights": grad_w, "embedding": grad_z})


def mrl_e_loss(example: LabeledExample, shared_weights: np.ndarray,
               weights: LossWeights, ladder) -> LossResult:
    """Weight-tied variant: dimension m classifies with the first m columns of
    one shared L x d matrix. Column j of the returned weight gradient holds
    the summed contribution of every ladder dimension m >= j+1."""
    return mrl_loss(example, ClassifierStack.weight_tied(np.asarray(shared_weights)),
                    weights, ladder)


@dataclass(frozen=True)
class TripletBatch:
    """Equal-length anchor/positive/negative stacks of a common dimension.

    negatives may be empty (shape (0, dim)) for the degenerate case where an
    anchor's own positive is the only candidate.
    """

    anchors: np.ndarray
    positives: np.ndarray
    negatives: np.ndarray

    def __post_init__(self):
        a, p, n = self.anchors, self.positives, self.negatives
        if a.ndim != 2 or p.ndim != 2 or n.ndim != 2:
            raise DimensionError("batch arrays must be 2-d (batch, dim)")
        if a.shape[0] < 1:
            raise EmptyBatchError("batch must hold at least one triplet")
        if a.shape != p.shape:
            raise DimensionError(f"anchors {a.shape} and positives {p.shape} must match")
        if n.shape[0] not in (0, a.shape[0]) or n.shape[1] != a.shape[1]:
            raise DimensionError(f"negatives {n.shape} must be empty or match {a.shape}")

    @property
    def size(self) -> int:
        return self.anchors.shape[0]

    @property
    def dim(self) -> int:
        return self.anchors.shape[1]

    def truncated(self, m: int) -> "TripletBatch":
        return TripletBatch(self.anchors[:, :m], self.positives[:, :m],
                            self.negatives[:, :m])


def _unit_rows(x: np.ndarray, what: str) -> tuple[np.ndarray, np.ndarray]:
    norms = np.sqrt((x * x).sum(axis=1))
    if np.any(norms < ZERO_NORM_EPS):
        bad = int(np.argmin(norms))
        raise ZeroVectorError(f"{what}[{bad}] has (near-)zero norm")
    return x / norms[:, None], norms


def mnrl(batch: TripletBatch, scale: float = 20.0) -> LossResult:
    """In-batch-negatives ranking loss.

    Anchor i scores every in-batch positive and negative with scale * cosine;
    the loss is the mean cross-entropy of picking its own positive. Returns
    gradients w.r.t. anchors, positives, and negatives.
    """
    if scale <= 0:
        raise ConfigError(f"scale must be > 0, got {scale}")
    a = batch.anchors.astype(np.float64)
    cand = np.vstack([batch.positives, batch.negatives]).astype(np.float64)
    b = batch.size

    a_hat, a_norm = _unit_rows(a, "anchors")
    c_hat, c_norm = _unit_rows(cand, "candidates")
    cos = a_hat @ c_hat.T                      # (B, C)
    scores = scale * cos

    zmax = scores.max(axis=1, keepdims=True)
    exp = np.exp(scores - zmax)
    p = exp / exp.sum(axis=1, keepdims=True)
    value = float(np.mean(np.log(exp.sum(axis=1)) + zmax[:, 0]
                          - scores[np.arange(b), np.arange(b)]))

    d_scores = p.copy()
    d_scores[np.arange(b), np.arange(b)] -= 1.0
    d_cos = (scale / b) * d_scores

    # d cos(a_i, c_j)/d a_i = (c_hat_j - cos_ij * a_hat_i) / |a_i|
    row_mix = (d_cos * cos).sum(axis=1)
    grad_a = (d_cos @ c_hat - row_mix[:, None] * a_hat) / a_norm[:, None]
    col_mix = (d_cos * cos).sum(axis=0)
    grad_c = (d_cos.T @ a_hat - col_mix[:, None] * c_hat) / c_norm[:, None]

    return LossResult(value, {
        "anchors": grad_a,
        "positives": grad_c[:b],
        "negatives": grad_c[b:],
    })


def matryoshka_wrap(batch: TripletBatch, ladder, weights: LossWeights,
                    scale: float = 20.0) -> LossResult:
    """Sum of c_m * mnrl(batch truncated to m) over the ladder.

    Truncation happens before cosine, so each term trains the prefix as a
    unit-norm-usable embedding. Gradients are returned at full dimension;
    coordinates beyond m receive nothing from the m-term. Zero-weight terms
    are skipped outright.
    """
    ladder = validate_ladder(ladder)
    if batch.dim != ladder[0]:
        raise DimensionError(f"batch dim {batch.dim} must equal max ladder {ladder[0]}")

    value = 0.0
    grads = {k: np.zeros_like(getattr(batch, k), dtype=np.float64)
             for k in ("anchors", "positives", "negatives")}
    for m in ladder:
        c = weights.weight_for(m)
        if c == 0.0:
            continue
        part = mnrl(batch.truncated(m), scale)
        value += c * part.value
        for k in grads:
            grads[k][:, :m] += c * part.grads[k]
    return LossResult(value, grads)
