"""Desk-scale trainable text encoder and its on-disk format.

The encoder is a single linear map: hashed character n-gram counts (sparse,
feature_space wide) times a dense (d x feature_space) float32 weight matrix.
That keeps gradients exactly checkable and training well under a minute while
preserving the property being studied: every prefix of the output embedding
is a usable embedding, enforced by training with the matryoshka-wrapped
ranking loss.

Model file layout (little-endian):

  magic "MXEM" | version u32 | d u32 | F u32 | ladder_len u32
  | ladder entries u32 each | seed u64
  | norm block: n_min u8, n_max u8, log2(F) u8, reserved u8
  | weights: d rows x F columns of IEEE-754 float32

File size is exactly header + 4*d*F bytes; anything else is a format error.
"""

from __future__ import annotations

import hashlib
import struct
import time
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix, vstack as sparse_vstack

from . import losses
from .core import validate_ladder
from .errors import (ConfigError, DivergenceError, DimensionError,
                     EmptyDatasetError, FormatError, ZeroVectorError)
from .textnorm import FeatureVector, NormConfig

MAGIC = b"MXEM"
FORMAT_VERSION = 1
DEFAULT_MAX_CHARS = 512
DESK_LADDER = (256, 128, 64, 32)


@dataclass
class EncoderModel:
    weights: np.ndarray          # (d, feature_space) float32
    ladder: tuple[int, ...]
    norm: NormConfig
    seed: int
    version: int = FORMAT_VERSION

    def __post_init__(self):
        self.ladder = validate_ladder(self.ladder)
        w = np.asarray(self.weights, dtype=np.float32)
        if w.ndim != 2:
            raise ConfigError(f"weights must be 2-d, got shape {w.shape}")
        if w.shape != (self.ladder[0], self.norm.feature_space):
            raise ConfigError(f"weights shape {w.shape} must be "
                              f"({self.ladder[0]}, {self.norm.feature_space})")
        if not np.all(np.isfinite(w)):
            raise ConfigError("weights contain NaN or Inf")
        self.weights = w

    @property
    def dim(self) -> int:
        return self.ladder[0]

    @property
    def feature_space(self) -> int:
        return self.norm.feature_space


@dataclass
class TrainConfig:
    batch_size: int = 128
    epochs: int = 1
    learning_rate: float = 1e-3
    scale: float = 20.0
    ladder: tuple[int, ...] = DESK_LADDER
    loss_weights: dict[int, float] | None = None   # None = 1.0 per ladder entry
    max_chars: int = DEFAULT_MAX_CHARS
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    n_min: int = 2
    n_max: int = 4
    feature_space: int = 1 << 15

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        # lr 0 is allowed so the no-op limit stays testable
        if self.learning_rate < 0:
            raise ConfigError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must fit in 64 bits")
        self.ladder = validate_ladder(self.ladder)

    def weights(self) -> losses.LossWeights:
        if self.loss_weights is None:
            return losses.LossWeights.uniform(self.ladder)
        return losses.LossWeights(dict(self.loss_weights))

    def norm_config(self) -> NormConfig:
        return NormConfig(self.n_min, self.n_max, self.feature_space)


@dataclass
class TrainReport:
    batch_losses: list[float]
    epoch_mean_losses: list[float]
    triplet_accuracy: dict[int, float]
    duration_seconds: float
    batches_per_epoch: int = 0

    def to_dict(self) -> dict:
        return {
            "batch_losses": self.batch_losses,
            "epoch_mean_losses": self.epoch_mean_losses,
            "triplet_accuracy": {str(k): v for k, v in self.triplet_accuracy.items()},
            "duration_seconds": self.duration_seconds,
            "batches_per_epoch": self.batches_per_epoch,
        }


def init_model(config: TrainConfig) -> EncoderModel:
    """Fresh model with weights i.i.d. uniform in [-1/sqrt(F), 1/sqrt(F)]."""
    norm = config.norm_config()
    d, f = config.ladder[0], norm.feature_space
    rng = np.random.default_rng(config.seed)
    bound = 1.0 / np.sqrt(f)
    w = rng.uniform(-bound, bound, size=(d, f)).astype(np.float32)
    return EncoderModel(w, config.ladder, norm, config.seed)


def _features_matrix(feats: list[FeatureVector], feature_space: int) -> csr_matrix:
    indptr = np.zeros(len(feats) + 1, dtype=np.int64)
    for i, fv in enumerate(feats):
        indptr[i + 1] = indptr[i] + len(fv.indices)
    indices = np.concatenate([np.asarray(fv.indices, dtype=np.int64) for fv in feats]) \
        if feats else np.zeros(0, dtype=np.int64)
    data = np.concatenate([np.asarray(fv.counts, dtype=np.float64) for fv in feats]) \
        if feats else np.zeros(0, dtype=np.float64)
    return csr_matrix((data, indices, indptr), shape=(len(feats), feature_space))


class _FeatureCache:
    """Memoizes text -> FeatureVector; featurization dominates desk-scale cost."""

    def __init__(self, norm: NormConfig, max_chars: int):
        self.norm = norm
        self.max_chars = max_chars
        self._cache: dict[str, FeatureVector] = {}

    def __call__(self, text: str) -> FeatureVector:
        fv = self._cache.get(text)
        if fv is None:
            fv = self.norm.featurize(text[:self.max_chars])
            self._cache[text] = fv
        return fv


def encode_batch(model: EncoderModel, texts: list[str], m: int | None = None,
                 max_chars: int = DEFAULT_MAX_CHARS) -> np.ndarray:
    """Encode texts to (n, m) float32. The full d-dim embedding is always
    computed first and truncated after the float32 cast, so the prefix
    property holds bit-exactly."""
    if m is None:
        m = model.dim
    if not 1 <= m <= model.dim:
        raise DimensionError(f"m={m} outside [1, {model.dim}]")
    featurize = _FeatureCache(model.norm, max_chars)
    x = _features_matrix([featurize(t) for t in texts], model.feature_space)
    z = (x @ model.weights.T.astype(np.float64)).astype(np.float32)
    return z if m == model.dim else z[:, :m].copy()


def encode(model: EncoderModel, text: str, m: int | None = None,
           max_chars: int = DEFAULT_MAX_CHARS) -> np.ndarray:
    """Embedding of one text at dimension m (default: full)."""
    return encode_batch(model, [text], m, max_chars)[0]


class _Adam:
    def __init__(self, shape, lr, beta1, beta2, eps):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = np.zeros(shape)
        self.v = np.zeros(shape)
        self.t = 0

    def step(self, w: np.ndarray, grad: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = self.b1 * self.m + (1 - self.b1) * grad
        self.v = self.b2 * self.v + (1 - self.b2) * grad * grad
        m_hat = self.m / (1 - self.b1 ** self.t)
        v_hat = self.v / (1 - self.b2 ** self.t)
        return w - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def _batch_loss(w64: np.ndarray, xa: csr_matrix, xp: csr_matrix, xn: csr_matrix,
                ladder, weights: losses.LossWeights, scale: float):
    """Loss of one encoded triplet batch plus its gradient w.r.t. the encoder
    weights. Shared by train() and by the gradient/descent tests."""
    za = xa @ w64.T
    zp = xp @ w64.T
    zn = xn @ w64.T
    result = losses.matryoshka_wrap(losses.TripletBatch(za, zp, zn), ladder,
                                    weights, scale)
    g = np.vstack([result.grads["anchors"], result.grads["positives"],
                   result.grads["negatives"]])
    x_all = sparse_vstack([xa, xp, xn], format="csr")
    grad_w = (x_all.T @ g).T
    return result.value, grad_w


def train(init: EncoderModel, triplets, config: TrainConfig) -> tuple[EncoderModel, TrainReport]:
    """Run epochs x ceil(N/batch) steps of the matryoshka-wrapped ranking loss
    with Adam. Deterministic: identical (init, triplets, config) give a
    bit-identical final model."""
    if not triplets:
        raise EmptyDatasetError("no training triplets")
    if init.ladder != config.ladder or init.feature_space != config.feature_space:
        raise ConfigError("init model and config disagree on ladder or feature space")

    featurize = _FeatureCache(init.norm, config.max_chars)
    feats = [(featurize(t.anchor), featurize(t.positive), featurize(t.negative))
             for t in triplets]

    w64 = init.weights.astype(np.float64)
    adam = _Adam(w64.shape, config.learning_rate, config.beta1, config.beta2, config.eps)
    loss_weights = config.weights()
    rng = np.random.default_rng(config.seed)
    started = time.perf_counter()

    n = len(feats)
    batch_losses: list[float] = []
    epoch_means: list[float] = []
    batches_per_epoch = (n + config.batch_size - 1) // config.batch_size
    step = 0
    for _ in range(config.epochs):
        order = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, config.batch_size):
            rows = [feats[i] for i in order[start:start + config.batch_size]]
            xa = _features_matrix([r[0] for r in rows], config.feature_space)
            xp = _features_matrix([r[1] for r in rows], config.feature_space)
            xn = _features_matrix([r[2] for r in rows], config.feature_space)
            value, grad_w = _batch_loss(w64, xa, xp, xn, config.ladder,
                                        loss_weights, config.scale)
            if not np.isfinite(value):
                raise DivergenceError(f"non-finite loss at batch {step}", step)
            w64 = adam.step(w64, grad_w)
            batch_losses.append(value)
            epoch_losses.append(value)
            step += 1
        epoch_means.append(float(np.mean(epoch_losses)))

    model = EncoderModel(w64.astype(np.float32), config.ladder, init.norm, config.seed)
    accuracy = {m: triplet_accuracy(model, triplets, m, config.max_chars)
                for m in config.ladder}
    report = TrainReport(batch_losses, epoch_means, accuracy,
                         time.perf_counter() - started, batches_per_epoch)
    return model, report


def triplet_accuracy(model: EncoderModel, triplets, m: int,
                     max_chars: int = DEFAULT_MAX_CHARS) -> float:
    """Fraction of triplets with cos(anchor, positive) > cos(anchor, negative)
    at dimension m. Ties count as failures."""
    if m not in model.ladder:
        raise DimensionError(f"m={m} not in model ladder {model.ladder}")
    za = encode_batch(model, [t.anchor for t in triplets], m, max_chars).astype(np.float64)
    zp = encode_batch(model, [t.positive for t in triplets], m, max_chars).astype(np.float64)
    zn = encode_batch(model, [t.negative for t in triplets], m, max_chars).astype(np.float64)
    for name, z in (("anchor", za), ("positive", zp), ("negative", zn)):
        norms = np.sqrt((z * z).sum(axis=1))
        if np.any(norms < 1e-12):
            raise ZeroVectorError(f"{name} embedding {int(np.argmin(norms))} has zero norm")
        z /= norms[:, None]
    wins = ((za * zp).sum(axis=1) > (za * zn).sum(axis=1)).sum()
    return float(wins) / len(triplets)


def model_to_bytes(model: EncoderModel) -> bytes:
    f_log2 = int(model.feature_space).bit_length() - 1
    header = MAGIC + struct.pack(
        "<III", model.version, model.dim, model.feature_space)
    header += struct.pack("<I", len(model.ladder))
    header += struct.pack(f"<{len(model.ladder)}I", *model.ladder)
    header += struct.pack("<Q", model.seed)
    header += struct.pack("<BBBB", model.norm.n_min, model.norm.n_max, f_log2, 0)
    body = np.ascontiguousarray(model.weights, dtype="<f4").tobytes()
    return header + body


def model_from_bytes(data: bytes) -> EncoderModel:
    def need(offset: int, count: int, what: str):
        if len(data) < offset + count:
            raise FormatError(f"truncated model file while reading {what}", len(data))

    need(0, 4, "magic")
    if data[:4] != MAGIC:
        raise FormatError(f"bad magic {data[:4]!r}", 0)
    need(4, 12, "header")
    version, d, f = struct.unpack_from("<III", data, 4)
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {version}", 4)
    if d < 1:
        raise FormatError("dimension must be >= 1", 8)
    if f < 1 or f & (f - 1):
        raise FormatError(f"feature space {f} is not a power of two", 12)
    need(16, 4, "ladder length")
    (ladder_len,) = struct.unpack_from("<I", data, 16)
    if not 1 <= ladder_len <= 64:
        raise FormatError(f"implausible ladder length {ladder_len}", 16)
    need(20, 4 * ladder_len, "ladder")
    ladder = struct.unpack_from(f"<{ladder_len}I", data, 20)
    off = 20 + 4 * ladder_len
    try:
        ladder = validate_ladder(ladder, full_dim=d)
    except ConfigError as exc:
        raise FormatError(str(exc), 20) from None
    need(off, 8, "seed")
    (seed,) = struct.unpack_from("<Q", data, off)
    off += 8
    need(off, 4, "norm config")
    n_min, n_max, f_log2, _reserved = struct.unpack_from("<BBBB", data, off)
    if (1 << f_log2) != f:
        raise FormatError(f"log2 feature space {f_log2} disagrees with F={f}", off + 2)
    try:
        norm = NormConfig(n_min, n_max, f)
    except ConfigError as exc:
        raise FormatError(str(exc), off) from None
    off += 4
    expected = off + 4 * d * f
    if len(data) < expected:
        raise FormatError(f"truncated weights: need {expected} bytes, have {len(data)}",
                          len(data))
    if len(data) > expected:
        raise FormatError(f"{len(data) - expected} trailing bytes after weights", expected)
    w = np.frombuffer(data, dtype="<f4", offset=off).reshape(d, f)
    if not np.all(np.isfinite(w)):
        raise FormatError("weights contain NaN or Inf", off)
    return EncoderModel(w.copy(), ladder, norm, seed, version)


def save_model(model: EncoderModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(model_to_bytes(model))


def load_model(path) -> EncoderModel:
    with open(path, "rb") as fh:
        return model_from_bytes(fh.read())


def model_fingerprint(model: EncoderModel) -> bytes:
    """16-byte content hash binding corpora to the exact model that built them."""
    return hashlib.blake2b(model_to_bytes(model), digest_size=16).digest()
