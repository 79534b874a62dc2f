"""Shared fixtures and oracles.

The expensive artifacts (a desk-scale training run and a 10k-document
corpus) are built once per session and reused by the unit suites and the
acceptance gate alike.
"""

import time
from dataclasses import dataclass

import numpy as np
import pytest

from nestembed import datasetio, encoder, evaluator, retrieval


def central_difference(fn, array: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Numerical gradient of scalar fn() w.r.t. array, perturbed in place."""
    grad = np.zeros(array.shape, dtype=np.float64)
    flat = array.reshape(-1)
    flat_grad = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + h
        up = fn()
        flat[i] = original - h
        down = fn()
        flat[i] = original
        flat_grad[i] = (up - down) / (2.0 * h)
    return grad


def relative_gradient_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """||analytic - numeric|| / ||numeric||, guarded for zero gradients."""
    scale = max(float(np.linalg.norm(numeric)), 1e-12)
    return float(np.linalg.norm(analytic - numeric)) / scale


@dataclass
class DeskRun:
    """One complete desk-scale experiment: data, split, trained model."""

    config: encoder.TrainConfig
    split: datasetio.DatasetSplit
    model: encoder.EncoderModel
    report: encoder.TrainReport
    pairs: list
    build_seconds: float


@pytest.fixture(scope="session")
def desk_run() -> DeskRun:
    """Train once on 8 clusters x 250 triplets at ladder (256,128,64,32),
    batch 128, one epoch, fixed seed. Shared by every suite that needs a
    trained model."""
    started = time.perf_counter()
    rows = datasetio.make_synthetic_triplets(8, 250, seed=42)
    split = datasetio.deterministic_split(rows, (0.8, 0.1, 0.1), seed=42)
    config = encoder.TrainConfig(batch_size=128, epochs=1,
                                 ladder=(256, 128, 64, 32), seed=42)
    model, report = encoder.train(encoder.init_model(config), split.train, config)
    pairs = evaluator.as_scored_pairs(
        datasetio.make_synthetic_scored_pairs(8, 200, seed=43))
    return DeskRun(config, split, model, report, pairs,
                   time.perf_counter() - started)


@dataclass
class FunnelRun:
    """10k-document corpus under the desk model plus 200 query embeddings."""

    corpus: retrieval.Corpus
    queries: np.ndarray
    build_seconds: float


@pytest.fixture(scope="session")
def funnel_run(desk_run: DeskRun) -> FunnelRun:
    started = time.perf_counter()
    docs = datasetio.make_synthetic_sentences(8, 10000, seed=44)
    corpus = retrieval.build_corpus(desk_run.model,
                                    [f"doc-{i:05d}" for i in range(len(docs))],
                                    docs)
    queries = encoder.encode_batch(desk_run.model,
                                   datasetio.make_synthetic_sentences(8, 200, seed=45))
    return FunnelRun(corpus, queries, time.perf_counter() - started)


@dataclass
class TinyRun:
    """A seconds-fast model for service/CLI tests that do not need quality."""

    config: encoder.TrainConfig
    rows: list
    model: encoder.EncoderModel


@pytest.fixture(scope="session")
def tiny_run() -> TinyRun:
    rows = datasetio.make_synthetic_triplets(4, 30, seed=7)
    config = encoder.TrainConfig(batch_size=32, epochs=1, ladder=(64, 32, 16),
                                 seed=3)
    model, _ = encoder.train(encoder.init_model(config), rows, config)
    return TinyRun(config, rows, model)
