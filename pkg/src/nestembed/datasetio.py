"""Dataset ingestion, validation, splits, and desk-scale synthetic data.

Five CSV row shapes are supported, all UTF-8 with a mandatory header and
RFC-4180 quoting:

  pair        anchor,positive
  triplet     anchor,positive,negative
  pair-class  premise,hypothesis,label        (label: 0/1/2)
  pair-score  sentence1,sentence2,score
  sts         sentence1,sentence2,score

Scores are normalized to [0, 1] at parse time from a configurable source
range (default [0, 5], i.e. raw/5). Parsing is strict by default; lenient
mode quarantines bad rows instead of raising so one malformed line cannot
take down a long ingest.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import (ConfigError, DecodeError, RowError, SchemaError,
                     ScoreRangeError)
from .textnorm import normalize_arabic

DEFAULT_SCORE_RANGE = (0.0, 5.0)

_ARABIC_LETTERS = "ابتثجحخدذرزسشصضطظعغفقكلمنهوي"


@dataclass(frozen=True)
class PairRow:
    anchor: str
    positive: str


@dataclass(frozen=True)
class TripletRow:
    anchor: str
    positive: str
    negative: str


@dataclass(frozen=True)
class PairClassRow:
    premise: str
    hypothesis: str
    label: int   # 0 entailment, 1 neutral, 2 contradiction


@dataclass(frozen=True)
class PairScoreRow:
    sentence1: str
    sentence2: str
    score: float   # already normalized to [0, 1]


SCHEMAS: dict[str, tuple[str, ...]] = {
    "pair": ("anchor", "positive"),
    "triplet": ("anchor", "positive", "negative"),
    "pair-class": ("premise", "hypothesis", "label"),
    "pair-score": ("sentence1", "sentence2", "score"),
    "sts": ("sentence1", "sentence2", "score"),
}

LABEL_NAMES = {0: "entailment", 1: "neutral", 2: "contradiction"}


@dataclass(frozen=True)
class QuarantinedRow:
    line: int
    message: str
    fields: tuple[str, ...]


@dataclass
class ParseResult:
    rows: list
    quarantined: list[QuarantinedRow]
    path: str
    schema: str

    @property
    def row_count(self) -> int:
        return len(self.rows)


def normalize_score(raw: float, source_range=DEFAULT_SCORE_RANGE) -> float:
    """Affine map of raw onto [0, 1]; clamping covers only float rounding."""
    lo, hi = float(source_range[0]), float(source_range[1])
    if not hi > lo:
        raise ConfigError(f"score range must satisfy hi > lo, got [{lo}, {hi}]")
    if not math.isfinite(raw):
        raise ScoreRangeError(f"score {raw} is not finite")
    if raw < lo or raw > hi:
        raise ScoreRangeError(f"score {raw} outside [{lo}, {hi}]")
    return min(1.0, max(0.0, (raw - lo) / (hi - lo)))


def _require_nonempty(value: str, column: str, line: int) -> None:
    if not normalize_arabic(value).value:
        raise RowError(f"column {column!r} is empty after normalization", line)


def _build_pair(fields: tuple[str, ...], line: int, _range) -> PairRow:
    _require_nonempty(fields[0], "anchor", line)
    _require_nonempty(fields[1], "positive", line)
    return PairRow(fields[0], fields[1])


def _build_triplet(fields: tuple[str, ...], line: int, _range) -> TripletRow:
    for value, column in zip(fields, ("anchor", "positive", "negative")):
        _require_nonempty(value, column, line)
    if normalize_arabic(fields[1]).value == normalize_arabic(fields[2]).value:
        raise RowError("negative equals positive after normalization", line)
    return TripletRow(*fields)


def _build_pair_class(fields: tuple[str, ...], line: int, _range) -> PairClassRow:
    _require_nonempty(fields[0], "premise", line)
    _require_nonempty(fields[1], "hypothesis", line)
    try:
        label = int(fields[2])
    except ValueError:
        raise RowError(f"label {fields[2]!r} is not an integer", line) from None
    if label not in LABEL_NAMES:
        raise RowError(f"label {label} out of range (expected 0, 1, or 2)", line)
    return PairClassRow(fields[0], fields[1], label)


def _build_pair_score(fields: tuple[str, ...], line: int, score_range) -> PairScoreRow:
    _require_nonempty(fields[0], "sentence1", line)
    _require_nonempty(fields[1], "sentence2", line)
    try:
        raw = float(fields[2])
    except ValueError:
        raise RowError(f"score {fields[2]!r} is not a number", line) from None
    try:
        score = normalize_score(raw, score_range)
    except ScoreRangeError as exc:
        raise RowError(str(exc), line) from None
    return PairScoreRow(fields[0], fields[1], score)


_BUILDERS = {
    "pair": _build_pair,
    "triplet": _build_triplet,
    "pair-class": _build_pair_class,
    "pair-score": _build_pair_score,
    "sts": _build_pair_score,
}


def _check_header(header: list[str], schema: str) -> None:
    expected = SCHEMAS[schema]
    got = tuple(h.strip() for h in header)
    if got == expected:
        return
    for column in expected:
        if column not in got:
            raise SchemaError(f"missing column {column!r} for schema {schema!r} "
                              f"(header was {','.join(got)!r})")
    for column in got:
        if column not in expected:
            raise SchemaError(f"unexpected column {column!r} for schema {schema!r}")
    raise SchemaError(f"columns out of order for schema {schema!r}: "
                      f"expected {','.join(expected)!r}, got {','.join(got)!r}")


def parse_csv(path, schema: str, lenient: bool = False,
              score_range=DEFAULT_SCORE_RANGE) -> ParseResult:
    """Parse a CSV file into typed rows.

    Strict mode raises on the first bad row; lenient mode collects bad rows
    into the quarantine list and keeps going. Header and encoding problems
    are always fatal.
    """
    if schema not in SCHEMAS:
        raise ConfigError(f"unknown schema {schema!r}; expected one of "
                          f"{sorted(SCHEMAS)}")
    with open(path, "rb") as fh:
        blob = fh.read()
    try:
        text = blob.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DecodeError(f"invalid UTF-8: {exc.reason}", exc.start) from None
    if text.startswith("﻿"):
        text = text[1:]

    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty file: missing header row") from None
    _check_header(header, schema)

    build = _BUILDERS[schema]
    n_columns = len(SCHEMAS[schema])
    rows: list = []
    quarantined: list[QuarantinedRow] = []
    for record in reader:
        line = reader.line_num
        if not record:
            continue   # blank line
        try:
            if len(record) != n_columns:
                raise RowError(f"expected {n_columns} fields, got {len(record)}", line)
            rows.append(build(tuple(record), line, score_range))
        except RowError as exc:
            if not lenient:
                raise
            quarantined.append(QuarantinedRow(exc.line, str(exc), tuple(record)))
    return ParseResult(rows, quarantined, str(path), schema)


def _row_fields(row) -> tuple[str, ...]:
    if isinstance(row, PairRow):
        return (row.anchor, row.positive)
    if isinstance(row, TripletRow):
        return (row.anchor, row.positive, row.negative)
    if isinstance(row, PairClassRow):
        return (row.premise, row.hypothesis, str(row.label))
    if isinstance(row, PairScoreRow):
        return (row.sentence1, row.sentence2, repr(row.score))
    raise ConfigError(f"unsupported row type {type(row).__name__}")


def write_csv(path, rows, schema: str) -> None:
    """Serialize rows to CSV. Scores are written in their normalized [0, 1]
    form with full float precision; reading such a file back therefore needs
    score_range=(0, 1)."""
    if schema not in SCHEMAS:
        raise ConfigError(f"unknown schema {schema!r}; expected one of "
                          f"{sorted(SCHEMAS)}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SCHEMAS[schema])
        for row in rows:
            writer.writerow(_row_fields(row))


def rows_checksum(rows) -> str:
    """Order-sensitive content hash used as split provenance."""
    h = hashlib.blake2b(digest_size=16)
    for row in rows:
        for value in _row_fields(row):
            h.update(value.encode("utf-8"))
            h.update(b"\x1f")
        h.update(b"\x1e")
    return h.hexdigest()


@dataclass
class DatasetSplit:
    train: list
    validation: list
    test: list
    source: str = ""
    checksum: str = ""

    @property
    def counts(self) -> dict[str, int]:
        return {"train": len(self.train), "validation": len(self.validation),
                "test": len(self.test)}

    @property
    def total(self) -> int:
        return len(self.train) + len(self.validation) + len(self.test)


@dataclass(frozen=True)
class CountCheck:
    split: str
    actual: int
    expected: int | None
    tolerance: int
    ok: bool


@dataclass
class CountReport:
    checks: list[CountCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def validate_counts(split: DatasetSplit, expected: dict | None = None) -> CountReport:
    """Compare split sizes against expectations. Expected values are either
    exact counts or (count, tolerance) pairs. Report-only: never raises on
    mismatch."""
    expected = expected or {}
    checks = []
    for name, actual in split.counts.items():
        if name in expected:
            want = expected[name]
            count, tol = (want if isinstance(want, (tuple, list)) else (want, 0))
            checks.append(CountCheck(name, actual, int(count), int(tol),
                                     abs(actual - int(count)) <= int(tol)))
        else:
            checks.append(CountCheck(name, actual, None, 0, True))
    return CountReport(checks)


def _split_sizes(n: int, fractions) -> list[int]:
    # largest-remainder apportionment so sizes always sum to n
    exact = [f * n for f in fractions]
    sizes = [int(math.floor(e)) for e in exact]
    short = n - sum(sizes)
    remainders = sorted(range(len(fractions)), key=lambda i: (-(exact[i] - sizes[i]), i))
    for i in remainders[:short]:
        sizes[i] += 1
    return sizes


def deterministic_split(rows, fractions=(0.8, 0.1, 0.1), seed: int = 0,
                        source: str = "") -> DatasetSplit:
    """Seeded permutation split into train/validation/test. Same rows,
    fractions, and seed always produce the identical assignment."""
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3:
        raise ConfigError(f"need 3 fractions (train, validation, test), "
                          f"got {len(fractions)}")
    if any(f <= 0 for f in fractions):
        raise ConfigError(f"fractions must be positive, got {fractions}")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ConfigError(f"fractions must sum to 1, got sum {sum(fractions)!r}")
    rows = list(rows)
    order = np.random.default_rng(seed).permutation(len(rows))
    n_train, n_val, _ = _split_sizes(len(rows), fractions)
    train = [rows[i] for i in order[:n_train]]
    val = [rows[i] for i in order[n_train:n_train + n_val]]
    test = [rows[i] for i in order[n_train + n_val:]]
    return DatasetSplit(train, val, test, source=source, checksum=rows_checksum(rows))


def _cluster_vocabularies(n_clusters: int, rng) -> list[list[str]]:
    """One small word bank per cluster, built over per-cluster letter sets.
    Letter sets are disjoint while letters last (28 / 3 = 9 clusters), which
    keeps character n-gram overlap across clusters near zero."""
    letters = list(_ARABIC_LETTERS)
    per = 3
    banks = []
    pool = letters.copy()
    for _ in range(n_clusters):
        if len(pool) < per:
            pool = letters.copy()
            rng.shuffle(pool)
        chosen = [pool.pop() for _ in range(per)]
        words = []
        seen = set()
        while len(words) < 12:
            length = int(rng.integers(3, 6))
            word = "".join(rng.choice(chosen) for _ in range(length))
            if word not in seen:
                seen.add(word)
                words.append(word)
        banks.append(words)
    return banks


def _sentence(bank: list[str], rng, n_words: int) -> str:
    return " ".join(bank[int(i)] for i in rng.integers(0, len(bank), size=n_words))


def make_synthetic_triplets(n_clusters: int, per_cluster: int,
                            seed: int = 0) -> list[TripletRow]:
    """Deterministic templated triplets: anchor and positive share a cluster
    vocabulary, the negative comes from a different cluster. Output size is
    n_clusters * per_cluster."""
    if n_clusters < 2:
        raise ConfigError(f"n_clusters must be >= 2, got {n_clusters}")
    if per_cluster < 2:
        raise ConfigError(f"per_cluster must be >= 2, got {per_cluster}")
    rng = np.random.default_rng(seed)
    py_rng = _NumpyShuffleAdapter(rng)
    banks = _cluster_vocabularies(n_clusters, py_rng)
    triplets = []
    for c in range(n_clusters):
        for _ in range(per_cluster):
            other = (c + 1 + int(rng.integers(0, n_clusters - 1))) % n_clusters
            anchor = _sentence(banks[c], rng, int(rng.integers(4, 8)))
            positive = _sentence(banks[c], rng, int(rng.integers(4, 8)))
            negative = _sentence(banks[other], rng, int(rng.integers(4, 8)))
            while normalize_arabic(positive).value == normalize_arabic(negative).value:
                negative = _sentence(banks[other], rng, int(rng.integers(4, 8)))
            triplets.append(TripletRow(anchor, positive, negative))
    return triplets


def make_synthetic_scored_pairs(n_clusters: int, n_pairs: int,
                                seed: int = 0) -> list[PairScoreRow]:
    """Deterministic scored pairs: sentence2 keeps a controlled fraction of
    sentence1's words and fills the rest from another cluster; the kept
    fraction is the gold score. Scores sweep [0, 1], so the gold series is
    never constant for n_pairs >= 2."""
    if n_clusters < 2:
        raise ConfigError(f"n_clusters must be >= 2, got {n_clusters}")
    if n_pairs < 1:
        raise ConfigError(f"n_pairs must be >= 1, got {n_pairs}")
    rng = np.random.default_rng(seed)
    py_rng = _NumpyShuffleAdapter(rng)
    banks = _cluster_vocabularies(n_clusters, py_rng)
    n_words = 5
    pairs = []
    for i in range(n_pairs):
        c = int(rng.integers(0, n_clusters))
        other = (c + 1 + int(rng.integers(0, n_clusters - 1))) % n_clusters
        words1 = [banks[c][int(j)] for j in rng.integers(0, len(banks[c]), size=n_words)]
        keep = i % (n_words + 1)
        kept_idx = sorted(rng.choice(n_words, size=keep, replace=False).tolist())
        words2 = [words1[j] for j in kept_idx]
        words2 += [banks[other][int(j)]
                   for j in rng.integers(0, len(banks[other]), size=n_words - keep)]
        pairs.append(PairScoreRow(" ".join(words1), " ".join(words2),
                                  keep / n_words))
    return pairs


def make_synthetic_sentences(n_clusters: int, n_sentences: int,
                             seed: int = 0) -> list[str]:
    """Deterministic standalone sentences cycling through the cluster
    vocabularies; used to build document corpora and query sets."""
    if n_clusters < 2:
        raise ConfigError(f"n_clusters must be >= 2, got {n_clusters}")
    if n_sentences < 1:
        raise ConfigError(f"n_sentences must be >= 1, got {n_sentences}")
    rng = np.random.default_rng(seed)
    banks = _cluster_vocabularies(n_clusters, _NumpyShuffleAdapter(rng))
    return [_sentence(banks[i % n_clusters], rng, int(rng.integers(4, 8)))
            for i in range(n_sentences)]


class _NumpyShuffleAdapter:
    """Just enough of the random.Random surface for vocabulary building,
    backed by the one seeded generator so all synthesis shares a stream."""

    def __init__(self, rng):
        self._rng = rng

    def shuffle(self, seq: list) -> None:
        self._rng.shuffle(seq)

    def integers(self, lo, hi):
        return self._rng.integers(lo, hi)

    def choice(self, seq):
        return seq[int(self._rng.integers(0, len(seq)))]
