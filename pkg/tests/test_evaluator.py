"""Correlation statistics and the dimension x metric evaluation grid."""

import math
import statistics

import numpy as np
import pytest
import scipy.stats

from nestembed.datasetio import PairScoreRow, make_synthetic_scored_pairs
from nestembed.errors import (DimensionError, UndefinedCorrelationError,
                              ZeroVectorError)
from nestembed.evaluator import (CSV_HEADER, CorrelationPair,
                                 CorrelationReport, ScoredPair,
                                 as_scored_pairs, average_ranks, evaluate,
                                 pearson, similarity_series, spearman)


class TestPearson:
    def test_perfect_correlation(self):
        assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0, abs=1e-15)
        assert pearson([1, 2, 3], [-2, -4, -6]) == pytest.approx(-1.0, abs=1e-15)

    def test_hand_value(self):
        assert pearson([1, 2, 3], [1, 3, 2]) == pytest.approx(0.5, abs=1e-15)

    def test_matches_stdlib_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            n = int(rng.integers(2, 40))
            x = rng.normal(size=n)
            y = rng.normal(size=n) + 0.3 * x
            if np.all(x == x[0]) or np.all(y == y[0]):
                continue
            expected = statistics.correlation(x.tolist(), y.tolist())
            assert pearson(x, y) == pytest.approx(expected, abs=1e-12)

    def test_always_clamped_to_unit_interval(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            x = rng.normal(size=5) * 10.0 ** int(rng.integers(-8, 8))
            assert -1.0 <= pearson(x, 2.0 * x + 1.0) <= 1.0

    def test_constant_series_rejected(self):
        with pytest.raises(UndefinedCorrelationError, match="constant"):
            pearson([1, 1, 1], [1, 2, 3])
        with pytest.raises(UndefinedCorrelationError, match="constant"):
            pearson([1, 2, 3], [7, 7, 7])

    def test_short_and_mismatched_series_rejected(self):
        with pytest.raises(UndefinedCorrelationError):
            pearson([1], [2])
        with pytest.raises(DimensionError):
            pearson([1, 2], [1, 2, 3])
        with pytest.raises(DimensionError):
            pearson([[1, 2]], [[1, 2]])


class TestAverageRanks:
    def test_no_ties(self):
        np.testing.assert_array_equal(average_ranks([30, 10, 20]), [3, 1, 2])

    def test_tie_run_shares_average(self):
        np.testing.assert_array_equal(average_ranks([10, 20, 20, 30]),
                                      [1, 2.5, 2.5, 4])
        np.testing.assert_array_equal(average_ranks([5, 5, 5]), [2, 2, 2])

    def test_against_quadratic_oracle(self):
        """Rank of x_i = (#strictly smaller) + (1 + #equal) / 2, counted with
        two plain loops."""
        rng = np.random.default_rng(42)
        for _ in range(50):
            x = rng.integers(0, 6, size=int(rng.integers(2, 30))).astype(float)
            got = average_ranks(x)
            for i, xi in enumerate(x):
                smaller = sum(1 for v in x if v < xi)
                equal = sum(1 for v in x if v == xi)
                assert got[i] == pytest.approx(smaller + (1 + equal) / 2)


class TestSpearman:
    def test_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(42)
        x = rng.normal(size=25)
        y = np.exp(x)
        assert spearman(x, y) == pytest.approx(1.0, abs=1e-12)

    def test_with_ties_matches_scipy(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            n = int(rng.integers(3, 40))
            x = rng.integers(0, 5, size=n).astype(float)
            y = rng.integers(0, 5, size=n).astype(float)
            if np.all(x == x[0]) or np.all(y == y[0]):
                continue
            expected = scipy.stats.spearmanr(x, y).statistic
            assert spearman(x, y) == pytest.approx(expected, abs=1e-12)

    def test_hand_value_with_tie(self):
        # ranks of xs are [1, 2.5, 2.5, 4]; pearson against [1, 2, 3, 4]
        assert spearman([1, 2, 2, 3], [1, 2, 3, 4]) == \
            pytest.approx(math.sqrt(0.9), abs=1e-12)

    def test_constant_series_rejected(self):
        with pytest.raises(UndefinedCorrelationError):
            spearman([4, 4, 4], [1, 2, 3])


class TestAsScoredPairs:
    def test_adapts_score_and_gold_fields(self):
        rows = [PairScoreRow("كتب", "قلم", 0.4)]
        assert as_scored_pairs(rows) == [ScoredPair("كتب", "قلم", 0.4)]
        already = [ScoredPair("a", "b", 0.7)]
        assert as_scored_pairs(already) == already


class TestSimilaritySeries:
    def test_identical_pair_has_unit_cosine(self, tiny_run):
        pairs = [ScoredPair("كتب قلم", "كتب قلم", 1.0),
                 ScoredPair("كتب", "قلم كتب", 0.5)]
        series = similarity_series(tiny_run.model, pairs, 64, "cosine")
        assert series[0] == pytest.approx(1.0, abs=1e-6)

    def test_distances_negated(self, tiny_run):
        pairs = [ScoredPair("كتب", "قلمقلم", 0.0)]
        for metric in ("euclidean", "manhattan"):
            series = similarity_series(tiny_run.model, pairs, 64, metric)
            assert series[0] < 0.0

    def test_dimension_must_be_ladder_entry(self, tiny_run):
        pairs = [ScoredPair("كتب", "قلم", 0.0)]
        with pytest.raises(DimensionError):
            similarity_series(tiny_run.model, pairs, 48, "cosine")

    def test_zero_vector_names_pair(self, tiny_run):
        pairs = [ScoredPair("كتب", "قلم", 0.0), ScoredPair("", "قلم", 0.0)]
        with pytest.raises(ZeroVectorError, match="pair 1"):
            similarity_series(tiny_run.model, pairs, 64, "cosine")


def hand_report():
    cell = lambda p, s: CorrelationPair(p, s)
    return CorrelationReport.from_cells({
        64: {"cosine": cell(0.9, 0.8), "manhattan": cell(0.5, 0.95),
             "euclidean": cell(0.6, 0.7), "dot": cell(0.2, 0.1)},
        16: {"cosine": cell(0.4, 0.3), "manhattan": cell(0.1, 0.2),
             "euclidean": cell(0.45, 0.35), "dot": cell(0.3, 0.4)},
    })


class TestCorrelationReport:
    def test_max_takes_elementwise_maximum_per_type(self):
        report = hand_report()
        assert report.cells[64]["max"] == CorrelationPair(0.9, 0.95)
        assert report.cells[16]["max"] == CorrelationPair(0.45, 0.4)

    def test_dimensions_sorted_descending(self):
        assert hand_report().dimensions == (64, 16)

    def test_csv_layout(self):
        text = hand_report().to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) == 3
        first = lines[1].split(",")
        assert first[0] == "64"
        assert len(first) == 11
        assert float(first[1]) == 0.9    # pearson_cosine
        assert float(first[10]) == 0.95  # spearman_max

    def test_json_dict_keys_are_strings(self):
        d = hand_report().to_json_dict()
        assert set(d) == {"64", "16"}
        assert d["64"]["max"] == {"pearson": 0.9, "spearman": 0.95}


class TestEvaluate:
    def test_grid_covers_ladder_and_metrics(self, tiny_run):
        pairs = as_scored_pairs(make_synthetic_scored_pairs(4, 40, seed=12))
        report = evaluate(tiny_run.model, pairs)
        assert report.dimensions == (64, 32, 16)
        for dim in report.dimensions:
            assert set(report.cells[dim]) == {"cosine", "manhattan",
                                              "euclidean", "dot", "max"}

    def test_trained_model_tracks_lexical_overlap(self, tiny_run):
        """Gold is the word-overlap fraction, so a model trained to separate
        the clusters must correlate positively through cosine."""
        pairs = as_scored_pairs(make_synthetic_scored_pairs(4, 60, seed=12))
        report = evaluate(tiny_run.model, pairs, ladder=(64,))
        assert report.cells[64]["cosine"].pearson > 0.3
        assert report.cells[64]["max"].spearman > 0.3

    def test_ladder_subset(self, tiny_run):
        pairs = as_scored_pairs(make_synthetic_scored_pairs(4, 10, seed=12))
        report = evaluate(tiny_run.model, pairs, ladder=(32,))
        assert report.dimensions == (32,)
        with pytest.raises(DimensionError):
            evaluate(tiny_run.model, pairs, ladder=(48,))

    def test_pairs_must_carry_gold(self, tiny_run):
        class Bare:
            sentence1 = "كتب"
            sentence2 = "قلم"
        with pytest.raises(DimensionError, match="gold or score"):
            evaluate(tiny_run.model, [Bare(), Bare()])
