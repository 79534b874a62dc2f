"""CSV parsing, score normalization, splits, and synthetic data builders."""

import math

import numpy as np
import pytest

from nestembed.datasetio import (DatasetSplit, PairClassRow, PairRow,
                                 PairScoreRow, TripletRow, deterministic_split,
                                 make_synthetic_scored_pairs,
                                 make_synthetic_sentences,
                                 make_synthetic_triplets, normalize_score,
                                 parse_csv, rows_checksum, validate_counts,
                                 write_csv)
from nestembed.errors import (ConfigError, DecodeError, RowError, SchemaError,
                              ScoreRangeError)


class TestNormalizeScore:
    def test_affine_map(self):
        assert normalize_score(2.6, (0, 5)) == pytest.approx(0.52, abs=1e-12)
        assert normalize_score(0.0, (0, 5)) == 0.0
        assert normalize_score(5.0, (0, 5)) == 1.0
        assert normalize_score(0.0, (-1, 1)) == 0.5

    def test_output_always_in_unit_interval(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            lo, width = rng.normal(), abs(rng.normal()) + 0.1
            raw = lo + width * rng.random()
            s = normalize_score(raw, (lo, lo + width))
            assert 0.0 <= s <= 1.0

    def test_out_of_range_raises(self):
        with pytest.raises(ScoreRangeError):
            normalize_score(5.1, (0, 5))
        with pytest.raises(ScoreRangeError):
            normalize_score(-0.1, (0, 5))
        with pytest.raises(ScoreRangeError):
            normalize_score(float("nan"), (0, 5))

    def test_degenerate_range_rejected(self):
        with pytest.raises(ConfigError):
            normalize_score(1.0, (5, 5))
        with pytest.raises(ConfigError):
            normalize_score(1.0, (5, 0))


def write_text(path, text):
    path.write_bytes(text.encode("utf-8"))
    return path


class TestParseCsv:
    def test_triplet_roundtrip(self, tmp_path):
        p = write_text(tmp_path / "t.csv",
                       "anchor,positive,negative\nكتب,كاتب,شمس\nقمر,قمري,بحر\n")
        result = parse_csv(p, "triplet")
        assert result.rows == [TripletRow("كتب", "كاتب", "شمس"),
                               TripletRow("قمر", "قمري", "بحر")]
        assert result.quarantined == []
        assert result.schema == "triplet"

    def test_quoted_fields_with_commas(self, tmp_path):
        p = write_text(tmp_path / "t.csv",
                       'anchor,positive\n"كتب, كاتب",قمر\n')
        result = parse_csv(p, "pair")
        assert result.rows == [PairRow("كتب, كاتب", "قمر")]

    def test_blank_lines_skipped(self, tmp_path):
        p = write_text(tmp_path / "t.csv", "anchor,positive\nكتب,قمر\n\n\nشمس,بحر\n")
        assert len(parse_csv(p, "pair").rows) == 2

    def test_bom_stripped(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_bytes("﻿anchor,positive\nكتب,قمر\n".encode("utf-8"))
        assert len(parse_csv(p, "pair").rows) == 1

    def test_missing_header_column(self, tmp_path):
        p = write_text(tmp_path / "t.csv", "anchor\nكتب\n")
        with pytest.raises(SchemaError, match="missing column 'positive'"):
            parse_csv(p, "pair")

    def test_unexpected_header_column(self, tmp_path):
        p = write_text(tmp_path / "t.csv", "anchor,positive,extra\nكتب,قمر,x\n")
        with pytest.raises(SchemaError, match="unexpected column 'extra'"):
            parse_csv(p, "pair")

    def test_out_of_order_header(self, tmp_path):
        p = write_text(tmp_path / "t.csv", "positive,anchor\nكتب,قمر\n")
        with pytest.raises(SchemaError, match="out of order"):
            parse_csv(p, "pair")

    def test_empty_file(self, tmp_path):
        p = write_text(tmp_path / "t.csv", "")
        with pytest.raises(SchemaError, match="empty file"):
            parse_csv(p, "pair")

    def test_invalid_utf8_reports_offset(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_bytes(b"anchor,positive\n\xff\xfe,x\n")
        with pytest.raises(DecodeError) as exc:
            parse_csv(p, "pair")
        assert exc.value.offset == 16

    def test_field_count_mismatch_names_line(self, tmp_path):
        p = write_text(tmp_path / "t.csv", "anchor,positive\nكتب,قمر\nشمس\n")
        with pytest.raises(RowError) as exc:
            parse_csv(p, "pair")
        assert exc.value.line == 3

    def test_field_empty_after_normalization(self, tmp_path):
        # a lone diacritic strips to the empty string
        p = write_text(tmp_path / "t.csv", "anchor,positive\nً,قمر\n")
        with pytest.raises(RowError, match="empty after normalization"):
            parse_csv(p, "pair")

    def test_triplet_negative_equals_positive(self, tmp_path):
        # differ only by a diacritic, so they collide after normalization
        p = write_text(tmp_path / "t.csv",
                       "anchor,positive,negative\nكتب,قمر,قمرَ\n")
        with pytest.raises(RowError, match="negative equals positive"):
            parse_csv(p, "triplet")

    def test_pair_class_labels(self, tmp_path):
        p = write_text(tmp_path / "t.csv",
                       "premise,hypothesis,label\nكتب,قمر,2\n")
        assert parse_csv(p, "pair-class").rows == [PairClassRow("كتب", "قمر", 2)]
        bad_int = write_text(tmp_path / "b1.csv",
                             "premise,hypothesis,label\nكتب,قمر,x\n")
        with pytest.raises(RowError, match="not an integer"):
            parse_csv(bad_int, "pair-class")
        bad_range = write_text(tmp_path / "b2.csv",
                               "premise,hypothesis,label\nكتب,قمر,3\n")
        with pytest.raises(RowError, match="out of range"):
            parse_csv(bad_range, "pair-class")

    def test_pair_score_normalizes(self, tmp_path):
        p = write_text(tmp_path / "t.csv",
                       "sentence1,sentence2,score\nكتب,قمر,2.6\n")
        rows = parse_csv(p, "pair-score").rows
        assert rows[0].score == pytest.approx(0.52, abs=1e-12)

    def test_sts_alias(self, tmp_path):
        p = write_text(tmp_path / "t.csv",
                       "sentence1,sentence2,score\nكتب,قمر,5\n")
        assert parse_csv(p, "sts").rows[0].score == 1.0

    def test_pair_score_bad_values(self, tmp_path):
        non_num = write_text(tmp_path / "b1.csv",
                             "sentence1,sentence2,score\nكتب,قمر,x\n")
        with pytest.raises(RowError, match="not a number"):
            parse_csv(non_num, "pair-score")
        outside = write_text(tmp_path / "b2.csv",
                             "sentence1,sentence2,score\nكتب,قمر,9\n")
        with pytest.raises(RowError) as exc:
            parse_csv(outside, "pair-score")
        assert exc.value.line == 2

    def test_unknown_schema(self, tmp_path):
        p = write_text(tmp_path / "t.csv", "a,b\nx,y\n")
        with pytest.raises(ConfigError, match="unknown schema"):
            parse_csv(p, "matrix")

    def test_lenient_quarantines_bad_rows(self, tmp_path):
        p = write_text(tmp_path / "t.csv",
                       "sentence1,sentence2,score\n"
                       "كتب,قمر,1.0\n"
                       "كتب,قمر,oops\n"
                       "كتب,قمر\n"
                       "شمس,بحر,4.5\n")
        result = parse_csv(p, "pair-score", lenient=True)
        assert len(result.rows) == 2
        assert [q.line for q in result.quarantined] == [3, 4]
        assert "not a number" in result.quarantined[0].message

    def test_lenient_does_not_swallow_header_errors(self, tmp_path):
        p = write_text(tmp_path / "t.csv", "wrong,header\nx,y\n")
        with pytest.raises(SchemaError):
            parse_csv(p, "pair", lenient=True)


class TestWriteCsv:
    def test_triplet_roundtrip(self, tmp_path):
        rows = make_synthetic_triplets(3, 4, seed=42)
        p = tmp_path / "out.csv"
        write_csv(p, rows, "triplet")
        assert parse_csv(p, "triplet").rows == rows

    def test_score_roundtrip_needs_unit_range(self, tmp_path):
        """Scores are persisted normalized, so reading back uses range (0, 1)."""
        rows = make_synthetic_scored_pairs(3, 12, seed=42)
        p = tmp_path / "out.csv"
        write_csv(p, rows, "pair-score")
        back = parse_csv(p, "pair-score", score_range=(0.0, 1.0)).rows
        assert back == rows   # repr round-trips floats exactly

    def test_unknown_schema(self, tmp_path):
        with pytest.raises(ConfigError):
            write_csv(tmp_path / "out.csv", [], "matrix")


class TestRowsChecksum:
    def test_stable_and_order_sensitive(self):
        rows = make_synthetic_triplets(3, 3, seed=42)
        assert rows_checksum(rows) == rows_checksum(list(rows))
        assert rows_checksum(rows) != rows_checksum(rows[::-1])
        assert len(rows_checksum(rows)) == 32

    def test_content_sensitive(self):
        a = [PairRow("كتب", "قمر")]
        b = [PairRow("كتب", "قمري")]
        assert rows_checksum(a) != rows_checksum(b)


class TestDeterministicSplit:
    def test_reproducible(self):
        rows = make_synthetic_triplets(4, 10, seed=42)
        s1 = deterministic_split(rows, seed=7)
        s2 = deterministic_split(rows, seed=7)
        assert s1.train == s2.train and s1.test == s2.test

    def test_seed_changes_assignment(self):
        rows = make_synthetic_triplets(4, 10, seed=42)
        assert (deterministic_split(rows, seed=1).train
                != deterministic_split(rows, seed=2).train)

    def test_partition_preserves_rows(self):
        rows = make_synthetic_triplets(4, 10, seed=42)
        s = deterministic_split(rows, seed=0)
        assert sorted(map(repr, s.train + s.validation + s.test)) == \
            sorted(map(repr, rows))

    def test_largest_remainder_sizes(self):
        rows = make_synthetic_triplets(2, 5, seed=42)   # 10 rows
        s = deterministic_split(rows, (0.8, 0.1, 0.1), seed=0)
        assert s.counts == {"train": 8, "validation": 1, "test": 1}
        s = deterministic_split(rows[:5], (1 / 3, 1 / 3, 1 / 3), seed=0)
        assert s.counts == {"train": 2, "validation": 2, "test": 1}

    def test_fraction_validation(self):
        rows = make_synthetic_triplets(2, 2, seed=42)
        with pytest.raises(ConfigError):
            deterministic_split(rows, (0.5, 0.5))
        with pytest.raises(ConfigError):
            deterministic_split(rows, (0.8, 0.3, 0.1))
        with pytest.raises(ConfigError):
            deterministic_split(rows, (1.0, 0.0, 0.0))

    def test_checksum_recorded(self):
        rows = make_synthetic_triplets(2, 2, seed=42)
        assert deterministic_split(rows, seed=0).checksum == rows_checksum(rows)


class TestValidateCounts:
    def test_exact_and_tolerant_expectations(self):
        split = DatasetSplit(train=[0] * 80, validation=[0] * 11, test=[0] * 9)
        report = validate_counts(split, {"train": 80, "validation": (10, 1),
                                         "test": (10, 1)})
        assert report.ok
        report = validate_counts(split, {"validation": 10})
        assert not report.ok
        failed = [c for c in report.checks if not c.ok]
        assert failed[0].split == "validation" and failed[0].actual == 11

    def test_unconstrained_splits_pass(self):
        split = DatasetSplit(train=[], validation=[], test=[])
        assert validate_counts(split).ok


class TestSyntheticBuilders:
    def test_triplets_deterministic(self):
        assert make_synthetic_triplets(4, 5, seed=9) == \
            make_synthetic_triplets(4, 5, seed=9)
        assert make_synthetic_triplets(4, 5, seed=9) != \
            make_synthetic_triplets(4, 5, seed=10)

    def test_triplets_shape_and_validity(self):
        rows = make_synthetic_triplets(8, 25, seed=42)
        assert len(rows) == 200
        for r in rows:
            assert r.anchor and r.positive and r.negative
            assert r.positive != r.negative

    def test_triplets_parameter_validation(self):
        with pytest.raises(ConfigError):
            make_synthetic_triplets(1, 5)
        with pytest.raises(ConfigError):
            make_synthetic_triplets(3, 1)

    def test_scored_pairs_sweep_the_unit_interval(self):
        rows = make_synthetic_scored_pairs(4, 30, seed=42)
        scores = {r.score for r in rows}
        assert scores == {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}
        assert all(0.0 <= r.score <= 1.0 for r in rows)

    def test_scored_pairs_word_overlap_matches_gold(self):
        for r in make_synthetic_scored_pairs(4, 24, seed=42):
            w1, w2 = r.sentence1.split(), r.sentence2.split()
            kept = sum(1 for w in w2 if w in set(w1))
            assert kept / len(w1) >= r.score   # gold counts deliberate copies

    def test_scored_pairs_deterministic(self):
        assert make_synthetic_scored_pairs(3, 10, seed=1) == \
            make_synthetic_scored_pairs(3, 10, seed=1)

    def test_sentences(self):
        sents = make_synthetic_sentences(5, 17, seed=42)
        assert len(sents) == 17
        assert all(isinstance(s, str) and s for s in sents)
        assert sents == make_synthetic_sentences(5, 17, seed=42)

    def test_sentence_parameter_validation(self):
        with pytest.raises(ConfigError):
            make_synthetic_sentences(1, 5)
        with pytest.raises(ConfigError):
            make_synthetic_scored_pairs(2, 0)
