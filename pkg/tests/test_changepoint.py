import io

import numpy as np
import pytest

from lscd.changepoint import (
    BinaryLabels,
    binarize,
    detect_change_point,
    read_labels_tsv,
    write_labels_tsv,
)
from lscd.scoring import ChangeScoreTable


def exhaustive_sse_argmin(scores):
    def sse(segment):
        mean = sum(segment) / len(segment)
        return sum((value - mean) ** 2 for value in segment)

    costs = {
        n: sse(scores[:n]) + sse(scores[n:]) for n in range(1, len(scores))
    }
    return min(costs, key=lambda n: (costs[n], n))


class TestDetectChangePoint:
    def test_clear_gap_after_three(self):
        assert detect_change_point([10, 9.5, 9, 1, 0.9, 0.8]) == 3

    def test_constant_sequence_tie_breaks_to_one(self):
        assert detect_change_point([5, 5, 5, 5]) == 1

    def test_two_elements(self):
        assert detect_change_point([1, 0]) == 1

    def test_too_short_rejected(self):
        with pytest.raises(ValueError, match="at least two"):
            detect_change_point([1.0])

    def test_unsorted_rejected(self):
        with pytest.raises(ValueError, match="descending"):
            detect_change_point([1.0, 2.0, 0.5])

    def test_matches_exhaustive_oracle_on_random_sequences(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            length = rng.integers(2, 40)
            scores = np.sort(rng.normal(size=length))[::-1]
            assert detect_change_point(scores) == exhaustive_sse_argmin(list(scores))

    def test_affine_invariance(self):
        rng = np.random.default_rng(32)
        for _ in range(100):
            length = rng.integers(2, 30)
            scores = np.sort(rng.uniform(0, 10, size=length))[::-1]
            baseline = detect_change_point(scores)
            a = rng.uniform(0.1, 5.0)
            b = rng.uniform(-20.0, 20.0)
            assert detect_change_point(a * scores + b) == baseline

    def test_result_always_leaves_both_classes_nonempty(self):
        rng = np.random.default_rng(33)
        for _ in range(50):
            length = int(rng.integers(2, 25))
            scores = np.sort(rng.normal(size=length))[::-1]
            n = detect_change_point(scores)
            assert 1 <= n <= length - 1


class TestBinarize:
    def test_six_score_fixture_labels_top_three(self):
        scores = dict(zip("abcdef", [10, 9.5, 9, 1, 0.9, 0.8]))
        labels = binarize(ChangeScoreTable("M", scores))
        assert labels.change_point_n == 3
        assert [labels.labels[l] for l in "abcdef"] == [1, 1, 1, 0, 0, 0]

    def test_two_word_table_labels_exactly_one(self):
        labels = binarize(ChangeScoreTable("M", {"a": 1.0, "b": 0.0}))
        assert sum(labels.labels.values()) == 1
        assert labels.labels["a"] == 1

    def test_single_word_table_rejected(self):
        with pytest.raises(ValueError):
            binarize(ChangeScoreTable("M", {"a": 1.0}))

    def test_label_monotone_in_rank(self):
        rng = np.random.default_rng(34)
        scores = {f"w{i}": float(v) for i, v in enumerate(rng.uniform(0, 1, 12))}
        table = ChangeScoreTable("M", scores)
        labels = binarize(table)
        ranking = table.ranking
        values = [labels.labels[lemma] for lemma in ranking]
        assert values == sorted(values, reverse=True)

    def test_missing_scores_excluded_from_labels(self):
        labels = binarize(ChangeScoreTable("M", {"a": 1.0, "b": 0.0, "c": None}))
        assert "c" not in labels.labels


class TestLabelsTsv:
    def test_roundtrip(self, tmp_path):
        labels = BinaryLabels({"b": 0, "a": 1}, change_point_n=1, method_id="M")
        path = tmp_path / "M.tsv"
        write_labels_tsv(path, labels)
        again = read_labels_tsv(path)
        assert again.labels == labels.labels
        assert again.method_id == "M"

    def test_bad_label_rejected(self):
        with pytest.raises(ValueError):
            read_labels_tsv(io.StringIO("a\t2\n"), method_id="M")
