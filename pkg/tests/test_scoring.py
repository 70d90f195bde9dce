import io
import math

import numpy as np
import pytest

from lscd.scoring import (
    ChangeScoreTable,
    ensemble,
    rank,
    read_scores_tsv,
    write_scores_tsv,
    write_wide_tsv,
)


def table(method_id="M", **scores):
    return ChangeScoreTable(method_id=method_id, scores=dict(scores))


class TestRank:
    def test_descending_order(self):
        assert rank(table(a=0.9, b=0.1)) == ["a", "b"]

    def test_tie_broken_lexicographically(self):
        assert rank(table(b=0.5, a=0.5)) == ["a", "b"]

    def test_three_way(self):
        assert rank(table(x=0.2, y=0.8, z=0.5)) == ["y", "z", "x"]

    def test_missing_scores_excluded(self):
        assert rank(table(a=0.3, b=None)) == ["a"]

    def test_all_missing_rejected(self):
        with pytest.raises(ValueError, match="no scores"):
            rank(table(a=None))


class TestEnsemble:
    def test_geometric_mean(self):
        combined = ensemble(table("A", w=0.4), table("B", w=0.9))
        assert combined.scores["w"] == pytest.approx(0.6, abs=1e-15)
        assert combined.method_id == "A-B"

    def test_zero_absorbs(self):
        combined = ensemble(table("A", w=0.0), table("B", w=0.7))
        assert combined.scores["w"] == 0.0

    def test_missing_lemma_propagates(self, caplog):
        with caplog.at_level("WARNING", logger="lscd"):
            combined = ensemble(table("A", w=0.4, v=0.2), table("B", w=0.9))
        assert combined.scores["v"] is None
        assert "v" not in rank(combined)
        assert any("dropped" in r.message for r in caplog.records)

    def test_none_score_propagates(self):
        combined = ensemble(table("A", w=None), table("B", w=0.9))
        assert combined.scores["w"] is None

    def test_negative_score_names_method_and_lemma(self):
        with pytest.raises(ValueError, match=r"B.*'w'"):
            ensemble(table("A", w=0.4), table("B", w=-0.1))

    def test_symmetric_up_to_method_id(self):
        a = table("A", x=0.1, y=0.7, z=0.4)
        b = table("B", x=0.9, y=0.2, z=0.4)
        forward = ensemble(a, b)
        backward = ensemble(b, a)
        assert forward.scores == backward.scores
        assert forward.method_id == "A-B"
        assert backward.method_id == "B-A"

    def test_monotonicity(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            a1, a2 = sorted(rng.uniform(0, 1, 2))
            b1, b2 = sorted(rng.uniform(0, 1, 2))
            combined = ensemble(table("A", l1=a2, l2=a1), table("B", l1=b2, l2=b1))
            assert combined.scores["l1"] >= combined.scores["l2"]

    def test_ranking_invariant_under_positive_rescaling(self):
        rng = np.random.default_rng(22)
        for _ in range(100):
            lemmas = [f"w{i}" for i in range(8)]
            a_scores = dict(zip(lemmas, rng.uniform(0, 1, 8)))
            b_scores = dict(zip(lemmas, rng.uniform(0, 1, 8)))
            scale = rng.uniform(0.01, 100.0)
            baseline = rank(ensemble(table("A", **a_scores), table("B", **b_scores)))
            rescaled_a = {k: scale * v for k, v in a_scores.items()}
            rescaled = rank(ensemble(table("A", **rescaled_a), table("B", **b_scores)))
            assert rescaled == baseline


class TestTsv:
    def test_write_read_roundtrip_with_missing(self):
        original = table("PRT", tree=0.25, plane=0.8, gas=None)
        buffer = io.StringIO()
        write_scores_tsv(buffer, original)
        again = read_scores_tsv(io.StringIO(buffer.getvalue()), method_id="PRT")
        assert again.scores == original.scores

    def test_rank_column_and_na_rows(self):
        buffer = io.StringIO()
        write_scores_tsv(buffer, table("M", b=0.1, a=0.9, c=None))
        lines = buffer.getvalue().splitlines()
        assert lines[0] == "a\t0.9\t1"
        assert lines[1] == "b\t0.1\t2"
        assert lines[2] == "c\tNA\tNA"

    def test_method_id_from_file_stem(self, tmp_path):
        path = tmp_path / "MORPHSYNT.tsv"
        write_scores_tsv(path, table("MORPHSYNT", a=1.0))
        assert read_scores_tsv(path).method_id == "MORPHSYNT"

    def test_duplicate_lemma_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            read_scores_tsv(io.StringIO("a\t0.5\na\t0.7\n"), method_id="M")

    def test_full_precision_roundtrip(self):
        value = 1.0 - 1.0 / math.sqrt(2.0)
        buffer = io.StringIO()
        write_scores_tsv(buffer, table("M", w=value))
        again = read_scores_tsv(io.StringIO(buffer.getvalue()), method_id="M")
        assert again.scores["w"] == value

    def test_numpy_scalar_scores_serialize_as_plain_floats(self):
        buffer = io.StringIO()
        write_scores_tsv(buffer, table("M", w=np.float64(0.625)))
        assert buffer.getvalue() == "w\t0.625\t1\n"
        wide = io.StringIO()
        write_wide_tsv(wide, [table("M", w=np.float64(0.625))])
        assert "np.float64" not in wide.getvalue()

    def test_wide_table(self):
        buffer = io.StringIO()
        write_wide_tsv(buffer, [table("A", x=0.5, y=0.1), table("B", x=0.25)])
        lines = buffer.getvalue().splitlines()
        assert lines[0] == "lemma\tA\tB"
        assert lines[1] == "x\t0.5\t0.25"
        assert lines[2] == "y\t0.1\tNA"
