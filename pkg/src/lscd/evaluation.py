"""Evaluation against gold annotations: Spearman correlation for the ranking
task, accuracy for the classification task, false positive/negative analysis,
and inter-method correlation matrices."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Mapping, Sequence, Union

import numpy as np
from scipy import stats as _scipy_stats

from .changepoint import BinaryLabels
from .scoring import MISSING, ChangeScoreTable

log = logging.getLogger(__name__)


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks of ``values`` (ascending); tied values share the mean of
    the ranks they span (fractional ranking)."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(
    pred: Mapping[str, float], gold: Mapping[str, float]
) -> tuple[float | None, float | None]:
    """Spearman rank correlation over the shared lemmas, with average ranks
    for ties; the p-value uses the t approximation with n-2 degrees of
    freedom. Returns (None, None) when a rank vector has zero variance."""
    shared = sorted(set(pred) & set(gold))
    n = len(shared)
    if n < 3:
        raise ValueError(f"need at least 3 shared lemmas, got {n}")
    ranks_pred = average_ranks([pred[lemma] for lemma in shared])
    ranks_gold = average_ranks([gold[lemma] for lemma in shared])
    dev_pred = ranks_pred - ranks_pred.mean()
    dev_gold = ranks_gold - ranks_gold.mean()
    var_pred = float(dev_pred @ dev_pred)
    var_gold = float(dev_gold @ dev_gold)
    if var_pred == 0.0 or var_gold == 0.0:
        log.warning("zero rank variance; correlation undefined")
        return None, None
    rho = float(dev_pred @ dev_gold / math.sqrt(var_pred * var_gold))
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) == 1.0:
        return rho, 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    p_value = 2.0 * float(_scipy_stats.t.sf(abs(t), df=n - 2))
    return rho, p_value


def accuracy(pred: Mapping[str, int], gold: Mapping[str, int]) -> float:
    """Fraction of shared lemmas whose binary labels match."""
    shared = set(pred) & set(gold)
    if not shared:
        raise ValueError("no shared lemmas between prediction and gold")
    correct = sum(1 for lemma in shared if pred[lemma] == gold[lemma])
    return correct / len(shared)


def fpfn_ranking(
    pred_ranking: Sequence[str],
    gold_ranking: Sequence[str],
    bin_fraction: float = 0.2,
) -> tuple[list[str], list[str]]:
    """False positives/negatives of a ranking: per lemma, the signed rank
    distance d = gold_rank - pred_rank (rank 1 = most changed, so d > 0 means
    the change was overestimated). The top ceil(bin_fraction * n) of the
    positive tail are false positives, the bottom ceil(bin_fraction * n) of
    the negative tail false negatives; d = 0 is never an error."""
    shared = set(pred_ranking) & set(gold_ranking)
    n = len(shared)
    if n < 5:
        raise ValueError(f"need at least 5 shared lemmas, got {n}")
    pred_rank = {
        lemma: position
        for position, lemma in enumerate(
            (l for l in pred_ranking if l in shared), start=1
        )
    }
    gold_rank = {
        lemma: position
        for position, lemma in enumerate(
            (l for l in gold_ranking if l in shared), start=1
        )
    }
    distance = {lemma: gold_rank[lemma] - pred_rank[lemma] for lemma in shared}
    bin_size = math.ceil(bin_fraction * n)
    positive = sorted(
        (lemma for lemma in shared if distance[lemma] > 0),
        key=lambda lemma: (-distance[lemma], lemma),
    )
    negative = sorted(
        (lemma for lemma in shared if distance[lemma] < 0),
        key=lambda lemma: (distance[lemma], lemma),
    )
    return positive[:bin_size], negative[:bin_size]


def fpfn_binary(
    pred: Mapping[str, int], gold: Mapping[str, int]
) -> tuple[list[str], list[str]]:
    """fp = predicted changed but gold stable; fn = predicted stable but gold
    changed; both over the shared lemma set."""
    shared = set(pred) & set(gold)
    fp = sorted(lemma for lemma in shared if pred[lemma] == 1 and gold[lemma] == 0)
    fn = sorted(lemma for lemma in shared if pred[lemma] == 0 and gold[lemma] == 1)
    return fp, fn


def method_correlation_matrix(
    tables: Sequence[ChangeScoreTable],
) -> tuple[list[str], np.ndarray]:
    """Pairwise Spearman correlations between method predictions over each
    pair's shared scored lemmas; cells with insufficient overlap are NaN."""
    if len(tables) < 2:
        raise ValueError("need at least two score tables")
    methods = [table.method_id for table in tables]
    matrix = np.eye(len(tables))
    for i in range(len(tables)):
        for j in range(i + 1, len(tables)):
            a = tables[i].present()
            b = tables[j].present()
            if len(set(a) & set(b)) < 3:
                log.warning(
                    "methods %s and %s share too few lemmas; correlation missing",
                    methods[i], methods[j],
                )
                matrix[i, j] = matrix[j, i] = np.nan
                continue
            rho, _ = spearman(a, b)
            matrix[i, j] = matrix[j, i] = np.nan if rho is None else rho
    return methods, matrix


def average_correlation_matrices(matrices: Sequence[np.ndarray]) -> np.ndarray:
    """Arithmetic mean of per-dataset correlation matrices (same method order)."""
    if not matrices:
        raise ValueError("no matrices given")
    stacked = np.stack([np.asarray(m, dtype=np.float64) for m in matrices])
    return stacked.mean(axis=0)


def write_matrix_tsv(
    dest: Union[str, Path, IO[str]], labels: Sequence[str], matrix: np.ndarray
) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8") as handle:
            write_matrix_tsv(handle, labels, matrix)
        return
    dest.write("method\t" + "\t".join(labels) + "\n")
    for label, row in zip(labels, np.asarray(matrix)):
        cells = [MISSING if np.isnan(value) else repr(float(value)) for value in row]
        dest.write(label + "\t" + "\t".join(cells) + "\n")


@dataclass
class EvaluationReport:
    """Task results for one method: Spearman for the ranking task when graded
    gold exists, accuracy for the classification task when binary gold
    exists, plus the false positive/negative lists."""

    method_id: str
    n_evaluated: int
    spearman: float | None = None
    p_value: float | None = None
    accuracy: float | None = None
    fp: list[str] = field(default_factory=list)
    fn: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "method_id": self.method_id,
            "n_evaluated": self.n_evaluated,
            "spearman": self.spearman,
            "p_value": self.p_value,
            "accuracy": self.accuracy,
            "fp": self.fp,
            "fn": self.fn,
        }


def evaluate_ranking(
    table: ChangeScoreTable,
    gold_graded: Mapping[str, float],
    bin_fraction: float = 0.2,
) -> EvaluationReport:
    pred = table.present()
    shared = set(pred) & set(gold_graded)
    rho, p_value = spearman(pred, gold_graded)
    report = EvaluationReport(
        method_id=table.method_id,
        n_evaluated=len(shared),
        spearman=rho,
        p_value=p_value,
    )
    if len(shared) >= 5:
        pred_ranking = sorted(shared, key=lambda l: (-pred[l], l))
        gold_ranking = sorted(shared, key=lambda l: (-gold_graded[l], l))
        report.fp, report.fn = fpfn_ranking(pred_ranking, gold_ranking, bin_fraction)
    return report


def evaluate_classification(
    labels: BinaryLabels, gold_binary: Mapping[str, int]
) -> EvaluationReport:
    shared = set(labels.labels) & set(gold_binary)
    score = accuracy(labels.labels, gold_binary)
    fp, fn = fpfn_binary(labels.labels, gold_binary)
    return EvaluationReport(
        method_id=labels.method_id,
        n_evaluated=len(shared),
        accuracy=score,
        fp=fp,
        fn=fn,
    )
