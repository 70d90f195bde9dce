"""Binarization of graded rankings: a single least-squares breakpoint in the
descending score sequence splits words into changed (top n) and stable."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence, Union

import numpy as np

from .scoring import ChangeScoreTable, rank


@dataclass
class BinaryLabels:
    """Binary change labels: exactly the top ``change_point_n`` ranked lemmas
    carry label 1."""

    labels: dict[str, int]
    change_point_n: int
    method_id: str


def detect_change_point(sorted_scores: Sequence[float]) -> int:
    """Split position n (1 <= n <= len-1) minimizing the summed within-segment
    squared deviation SSE(scores[:n]) + SSE(scores[n:]); ties go to the
    smallest n, biasing toward fewer "changed" labels.

    The input must already be sorted in descending order.
    """
    scores = np.asarray(sorted_scores, dtype=np.float64)
    if scores.ndim != 1 or scores.size < 2:
        raise ValueError("need at least two scores to place a change point")
    if (np.diff(scores) > 0).any():
        raise ValueError("scores must be sorted in descending order")

    # SSE(i..j) = sum(x^2) - (sum x)^2 / len via prefix sums.
    prefix = np.concatenate(([0.0], np.cumsum(scores)))
    prefix_sq = np.concatenate(([0.0], np.cumsum(scores**2)))

    def sse(start: int, stop: int) -> float:
        length = stop - start
        total = prefix[stop] - prefix[start]
        total_sq = prefix_sq[stop] - prefix_sq[start]
        return max(total_sq - total * total / length, 0.0)

    best_n = 1
    best_cost = sse(0, 1) + sse(1, scores.size)
    for n in range(2, scores.size):
        cost = sse(0, n) + sse(n, scores.size)
        if cost < best_cost:
            best_cost = cost
            best_n = n
    return best_n


def binarize(table: ChangeScoreTable) -> BinaryLabels:
    """Label the top n of the table's own ranking as changed (1), the rest
    stable (0), with n from :func:`detect_change_point`."""
    ranking = rank(table)
    scores = [table.scores[lemma] for lemma in ranking]
    n = detect_change_point(scores)
    labels = {lemma: (1 if position < n else 0) for position, lemma in enumerate(ranking)}
    return BinaryLabels(labels=labels, change_point_n=n, method_id=table.method_id)


def write_labels_tsv(dest: Union[str, Path, IO[str]], labels: BinaryLabels) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8") as handle:
            write_labels_tsv(handle, labels)
        return
    for lemma in sorted(labels.labels):
        dest.write(f"{lemma}\t{labels.labels[lemma]}\n")


def read_labels_tsv(
    source: Union[str, Path, IO[str]], method_id: str | None = None
) -> BinaryLabels:
    if isinstance(source, (str, Path)):
        if method_id is None:
            method_id = Path(source).stem
        with open(source, encoding="utf-8") as handle:
            return read_labels_tsv(handle, method_id)
    labels: dict[str, int] = {}
    for line_number, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        columns = line.split("\t")
        if len(columns) != 2 or columns[1] not in ("0", "1"):
            raise ValueError(f"line {line_number}: expected `lemma<TAB>0|1`")
        labels[columns[0]] = int(columns[1])
    if not labels:
        raise ValueError("empty label table")
    return BinaryLabels(
        labels=labels,
        change_point_n=sum(labels.values()),
        method_id=method_id or "labels",
    )
