"""Per-method change score tables, geometric-mean ensembling, and rankings."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Sequence, Union

log = logging.getLogger(__name__)

MISSING = "NA"


@dataclass
class ChangeScoreTable:
    """Graded change scores per lemma for one method; a None score marks a
    lemma the method could not score (it is excluded from the ranking)."""

    method_id: str
    scores: dict[str, float | None] = field(default_factory=dict)

    def present(self) -> dict[str, float]:
        return {k: v for k, v in self.scores.items() if v is not None}

    def missing(self) -> list[str]:
        return sorted(k for k, v in self.scores.items() if v is None)

    @property
    def ranking(self) -> list[str]:
        return rank(self)


def rank(table: ChangeScoreTable) -> list[str]:
    """Lemmas ordered by descending score; ties broken by ascending
    lexicographic lemma order so rankings are deterministic."""
    present = table.present()
    if not present:
        raise ValueError(f"{table.method_id}: no scores to rank")
    return sorted(present, key=lambda lemma: (-present[lemma], lemma))


def ensemble(a: ChangeScoreTable, b: ChangeScoreTable) -> ChangeScoreTable:
    """Geometric mean sqrt(a * b) per lemma; a lemma missing (or unscored)
    in either input is missing in the output rather than imputed."""
    combined: dict[str, float | None] = {}
    dropped = []
    for lemma in sorted(set(a.scores) | set(b.scores)):
        score_a = a.scores.get(lemma)
        score_b = b.scores.get(lemma)
        if score_a is None or score_b is None:
            combined[lemma] = None
            dropped.append(lemma)
            continue
        for method, score in ((a.method_id, score_a), (b.method_id, score_b)):
            if score < 0:
                raise ValueError(
                    f"negative score {score} from {method} for {lemma!r}"
                )
        combined[lemma] = math.sqrt(score_a * score_b)
    if dropped:
        log.warning(
            "ensemble %s-%s: %d lemma(s) dropped for missing scores: %s",
            a.method_id, b.method_id, len(dropped), ", ".join(dropped),
        )
    return ChangeScoreTable(method_id=f"{a.method_id}-{b.method_id}", scores=combined)


def write_scores_tsv(dest: Union[str, Path, IO[str]], table: ChangeScoreTable) -> None:
    """Write `lemma<TAB>score<TAB>rank` rows, ranked lemmas first; unscored
    lemmas get NA in both columns."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8") as handle:
            write_scores_tsv(handle, table)
        return
    present = table.present()
    ranked = (
        sorted(present, key=lambda lemma: (-present[lemma], lemma)) if present else []
    )
    for position, lemma in enumerate(ranked, start=1):
        dest.write(f"{lemma}\t{float(present[lemma])!r}\t{position}\n")
    for lemma in table.missing():
        dest.write(f"{lemma}\t{MISSING}\t{MISSING}\n")


def read_scores_tsv(
    source: Union[str, Path, IO[str]], method_id: str | None = None
) -> ChangeScoreTable:
    """Read a score table; the method id defaults to the file stem."""
    if isinstance(source, (str, Path)):
        if method_id is None:
            method_id = Path(source).stem
        with open(source, encoding="utf-8") as handle:
            return read_scores_tsv(handle, method_id)
    if method_id is None:
        raise ValueError("method_id is required when reading from a stream")
    scores: dict[str, float | None] = {}
    for line_number, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        columns = line.split("\t")
        if len(columns) < 2:
            raise ValueError(f"line {line_number}: expected at least 2 columns")
        lemma, value = columns[0], columns[1]
        if lemma in scores:
            raise ValueError(f"line {line_number}: duplicate lemma {lemma!r}")
        scores[lemma] = None if value == MISSING else float(value)
    if not scores:
        raise ValueError("empty score table")
    return ChangeScoreTable(method_id=method_id, scores=scores)


def write_wide_tsv(
    dest: Union[str, Path, IO[str]], tables: Sequence[ChangeScoreTable]
) -> None:
    """Combined wide table: `lemma` column then one score column per method,
    NA where a method has no score for a lemma."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8") as handle:
            write_wide_tsv(handle, tables)
        return
    if not tables:
        raise ValueError("no tables given")
    lemmas = sorted(set().union(*(table.scores.keys() for table in tables)))
    dest.write("lemma\t" + "\t".join(table.method_id for table in tables) + "\n")
    for lemma in lemmas:
        cells = []
        for table in tables:
            value = table.scores.get(lemma)
            cells.append(MISSING if value is None else repr(float(value)))
        dest.write(lemma + "\t" + "\t".join(cells) + "\n")
