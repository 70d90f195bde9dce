"""Minimal CoNLL-U reading: just enough to locate target occurrences.

This package is coupled to the scoring core only through file formats, so it
carries its own small reader rather than importing one.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

N_COLUMNS = 10


@dataclass(frozen=True)
class Word:
    form: str
    lemma: str
    upos: str


Sentence = list[Word]


def read_conllu(path: str | Path) -> Iterator[Sentence]:
    """Yield sentences of (form, lemma, upos) words; multiword-token ranges
    and empty nodes are skipped."""
    words: Sentence = []
    with open(path, encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                if words:
                    yield words
                    words = []
                continue
            if line.startswith("#"):
                continue
            columns = line.split("\t")
            if len(columns) != N_COLUMNS:
                raise ValueError(
                    f"{path}: line {line_number}: expected {N_COLUMNS} columns, "
                    f"got {len(columns)}"
                )
            if "-" in columns[0] or "." in columns[0]:
                continue
            words.append(Word(form=columns[1], lemma=columns[2], upos=columns[3]))
    if words:
        yield words


def read_targets_tsv(path: str | Path) -> list[tuple[str, str | None]]:
    targets: list[tuple[str, str | None]] = []
    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            columns = line.split("\t")
            targets.append((columns[0], columns[1] if len(columns) > 1 and columns[1] else None))
    if not targets:
        raise ValueError(f"{path}: no targets found")
    return targets


def index_usages(
    sentences: Iterable[Sentence], targets: Sequence[tuple[str, str | None]]
) -> dict[str, list[tuple[int, int]]]:
    """(sentence_index, word_index) of every token whose lemma matches a
    target (and whose UPOS matches the optional filter)."""
    filters = dict(targets)
    occurrences: dict[str, list[tuple[int, int]]] = {lemma: [] for lemma, _ in targets}
    for sentence_index, sentence in enumerate(sentences):
        for word_index, word in enumerate(sentence):
            pos = filters.get(word.lemma)
            if word.lemma not in occurrences:
                continue
            if pos is not None and word.upos != pos:
                continue
            occurrences[word.lemma].append((sentence_index, word_index))
    return occurrences


def collect_surface_forms(
    sentences: Iterable[Sentence], targets: Sequence[tuple[str, str | None]]
) -> dict[str, set[str]]:
    """Every attested form per target lemma (the lemma itself included), for
    extending a tokenizer vocabulary before fine-tuning."""
    forms: dict[str, set[str]] = {lemma: {lemma} for lemma, _ in targets}
    for sentence in sentences:
        for word in sentence:
            if word.lemma in forms:
                forms[word.lemma].add(word.form)
    return forms
