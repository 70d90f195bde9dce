"""Orthogonal Procrustes alignment of two independently trained static
embedding spaces, and cosine change scores in the aligned space."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Union

import numpy as np

log = logging.getLogger(__name__)

ORTHOGONALITY_TOL = 1e-8


class AlignmentMode(str, Enum):
    """Which target preprocessing produced the vector files: dictionary forms
    only (raw) or lemmatized target occurrences."""

    RAW = "raw"
    LEMMA = "lemma"


@dataclass
class VectorSpace:
    """A vocabulary and its |vocab| x D embedding matrix."""

    vocab: list[str]
    vectors: np.ndarray

    def __post_init__(self) -> None:
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.vocab):
            raise ValueError(
                f"vectors shape {self.vectors.shape} does not match "
                f"{len(self.vocab)} vocabulary entries"
            )
        self.index = {word: i for i, word in enumerate(self.vocab)}
        if len(self.index) != len(self.vocab):
            raise ValueError("vocabulary entries must be unique")

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def __getitem__(self, word: str) -> np.ndarray:
        return self.vectors[self.index[word]]


def read_word2vec_text(source: Union[str, Path, IO[str]]) -> VectorSpace:
    """Read the word2vec text format: header line "V D", then one
    space-separated "word v1 ... vD" line per word."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as handle:
            return read_word2vec_text(handle)
    header = source.readline().split()
    if len(header) != 2:
        raise ValueError(f"bad header line: expected 'V D', got {header!r}")
    declared_v, dim = int(header[0]), int(header[1])
    vocab: list[str] = []
    seen: set[str] = set()
    rows = np.empty((declared_v, dim), dtype=np.float64)
    count = 0
    for line_number, raw in enumerate(source, start=2):
        parts = raw.rstrip("\n").split(" ")
        if len(parts) == 1 and parts[0] == "":
            continue
        if len(parts) != dim + 1:
            raise ValueError(
                f"line {line_number}: expected {dim} values, got {len(parts) - 1}"
            )
        word = parts[0]
        if word in seen:
            raise ValueError(f"line {line_number}: duplicate word {word!r}")
        if count >= declared_v:
            raise ValueError(f"more rows than the declared {declared_v}")
        seen.add(word)
        vocab.append(word)
        rows[count] = [float(value) for value in parts[1:]]
        count += 1
    if count != declared_v:
        raise ValueError(f"declared {declared_v} rows, found {count}")
    return VectorSpace(vocab=vocab, vectors=rows)


def write_word2vec_text(dest: Union[str, Path, IO[str]], space: VectorSpace) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8") as handle:
            write_word2vec_text(handle, space)
        return
    dest.write(f"{len(space.vocab)} {space.dim}\n")
    for word, row in zip(space.vocab, space.vectors):
        dest.write(word + " " + " ".join(repr(float(v)) for v in row) + "\n")


def _normalize_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return matrix / norms


def preprocess(matrix: np.ndarray) -> np.ndarray:
    """Length-normalize rows, mean-center columns, length-normalize again."""
    matrix = _normalize_rows(np.asarray(matrix, dtype=np.float64))
    matrix = matrix - matrix.mean(axis=0)
    return _normalize_rows(matrix)


@dataclass
class Alignment:
    """Result of :func:`procrustes_align`: the orthogonal map plus the
    preprocessed shared-vocabulary matrices it was fitted on."""

    q: np.ndarray
    shared_vocab: list[str]
    x_processed: np.ndarray
    y_processed: np.ndarray

    def __post_init__(self) -> None:
        self.row = {word: i for i, word in enumerate(self.shared_vocab)}


def procrustes_align(x: VectorSpace, y: VectorSpace) -> Alignment:
    """Fit the orthogonal map Q = U V^T from the SVD of X^T Y over the shared
    vocabulary, after preprocessing both matrices identically."""
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {y.dim}")
    shared = [word for word in x.vocab if word in y.index]
    if not shared:
        raise ValueError("vector spaces share no vocabulary")
    if len(shared) < x.dim:
        log.warning(
            "shared vocabulary (%d) is smaller than the dimension (%d); "
            "the alignment may be poorly constrained",
            len(shared), x.dim,
        )
    x_proc = preprocess(np.stack([x[word] for word in shared]))
    y_proc = preprocess(np.stack([y[word] for word in shared]))
    u, _, vt = np.linalg.svd(x_proc.T @ y_proc)
    q = u @ vt
    residual = np.abs(q.T @ q - np.eye(x.dim)).max()
    if residual > ORTHOGONALITY_TOL:
        raise ValueError(f"alignment map is not orthogonal (residual {residual:g})")
    return Alignment(q=q, shared_vocab=shared, x_processed=x_proc, y_processed=y_proc)


def static_change_score(alignment: Alignment, lemma: str) -> float | None:
    """Cosine distance between a word's preprocessed vectors after mapping
    the first space onto the second. None when the word is not shared."""
    row = alignment.row.get(lemma)
    if row is None:
        log.warning("lemma %r missing from the shared vocabulary; score missing", lemma)
        return None
    mapped = alignment.x_processed[row] @ alignment.q
    other = alignment.y_processed[row]
    sq_norms = float(mapped @ mapped) * float(other @ other)
    if sq_norms == 0.0:
        log.warning("lemma %r has a zero-norm preprocessed vector; score missing", lemma)
        return None
    distance = 1.0 - float(mapped @ other) / math.sqrt(sq_norms)
    return min(2.0, max(0.0, distance))


def score_targets(
    alignment: Alignment, lemmas: Iterable[str]
) -> dict[str, float | None]:
    return {lemma: static_change_score(alignment, lemma) for lemma in lemmas}
