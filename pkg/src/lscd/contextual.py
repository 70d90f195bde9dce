"""Usage matrices of contextualised token embeddings: the UMX1 binary file
format and the APD, PRT, APD-PRT and JSD change metrics computed on them."""

from __future__ import annotations

import json
import logging
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence, Union

import numpy as np

from .clustering import affinity_propagation
from .corpus import Period

log = logging.getLogger(__name__)

UMX_MAGIC = b"UMX1"
_HEADER = struct.Struct("<4sII")


class UmxFormatError(ValueError):
    """UMX1 file violates the format; names the first violated field."""

    def __init__(self, fieldname: str, message: str):
        super().__init__(f"{fieldname}: {message}")
        self.fieldname = fieldname


@dataclass
class UsageMatrix:
    """N x D stack of token embeddings of one lemma's occurrences in one
    period. All rows share dimension D > 0; N may be 0 (metrics then report
    a missing score)."""

    lemma: str
    period: Period
    rows: np.ndarray

    def __post_init__(self) -> None:
        self.rows = np.asarray(self.rows, dtype=np.float64)
        if self.rows.ndim != 2:
            raise ValueError(f"rows must be 2-D, got shape {self.rows.shape}")
        if self.rows.shape[1] < 1:
            raise ValueError("embedding dimension must be positive")

    @property
    def n(self) -> int:
        return int(self.rows.shape[0])

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])


def read_umx(source: Union[str, Path, IO[bytes]]) -> np.ndarray:
    """Read a UMX1 payload into an (N, D) float array.

    Layout: 4 bytes ASCII "UMX1", uint32-LE row count, uint32-LE dimension,
    then N*D float32-LE values in row-major order.
    """
    if isinstance(source, (str, Path)):
        with open(source, "rb") as handle:
            return read_umx(handle)
    header = source.read(_HEADER.size)
    if len(header) < _HEADER.size:
        raise UmxFormatError("header", f"expected {_HEADER.size} bytes, got {len(header)}")
    magic, n_rows, dim = _HEADER.unpack(header)
    if magic != UMX_MAGIC:
        raise UmxFormatError("magic", f"expected {UMX_MAGIC!r}, got {magic!r}")
    if dim < 1:
        raise UmxFormatError("dimension", "must be >= 1")
    expected = n_rows * dim * 4
    payload = source.read(expected + 1)
    if len(payload) < expected:
        raise UmxFormatError(
            "payload", f"expected {expected} bytes for {n_rows}x{dim}, got {len(payload)}"
        )
    if len(payload) > expected:
        raise UmxFormatError("payload", "trailing data after declared rows")
    values = np.frombuffer(payload, dtype="<f4")
    return values.reshape(n_rows, dim).astype(np.float64)


def write_umx(dest: Union[str, Path, IO[bytes]], rows: np.ndarray) -> None:
    """Write an (N, D) array as UMX1; values are stored as float32-LE."""
    rows = np.asarray(rows)
    if rows.ndim != 2 or rows.shape[1] < 1:
        raise ValueError(f"rows must be 2-D with D >= 1, got shape {rows.shape}")
    if isinstance(dest, (str, Path)):
        with open(dest, "wb") as handle:
            write_umx(handle, rows)
        return
    n_rows, dim = rows.shape
    dest.write(_HEADER.pack(UMX_MAGIC, n_rows, dim))
    dest.write(np.ascontiguousarray(rows, dtype="<f4").tobytes())


def read_usage_matrix(path: str | Path, period: Period) -> UsageMatrix:
    """Load `<lemma>.umx`; the lemma is the file stem."""
    path = Path(path)
    return UsageMatrix(lemma=path.stem, period=period, rows=read_umx(path))


def write_usage_matrix(directory: str | Path, matrix: UsageMatrix) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{matrix.lemma}.umx"
    write_umx(path, matrix.rows)
    return path


def write_meta_sidecar(
    directory: str | Path, lemma: str, rows: Sequence[dict]
) -> Path:
    """Write `<lemma>.meta.jsonl`: one provenance object per matrix row."""
    path = Path(directory) / f"{lemma}.meta.jsonl"
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
    return path


def read_meta_sidecar(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def _check_rows(matrix: UsageMatrix) -> np.ndarray:
    norms = np.linalg.norm(matrix.rows, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ValueError(
            f"zero-norm row {int(zero[0])} in {matrix.period.value} matrix "
            f"for {matrix.lemma!r}"
        )
    return matrix.rows / norms[:, None]


def _check_pair(u1: UsageMatrix, u2: UsageMatrix) -> bool:
    if u1.dim != u2.dim:
        raise ValueError(f"dimension mismatch: {u1.dim} vs {u2.dim}")
    if u1.n == 0 or u2.n == 0:
        log.warning(
            "empty usage matrix for %r (%s: %d rows, %s: %d rows); score missing",
            u1.lemma, u1.period.value, u1.n, u2.period.value, u2.n,
        )
        return False
    return True


def apd(u1: UsageMatrix, u2: UsageMatrix) -> float | None:
    """Average pairwise cosine distance between cross-period embeddings:
    mean over all (i, j) of 1 - cos(x_i, y_j). None when a matrix is empty."""
    if not _check_pair(u1, u2):
        return None
    x = _check_rows(u1)
    y = _check_rows(u2)
    return min(2.0, max(0.0, float(1.0 - (x @ y.T).mean())))


def prt(u1: UsageMatrix, u2: UsageMatrix) -> float | None:
    """Cosine distance between the two per-period mean ("prototype")
    embeddings. None when a matrix is empty or a mean vector cancels to
    zero norm."""
    if not _check_pair(u1, u2):
        return None
    _check_rows(u1)
    _check_rows(u2)
    mean1 = u1.rows.mean(axis=0)
    mean2 = u2.rows.mean(axis=0)
    sq_norm1 = float(mean1 @ mean1)
    sq_norm2 = float(mean2 @ mean2)
    if sq_norm1 == 0.0 or sq_norm2 == 0.0:
        log.warning("zero-norm prototype for %r; score missing", u1.lemma)
        return None
    distance = 1.0 - float(mean1 @ mean2) / math.sqrt(sq_norm1 * sq_norm2)
    return min(2.0, max(0.0, distance))


def apd_prt(u1: UsageMatrix, u2: UsageMatrix) -> float | None:
    """Arithmetic mean of the APD and PRT scores; None when either is missing."""
    apd_score = apd(u1, u2)
    prt_score = prt(u1, u2)
    if apd_score is None or prt_score is None:
        return None
    return (apd_score + prt_score) / 2.0


def shannon_entropy(probs: Sequence[float]) -> float:
    """Natural-log entropy with the 0*ln(0) = 0 convention."""
    return -float(sum(p * math.log(p) for p in probs if p > 0.0))


def jensen_shannon_divergence(u: Sequence[float], v: Sequence[float]) -> float:
    """JSD(u, v) = H((u+v)/2) - (H(u) + H(v)) / 2, natural log; bounded by ln 2."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"distribution shapes differ: {u.shape} vs {v.shape}")
    mixture = (u + v) / 2.0
    return shannon_entropy(mixture) - (shannon_entropy(u) + shannon_entropy(v)) / 2.0


@dataclass
class ClusterDistribution:
    """Normalised counts of one period's embeddings over the joint clusters."""

    lemma: str
    period: Period
    probs: np.ndarray

    def __post_init__(self) -> None:
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.size and abs(self.probs.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {self.probs.sum()}, not 1")
        if (self.probs < 0).any():
            raise ValueError("probabilities must be nonnegative")


@dataclass
class JsdResult:
    score: float
    n_clusters: int
    converged: bool
    distributions: tuple[ClusterDistribution, ClusterDistribution]


def standardize_stacked(rows: np.ndarray) -> np.ndarray:
    """Scale each dimension of the stacked matrix to zero mean and unit
    variance; zero-variance dimensions become all-zero."""
    mean = rows.mean(axis=0)
    std = rows.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return (rows - mean) / std


def jsd_result(
    u1: UsageMatrix,
    u2: UsageMatrix,
    damping: float = 0.5,
    max_iter: int = 200,
    convergence_iter: int = 15,
) -> JsdResult | None:
    """Cluster the stacked, standardised usage matrices with affinity
    propagation and return the Jensen-Shannon divergence between the two
    periods' cluster distributions.

    A clustering fallback (non-convergence, single cluster) yields score 0
    with ``converged=False`` so the target stays in the ranking, flagged.
    """
    if not _check_pair(u1, u2):
        return None
    stacked = standardize_stacked(np.vstack([u1.rows, u2.rows]))
    clustering = affinity_propagation(
        stacked, damping=damping, max_iter=max_iter, convergence_iter=convergence_iter
    )
    if not clustering.converged:
        log.warning("clustering fallback for %r: JSD set to 0", u1.lemma)
    counts1 = np.bincount(
        clustering.labels[: u1.n], minlength=clustering.n_clusters
    ).astype(np.float64)
    counts2 = np.bincount(
        clustering.labels[u1.n :], minlength=clustering.n_clusters
    ).astype(np.float64)
    dist1 = ClusterDistribution(u1.lemma, u1.period, counts1 / counts1.sum())
    dist2 = ClusterDistribution(u2.lemma, u2.period, counts2 / counts2.sum())
    score = float(jensen_shannon_divergence(dist1.probs, dist2.probs))
    return JsdResult(
        score=score,
        n_clusters=clustering.n_clusters,
        converged=clustering.converged,
        distributions=(dist1, dist2),
    )


def jsd_score(
    u1: UsageMatrix,
    u2: UsageMatrix,
    damping: float = 0.5,
    max_iter: int = 200,
    convergence_iter: int = 15,
) -> float | None:
    result = jsd_result(u1, u2, damping, max_iter, convergence_iter)
    return None if result is None else result.score


def subsample_rows(
    matrix: UsageMatrix, max_usages: int, seed: int
) -> UsageMatrix:
    """Seeded uniform subsample (without replacement) capping the row count;
    APD is quadratic in it."""
    if max_usages < 1:
        raise ValueError("max_usages must be >= 1")
    if matrix.n <= max_usages:
        return matrix
    rng = np.random.default_rng(seed)
    keep = np.sort(rng.choice(matrix.n, size=max_usages, replace=False))
    return UsageMatrix(matrix.lemma, matrix.period, matrix.rows[keep])
