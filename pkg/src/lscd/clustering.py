"""Affinity propagation clustering over negative squared euclidean
similarities, with deterministic message passing (no random tie-breaking
noise, so identical inputs always yield identical clusterings)."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


@dataclass
class APResult:
    """Clustering outcome; ``converged`` is False when the exemplar set never
    stabilized and the single-cluster fallback was applied."""

    labels: np.ndarray
    exemplars: np.ndarray
    n_clusters: int
    converged: bool
    n_iter: int


def _similarity_matrix(points: np.ndarray) -> np.ndarray:
    sq_norms = np.einsum("ij,ij->i", points, points)
    sq_dist = sq_norms[:, None] + sq_norms[None, :] - 2.0 * points @ points.T
    np.maximum(sq_dist, 0.0, out=sq_dist)
    return -sq_dist


def affinity_propagation(
    points: np.ndarray,
    damping: float = 0.5,
    max_iter: int = 200,
    convergence_iter: int = 15,
) -> APResult:
    """Cluster rows of ``points`` by responsibility/availability message
    passing on s(i, k) = -||x_i - x_k||^2.

    The preference (self-similarity) is the median of the off-diagonal
    similarities, so the number of clusters is selected automatically.
    Convergence means the exemplar set (points with positive self
    responsibility + availability) was stable for ``convergence_iter``
    consecutive sweeps. On non-convergence every point is assigned to a
    single cluster and the result is flagged.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] < 1:
        raise ValueError("points must be a nonempty 2-D array")
    if not 0.5 <= damping < 1.0:
        raise ValueError(f"damping must be in [0.5, 1), got {damping}")
    n = points.shape[0]
    if n == 1:
        return APResult(
            labels=np.zeros(1, dtype=np.intp),
            exemplars=np.zeros(1, dtype=np.intp),
            n_clusters=1,
            converged=True,
            n_iter=0,
        )

    similarity = _similarity_matrix(points)
    off_diagonal = similarity[~np.eye(n, dtype=bool)]
    preference = float(np.median(off_diagonal))
    np.fill_diagonal(similarity, preference)

    availability = np.zeros((n, n))
    responsibility = np.zeros((n, n))
    exemplar_history = np.zeros((convergence_iter, n), dtype=bool)
    indices = np.arange(n)
    converged = False
    iteration = 0

    for iteration in range(1, max_iter + 1):
        # Responsibilities: r(i,k) <- s(i,k) - max_{k' != k} (a(i,k') + s(i,k'))
        combined = availability + similarity
        best_idx = np.argmax(combined, axis=1)
        best = combined[indices, best_idx]
        combined[indices, best_idx] = -np.inf
        second_best = np.max(combined, axis=1)
        new_responsibility = similarity - best[:, None]
        new_responsibility[indices, best_idx] = (
            similarity[indices, best_idx] - second_best
        )
        responsibility = damping * responsibility + (1.0 - damping) * new_responsibility

        # Availabilities: a(i,k) <- min(0, r(k,k) + sum_{i' not in {i,k}} max(0, r(i',k)))
        positive = np.maximum(responsibility, 0.0)
        np.fill_diagonal(positive, np.diag(responsibility))
        new_availability = positive.sum(axis=0)[None, :] - positive
        self_availability = np.diag(new_availability).copy()
        np.minimum(new_availability, 0.0, out=new_availability)
        np.fill_diagonal(new_availability, self_availability)
        availability = damping * availability + (1.0 - damping) * new_availability

        is_exemplar = (np.diag(responsibility) + np.diag(availability)) > 0.0
        exemplar_history[(iteration - 1) % convergence_iter] = is_exemplar
        if iteration >= convergence_iter:
            stable = bool((exemplar_history == exemplar_history[0]).all())
            if stable and is_exemplar.any():
                converged = True
                break

    exemplars = np.flatnonzero(
        (np.diag(responsibility) + np.diag(availability)) > 0.0
    )
    if not converged or exemplars.size == 0:
        log.warning(
            "affinity propagation did not converge in %d iterations; "
            "falling back to a single cluster",
            max_iter,
        )
        return APResult(
            labels=np.zeros(n, dtype=np.intp),
            exemplars=np.array([], dtype=np.intp),
            n_clusters=1,
            converged=False,
            n_iter=iteration,
        )

    labels = np.argmax(similarity[:, exemplars], axis=1)
    labels[exemplars] = np.arange(exemplars.size)
    return APResult(
        labels=labels.astype(np.intp),
        exemplars=exemplars.astype(np.intp),
        n_clusters=int(exemplars.size),
        converged=True,
        n_iter=iteration,
    )
