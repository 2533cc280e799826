"""Deterministic k-means used to seed the Gibbs chain.

Hand-rolled Lloyd iteration (k-means++ seeding) rather than a library call:
the chain contract needs bit-reproducible assignments for a given seed and a
pinned empty-cluster rule (re-seed the centroid at the point farthest from
its assigned centroid).
"""

from __future__ import annotations

import warnings

import numpy as np

from .model import Counts, CountsLike, ModelState, Priors, as_counts


def _plus_plus_seeds(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    first = int(rng.integers(n))
    centers[0] = points[first]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            # all remaining points coincide with a chosen center
            centers[j] = points[int(rng.integers(n))]
            continue
        r = rng.random() * total
        idx = int(np.searchsorted(np.cumsum(d2), r, side="right"))
        idx = min(idx, n - 1)
        centers[j] = points[idx]
        d2 = np.minimum(d2, ((points - centers[j]) ** 2).sum(axis=1))
    return centers


def kmeans(
    points: np.ndarray,
    k: int,
    rng: np.random.Generator,
    max_iter: int = 100,
) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd's algorithm; returns (labels in 0..k-1, centers).

    Clusters that lose all points are re-seeded at the point farthest from
    its currently assigned centroid; if k exceeds the number of distinct
    points some clusters stay empty.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    centers = _plus_plus_seeds(points, k, rng)
    labels: np.ndarray | None = None
    for _ in range(max_iter):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)
        nearest_d2 = d2[np.arange(n), new_labels]
        for j in range(k):
            if (new_labels == j).any():
                continue
            far = int(nearest_d2.argmax())
            if nearest_d2[far] <= 0.0:
                continue  # fewer distinct points than clusters; leave it empty
            centers[j] = points[far]
            new_labels[far] = j
            nearest_d2[far] = 0.0
        if labels is not None and (new_labels == labels).all():
            break
        labels = new_labels
        for j in range(k):
            members = labels == j
            if members.any():
                centers[j] = points[members].mean(axis=0)
    assert labels is not None
    return labels, centers


def within_cluster_ss(points: np.ndarray, labels: np.ndarray) -> float:
    """Total within-cluster sum of squares for a given assignment."""
    points = np.asarray(points, dtype=np.float64)
    total = 0.0
    for j in np.unique(labels):
        member = points[labels == j]
        total += ((member - member.mean(axis=0)) ** 2).sum()
    return float(total)


def selection_features(counts: Counts) -> np.ndarray:
    """Per-entity attempt proportion vectors; an entity with no shots maps to 0."""
    N = counts.attempts.astype(np.float64)
    totals = N.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        f = np.where(totals > 0, N / np.where(totals > 0, totals, 1.0), 0.0)
    return f


def accuracy_features(counts: Counts) -> np.ndarray:
    """Per-entity per-region make rates; regions never shot from map to 0."""
    N = counts.attempts.astype(np.float64)
    M = counts.makes.astype(np.float64)
    return np.where(N > 0, M / np.where(N > 0, N, 1.0), 0.0)


def kmeans_init(data: CountsLike, priors: Priors, seed: int) -> ModelState:
    """Build the chain's starting state from k-means partitions.

    Selection labels come from k-means (k=L) on attempt-proportion vectors,
    accuracy labels from k-means (k=J) on make-rate vectors. Profile rows are
    member means (p) and pooled make rates (q); pi and theta are empirical
    membership fractions floored at 1/(I+k) so no weight starts at zero.
    Clusters that stay empty get uniform p rows and q=0.5.
    """
    counts = as_counts(data)
    I, K = counts.attempts.shape
    L, J = priors.L, priors.J
    if L > I or J > I:
        warnings.warn(
            f"more clusters than entities (L={L}, J={J}, I={I}); "
            "some clusters will start empty",
            stacklevel=2,
        )
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    w0, _ = kmeans(selection_features(counts), L, rng)
    z0, _ = kmeans(accuracy_features(counts), J, rng)

    N = counts.attempts.astype(np.float64)
    M = counts.makes.astype(np.float64)
    sel = selection_features(counts)

    p = np.empty((L, K))
    for l in range(L):
        members = w0 == l
        if members.any():
            row = sel[members].mean(axis=0)
            s = row.sum()
            p[l] = row / s if s > 0 else np.full(K, 1.0 / K)
        else:
            p[l] = np.full(K, 1.0 / K)

    prior_rate = priors.beta_a / (priors.beta_a + priors.beta_b)
    q = np.empty((J, K))
    for j in range(J):
        members = z0 == j
        if members.any():
            att = N[members].sum(axis=0)
            mk = M[members].sum(axis=0)
            q[j] = np.where(att > 0, mk / np.where(att > 0, att, 1.0), prior_rate)
        else:
            q[j] = np.full(K, 0.5)

    def weights(labels: np.ndarray, k: int) -> np.ndarray:
        frac = np.bincount(labels, minlength=k).astype(np.float64) / I
        frac = np.maximum(frac, 1.0 / (I + k))
        return frac / frac.sum()

    state = ModelState(
        p=p, q=q, w=w0 + 1, z=z0 + 1, pi=weights(w0, L), theta=weights(z0, J)
    )
    state.validate()
    return state
