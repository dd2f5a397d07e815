"""L1 and Mahalanobis distances with a deterministic k-NN decision rule."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_COV_REG = 1e-6


def l1_distance(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.abs(a - b).sum())


def mahalanobis_distance(a: np.ndarray, b: np.ndarray,
                         cov_inverse: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.sqrt(max(float(d @ cov_inverse @ d), 0.0)))


@dataclass(frozen=True)
class Gallery:
    points: np.ndarray        # (n, m)
    labels: np.ndarray        # (n,)
    metric: str               # "l1" | "mahalanobis"
    cov_inverse: np.ndarray | None
    k: int

    @classmethod
    def build(cls, points, labels, metric: str = "l1",
              covariance: np.ndarray | None = None, k: int = 1) -> "Gallery":
        pts = np.asarray(points, dtype=np.float64)
        labs = np.asarray(labels, dtype=np.int64)
        if pts.ndim != 2 or len(pts) == 0:
            raise ValueError("gallery needs a nonempty (n, m) point array")
        if len(labs) != len(pts):
            raise ValueError("labels must parallel points")
        if not 1 <= k <= len(pts):
            raise ValueError(f"k={k} outside [1, {len(pts)}]")
        if metric == "l1":
            inv = None
        elif metric == "mahalanobis":
            if covariance is None:
                raise ValueError("mahalanobis metric requires a covariance")
            cov = np.asarray(covariance, dtype=np.float64)
            m = cov.shape[0]
            if cov.shape != (m, m) or m != pts.shape[1]:
                raise ValueError("covariance shape does not match points")
            reg = cov + (_COV_REG * float(np.trace(cov)) / m) * np.eye(m)
            try:
                np.linalg.cholesky(reg)
            except np.linalg.LinAlgError:
                raise ValueError(
                    "covariance not positive definite after regularization")
            inv = np.linalg.inv(reg)
            inv = 0.5 * (inv + inv.T)
        else:
            raise ValueError(f"unknown metric {metric!r}")
        return cls(pts, labs, metric, inv, k)

    def distances(self, query: np.ndarray) -> np.ndarray:
        q = np.asarray(query, dtype=np.float64)
        if q.shape != (self.points.shape[1],):
            raise ValueError(
                f"query dimension {q.shape} does not match ({self.points.shape[1]},)")
        diff = self.points - q
        if self.metric == "l1":
            return np.abs(diff).sum(axis=1)
        return np.sqrt(np.maximum(
            np.einsum("ij,jk,ik->i", diff, self.cov_inverse, diff), 0.0))


def knn_classify(gallery: Gallery, query: np.ndarray) -> tuple[int, np.ndarray]:
    """Majority label among the k nearest gallery points. Distance ties fall
    back to insertion order; vote ties pick the smallest class index."""
    dists = gallery.distances(query)
    order = np.argsort(dists, kind="stable")[:gallery.k]
    votes: dict[int, int] = {}
    for idx in order:
        label = int(gallery.labels[idx])
        votes[label] = votes.get(label, 0) + 1
    best = max(votes.items(), key=lambda kv: (kv[1], -kv[0]))
    return best[0], dists[order]
