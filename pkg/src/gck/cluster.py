"""Dimension-normalized feature-label clustering and budget distribution.

The metric scales the feature block by sqrt(alpha) and the label block by
sqrt(beta) so plain squared Euclidean distance on the concatenation M gives
the gamma-weighted trade-off between feature and label similarity.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError

log = logging.getLogger(__name__)

DEFAULT_ETA = 100
DEFAULT_GAMMA = 0.5
KMEANS_MAX_ITER = 300
KMEANS_TOL = 1e-6


@dataclass
class NormalizationParams:
    """alpha = gamma*max(F,L)/F, beta = (1-gamma)*max(F,L)/L."""

    gamma: float
    alpha: float
    beta: float
    feature_dim: int
    label_dim: int

    @classmethod
    def from_gamma(cls, gamma: float, feature_dim: int, label_dim: int) -> "NormalizationParams":
        if not 0.0 <= gamma <= 1.0:
            raise ParameterError(f"gamma must lie in [0,1], got {gamma}")
        if feature_dim < 1 or label_dim < 1:
            raise ParameterError("feature and label dimensions must be >= 1")
        top = float(max(feature_dim, label_dim))
        return cls(gamma, gamma * top / feature_dim, (1.0 - gamma) * top / label_dim,
                   feature_dim, label_dim)


@dataclass
class ClusterAssignment:
    cluster_of: np.ndarray  # int64 cluster index per row
    eta: int
    centroids: np.ndarray   # eta x (F+L)
    inertia: float

    def sizes(self) -> np.ndarray:
        return np.bincount(self.cluster_of, minlength=self.eta)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("node_id,cluster\n")
            for v, c in enumerate(self.cluster_of):
                fh.write(f"{v},{c}\n")


def scale_normalize(x: np.ndarray) -> np.ndarray:
    """Per-column min-max scaling into [0,1]; constant columns map to 0."""
    x = np.asarray(x, dtype=np.float64)
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    out = np.zeros_like(x)
    nz = span > 0
    out[:, nz] = (x[:, nz] - lo[nz]) / span[nz]
    return out


def build_m(x: np.ndarray, y: np.ndarray, gamma: float) -> np.ndarray:
    """M = [sqrt(alpha)*X , sqrt(beta)*Y]; expects scale-normalized inputs."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[0] != y.shape[0]:
        raise ShapeError(f"features have {x.shape[0]} rows, labels {y.shape[0]}")
    p = NormalizationParams.from_gamma(gamma, x.shape[1], y.shape[1])
    return np.hstack([np.sqrt(p.alpha) * x, np.sqrt(p.beta) * y])


def _sq_dists(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d = points[:, None, :] - centroids[None, :, :]
    return np.einsum("ijk,ijk->ij", d, d)


def _plusplus_seeds(m: np.ndarray, eta: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++: sample seeds proportional to squared distance from the
    chosen set; degenerates to uniform when every distance is zero."""
    n = m.shape[0]
    seeds = np.empty(eta, dtype=np.int64)
    seeds[0] = rng.integers(n)
    d2 = ((m - m[seeds[0]]) ** 2).sum(axis=1)
    for k in range(1, eta):
        total = d2.sum()
        if total > 0:
            seeds[k] = rng.choice(n, p=d2 / total)
        else:
            seeds[k] = rng.integers(n)
        d2 = np.minimum(d2, ((m - m[seeds[k]]) ** 2).sum(axis=1))
    return seeds


def kmeans(m: np.ndarray, eta: int, seed: int = 0, max_iter: int = KMEANS_MAX_ITER,
           tol: float = KMEANS_TOL) -> ClusterAssignment:
    """Lloyd iterations with k-means++ seeding.

    Empty clusters are re-seeded from the point farthest from its centroid;
    convergence is declared when the largest centroid shift drops below tol.
    """
    m = np.asarray(m, dtype=np.float64)
    n = m.shape[0]
    if eta <= 0:
        raise ParameterError(f"eta must be positive, got {eta}")
    if eta > n:
        raise ParameterError(f"eta={eta} exceeds {n} rows")
    rng = np.random.default_rng(seed)
    centroids = m[_plusplus_seeds(m, eta, rng)].copy()
    assign = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        d2 = _sq_dists(m, centroids)
        assign = d2.argmin(axis=1)
        point_d2 = d2[np.arange(n), assign]
        farthest = iter(np.argsort(-point_d2, kind="stable"))
        new_centroids = centroids.copy()
        for k in range(eta):
            members = assign == k
            if members.any():
                new_centroids[k] = m[members].mean(axis=0)
            else:
                new_centroids[k] = m[next(farthest)]
        shift = np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max()
        centroids = new_centroids
        if shift < tol:
            break
    d2 = _sq_dists(m, centroids)
    assign = d2.argmin(axis=1)
    inertia = float(d2[np.arange(n), assign].sum())
    return ClusterAssignment(assign, eta, centroids, inertia)


def distribute_budget(assignment: ClusterAssignment, psi: int) -> np.ndarray:
    """Split the survivor budget across clusters proportionally to size.

    Largest-remainder rounding keeps the total exactly psi; ties break on
    ascending cluster index. When psi covers them, every non-empty cluster
    keeps at least one survivor (paid for by the largest allocations).
    """
    sizes = assignment.sizes().astype(np.int64)
    total = int(sizes.sum())
    if psi <= 0:
        raise ParameterError(f"psi must be positive, got {psi}")
    if psi > total:
        raise ParameterError(f"psi={psi} exceeds {total} clustered nodes")
    quota = psi * sizes / total
    budgets = np.floor(quota).astype(np.int64)
    remainder = psi - int(budgets.sum())
    if remainder > 0:
        order = np.lexsort((np.arange(len(sizes)), -(quota - budgets)))
        budgets[order[:remainder]] += 1
    nonempty = sizes > 0
    if psi >= int(nonempty.sum()):
        starved = np.flatnonzero(nonempty & (budgets == 0))
        for k in starved:
            donor = int(budgets.argmax())
            budgets[donor] -= 1
            budgets[k] = 1
    # a budget can never exceed its cluster (quota <= size and the min-1 step
    # only tops up to 1), but keep the guard hot in case callers mutate sizes
    if (budgets > sizes).any():
        over = np.flatnonzero(budgets > sizes)
        for k in over:
            spare = budgets[k] - sizes[k]
            budgets[k] = sizes[k]
            recipient = int(np.where(budgets < sizes, sizes, -1).argmax())
            budgets[recipient] += spare
    assert budgets.sum() == psi
    return budgets
