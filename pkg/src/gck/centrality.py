"""Per-node importance scores: degree, betweenness, closeness, PageRank,
eigenvector. All operate on a frozen (all-alive, compact) graph."""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._kernels import BACKEND, brandes_partial, closeness_stats
from .errors import Deadline, DegenerateInputError, ParameterError
from .graph import Graph

log = logging.getLogger(__name__)

MEASURES = ("dc", "bc", "cc", "pr", "ec")

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 1000
DEFAULT_DAMPING = 0.85
DEFAULT_BC_SAMPLES = 512

# sources per work unit; also the deadline-check granularity
_CHUNK = 64


@dataclass
class CentralityScores:
    values: np.ndarray  # float64, one entry per (alive) node
    measure: str
    params: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.measure not in MEASURES:
            raise ParameterError(f"unknown measure {self.measure!r}")
        if not np.isfinite(self.values).all() or (self.values < 0).any():
            raise AssertionError("centrality values must be finite and non-negative")

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(f"# measure={self.measure} params={json.dumps(self.params, sort_keys=True)}\n")
            fh.write("node_id,score\n")
            for v, score in enumerate(self.values):
                fh.write(f"{v},{float(score)!r}\n")


def _require_frozen(g: Graph) -> int:
    if not g.alive.all():
        raise ParameterError("centrality requires a frozen all-alive graph")
    return g.num_nodes


def _chunked_kernel(kernel, indptr, indices, sources, workers, deadline):
    """Run a per-source kernel over chunks; results are combined in chunk
    order so the float reduction is deterministic for any worker count."""
    chunks = [sources[i:i + _CHUNK] for i in range(0, len(sources), _CHUNK)]

    def run(chunk):
        if deadline is not None:
            deadline.check()
        return kernel(indptr, indices, np.ascontiguousarray(chunk, dtype=np.int64))

    if workers > 1 and BACKEND == "compiled" and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(run, chunks))
    return [run(c) for c in chunks]


def degree_centrality(g: Graph) -> CentralityScores:
    """DC(v) = degree of v."""
    _require_frozen(g)
    values = np.array([g.degree(v) for v in range(g.num_nodes)], dtype=np.float64)
    return CentralityScores(values, "dc")


def betweenness_centrality(g: Graph, sample_size: int | None = None, seed: int = 0,
                           workers: int = 1, deadline: Deadline | None = None) -> CentralityScores:
    """Shortest-path betweenness, each unordered pair counted once.

    sample_size=None runs exact Brandes from every source; otherwise the
    sampled estimate from sample_size sources (without replacement) is
    rescaled by |V|/sample_size, which is unbiased and exact at |V|.
    """
    n = _require_frozen(g)
    if sample_size is not None:
        if sample_size <= 0:
            raise ParameterError("sample_size must be positive")
        if sample_size > n:
            raise ParameterError(f"sample_size {sample_size} exceeds {n} nodes")
    indptr, indices = g.to_csr()
    if sample_size is None or sample_size == n:
        sources = np.arange(n, dtype=np.int64)
        scale = 1.0
    else:
        rng = np.random.default_rng(seed)
        sources = np.sort(rng.choice(n, size=sample_size, replace=False)).astype(np.int64)
        scale = n / sample_size
    parts = _chunked_kernel(brandes_partial, indptr, indices, sources, workers, deadline)
    acc = np.zeros(n, dtype=np.float64)
    for p in parts:
        acc += p
    values = acc * (scale / 2.0)  # halve: each pair seen from both endpoints
    params = {"sample_size": None if sample_size is None else int(sample_size), "seed": seed}
    return CentralityScores(values, "bc", params)


def closeness_centrality(g: Graph, workers: int = 1,
                         deadline: Deadline | None = None) -> CentralityScores:
    """Closeness with Wasserman-Faust component scaling:
    (reachable-1)^2 / ((|V|-1) * sum of within-component distances)."""
    n = _require_frozen(g)
    if n == 1:
        return CentralityScores(np.zeros(1), "cc")
    indptr, indices = g.to_csr()
    sources = np.arange(n, dtype=np.int64)
    parts = _chunked_kernel(closeness_stats, indptr, indices, sources, workers, deadline)
    sums = np.concatenate([p[0] for p in parts])
    reach = np.concatenate([p[1] for p in parts])
    values = np.zeros(n, dtype=np.float64)
    nz = sums > 0
    values[nz] = (reach[nz] - 1.0) ** 2 / ((n - 1.0) * sums[nz])
    return CentralityScores(values, "cc")


def _adjacency_matvec(g: Graph):
    """Returns (matvec, degrees) over the graph's CSR view; matvec(x) = A @ x."""
    from scipy.sparse import csr_matrix

    indptr, indices = g.to_csr()
    deg = np.diff(indptr)
    a = csr_matrix((np.ones(len(indices)), indices, indptr),
                   shape=(g.num_nodes, g.num_nodes))
    return (lambda x: a @ x), deg


def pagerank_centrality(g: Graph, damping: float = DEFAULT_DAMPING, tol: float = DEFAULT_TOL,
                        max_iter: int = DEFAULT_MAX_ITER) -> CentralityScores:
    """Power iteration on p <- (1-a)/n + a*(A D^-1 p + dangling mass / n).

    Degree-0 nodes redistribute their mass uniformly; the result sums to 1.
    Non-convergence is reported via params['converged'], not raised.
    """
    if not 0.0 < damping < 1.0:
        raise ParameterError(f"damping must lie in (0,1), got {damping}")
    n = _require_frozen(g)
    matvec, deg = _adjacency_matvec(g)
    dangling = deg == 0
    inv_deg = np.where(dangling, 0.0, 1.0 / np.maximum(deg, 1))
    p = np.full(n, 1.0 / n)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        spread = matvec(p * inv_deg) + p[dangling].sum() / n
        p_next = (1.0 - damping) / n + damping * spread
        if np.abs(p_next - p).sum() < tol:
            p = p_next
            converged = True
            break
        p = p_next
    p = p / p.sum()
    if not converged:
        log.warning("pagerank did not converge in %d iterations", max_iter)
    params = {"damping": damping, "tol": tol, "max_iter": max_iter,
              "converged": converged, "iterations": iterations}
    return CentralityScores(p, "pr", params)


def eigenvector_centrality(g: Graph, tol: float = DEFAULT_TOL,
                           max_iter: int = DEFAULT_MAX_ITER) -> CentralityScores:
    """Dominant eigenvector of A (L2-normalized, non-negative) by power
    iteration; on oscillation (bipartite graphs) the run is redone on A + I,
    which shifts the spectrum without reordering eigenvectors."""
    n = _require_frozen(g)
    if g.edge_count() == 0:
        raise DegenerateInputError("eigenvector centrality needs at least one edge")
    matvec, _ = _adjacency_matvec(g)

    def iterate(shift: float):
        x = np.full(n, 1.0 / np.sqrt(n))
        for it in range(1, max_iter + 1):
            y = matvec(x) + shift * x
            norm = np.linalg.norm(y)
            if norm == 0.0:  # x fell entirely into the null space
                return x, False, it
            y /= norm
            if np.linalg.norm(y - x) < tol:
                return y, True, it
            x = y
        return x, False, max_iter

    x, converged, iterations = iterate(0.0)
    shifted = False
    if not converged:
        x, converged, iterations = iterate(1.0)
        shifted = True
        if not converged:
            log.warning("eigenvector centrality did not converge in %d iterations", max_iter)
    values = np.maximum(x, 0.0)  # iterates are non-negative bar float dust
    params = {"tol": tol, "max_iter": max_iter, "converged": converged,
              "iterations": iterations, "shifted": shifted}
    return CentralityScores(values, "ec", params)


def compute_centrality(g: Graph, measure: str, params: dict | None = None,
                       workers: int = 1, deadline: Deadline | None = None) -> CentralityScores:
    """Dispatch by measure name with per-measure defaults applied."""
    p = dict(params or {})
    if measure == "dc":
        scores = degree_centrality(g)
    elif measure == "bc":
        sample = p.get("sample_size", min(g.num_nodes, DEFAULT_BC_SAMPLES))
        scores = betweenness_centrality(g, sample_size=sample, seed=p.get("seed", 0),
                                        workers=workers, deadline=deadline)
    elif measure == "cc":
        scores = closeness_centrality(g, workers=workers, deadline=deadline)
    elif measure == "pr":
        scores = pagerank_centrality(g, damping=p.get("damping", DEFAULT_DAMPING),
                                     tol=p.get("tol", DEFAULT_TOL),
                                     max_iter=p.get("max_iter", DEFAULT_MAX_ITER))
    elif measure == "ec":
        scores = eigenvector_centrality(g, tol=p.get("tol", DEFAULT_TOL),
                                        max_iter=p.get("max_iter", DEFAULT_MAX_ITER))
    else:
        raise ParameterError(f"unknown centrality measure {measure!r}; expected one of {MEASURES}")
    scores.validate()
    return scores
