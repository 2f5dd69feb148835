"""Mutable undirected graph with edge contraction, plus node attributes.

The graph is adjacency-set based because the collapse phase is mutation
heavy (O(deg) edge moves per merge); frozen CSR views are exported only
for the read-heavy centrality/aggregation phases.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContractViolationError,
    DataError,
    EmptyInputError,
    ShapeError,
)

log = logging.getLogger(__name__)

MULTI_CLASS = "multi_class"
MULTI_LABEL = "multi_label"


@dataclass
class Graph:
    """Undirected, unweighted graph over node ids [0, num_nodes).

    Invariants: adjacency is symmetric, self-loop free and deduplicated;
    nodes merged away are marked dead and keep an empty neighbor set.
    """

    num_nodes: int
    adjacency: list[set[int]]
    alive: np.ndarray  # bool, per node

    @property
    def num_alive(self) -> int:
        return int(self.alive.sum())

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edge_count(self) -> int:
        return sum(len(s) for s in self.adjacency) // 2

    def alive_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.alive)

    def edges(self) -> list[tuple[int, int]]:
        """Sorted (u, v) pairs with u < v, alive endpoints only."""
        out = []
        for u in range(self.num_nodes):
            for v in self.adjacency[u]:
                if u < v:
                    out.append((u, v))
        out.sort()
        return out

    def copy(self) -> "Graph":
        return Graph(self.num_nodes, [set(s) for s in self.adjacency], self.alive.copy())

    def to_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) int64 arrays; requires a compact all-alive graph."""
        if not self.alive.all():
            raise ContractViolationError("CSR export requires an all-alive graph; compact first")
        indptr = np.zeros(self.num_nodes + 1, dtype=np.int64)
        for u in range(self.num_nodes):
            indptr[u + 1] = indptr[u] + len(self.adjacency[u])
        indices = np.empty(indptr[-1], dtype=np.int64)
        for u in range(self.num_nodes):
            nbrs = sorted(self.adjacency[u])
            indices[indptr[u]:indptr[u + 1]] = nbrs
        return indptr, indices

    def check_invariants(self) -> None:
        """Asserts symmetry, no self-loops, dead nodes isolated. Test helper."""
        for u in range(self.num_nodes):
            if u in self.adjacency[u]:
                raise AssertionError(f"self-loop at {u}")
            if not self.alive[u] and self.adjacency[u]:
                raise AssertionError(f"dead node {u} has neighbors")
            for v in self.adjacency[u]:
                if u not in self.adjacency[v]:
                    raise AssertionError(f"asymmetric edge {u}->{v}")


@dataclass
class AttributeSet:
    """Dense per-node features/labels with disjoint split masks."""

    features: np.ndarray  # |V| x F float
    labels: np.ndarray    # |V| x L in {0,1}
    train_mask: np.ndarray
    val_mask: np.ndarray
    test_mask: np.ndarray
    task_kind: str = MULTI_CLASS

    @property
    def num_nodes(self) -> int:
        return self.features.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    @property
    def label_dim(self) -> int:
        return self.labels.shape[1]

    def validate(self) -> None:
        n = self.num_nodes
        for name in ("labels", "train_mask", "val_mask", "test_mask"):
            if getattr(self, name).shape[0] != n:
                raise ShapeError(f"{name} has {getattr(self, name).shape[0]} rows, features has {n}")
        overlap = (self.train_mask & self.val_mask) | (self.train_mask & self.test_mask) \
            | (self.val_mask & self.test_mask)
        if overlap.any():
            raise DataError(f"masks overlap at nodes {np.flatnonzero(overlap)[:5].tolist()}")
        if not np.isfinite(self.features).all():
            bad = np.flatnonzero(~np.isfinite(self.features).all(axis=1))[:5].tolist()
            raise DataError(f"non-finite feature values at nodes {bad}")
        if not np.isin(self.labels, (0.0, 1.0)).all():
            raise DataError("labels must be 0/1")
        if self.task_kind == MULTI_CLASS:
            sums = self.labels.sum(axis=1)
            if not (sums == 1).all():
                bad = np.flatnonzero(sums != 1)[:5].tolist()
                raise DataError(f"multi-class label rows must sum to 1; bad rows {bad}")
        elif self.task_kind != MULTI_LABEL:
            raise DataError(f"unknown task_kind {self.task_kind!r}")

    def subset(self, rows: np.ndarray, all_train: bool = False) -> "AttributeSet":
        """Row-sliced copy; all_train marks every kept node as training."""
        n = len(rows)
        if all_train:
            tr = np.ones(n, dtype=bool)
            va = np.zeros(n, dtype=bool)
            te = np.zeros(n, dtype=bool)
        else:
            tr, va, te = self.train_mask[rows], self.val_mask[rows], self.test_mask[rows]
        return AttributeSet(self.features[rows], self.labels[rows], tr, va, te, self.task_kind)


@dataclass
class MergeMap:
    """original node id -> surviving node id; -1 for nodes dropped with no
    alive neighbor (possible only for initially isolated nodes)."""

    survivor_of: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @classmethod
    def identity(cls, n: int) -> "MergeMap":
        return cls(np.arange(n, dtype=np.int64))

    def record(self, v_k: int, v_s: int) -> None:
        self.survivor_of[v_k] = v_s

    def compress(self, alive: np.ndarray) -> None:
        """Resolve merge chains so every entry points at an alive node (or -1)."""
        s = self.survivor_of
        for v in range(len(s)):
            r = v
            while s[r] >= 0 and s[r] != r:
                r = s[r]
            root = s[r] if s[r] >= 0 else -1
            if root >= 0 and not alive[root]:
                raise AssertionError(f"merge chain of {v} ends at dead node {root}")
            # compress the whole chain
            w = v
            while s[w] >= 0 and s[w] != w:
                w, s[w] = s[w], root
            s[v] = root


def build_graph(edge_list, num_nodes: int) -> Graph:
    """Symmetric, deduplicated, self-loop-free graph from (u, v) pairs.

    Out-of-range ids raise IndexError; u == v pairs are dropped with a log line.
    """
    adjacency = [set() for _ in range(num_nodes)]
    dropped = 0
    for u, v in edge_list:
        u, v = int(u), int(v)
        if not (0 <= u < num_nodes and 0 <= v < num_nodes):
            raise IndexError(f"edge ({u}, {v}) out of range for {num_nodes} nodes")
        if u == v:
            dropped += 1
            continue
        adjacency[u].add(v)
        adjacency[v].add(u)
    if dropped:
        log.info("dropped %d self-loop edge(s)", dropped)
    return Graph(num_nodes, adjacency, np.ones(num_nodes, dtype=bool))


def merge_node(g: Graph, v_k: int, v_s: int) -> None:
    """Contract v_k into v_s: every edge of v_k moves to v_s, v_k dies.

    Duplicate edges and the would-be self-loop (v_s, v_s) are dropped, so the
    graph stays simple and unweighted.
    """
    if v_k == v_s:
        raise ContractViolationError(f"cannot merge node {v_k} into itself")
    if not g.alive[v_k] or not g.alive[v_s]:
        raise ContractViolationError(f"merge requires both nodes alive: {v_k} -> {v_s}")
    for w in list(g.adjacency[v_k]):
        g.adjacency[w].discard(v_k)
        if w != v_s:
            g.adjacency[w].add(v_s)
            g.adjacency[v_s].add(w)
    g.adjacency[v_s].discard(v_k)
    g.adjacency[v_k] = set()
    g.alive[v_k] = False


def remove_isolated(g: Graph, v: int) -> None:
    """Drop a node with no neighbors (no survivor to contract into)."""
    if not g.alive[v]:
        raise ContractViolationError(f"node {v} already dead")
    if g.adjacency[v]:
        raise ContractViolationError(f"node {v} is not isolated")
    g.alive[v] = False


def training_subgraph(g: Graph, attrs: AttributeSet) -> tuple[Graph, AttributeSet, np.ndarray]:
    """Induced subgraph on training nodes with compacted ids.

    Returns (subgraph, attrs restricted to train rows, remap) where remap[v]
    is the new id of original node v, or -1 for non-training nodes.
    """
    train = np.flatnonzero(attrs.train_mask)
    if len(train) == 0:
        raise EmptyInputError("training mask selects no nodes")
    remap = np.full(g.num_nodes, -1, dtype=np.int64)
    remap[train] = np.arange(len(train))
    sub = Graph(len(train), [set() for _ in train], np.ones(len(train), dtype=bool))
    for u in train:
        nu = remap[u]
        for v in g.adjacency[u]:
            nv = remap[v]
            if nv >= 0:
                sub.adjacency[nu].add(int(nv))
    return sub, attrs.subset(train, all_train=True), remap


def compact_alive(g: Graph) -> tuple[Graph, np.ndarray]:
    """Re-index the alive nodes to [0, num_alive); returns (graph, orig ids)."""
    survivors = g.alive_nodes()
    remap = np.full(g.num_nodes, -1, dtype=np.int64)
    remap[survivors] = np.arange(len(survivors))
    out = Graph(len(survivors), [set() for _ in survivors], np.ones(len(survivors), dtype=bool))
    for u in survivors:
        nu = remap[u]
        out.adjacency[nu] = {int(remap[v]) for v in g.adjacency[u]}
    return out, survivors


def connected_components(g: Graph) -> int:
    """Number of connected components among alive nodes."""
    seen = np.zeros(g.num_nodes, dtype=bool)
    count = 0
    for s in range(g.num_nodes):
        if not g.alive[s] or seen[s]:
            continue
        count += 1
        stack = [s]
        seen[s] = True
        while stack:
            u = stack.pop()
            for v in g.adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
    return count


def write_edge_list(g: Graph, path) -> None:
    """Frozen-graph export: '# nodes=N edges=M' header then 'u v' lines."""
    edges = g.edges()
    with open(path, "w") as fh:
        fh.write(f"# nodes={g.num_nodes} edges={len(edges)}\n")
        for u, v in edges:
            fh.write(f"{u} {v}\n")


def read_edge_list(path, num_nodes: int | None = None) -> Graph:
    """Parse 'u v' pairs; '#' starts a comment. A '# nodes=N edges=M' header
    fixes the node count, otherwise max id + 1 (or the num_nodes override)."""
    edges = []
    header_nodes = None
    max_id = -1
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if raw.lstrip().startswith("#") and "nodes=" in raw:
                try:
                    header_nodes = int(raw.split("nodes=")[1].split()[0])
                except (IndexError, ValueError):
                    raise DataError(f"{path}:{lineno}: malformed header {raw.strip()!r}")
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected 'u v', got {raw.strip()!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-integer node id in {raw.strip()!r}")
            max_id = max(max_id, u, v)
            edges.append((u, v))
    n = num_nodes if num_nodes is not None else (header_nodes if header_nodes is not None else max_id + 1)
    if max_id >= n:
        raise DataError(f"{path}: node id {max_id} out of range for {n} nodes")
    return build_graph(edges, n)
