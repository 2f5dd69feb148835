"""Budgeted graph collapse by centrality-guided edge contraction.

The feature-label constrained variant distributes the survivor budget over
K-Means clusters of the normalized feature-label matrix; the agnostic
variant runs the same contraction with a single global cluster.
"""

import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np

from .centrality import compute_centrality
from .cluster import ClusterAssignment, build_m, distribute_budget, kmeans
from .errors import Deadline, ParameterError, ShapeError
from .graph import AttributeSet, Graph, MergeMap, compact_alive, merge_node, remove_isolated

log = logging.getLogger(__name__)


@dataclass
class CollapseParams:
    psi: int
    eta: int = 100
    gamma: float = 0.5
    zeta: str = "ec"
    centrality_params: dict = field(default_factory=dict)
    seed: int = 0


@dataclass
class CollapseResult:
    graph: Graph              # compacted survivors, ids 0..survivor_count-1
    attrs: AttributeSet       # rows are the untouched originals of survivors
    merge_map: MergeMap       # original id -> surviving original id (or -1)
    survivor_count: int
    per_cluster_removed: np.ndarray
    survivors: np.ndarray     # original id of each compacted node, ascending
    budgets: np.ndarray

    def persist(self, out_dir, params: CollapseParams) -> dict:
        """Write edge list, survivor attribute CSVs and a JSON manifest;
        returns the manifest dict."""
        from .dataio import write_matrix_csv
        from .graph import write_edge_list

        os.makedirs(out_dir, exist_ok=True)
        paths = {
            "edges": os.path.join(out_dir, "collapsed_edges.txt"),
            "features": os.path.join(out_dir, "collapsed_features.csv"),
            "labels": os.path.join(out_dir, "collapsed_labels.csv"),
            "merge_map": os.path.join(out_dir, "merge_map.csv"),
            "manifest": os.path.join(out_dir, "collapse_manifest.json"),
        }
        write_edge_list(self.graph, paths["edges"])
        write_matrix_csv(self.attrs.features, paths["features"], "x")
        write_matrix_csv(self.attrs.labels, paths["labels"], "y")
        with open(paths["merge_map"], "w") as fh:
            fh.write("node_id,survivor\n")
            for v, s in enumerate(self.merge_map.survivor_of):
                fh.write(f"{v},{s}\n")
        manifest = {
            "psi": params.psi,
            "eta": params.eta,
            "gamma": params.gamma,
            "zeta": params.zeta,
            "seed": params.seed,
            "survivor_count": self.survivor_count,
            "per_cluster_budgets": self.budgets.tolist(),
        }
        with open(paths["manifest"], "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
        return manifest


def tie_break(candidates, phi: np.ndarray) -> int:
    """Highest-score candidate; equal scores resolve to the lowest node id."""
    cands = sorted(candidates)
    if not cands:
        raise ParameterError("tie_break needs a non-empty candidate set")
    best = cands[0]
    for v in cands[1:]:
        if phi[v] > phi[best]:
            best = v
    return best


def _contract_cluster(g: Graph, members: list[int], removals: int, phi: np.ndarray,
                      merge_map: MergeMap) -> None:
    """Remove the `removals` lowest-scored members, merging each into its
    highest-scored alive neighbor (which may sit in another cluster)."""
    order = sorted(members, key=lambda v: (phi[v], v))
    for v_k in order[:removals]:
        if g.adjacency[v_k]:
            v_s = tie_break(g.adjacency[v_k], phi)
            merge_node(g, v_k, v_s)
            merge_map.record(v_k, v_s)
        else:
            remove_isolated(g, v_k)
            merge_map.record(v_k, -1)


def _run_collapse(g: Graph, attrs: AttributeSet, phi: np.ndarray,
                  clusters: list[list[int]], budgets: np.ndarray) -> CollapseResult:
    work = g.copy()
    merge_map = MergeMap.identity(g.num_nodes)
    removed = np.zeros(len(clusters), dtype=np.int64)
    for i, members in enumerate(clusters):
        removals = len(members) - int(budgets[i])
        _contract_cluster(work, members, removals, phi, merge_map)
        removed[i] = removals
    merge_map.compress(work.alive)
    compacted, survivors = compact_alive(work)
    return CollapseResult(
        graph=compacted,
        attrs=attrs.subset(survivors, all_train=True),
        merge_map=merge_map,
        survivor_count=len(survivors),
        per_cluster_removed=removed,
        survivors=survivors,
        budgets=np.asarray(budgets, dtype=np.int64),
    )


def _validate_inputs(g: Graph, attrs: AttributeSet, psi: int) -> int:
    n = g.num_nodes
    if not g.alive.all():
        raise ParameterError("collapse expects a frozen all-alive training subgraph")
    if attrs.num_nodes != n:
        raise ShapeError(f"attributes cover {attrs.num_nodes} nodes, graph has {n}")
    if not 0 < psi <= n:
        raise ParameterError(f"psi must lie in (0, {n}], got {psi}")
    return n


def falcon_collapse(g: Graph, attrs: AttributeSet, params: CollapseParams,
                    phi: np.ndarray | None = None,
                    assignment: ClusterAssignment | None = None,
                    workers: int = 1, deadline: Deadline | None = None) -> CollapseResult:
    """Feature-label constrained collapse down to params.psi nodes.

    Centrality is computed once on the input graph and never refreshed.
    phi/assignment may be passed in pre-computed (the pipeline does, for
    per-stage timing); eta is clamped to the node count.
    """
    n = _validate_inputs(g, attrs, params.psi)
    if phi is None:
        cp = dict(params.centrality_params)
        cp.setdefault("seed", params.seed)
        phi = compute_centrality(g, params.zeta, cp, workers=workers,
                                 deadline=deadline).values
    if len(phi) != n:
        raise ShapeError(f"phi has {len(phi)} entries, graph has {n} nodes")
    if assignment is None:
        eta = min(params.eta, n)
        m = build_m(attrs.features, attrs.labels, params.gamma)
        assignment = kmeans(m, eta, seed=params.seed)
    budgets = distribute_budget(assignment, params.psi)
    clusters = [np.flatnonzero(assignment.cluster_of == i).tolist()
                for i in range(assignment.eta)]
    return _run_collapse(g, attrs, phi, clusters, budgets)


def agnostic_collapse(g: Graph, attrs: AttributeSet, psi: int, zeta: str,
                      centrality_params: dict | None = None, seed: int = 0,
                      workers: int = 1, deadline: Deadline | None = None) -> CollapseResult:
    """Feature-label agnostic baseline: one global cluster, same contraction.

    Behaves exactly like falcon_collapse with eta=1 and is exposed separately
    for the ablation.
    """
    n = _validate_inputs(g, attrs, psi)
    cp = dict(centrality_params or {})
    cp.setdefault("seed", seed)
    phi = compute_centrality(g, zeta, cp, workers=workers, deadline=deadline).values
    clusters = [list(range(n))]
    return _run_collapse(g, attrs, phi, clusters, np.array([psi], dtype=np.int64))
