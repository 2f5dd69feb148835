"""Dataset file formats: edge-list text, headered feature/label CSVs, and a
node_id,split mask CSV. Everything is plain text for diffability."""

import csv
import logging

import numpy as np

from .errors import DataError
from .graph import MULTI_CLASS, MULTI_LABEL, AttributeSet, Graph, read_edge_list, write_edge_list

log = logging.getLogger(__name__)

SPLITS = ("train", "val", "test")


def write_matrix_csv(m: np.ndarray, path, prefix: str) -> None:
    cols = ",".join(f"{prefix}{j}" for j in range(m.shape[1]))
    with open(path, "w") as fh:
        fh.write(f"node_id,{cols}\n")
        for i, row in enumerate(m):
            fh.write(str(i) + "," + ",".join(repr(float(v)) for v in row) + "\n")


def read_matrix_csv(path) -> np.ndarray:
    """Headered CSV with a node_id first column covering 0..n-1 exactly once."""
    rows = {}
    width = None
    with open(path) as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file")
        if not header or header[0] != "node_id":
            raise DataError(f"{path}:1: first column must be node_id, got {header[:1]}")
        width = len(header) - 1
        if width < 1:
            raise DataError(f"{path}:1: no value columns")
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != width + 1:
                raise DataError(f"{path}:{lineno}: expected {width + 1} fields, got {len(rec)}")
            try:
                node = int(rec[0])
                vals = [float(v) for v in rec[1:]]
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}")
            if node in rows:
                raise DataError(f"{path}:{lineno}: duplicate node_id {node}")
            rows[node] = vals
    n = len(rows)
    if sorted(rows) != list(range(n)):
        raise DataError(f"{path}: node_id column must cover 0..{n - 1} exactly once")
    return np.array([rows[i] for i in range(n)], dtype=np.float64)


def write_masks_csv(attrs: AttributeSet, path) -> None:
    with open(path, "w") as fh:
        fh.write("node_id,split\n")
        for name, mask in zip(SPLITS, (attrs.train_mask, attrs.val_mask, attrs.test_mask)):
            for v in np.flatnonzero(mask):
                fh.write(f"{v},{name}\n")


def read_masks_csv(path, num_nodes: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    masks = {name: np.zeros(num_nodes, dtype=bool) for name in SPLITS}
    seen = np.zeros(num_nodes, dtype=bool)
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["node_id", "split"]:
            raise DataError(f"{path}:1: expected header 'node_id,split'")
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != 2:
                raise DataError(f"{path}:{lineno}: expected 'node_id,split'")
            try:
                node = int(rec[0])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}")
            if not 0 <= node < num_nodes:
                raise DataError(f"{path}:{lineno}: node_id {node} out of range for {num_nodes} nodes")
            split = rec[1].strip()
            if split not in SPLITS:
                raise DataError(f"{path}:{lineno}: split must be one of {SPLITS}, got {split!r}")
            if seen[node]:
                raise DataError(f"{path}:{lineno}: node {node} assigned to more than one split")
            seen[node] = True
            masks[split][node] = True
    return masks["train"], masks["val"], masks["test"]


def infer_task_kind(labels: np.ndarray) -> str:
    return MULTI_CLASS if (labels.sum(axis=1) == 1).all() else MULTI_LABEL


def load_dataset(edges_path, features_path, labels_path, masks_path,
                 task_kind: str | None = None) -> tuple[Graph, AttributeSet]:
    """Parse and cross-validate the four dataset files."""
    features = read_matrix_csv(features_path)
    labels = read_matrix_csv(labels_path)
    n = features.shape[0]
    if labels.shape[0] != n:
        raise DataError(f"{labels_path} has {labels.shape[0]} rows but "
                        f"{features_path} has {n}")
    graph = read_edge_list(edges_path, num_nodes=None)
    if graph.num_nodes > n:
        raise DataError(f"{edges_path} references {graph.num_nodes} nodes but "
                        f"{features_path} has {n} rows")
    if graph.num_nodes < n:
        # trailing isolated nodes carry no edges; widen the graph
        graph = Graph(n, graph.adjacency + [set() for _ in range(n - graph.num_nodes)],
                      np.ones(n, dtype=bool))
    train, val, test = read_masks_csv(masks_path, n)
    attrs = AttributeSet(features, labels, train, val, test,
                         task_kind or infer_task_kind(labels))
    attrs.validate()
    return graph, attrs


def save_dataset(g: Graph, attrs: AttributeSet, edges_path, features_path,
                 labels_path, masks_path) -> None:
    write_edge_list(g, edges_path)
    write_matrix_csv(attrs.features, features_path, "x")
    write_matrix_csv(attrs.labels, labels_path, "y")
    write_masks_csv(attrs, masks_path)
