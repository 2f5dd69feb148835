"""Symmetric normalized adjacency and k-hop pre-aggregated feature tensors.

The aggregation is decoupled from training: Z = [X, AX, ..., A^n X] is built
once per graph, after which the trainer sees independent rows.
"""

import struct
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix

from .errors import CorruptionError, ShapeError
from .graph import Graph

_MAGIC = b"GCKZTN01"


@dataclass
class SparseMatrix:
    """Square CSR triplet. Values are built edge-symmetrically, so
    value(i,j) == value(j,i) holds exactly, not just within float error."""

    indptr: np.ndarray
    indices: np.ndarray
    values: np.ndarray
    shape: int

    def to_scipy(self) -> csr_matrix:
        return csr_matrix((self.values, self.indices, self.indptr),
                          shape=(self.shape, self.shape))

    def dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def matmul(self, x: np.ndarray) -> np.ndarray:
        if x.shape[0] != self.shape:
            raise ShapeError(f"matrix is {self.shape}x{self.shape}, operand has {x.shape[0]} rows")
        return self.to_scipy() @ x


@dataclass
class SignTensor:
    z: np.ndarray  # |V| x (hops+1)*F
    hops: int
    source_feature_dim: int

    def block(self, k: int) -> np.ndarray:
        f = self.source_feature_dim
        return self.z[:, k * f:(k + 1) * f]


def normalized_adjacency(g: Graph) -> SparseMatrix:
    """A~ = D^{-1/2} (A + I) D^{-1/2} with D = 1 + degree (self-loop added).

    Entry (i, j) is 1/sqrt(d_i * d_j); the product d_i*d_j commutes, so the
    matrix is exactly symmetric. An isolated node gets the single entry 1.
    """
    n = g.num_nodes
    indptr, adj_indices = g.to_csr()
    d = (np.diff(indptr) + 1).astype(np.float64)
    out_indptr = np.zeros(n + 1, dtype=np.int64)
    out_indices = np.empty(len(adj_indices) + n, dtype=np.int64)
    out_values = np.empty(len(adj_indices) + n, dtype=np.float64)
    pos = 0
    for i in range(n):
        row = adj_indices[indptr[i]:indptr[i + 1]]
        placed_diag = False
        for j in row:
            if not placed_diag and j > i:
                out_indices[pos] = i
                out_values[pos] = 1.0 / d[i]
                placed_diag = True
                pos += 1
            out_indices[pos] = j
            out_values[pos] = 1.0 / np.sqrt(d[i] * d[j])
            pos += 1
        if not placed_diag:
            out_indices[pos] = i
            out_values[pos] = 1.0 / d[i]
            pos += 1
        out_indptr[i + 1] = pos
    return SparseMatrix(out_indptr, out_indices, out_values, n)


def sign_features(a_tilde: SparseMatrix, x: np.ndarray, hops: int) -> SignTensor:
    """Z = [X, A~X, ..., A~^n X] by repeated sparse-dense products; powers of
    A~ are never materialized."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError(f"features must be 2-D, got shape {x.shape}")
    if hops < 0:
        raise ShapeError(f"hops must be >= 0, got {hops}")
    if x.shape[0] != a_tilde.shape:
        raise ShapeError(f"features have {x.shape[0]} rows, matrix is {a_tilde.shape}x{a_tilde.shape}")
    blocks = [x]
    for _ in range(hops):
        blocks.append(a_tilde.matmul(blocks[-1]))
    return SignTensor(np.hstack(blocks), hops, x.shape[1])


def save_sign_tensor(t: SignTensor, path) -> None:
    """Flat binary: 8-byte magic, little-endian uint64 (|V|, F, hops), then
    row-major float64 data."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<QQQ", t.z.shape[0], t.source_feature_dim, t.hops))
        fh.write(np.ascontiguousarray(t.z, dtype="<f8").tobytes())


def load_sign_tensor(path) -> SignTensor:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _MAGIC:
            raise CorruptionError(f"{path}: bad magic {magic!r}")
        header = fh.read(24)
        if len(header) != 24:
            raise CorruptionError(f"{path}: truncated header")
        n, f, hops = struct.unpack("<QQQ", header)
        payload = fh.read()
    expected = n * f * (hops + 1) * 8
    if len(payload) != expected:
        raise CorruptionError(f"{path}: expected {expected} payload bytes, found {len(payload)}")
    z = np.frombuffer(payload, dtype="<f8").reshape(n, (hops + 1) * f).astype(np.float64)
    return SignTensor(z, int(hops), int(f))


def sign_tensor_to_csv(t: SignTensor, path) -> None:
    """Wide CSV for small instances; columns h{hop}f{feature}."""
    f = t.source_feature_dim
    cols = ",".join(f"h{k}f{j}" for k in range(t.hops + 1) for j in range(f))
    with open(path, "w") as fh:
        fh.write(f"node_id,{cols}\n")
        for i, row in enumerate(t.z):
            fh.write(str(i) + "," + ",".join(repr(float(v)) for v in row) + "\n")
