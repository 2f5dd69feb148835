import numpy as np
import pytest

from gck.errors import CorruptionError, ShapeError
from gck.graph import build_graph
from gck.sign import (
    load_sign_tensor,
    normalized_adjacency,
    save_sign_tensor,
    sign_features,
    sign_tensor_to_csv,
)

from oracles import random_graph, sign_oracle


class TestNormalizedAdjacency:
    def test_isolated_node(self):
        at = normalized_adjacency(build_graph([], 1))
        np.testing.assert_array_equal(at.dense(), [[1.0]])

    def test_single_edge(self):
        # hand evaluation: D = [2, 2], all entries 1/2
        at = normalized_adjacency(build_graph([(0, 1)], 2))
        np.testing.assert_allclose(at.dense(), [[0.5, 0.5], [0.5, 0.5]], atol=0)

    def test_triangle_uniform(self):
        at = normalized_adjacency(build_graph([(0, 1), (1, 2), (0, 2)], 3))
        np.testing.assert_allclose(at.dense(), np.full((3, 3), 1 / 3), atol=1e-15)

    def test_symmetry_exact_and_spectrum_bounded(self, rng):
        for trial in range(10):
            n = int(rng.integers(2, 40))
            edges = random_graph(rng, n, 0.2)
            dense = normalized_adjacency(build_graph(edges, n)).dense()
            assert (dense == dense.T).all()  # exact, not approximate
            eigs = np.linalg.eigvalsh(dense)
            assert np.abs(eigs).max() <= 1.0 + 1e-9

    def test_matches_dense_oracle(self, rng):
        edges = random_graph(rng, 15, 0.3)
        at = normalized_adjacency(build_graph(edges, 15))
        expected, _ = sign_oracle(edges, 15, np.zeros((15, 1)), 0)
        np.testing.assert_allclose(at.dense(), expected, atol=1e-15)


class TestSignFeatures:
    def test_zero_hops_is_x(self, rng):
        x = rng.random((5, 3))
        at = normalized_adjacency(build_graph([(0, 1), (2, 3)], 5))
        t = sign_features(at, x, 0)
        np.testing.assert_array_equal(t.z, x)
        assert t.hops == 0

    def test_two_hops_on_single_edge(self):
        # hand products with the all-0.5 matrix above
        at = normalized_adjacency(build_graph([(0, 1)], 2))
        t = sign_features(at, np.array([[1.0], [0.0]]), 2)
        np.testing.assert_allclose(t.block(0), [[1.0], [0.0]])
        np.testing.assert_allclose(t.block(1), [[0.5], [0.5]])
        np.testing.assert_allclose(t.block(2), [[0.5], [0.5]])

    def test_ones_preserved_on_regular_graphs(self):
        # on a d-regular graph every row of A~ sums to exactly 1
        k5 = [(i, j) for i in range(5) for j in range(i + 1, 5)]
        at = normalized_adjacency(build_graph(k5, 5))
        t = sign_features(at, np.ones((5, 1)), 4)
        np.testing.assert_allclose(t.z, 1.0, atol=1e-12)

    def test_spectral_radius_keeps_hops_l2_bounded(self, rng):
        # irregular graphs can push single entries of A~^k 1 past 1, but the
        # L2 norm never expands because |lambda|max <= 1
        edges = random_graph(rng, 20, 0.3)
        at = normalized_adjacency(build_graph(edges, 20))
        t = sign_features(at, np.ones((20, 1)), 4)
        norms = [np.linalg.norm(t.block(k)) for k in range(5)]
        assert all(b <= a + 1e-9 for a, b in zip(norms, norms[1:]))

    def test_block_recurrence_matches_oracle(self, rng):
        for trial in range(8):
            n = int(rng.integers(3, 60))
            edges = random_graph(rng, n, 0.2)
            x = rng.random((n, int(rng.integers(1, 5))))
            at = normalized_adjacency(build_graph(edges, n))
            t = sign_features(at, x, 3)
            _, expected = sign_oracle(edges, n, x, 3)
            np.testing.assert_allclose(t.z, expected, atol=1e-9)
            for k in range(1, 4):
                np.testing.assert_allclose(t.block(k), at.matmul(t.block(k - 1)), atol=1e-9)

    def test_shape_errors(self, rng):
        at = normalized_adjacency(build_graph([(0, 1)], 2))
        with pytest.raises(ShapeError):
            sign_features(at, rng.random((3, 2)), 1)
        with pytest.raises(ShapeError):
            sign_features(at, rng.random((2, 2)), -1)


class TestPersistence:
    def test_binary_round_trip(self, tmp_path, rng):
        edges = random_graph(rng, 9, 0.4)
        at = normalized_adjacency(build_graph(edges, 9))
        t = sign_features(at, rng.random((9, 4)), 2)
        path = tmp_path / "z.bin"
        save_sign_tensor(t, path)
        t2 = load_sign_tensor(path)
        np.testing.assert_array_equal(t.z, t2.z)
        assert (t2.hops, t2.source_feature_dim) == (2, 4)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "z.bin"
        path.write_bytes(b"NOTMAGIC" + b"\x00" * 24)
        with pytest.raises(CorruptionError):
            load_sign_tensor(path)

    def test_truncated_payload(self, tmp_path, rng):
        at = normalized_adjacency(build_graph([(0, 1)], 2))
        t = sign_features(at, rng.random((2, 2)), 1)
        path = tmp_path / "z.bin"
        save_sign_tensor(t, path)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(CorruptionError):
            load_sign_tensor(path)

    def test_csv_export(self, tmp_path):
        at = normalized_adjacency(build_graph([(0, 1)], 2))
        t = sign_features(at, np.array([[1.0], [0.0]]), 1)
        path = tmp_path / "z.csv"
        sign_tensor_to_csv(t, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "node_id,h0f0,h1f0"
        assert lines[1] == "0,1.0,0.5"
