"""Compiled and pure kernels must agree exactly; both are exercised here
regardless of which one the package selected at import."""

import numpy as np
import pytest

import gck._kernels as kernels
from gck._kernels import pure
from gck.graph import build_graph

from oracles import random_graph

try:
    from gck._kernels import _ckern
except ImportError:
    _ckern = None

BACKENDS = [("python", pure)] + ([("compiled", _ckern)] if _ckern else [])


def csr_of(edges, n):
    return build_graph(edges, n).to_csr()


@pytest.mark.parametrize("name,impl", BACKENDS)
class TestKernels:
    def test_closeness_stats_path(self, name, impl):
        indptr, indices = csr_of([(0, 1), (1, 2)], 3)
        sums, reach = impl.closeness_stats(indptr, indices, np.arange(3, dtype=np.int64))
        assert sums.tolist() == [3, 2, 3]
        assert reach.tolist() == [3, 3, 3]

    def test_closeness_disconnected(self, name, impl):
        indptr, indices = csr_of([(0, 1)], 3)
        sums, reach = impl.closeness_stats(indptr, indices, np.arange(3, dtype=np.int64))
        assert sums.tolist() == [1, 1, 0]
        assert reach.tolist() == [2, 2, 1]

    def test_brandes_path(self, name, impl):
        indptr, indices = csr_of([(0, 1), (1, 2)], 3)
        acc = impl.brandes_partial(indptr, indices, np.arange(3, dtype=np.int64))
        # raw deltas count each unordered pair twice
        np.testing.assert_allclose(acc, [0.0, 2.0, 0.0])


@pytest.mark.skipif(_ckern is None, reason="compiled kernels not built")
class TestBackendsAgree:
    def test_random_graphs(self, rng):
        for trial in range(12):
            n = int(rng.integers(2, 60))
            edges = random_graph(rng, n, 0.2)
            indptr, indices = csr_of(edges, n)
            sources = np.arange(n, dtype=np.int64)
            s1, r1 = pure.closeness_stats(indptr, indices, sources)
            s2, r2 = _ckern.closeness_stats(indptr, indices, sources)
            np.testing.assert_array_equal(s1, s2)
            np.testing.assert_array_equal(r1, r2)
            b1 = pure.brandes_partial(indptr, indices, sources)
            b2 = _ckern.brandes_partial(indptr, indices, sources)
            np.testing.assert_allclose(b1, b2, atol=1e-12)

    def test_partial_sources(self, rng):
        edges = random_graph(rng, 30, 0.2)
        indptr, indices = csr_of(edges, 30)
        sources = np.array([3, 11, 27], dtype=np.int64)
        np.testing.assert_allclose(pure.brandes_partial(indptr, indices, sources),
                                   _ckern.brandes_partial(indptr, indices, sources),
                                   atol=1e-12)


def test_selected_backend_exposed():
    assert kernels.BACKEND in ("python", "compiled")
    assert callable(kernels.closeness_stats)
