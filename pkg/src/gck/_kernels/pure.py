"""Pure-Python BFS kernels, the fallback when the Cython module is absent.

Same contracts as gck._kernels._ckern; see that module for the fast path.
"""

from collections import deque

import numpy as np


def closeness_stats(indptr, indices, sources):
    """Per-source BFS: (sum of distances to reachable nodes, reachable count
    including the source)."""
    n = len(indptr) - 1
    sums = np.zeros(len(sources), dtype=np.int64)
    reach = np.zeros(len(sources), dtype=np.int64)
    for si, s in enumerate(sources):
        dist = [-1] * n
        dist[s] = 0
        q = deque([s])
        total = 0
        cnt = 1
        while q:
            v = q.popleft()
            for i in range(indptr[v], indptr[v + 1]):
                w = indices[i]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    total += dist[w]
                    cnt += 1
                    q.append(w)
        sums[si] = total
        reach[si] = cnt
    return sums, reach


def brandes_partial(indptr, indices, sources):
    """Brandes dependency accumulation over the given BFS sources.

    Returns the raw per-node delta sums; undirected halving and sample
    rescaling are the caller's business.
    """
    n = len(indptr) - 1
    acc = np.zeros(n, dtype=np.float64)
    for s in sources:
        dist = [-1] * n
        sigma = [0.0] * n
        dist[s] = 0
        sigma[s] = 1.0
        order = []
        q = deque([s])
        while q:
            v = q.popleft()
            order.append(v)
            for i in range(indptr[v], indptr[v + 1]):
                w = indices[i]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    q.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for i in range(indptr[w], indptr[w + 1]):
                v = indices[i]
                if dist[v] == dist[w] - 1:
                    delta[v] += sigma[v] * coeff
            if w != s:
                acc[w] += delta[w]
    return acc
