# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled BFS kernels for the hot centrality loops.

Both functions release the GIL, so chunked multi-threading from the caller
gets real parallelism.
"""

import numpy as np

cimport numpy as cnp


def closeness_stats(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                    cnp.int64_t[::1] sources):
    """Per-source BFS: (sum of distances to reachable nodes, reachable count
    including the source)."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t ns = sources.shape[0]
    sums_arr = np.zeros(ns, dtype=np.int64)
    reach_arr = np.zeros(ns, dtype=np.int64)
    dist_arr = np.empty(n, dtype=np.int64)
    queue_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] sums = sums_arr
    cdef cnp.int64_t[::1] reach = reach_arr
    cdef cnp.int64_t[::1] dist = dist_arr
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef Py_ssize_t si, i, head, tail
    cdef cnp.int64_t s, v, w, total, cnt
    with nogil:
        for si in range(ns):
            s = sources[si]
            for v in range(n):
                dist[v] = -1
            dist[s] = 0
            queue[0] = s
            head = 0
            tail = 1
            total = 0
            cnt = 1
            while head < tail:
                v = queue[head]
                head += 1
                for i in range(indptr[v], indptr[v + 1]):
                    w = indices[i]
                    if dist[w] < 0:
                        dist[w] = dist[v] + 1
                        total += dist[w]
                        cnt += 1
                        queue[tail] = w
                        tail += 1
            sums[si] = total
            reach[si] = cnt
    return sums_arr, reach_arr


def brandes_partial(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                    cnp.int64_t[::1] sources):
    """Brandes dependency accumulation over the given BFS sources.

    Returns the raw per-node delta sums; undirected halving and sample
    rescaling are the caller's business.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t ns = sources.shape[0]
    acc_arr = np.zeros(n, dtype=np.float64)
    dist_arr = np.empty(n, dtype=np.int64)
    order_arr = np.empty(n, dtype=np.int64)
    sigma_arr = np.empty(n, dtype=np.float64)
    delta_arr = np.empty(n, dtype=np.float64)
    cdef cnp.float64_t[::1] acc = acc_arr
    cdef cnp.int64_t[::1] dist = dist_arr
    cdef cnp.int64_t[::1] order = order_arr
    cdef cnp.float64_t[::1] sigma = sigma_arr
    cdef cnp.float64_t[::1] delta = delta_arr
    cdef Py_ssize_t si, i, head, tail, oi
    cdef cnp.int64_t s, v, w
    cdef double coeff
    with nogil:
        for si in range(ns):
            s = sources[si]
            for v in range(n):
                dist[v] = -1
                sigma[v] = 0.0
                delta[v] = 0.0
            dist[s] = 0
            sigma[s] = 1.0
            order[0] = s
            head = 0
            tail = 1
            while head < tail:
                v = order[head]
                head += 1
                for i in range(indptr[v], indptr[v + 1]):
                    w = indices[i]
                    if dist[w] < 0:
                        dist[w] = dist[v] + 1
                        order[tail] = w
                        tail += 1
                    if dist[w] == dist[v] + 1:
                        sigma[w] += sigma[v]
            for oi in range(tail - 1, -1, -1):
                w = order[oi]
                coeff = (1.0 + delta[w]) / sigma[w]
                for i in range(indptr[w], indptr[w + 1]):
                    v = indices[i]
                    if dist[v] == dist[w] - 1:
                        delta[v] += sigma[v] * coeff
                if w != s:
                    acc[w] += delta[w]
    return acc_arr
