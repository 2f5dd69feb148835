"""Independent brute-force oracles used to pin expected values.

Everything here works on dense numpy matrices (or plain dicts for the
collapse simulator) and stays deliberately separate from the library's
CSR/kernel code paths.
"""

import numpy as np


def dense_adjacency(edges, n):
    a = np.zeros((n, n))
    for u, v in edges:
        if u != v:
            a[u, v] = a[v, u] = 1.0
    return a


def random_graph(rng, n, p, ensure_connected=False):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    if ensure_connected and n > 1:
        perm = rng.permutation(n)
        edges += [(int(perm[i]), int(perm[i + 1])) for i in range(n - 1)]
    return edges


def all_pairs_dist(a):
    """Distance matrix by simultaneous frontier expansion; -1 = unreachable."""
    n = a.shape[0]
    dist = np.full((n, n), -1, dtype=np.int64)
    reached = np.eye(n, dtype=bool)
    frontier = np.eye(n, dtype=bool)
    np.fill_diagonal(dist, 0)
    d = 0
    while frontier.any():
        d += 1
        nxt = (frontier @ (a > 0)) & ~reached
        dist[nxt] = d
        reached |= nxt
        frontier = nxt
    return dist


def shortest_path_counts(a, dist):
    """sigma[s, t] = number of shortest s->t paths, by distance-level DP."""
    n = a.shape[0]
    sigma = np.eye(n)
    for d in range(1, dist.max() + 1 if dist.max() > 0 else 1):
        contrib = (sigma * (dist == d - 1)) @ a
        sigma = sigma + contrib * (dist == d)
    return sigma


def dc_oracle(a):
    return a.sum(axis=1)


def bc_oracle(a):
    """Pair-summation betweenness: sum over unordered reachable pairs of
    sigma(s,v)*sigma(v,t)/sigma(s,t) where v lies on a shortest path."""
    n = a.shape[0]
    dist = all_pairs_dist(a)
    sigma = shortest_path_counts(a, dist)
    bc = np.zeros(n)
    for v in range(n):
        on_path = (dist[:, v:v + 1] + dist[v:v + 1, :] == dist) \
            & (dist >= 0) & (dist[:, v:v + 1] >= 0) & (dist[v:v + 1, :] >= 0)
        valid = on_path & (dist > 0)  # excludes s == t
        valid[v, :] = False
        valid[:, v] = False
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(valid, sigma[:, v:v + 1] * sigma[v:v + 1, :] / np.where(sigma > 0, sigma, 1), 0.0)
        bc[v] = np.triu(frac, 1).sum()
    return bc


def cc_oracle(a):
    """Wasserman-Faust closeness from the brute-force distance matrix."""
    n = a.shape[0]
    dist = all_pairs_dist(a)
    cc = np.zeros(n)
    for v in range(n):
        reach = (dist[v] >= 0).sum()
        total = dist[v][dist[v] > 0].sum()
        if total > 0:
            cc[v] = (reach - 1.0) ** 2 / ((n - 1.0) * total)
    return cc


def pr_oracle(a, damping=0.85):
    """Dense linear solve of the damped random-walk fixed point."""
    n = a.shape[0]
    deg = a.sum(axis=0)
    m = np.where(deg > 0, a / np.where(deg > 0, deg, 1.0), 1.0 / n)
    p = np.linalg.solve(np.eye(n) - damping * m, np.full(n, (1.0 - damping) / n))
    return p / p.sum()


def ec_oracle(a):
    """Dominant eigenvector via a dense symmetric eigensolver."""
    w, v = np.linalg.eigh(a)
    x = v[:, np.argmax(w)]
    x = np.abs(x)
    return x / np.linalg.norm(x)


def sign_oracle(edges, n, x, hops):
    """Dense normalized adjacency and hop blocks."""
    a = dense_adjacency(edges, n)
    d = 1.0 + a.sum(axis=1)
    s = 1.0 / np.sqrt(d)
    at = (a + np.eye(n)) * np.outer(s, s)
    blocks = [np.asarray(x, dtype=np.float64)]
    for _ in range(hops):
        blocks.append(at @ blocks[-1])
    return at, np.hstack(blocks)


def count_components(edges, n, alive=None):
    alive = set(range(n)) if alive is None else set(alive)
    adj = {v: set() for v in alive}
    for u, v in edges:
        if u in alive and v in alive and u != v:
            adj[u].add(v)
            adj[v].add(u)
    seen = set()
    comps = 0
    for s in alive:
        if s in seen:
            continue
        comps += 1
        stack = [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return comps


def simulate_collapse(edges, n, clusters, budgets, phi):
    """Line-by-line simulation of the budgeted contraction loop.

    Returns (surviving edge set in original ids, survivor set, resolved
    original->survivor map with -1 for isolated drops).
    """
    adj = {v: set() for v in range(n)}
    for u, v in edges:
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    alive = set(range(n))
    parent = {v: v for v in range(n)}
    for members, budget in zip(clusters, budgets):
        pool = [v for v in members if v in alive]
        while len(pool) > budget:
            v_k = min(pool, key=lambda v: (phi[v], v))
            if adj[v_k]:
                top = max(phi[w] for w in adj[v_k])
                v_s = min(w for w in adj[v_k] if phi[w] == top)
                for w in list(adj[v_k]):
                    adj[w].discard(v_k)
                    if w != v_s:
                        adj[w].add(v_s)
                        adj[v_s].add(w)
                adj[v_k] = set()
                parent[v_k] = v_s
            else:
                parent[v_k] = -1
            alive.discard(v_k)
            pool.remove(v_k)

    def resolve(v):
        while parent[v] not in (-1, v):
            v = parent[v]
        return -1 if parent[v] == -1 else v

    resolved = {v: resolve(v) for v in range(n)}
    surviving_edges = {(min(u, v), max(u, v)) for u in alive for v in adj[u] if u != v}
    return surviving_edges, alive, resolved


def finite_difference_grads(loss_fn, params, h=1e-6):
    """Central differences of loss_fn() w.r.t. each array in params."""
    grads = []
    for p in params:
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        while not it.finished:
            idx = it.multi_index
            orig = p[idx]
            p[idx] = orig + h
            hi = loss_fn()
            p[idx] = orig - h
            lo = loss_fn()
            p[idx] = orig
            g[idx] = (hi - lo) / (2 * h)
            it.iternext()
        grads.append(g)
    return grads
