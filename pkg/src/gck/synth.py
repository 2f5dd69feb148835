"""Seeded synthetic fixtures: stochastic block models with per-block labels
and Gaussian per-label feature means, plus a construction that starves one
label of centrality (dense majority blob, sparse low-degree minority)."""

import numpy as np

from .graph import MULTI_CLASS, AttributeSet, Graph, build_graph


def _block_pairs(nodes_a, nodes_b, p, rng, same):
    """Sparse Bernoulli sampling of cross/within-block pairs."""
    if p <= 0:
        return []
    if same:
        n = len(nodes_a)
        total = n * (n - 1) // 2
    else:
        total = len(nodes_a) * len(nodes_b)
    if total == 0:
        return []
    count = rng.binomial(total, p)
    if count == 0:
        return []
    picks = rng.choice(total, size=count, replace=False)
    edges = []
    if same:
        # unrank upper-triangle pair index; offset(i) = i*(2n-i-1)/2
        nodes = nodes_a
        n = len(nodes)

        def offset(i):
            return i * (2 * n - i - 1) // 2

        for k in picks:
            i = int((2 * n - 1 - np.sqrt((2 * n - 1) ** 2 - 8 * k)) // 2)
            while i > 0 and offset(i) > k:
                i -= 1
            while offset(i + 1) <= k:
                i += 1
            j = int(k - offset(i) + i + 1)
            edges.append((nodes[i], nodes[j]))
    else:
        nb = len(nodes_b)
        for k in picks:
            edges.append((nodes_a[k // nb], nodes_b[k % nb]))
    return edges


def sbm_graph(block_sizes, p_in, p_out, seed: int = 0) -> tuple[Graph, np.ndarray]:
    """Stochastic block model; returns (graph, block id per node).

    p_in may be a scalar or a per-block sequence, so blocks can be given
    deliberately different densities (and therefore centralities).
    """
    rng = np.random.default_rng(seed)
    block_sizes = list(block_sizes)
    n = sum(block_sizes)
    starts = np.cumsum([0] + block_sizes)
    blocks = [np.arange(starts[i], starts[i + 1]) for i in range(len(block_sizes))]
    block_of = np.concatenate([np.full(len(b), i) for i, b in enumerate(blocks)])
    p_in_vec = np.broadcast_to(np.asarray(p_in, dtype=float), (len(block_sizes),))
    edges = []
    for i, bi in enumerate(blocks):
        edges += _block_pairs(bi, bi, p_in_vec[i], rng, same=True)
        for j in range(i + 1, len(blocks)):
            edges += _block_pairs(bi, blocks[j], p_out, rng, same=False)
    return build_graph(edges, n), block_of


def _split_masks(block_of, train_frac, val_frac, rng):
    """Stratified per-block split so every label reaches every mask."""
    n = len(block_of)
    train = np.zeros(n, dtype=bool)
    val = np.zeros(n, dtype=bool)
    test = np.zeros(n, dtype=bool)
    for b in np.unique(block_of):
        members = rng.permutation(np.flatnonzero(block_of == b))
        n_tr = max(1, int(round(train_frac * len(members))))
        n_va = int(round(val_frac * len(members)))
        train[members[:n_tr]] = True
        val[members[n_tr:n_tr + n_va]] = True
        test[members[n_tr + n_va:]] = True
    return train, val, test


def sbm_dataset(block_sizes, p_in, p_out, feature_dim: int = 8, noise: float = 0.1,
                seed: int = 0, train_frac: float = 0.6,
                val_frac: float = 0.2) -> tuple[Graph, AttributeSet]:
    """SBM graph + one-hot block labels + Gaussian features around a random
    per-block mean in [0,1]^F."""
    rng = np.random.default_rng(seed)
    g, block_of = sbm_graph(block_sizes, p_in, p_out, seed=seed + 1)
    k = len(block_sizes)
    means = rng.random((k, feature_dim))
    features = means[block_of] + rng.normal(0.0, noise, size=(g.num_nodes, feature_dim))
    labels = np.zeros((g.num_nodes, k))
    labels[np.arange(g.num_nodes), block_of] = 1.0
    train, val, test = _split_masks(block_of, train_frac, val_frac, rng)
    attrs = AttributeSet(features, labels, train, val, test, MULTI_CLASS)
    attrs.validate()
    return g, attrs


def low_centrality_minority(majority: int = 30, minority: int = 20,
                            feature_dim: int = 4, seed: int = 0) -> tuple[Graph, AttributeSet]:
    """Two-label training graph where every minority node has strictly lower
    degree (and hub-ness) than every majority node.

    Majority: a dense Bernoulli(0.8) blob. Minority: a ring (degree 2) hung
    off the blob by one bridge. A degree-guided collapse with a global budget
    wipes the minority out; a feature-label constrained one must not.
    """
    rng = np.random.default_rng(seed)
    edges = []
    for i in range(majority):
        for j in range(i + 1, majority):
            if rng.random() < 0.8:
                edges.append((i, j))
    ring = list(range(majority, majority + minority))
    for a, b in zip(ring, ring[1:] + ring[:1]):
        if a != b:
            edges.append((a, b))
    edges.append((ring[0], 0))  # bridge keeps the instance connected
    n = majority + minority
    g = build_graph(edges, n)
    block_of = np.array([0] * majority + [1] * minority)
    means = np.array([[0.9] * feature_dim, [0.1] * feature_dim])
    features = means[block_of] + rng.normal(0.0, 0.02, size=(n, feature_dim))
    labels = np.zeros((n, 2))
    labels[np.arange(n), block_of] = 1.0
    attrs = AttributeSet(features, labels, np.ones(n, dtype=bool),
                         np.zeros(n, dtype=bool), np.zeros(n, dtype=bool), MULTI_CLASS)
    attrs.validate()
    return g, attrs
