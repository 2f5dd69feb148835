"""Acceptance suite: every criterion runs at its stated tolerance and prints
one PASS/FAIL line. Oracles come from tests/oracles.py and stay independent
of the library's code paths."""

import functools
import json
import time

import numpy as np

from gck.centrality import (
    betweenness_centrality,
    closeness_centrality,
    degree_centrality,
    eigenvector_centrality,
    pagerank_centrality,
)
from gck.cluster import NormalizationParams, build_m, kmeans
from gck.collapse import CollapseParams, agnostic_collapse, falcon_collapse
from gck.graph import build_graph, connected_components, merge_node
from gck.pipeline import PipelineConfig, run_pipeline, run_sweep
from gck.quantize import dequantize, quantize
from gck.sign import normalized_adjacency, sign_features
from gck.synth import low_centrality_minority, sbm_dataset
from gck.trainer import Mlp, MlpConfig, evaluate, label_distribution_error, loss_and_grads, train_mlp
from gck.dataio import save_dataset

from conftest import make_attrs
from oracles import (
    bc_oracle,
    cc_oracle,
    dc_oracle,
    dense_adjacency,
    ec_oracle,
    finite_difference_grads,
    pr_oracle,
    random_graph,
    sign_oracle,
    simulate_collapse,
)


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"criterion {number:2d} FAIL  {title}")
                raise
            print(f"criterion {number:2d} PASS  {title}")
        return run
    return wrap


def normalized(v):
    norm = np.linalg.norm(v)
    return v / norm if norm > 0 else v


@criterion(1, "centrality oracle equivalence on 100 random graphs, < 10 s")
def test_c01_centrality_oracles():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    for trial in range(100):
        n = int(rng.integers(5, 51))
        edges = random_graph(rng, n, float(rng.uniform(0.08, 0.4)), ensure_connected=True)
        g = build_graph(edges, n)
        a = dense_adjacency(edges, n)
        pairs = [
            (degree_centrality(g).values, dc_oracle(a)),
            (betweenness_centrality(g).values, bc_oracle(a)),
            (closeness_centrality(g).values, cc_oracle(a)),
            (pagerank_centrality(g, tol=1e-13, max_iter=10_000).values, pr_oracle(a)),
            (eigenvector_centrality(g, tol=1e-13, max_iter=200_000).values, ec_oracle(a)),
        ]
        for got, want in pairs:
            assert np.abs(normalized(got) - normalized(want)).max() < 1e-6
    assert time.perf_counter() - t0 < 10.0


@criterion(2, "distance identity on M over 1000 random draws, gamma edge cases exact")
def test_c02_distance_identity():
    rng = np.random.default_rng(202)
    for trial in range(1000):
        f, l = int(rng.integers(1, 12)), int(rng.integers(1, 12))
        gamma = float(rng.random())
        x = rng.random((2, f))
        y = rng.random((2, l))
        m = build_m(x, y, gamma)
        p = NormalizationParams.from_gamma(gamma, f, l)
        got = ((m[0] - m[1]) ** 2).sum()
        want = p.alpha * ((x[0] - x[1]) ** 2).sum() + p.beta * ((y[0] - y[1]) ** 2).sum()
        assert abs(got - want) < 1e-9
    x, y = rng.random((5, 4)), rng.random((5, 3))
    assert (build_m(x, y, 1.0)[:, 4:] == 0.0).all()
    assert (build_m(x, y, 0.0)[:, :4] == 0.0).all()


@criterion(3, "collapse equals line-by-line simulation on >= 20 micro instances")
def test_c03_algorithm_micro_oracle():
    rng = np.random.default_rng(303)
    checked = 0
    while checked < 25:
        n = int(rng.integers(3, 9))
        edges = random_graph(rng, n, 0.45)
        g = build_graph(edges, n)
        eta = int(rng.integers(1, 3))
        psi = int(rng.integers(eta, n + 1))
        attrs = make_attrs(n, seed=checked, num_labels=2,
                           label_of=rng.integers(0, 2, size=n))
        assignment = kmeans(np.asarray(attrs.features), eta, seed=checked)
        res = falcon_collapse(g, attrs, CollapseParams(psi=psi, eta=eta, zeta="dc"),
                              assignment=assignment)
        phi = np.zeros(n)
        for u, v in edges:
            if u != v:
                phi[u] += 1
                phi[v] += 1
        clusters = [np.flatnonzero(assignment.cluster_of == i).tolist() for i in range(eta)]
        want_edges, want_alive, want_map = simulate_collapse(
            edges, n, clusters, res.budgets.tolist(), phi)
        assert sorted(want_alive) == res.survivors.tolist()
        assert want_map == {v: int(s) for v, s in enumerate(res.merge_map.survivor_of)}
        got_edges = {(int(res.survivors[u]), int(res.survivors[v]))
                     for u, v in res.graph.edges()}
        assert got_edges == want_edges
        checked += 1
    assert checked >= 20


@criterion(4, "minority-label preservation: constructed instance and 10 SBM seeds")
def test_c04_label_preservation():
    g, attrs = low_centrality_minority(majority=30, minority=20, seed=4)
    deg = degree_centrality(g).values
    minority = attrs.labels[:, 1] == 1
    assert deg[minority].max() < deg[~minority].min()  # premise of the instance
    psi = g.num_nodes // 2
    agn = label_distribution_error(
        attrs.labels, agnostic_collapse(g, attrs, psi, "dc").attrs.labels)
    fal = label_distribution_error(
        attrs.labels,
        falcon_collapse(g, attrs, CollapseParams(psi=psi, eta=2, zeta="dc", seed=0)).attrs.labels)
    assert agn >= 0.25
    assert fal <= 0.05

    wins = 0
    for seed in range(10):
        g, attrs = sbm_dataset([60, 30], p_in=[0.4, 0.06], p_out=0.01,
                               feature_dim=4, noise=0.05, seed=seed,
                               train_frac=1.0, val_frac=0.0)
        psi = int(round(0.4 * g.num_nodes))
        l_agn = label_distribution_error(
            attrs.labels, agnostic_collapse(g, attrs, psi, "ec").attrs.labels)
        l_fal = label_distribution_error(
            attrs.labels,
            falcon_collapse(g, attrs, CollapseParams(psi=psi, eta=2, zeta="ec",
                                                     seed=seed)).attrs.labels)
        wins += l_fal < l_agn
    assert wins == 10


@criterion(5, "component count never increases over 1000 random merge sequences")
def test_c05_connectivity_preservation():
    rng = np.random.default_rng(505)
    for trial in range(1000):
        n = int(rng.integers(2, 16))
        edges = random_graph(rng, n, float(rng.uniform(0.1, 0.5)))
        g = build_graph(edges, n)
        comps = connected_components(g)
        merges = int(rng.integers(1, n))
        for _ in range(merges):
            candidates = [v for v in g.alive_nodes() if g.adjacency[v]]
            if not candidates:
                break
            v_k = int(rng.choice(candidates))
            v_s = int(rng.choice(sorted(g.adjacency[v_k])))
            merge_node(g, v_k, v_s)
            now = connected_components(g)
            assert now <= comps
            comps = now


@criterion(6, "sign tensor vs dense oracle (1e-9), exact symmetry, spectral radius")
def test_c06_sign_correctness():
    rng = np.random.default_rng(606)
    for trial in range(20):
        n = int(rng.integers(2, 101))
        edges = random_graph(rng, n, float(rng.uniform(0.05, 0.3)))
        g = build_graph(edges, n)
        x = rng.random((n, int(rng.integers(1, 6))))
        at = normalized_adjacency(g)
        dense = at.dense()
        assert (dense == dense.T).all()
        want_at, want_z = sign_oracle(edges, n, x, 3)
        got = sign_features(at, x, 3)
        assert np.abs(got.z - want_z).max() < 1e-9
        assert np.abs(np.linalg.eigvalsh(dense)).max() <= 1.0 + 1e-9


@criterion(7, "quantizer round-trip bound, lattice exactness, idempotence")
def test_c07_quantizer():
    rng = np.random.default_rng(707)
    for bits in (1, 2, 4, 8):
        b = 2 ** bits - 1
        h = rng.normal(0.0, 3.0, size=100_000)
        q = quantize(h, bits=bits, group_size=128)
        back = dequantize(q)
        bound = np.repeat(q.r_per_group, 128)[:h.size] / (2 * b)
        assert (np.abs(back - h) <= bound * (1 + 1e-9)).all()
        q2 = quantize(back, bits=bits, group_size=128)
        assert (q.codes == q2.codes).all()
    lattice = np.array([0.0, 1.0, 2.0, 3.0])
    np.testing.assert_array_equal(dequantize(quantize(lattice, bits=2, group_size=4)), lattice)


@criterion(8, "gradient check 1e-5, separable blobs >= 0.99, quantized gap <= 3 pts")
def test_c08_trainer():
    rng = np.random.default_rng(808)
    x = rng.random((10, 5))
    y = np.eye(3)[rng.integers(0, 3, size=10)]
    model = Mlp([5, 7, 3], seed=8)
    _, grads_w, grads_b = loss_and_grads(model, x, y, "multi_class")
    numeric = finite_difference_grads(lambda: loss_and_grads(model, x, y, "multi_class")[0],
                                      model.weights + model.biases)
    for ga, gn in zip(grads_w + grads_b, numeric):
        denom = np.maximum(np.maximum(np.abs(ga), np.abs(gn)), 1e-8)
        assert (np.abs(ga - gn) / denom).max() < 1e-5

    blob = np.vstack([rng.normal(0, 1, (60, 2)), rng.normal(6, 1, (60, 2))])
    blob_y = np.repeat(np.eye(2), 60, axis=0)
    rows = np.arange(120)
    cfg = MlpConfig([2, 16, 2], learning_rate=0.3, epochs=200, seed=1)
    m, _ = train_mlp(blob, blob_y, rows, rows, cfg)
    assert evaluate(m, blob, blob_y, rows, "multi_class").accuracy >= 0.99

    g, attrs = sbm_dataset([50, 50, 50], p_in=0.3, p_out=0.02, feature_dim=6,
                           noise=0.15, seed=88)
    z = sign_features(normalized_adjacency(g), attrs.features, 2).z
    tr = np.flatnonzero(attrs.train_mask)
    va = np.flatnonzero(attrs.val_mask)
    base = dict(learning_rate=0.1, epochs=60, batches_per_epoch=3, seed=5)
    plain_cfg = MlpConfig([z.shape[1], 32, 3], **base)
    quant_cfg = MlpConfig([z.shape[1], 32, 3], quantize_activations=True,
                          quant_bits=2, **base)
    plain, _ = train_mlp(z, attrs.labels, tr, va, plain_cfg)
    quant, _ = train_mlp(z, attrs.labels, tr, va, quant_cfg)
    acc_plain = evaluate(plain, z, attrs.labels, va, "multi_class").accuracy
    acc_quant = evaluate(quant, z, attrs.labels, va, "multi_class").accuracy
    assert abs(acc_plain - acc_quant) <= 0.03


@criterion(9, "2000-node SBM sweep: 50% within 2 points of 100%, CSV out, < 2 min")
def test_c09_budget_sweep(tmp_path):
    t0 = time.perf_counter()
    g, attrs = sbm_dataset([500, 500, 500, 500], p_in=0.012, p_out=0.0015,
                           feature_dim=8, noise=0.25, seed=9)
    paths = {n: tmp_path / f"{n}" for n in ("edges.txt", "x.csv", "y.csv", "m.csv")}
    save_dataset(g, attrs, paths["edges.txt"], paths["x.csv"], paths["y.csv"], paths["m.csv"])
    cfg = PipelineConfig(edges=str(paths["edges.txt"]), features=str(paths["x.csv"]),
                         labels=str(paths["y.csv"]), masks=str(paths["m.csv"]),
                         psi=1, eta=40, gamma=0.5, zeta="ec", hops=2, hidden=[32],
                         learning_rate=0.1, epochs=40, batches_per_epoch=3,
                         seed=9, out_dir=str(tmp_path / "sweep"))
    rows = run_sweep(cfg, [0.5, 1.0])
    assert (tmp_path / "sweep" / "sweep.csv").exists()
    accs = {r["budget_fraction"]: r["val_accuracy"] for r in rows}
    assert abs(accs[0.5] - accs[1.0]) <= 0.02
    assert time.perf_counter() - t0 < 120.0


@criterion(10, "pipeline manifests byte-identical across reruns (timings excluded)")
def test_c10_determinism(tmp_path):
    g, attrs = sbm_dataset([25, 25], p_in=0.3, p_out=0.03, feature_dim=4, seed=10)
    paths = {n: tmp_path / n for n in ("edges.txt", "x.csv", "y.csv", "m.csv")}
    save_dataset(g, attrs, paths["edges.txt"], paths["x.csv"], paths["y.csv"], paths["m.csv"])
    cfg = PipelineConfig(edges=str(paths["edges.txt"]), features=str(paths["x.csv"]),
                         labels=str(paths["y.csv"]), masks=str(paths["m.csv"]),
                         psi=20, eta=8, gamma=0.5, zeta="bc", hops=1, hidden=[8],
                         epochs=10, seed=11, out_dir=str(tmp_path / "out"))
    manifests = []
    for _ in range(2):
        run_pipeline(cfg)
        with open(tmp_path / "out" / "manifest.json") as fh:
            m = json.load(fh)
        m.pop("timings")
        manifests.append(json.dumps(m, sort_keys=True).encode())
    assert manifests[0] == manifests[1]
