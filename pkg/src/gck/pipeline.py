"""End-to-end pipeline: training subgraph -> centrality -> clustering ->
collapse -> normalized adjacency -> aggregated features -> train -> evaluate.

Training is inductive: the model fits rows aggregated on the collapsed
training subgraph, while validation/test rows are aggregated on the full
original graph (those nodes are never merged).
"""

import json
import logging
import os
import resource
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .centrality import compute_centrality
from .cluster import build_m, kmeans, scale_normalize
from .collapse import CollapseParams, falcon_collapse
from .dataio import load_dataset
from .errors import Deadline, GckError, ParameterError
from .graph import AttributeSet, training_subgraph
from .sign import normalized_adjacency, save_sign_tensor, sign_features
from .trainer import MlpConfig, evaluate, history_to_csv, label_distribution_error, save_model, train_mlp

log = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    edges: str
    features: str
    labels: str
    masks: str
    psi: int
    eta: int = 100
    gamma: float = 0.5
    zeta: str = "ec"
    centrality_params: dict = field(default_factory=dict)
    hops: int = 2
    hidden: list = field(default_factory=lambda: [64])
    learning_rate: float = 0.05
    dropout: float = 0.0
    batches_per_epoch: int = 3
    epochs: int = 50
    bits: int = 2
    quantize_activations: bool = False
    seed: int = 0
    workers: int = 1
    out_dir: str = "gck_out"
    timeout_secs: float | None = None

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["timeout_secs"] = self.timeout_secs
        return d


class _Stages:
    """Stage runner: names failures, records timings, enforces the deadline."""

    def __init__(self, deadline: Deadline):
        self.deadline = deadline
        self.timings: dict[str, float] = {}

    def run(self, name: str, fn):
        self.deadline.stage = name
        self.deadline.check()
        t0 = time.perf_counter()
        try:
            out = fn(self.deadline.relabel(name))
        except GckError as exc:
            if not getattr(exc, "stage", None):
                exc.stage = name
                exc.args = (f"stage '{name}': {exc}",)
            raise
        except Exception as exc:
            raise GckError(f"stage '{name}' failed: {exc}") from exc
        self.timings[name] = time.perf_counter() - t0
        self.deadline.stage = name
        self.deadline.check()
        return out


def _mlp_config(cfg: PipelineConfig, input_dim: int, label_dim: int, task_kind: str) -> MlpConfig:
    return MlpConfig(
        layer_sizes=[input_dim, *cfg.hidden, label_dim],
        learning_rate=cfg.learning_rate,
        dropout=cfg.dropout,
        batches_per_epoch=cfg.batches_per_epoch,
        epochs=cfg.epochs,
        seed=cfg.seed,
        quantize_activations=cfg.quantize_activations,
        task_kind=task_kind,
        quant_bits=cfg.bits,
    )


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Execute every stage, write artifacts under cfg.out_dir, return the
    manifest dict (also saved as manifest.json)."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    stages = _Stages(Deadline(cfg.timeout_secs))

    graph, attrs = stages.run("load", lambda d: load_dataset(
        cfg.edges, cfg.features, cfg.labels, cfg.masks))

    # one shared min-max transform keeps train and eval features consistent
    norm_attrs = AttributeSet(scale_normalize(attrs.features), attrs.labels,
                              attrs.train_mask, attrs.val_mask, attrs.test_mask,
                              attrs.task_kind)

    sub, sub_attrs, _ = stages.run("training-subgraph",
                                   lambda d: training_subgraph(graph, norm_attrs))
    if not 0 < cfg.psi <= sub.num_nodes:
        raise ParameterError(f"psi must lie in (0, {sub.num_nodes}], got {cfg.psi}")

    phi_scores = stages.run("centrality", lambda d: compute_centrality(
        sub, cfg.zeta, dict(cfg.centrality_params, seed=cfg.seed),
        workers=cfg.workers, deadline=d))

    eta = min(cfg.eta, sub.num_nodes)
    assignment = stages.run("clustering", lambda d: kmeans(
        build_m(sub_attrs.features, sub_attrs.labels, cfg.gamma), eta, seed=cfg.seed))

    collapse_params = CollapseParams(psi=cfg.psi, eta=eta, gamma=cfg.gamma,
                                     zeta=cfg.zeta, centrality_params=cfg.centrality_params,
                                     seed=cfg.seed)
    result = stages.run("collapse", lambda d: falcon_collapse(
        sub, sub_attrs, collapse_params, phi=phi_scores.values, assignment=assignment,
        workers=cfg.workers, deadline=d))
    collapse_manifest = result.persist(cfg.out_dir, collapse_params)

    l_err = stages.run("lerr", lambda d: label_distribution_error(
        sub_attrs.labels, result.attrs.labels))

    def build_tensors(deadline):
        z_train = sign_features(normalized_adjacency(result.graph),
                                result.attrs.features, cfg.hops)
        z_full = sign_features(normalized_adjacency(graph),
                               norm_attrs.features, cfg.hops)
        return z_train, z_full

    z_train, z_full = stages.run("sign", build_tensors)
    z_path = os.path.join(cfg.out_dir, "sign_train.bin")
    save_sign_tensor(z_train, z_path)

    def assemble(deadline):
        val_rows = np.flatnonzero(attrs.val_mask)
        test_rows = np.flatnonzero(attrs.test_mask)
        n_tr, n_va = z_train.z.shape[0], len(val_rows)
        z = np.vstack([z_train.z, z_full.z[val_rows], z_full.z[test_rows]])
        y = np.vstack([result.attrs.labels, norm_attrs.labels[val_rows],
                       norm_attrs.labels[test_rows]])
        return z, y, np.arange(n_tr), np.arange(n_tr, n_tr + n_va), \
            np.arange(n_tr + n_va, n_tr + n_va + len(test_rows))

    z, y, train_rows, val_rows, test_rows = stages.run("assemble", assemble)

    mlp_cfg = _mlp_config(cfg, z.shape[1], y.shape[1], attrs.task_kind)
    model, history = stages.run("train", lambda d: train_mlp(
        z, y, train_rows, val_rows, mlp_cfg))
    history_to_csv(history, os.path.join(cfg.out_dir, "history.csv"))
    save_model(model, os.path.join(cfg.out_dir, "model.bin"))

    def final_eval(deadline):
        out = {}
        if val_rows.size:
            out["val"] = evaluate(model, z, y, val_rows, attrs.task_kind).as_dict()
        if test_rows.size:
            out["test"] = evaluate(model, z, y, test_rows, attrs.task_kind).as_dict()
        return out

    metrics = stages.run("evaluate", final_eval)

    manifest = {
        "version": __version__,
        "config": cfg.as_dict(),
        "results": {
            "survivor_count": result.survivor_count,
            "per_cluster_budgets": collapse_manifest["per_cluster_budgets"],
            "label_distribution_error": l_err,
            "metrics": metrics,
            "train_nodes_original": int(sub.num_nodes),
            "centrality_params": phi_scores.params,
        },
        "artifacts": {
            "collapsed_edges": os.path.join(cfg.out_dir, "collapsed_edges.txt"),
            "collapsed_features": os.path.join(cfg.out_dir, "collapsed_features.csv"),
            "collapsed_labels": os.path.join(cfg.out_dir, "collapsed_labels.csv"),
            "merge_map": os.path.join(cfg.out_dir, "merge_map.csv"),
            "collapse_manifest": os.path.join(cfg.out_dir, "collapse_manifest.json"),
            "sign_train": z_path,
            "history": os.path.join(cfg.out_dir, "history.csv"),
            "model": os.path.join(cfg.out_dir, "model.bin"),
        },
        "timings": {
            "stages_secs": stages.timings,
            "peak_rss_kb": resource.getrusage(resource.RUSAGE_SELF).ru_maxrss,
            "kernel_backend": BACKEND,
        },
    }
    with open(os.path.join(cfg.out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return manifest


def run_sweep(cfg: PipelineConfig, budget_fractions) -> list[dict]:
    """Budget sweep: rerun the pipeline at each training-node fraction and
    collect (fraction, psi, metrics, l_err) rows; writes sweep.csv."""
    graph, attrs = load_dataset(cfg.edges, cfg.features, cfg.labels, cfg.masks)
    n_train = int(attrs.train_mask.sum())
    rows = []
    for frac in budget_fractions:
        if not 0.0 < frac <= 1.0:
            raise ParameterError(f"budget fractions must lie in (0,1], got {frac}")
        psi = max(1, int(round(frac * n_train)))
        sub_cfg = PipelineConfig(**{**cfg.as_dict(),
                                    "psi": psi,
                                    "out_dir": os.path.join(cfg.out_dir, f"budget_{frac:g}")})
        t0 = time.perf_counter()
        manifest = run_pipeline(sub_cfg)
        res = manifest["results"]
        rows.append({
            "budget_fraction": frac,
            "psi": psi,
            "val_accuracy": res["metrics"].get("val", {}).get("accuracy", float("nan")),
            "test_accuracy": res["metrics"].get("test", {}).get("accuracy", float("nan")),
            "label_distribution_error": res["label_distribution_error"],
            "seconds": time.perf_counter() - t0,
        })
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, "sweep.csv")
    with open(path, "w") as fh:
        fh.write("budget_fraction,psi,val_accuracy,test_accuracy,label_distribution_error,seconds\n")
        for r in rows:
            fh.write(f"{r['budget_fraction']},{r['psi']},{r['val_accuracy']!r},"
                     f"{r['test_accuracy']!r},{r['label_distribution_error']!r},{r['seconds']:.3f}\n")
    return rows
