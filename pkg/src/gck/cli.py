"""Command-line interface. Exit codes: 0 ok, 2 config error, 3 data error,
4 runtime/timeout. GCK_LOG sets the log level."""

import json
import logging
import os
import sys

import click
import numpy as np

from .centrality import compute_centrality
from .cluster import build_m, kmeans, scale_normalize
from .collapse import CollapseParams, falcon_collapse
from .dataio import infer_task_kind, load_dataset, read_matrix_csv, read_masks_csv
from .errors import Deadline, GckError
from .graph import AttributeSet, read_edge_list, training_subgraph
from .pipeline import PipelineConfig, run_pipeline, run_sweep
from .sign import (
    load_sign_tensor,
    normalized_adjacency,
    save_sign_tensor,
    sign_features,
    sign_tensor_to_csv,
)
from .trainer import MlpConfig, evaluate, history_to_csv, label_distribution_error, save_model, train_mlp

log = logging.getLogger("gck")

ZETAS = ("dc", "bc", "cc", "pr", "ec")


def _setup_logging():
    level = os.environ.get("GCK_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _centrality_params(sample_size, damping, tol, max_iter):
    p = {"damping": damping, "tol": tol, "max_iter": max_iter}
    if sample_size is not None:
        p["sample_size"] = sample_size
    return p


dataset_options = [
    click.option("--edges", required=True, type=click.Path(exists=True, dir_okay=False)),
    click.option("--features", required=True, type=click.Path(exists=True, dir_okay=False)),
    click.option("--labels", required=True, type=click.Path(exists=True, dir_okay=False)),
    click.option("--masks", required=True, type=click.Path(exists=True, dir_okay=False)),
]

collapse_options = [
    click.option("--psi", required=True, type=int, help="survivor node budget"),
    click.option("--eta", default=100, show_default=True, type=int),
    click.option("--gamma", default=0.5, show_default=True, type=float),
    click.option("--zeta", default="ec", show_default=True, type=click.Choice(ZETAS)),
]

tuning_options = [
    click.option("--sample-size", default=None, type=int, help="BC source sample"),
    click.option("--damping", default=0.85, show_default=True, type=float),
    click.option("--tol", default=1e-8, show_default=True, type=float),
    click.option("--max-iter", default=1000, show_default=True, type=int),
]

mlp_options = [
    click.option("--hops", default=2, show_default=True, type=int),
    click.option("--bits", default=2, show_default=True, type=int),
    click.option("--quantize/--no-quantize", "quantize_activations", default=False),
    click.option("--hidden", default="64", show_default=True,
                 help="comma-separated hidden widths"),
    click.option("--lr", default=0.05, show_default=True, type=float),
    click.option("--dropout", default=0.0, show_default=True, type=float),
    click.option("--batches", default=3, show_default=True, type=int),
    click.option("--epochs", default=50, show_default=True, type=int),
]

common_options = [
    click.option("--seed", default=0, show_default=True, type=int),
    click.option("--workers", default=1, show_default=True, type=int),
    click.option("--out", default="gck_out", show_default=True, type=click.Path()),
    click.option("--timeout-secs", default=None, type=float),
]


def add_options(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return wrap


def _parse_hidden(hidden: str) -> list:
    return [int(h) for h in hidden.split(",") if h.strip()]


@click.group()
def cli():
    """Graph collapse kit: budgeted topology-preserving graph reduction."""
    _setup_logging()


@cli.command()
@click.option("--edges", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--zeta", default="ec", show_default=True, type=click.Choice(ZETAS))
@add_options(tuning_options)
@add_options(common_options)
def centrality(edges, zeta, sample_size, damping, tol, max_iter, seed, workers, out, timeout_secs):
    """Score every node of a frozen graph; writes node_id,score CSV."""
    g = read_edge_list(edges)
    deadline = Deadline(timeout_secs, stage="centrality")
    params = dict(_centrality_params(sample_size, damping, tol, max_iter), seed=seed)
    scores = compute_centrality(g, zeta, params, workers=workers, deadline=deadline)
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, f"centrality_{zeta}.csv")
    scores.to_csv(path)
    click.echo(path)


@cli.command()
@click.option("--features", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--labels", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--eta", default=100, show_default=True, type=int)
@click.option("--gamma", default=0.5, show_default=True, type=float)
@add_options(common_options)
def cluster(features, labels, eta, gamma, seed, workers, out, timeout_secs):
    """Feature-label clustering; writes node_id,cluster CSV."""
    x = scale_normalize(read_matrix_csv(features))
    y = read_matrix_csv(labels)
    assignment = kmeans(build_m(x, y, gamma), min(eta, x.shape[0]), seed=seed)
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "clusters.csv")
    assignment.to_csv(path)
    click.echo(path)


@cli.command()
@add_options(dataset_options)
@add_options(collapse_options)
@add_options(tuning_options)
@add_options(common_options)
def collapse(edges, features, labels, masks, psi, eta, gamma, zeta,
             sample_size, damping, tol, max_iter, seed, workers, out, timeout_secs):
    """Collapse the training subgraph to --psi nodes; writes artifacts + manifest."""
    graph, attrs = load_dataset(edges, features, labels, masks)
    norm = AttributeSet(scale_normalize(attrs.features), attrs.labels, attrs.train_mask,
                        attrs.val_mask, attrs.test_mask, attrs.task_kind)
    sub, sub_attrs, _ = training_subgraph(graph, norm)
    params = CollapseParams(psi=psi, eta=min(eta, sub.num_nodes), gamma=gamma, zeta=zeta,
                            centrality_params=_centrality_params(sample_size, damping, tol, max_iter),
                            seed=seed)
    deadline = Deadline(timeout_secs, stage="collapse")
    result = falcon_collapse(sub, sub_attrs, params, workers=workers, deadline=deadline)
    manifest = result.persist(out, params)
    click.echo(json.dumps(manifest, sort_keys=True))


@cli.command()
@click.option("--edges", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--features", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--hops", default=2, show_default=True, type=int)
@click.option("--csv", "also_csv", is_flag=True, default=False, help="additionally write CSV")
@add_options(common_options)
def sign(edges, features, hops, also_csv, seed, workers, out, timeout_secs):
    """Precompute the k-hop aggregated feature tensor; writes sign.bin."""
    g = read_edge_list(edges)
    x = read_matrix_csv(features)
    tensor = sign_features(normalized_adjacency(g), x, hops)
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "sign.bin")
    save_sign_tensor(tensor, path)
    if also_csv:
        sign_tensor_to_csv(tensor, os.path.join(out, "sign.csv"))
    click.echo(path)


@cli.command()
@click.option("--z", "z_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="sign tensor binary")
@click.option("--labels", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--masks", required=True, type=click.Path(exists=True, dir_okay=False))
@add_options(mlp_options)
@add_options(common_options)
def train(z_path, labels, masks, hops, bits, quantize_activations, hidden, lr,
          dropout, batches, epochs, seed, workers, out, timeout_secs):
    """Train the MLP on a precomputed tensor; writes model.bin + history.csv."""
    tensor = load_sign_tensor(z_path)
    y = read_matrix_csv(labels)
    train_mask, val_mask, _ = read_masks_csv(masks, y.shape[0])
    task_kind = infer_task_kind(y)
    cfg = MlpConfig(layer_sizes=[tensor.z.shape[1], *_parse_hidden(hidden), y.shape[1]],
                    learning_rate=lr, dropout=dropout, batches_per_epoch=batches,
                    epochs=epochs, seed=seed, quantize_activations=quantize_activations,
                    task_kind=task_kind, quant_bits=bits)
    model, history = train_mlp(tensor.z, y, np.flatnonzero(train_mask),
                               np.flatnonzero(val_mask), cfg)
    os.makedirs(out, exist_ok=True)
    save_model(model, os.path.join(out, "model.bin"))
    history_to_csv(history, os.path.join(out, "history.csv"))
    report = {}
    if val_mask.any():
        report = evaluate(model, tensor.z, y, np.flatnonzero(val_mask), task_kind).as_dict()
    click.echo(json.dumps({"model": os.path.join(out, "model.bin"), "val": report},
                          sort_keys=True))


@cli.command()
@click.option("--labels", required=True, type=click.Path(exists=True, dir_okay=False),
              help="original labels CSV")
@click.option("--collapsed", required=True, type=click.Path(exists=True, dir_okay=False),
              help="survivor labels CSV")
@click.option("--masks", default=None, type=click.Path(exists=True, dir_okay=False),
              help="restrict the original side to its train split")
def lerr(labels, collapsed, masks):
    """Macro label distribution error between original and survivor labels."""
    y_orig = read_matrix_csv(labels)
    y_coll = read_matrix_csv(collapsed)
    if masks is not None:
        train_mask, _, _ = read_masks_csv(masks, y_orig.shape[0])
        y_orig = y_orig[train_mask]
    click.echo(repr(label_distribution_error(y_orig, y_coll)))


def _pipeline_config(edges, features, labels, masks, psi, eta, gamma, zeta,
                     sample_size, damping, tol, max_iter, hops, bits,
                     quantize_activations, hidden, lr, dropout, batches, epochs,
                     seed, workers, out, timeout_secs) -> PipelineConfig:
    return PipelineConfig(
        edges=edges, features=features, labels=labels, masks=masks, psi=psi,
        eta=eta, gamma=gamma, zeta=zeta,
        centrality_params=_centrality_params(sample_size, damping, tol, max_iter),
        hops=hops, hidden=_parse_hidden(hidden), learning_rate=lr, dropout=dropout,
        batches_per_epoch=batches, epochs=epochs, bits=bits,
        quantize_activations=quantize_activations, seed=seed, workers=workers,
        out_dir=out, timeout_secs=timeout_secs)


@cli.command()
@add_options(dataset_options)
@add_options(collapse_options)
@add_options(tuning_options)
@add_options(mlp_options)
@add_options(common_options)
def pipeline(edges, features, labels, masks, psi, eta, gamma, zeta, sample_size,
             damping, tol, max_iter, hops, bits, quantize_activations, hidden,
             lr, dropout, batches, epochs, seed, workers, out, timeout_secs):
    """Full run: collapse, aggregate, train, evaluate; writes manifest.json."""
    cfg = _pipeline_config(edges, features, labels, masks, psi, eta, gamma, zeta,
                           sample_size, damping, tol, max_iter, hops, bits,
                           quantize_activations, hidden, lr, dropout, batches,
                           epochs, seed, workers, out, timeout_secs)
    manifest = run_pipeline(cfg)
    click.echo(json.dumps(manifest["results"], sort_keys=True))


@cli.command()
@add_options(dataset_options)
@click.option("--budgets", default="0.2,0.4,0.6,0.8,1.0", show_default=True,
              help="comma-separated training-node fractions")
@add_options(collapse_options[1:])  # psi comes from the budget fractions
@add_options(tuning_options)
@add_options(mlp_options)
@add_options(common_options)
def sweep(edges, features, labels, masks, budgets, eta, gamma, zeta, sample_size,
          damping, tol, max_iter, hops, bits, quantize_activations, hidden,
          lr, dropout, batches, epochs, seed, workers, out, timeout_secs):
    """Budget sweep over training-node fractions; emits sweep.csv."""
    fractions = [float(b) for b in budgets.split(",") if b.strip()]
    cfg = _pipeline_config(edges, features, labels, masks, 1, eta, gamma, zeta,
                           sample_size, damping, tol, max_iter, hops, bits,
                           quantize_activations, hidden, lr, dropout, batches,
                           epochs, seed, workers, out, timeout_secs)
    rows = run_sweep(cfg, fractions)
    click.echo(os.path.join(out, "sweep.csv"))
    for r in rows:
        click.echo(json.dumps(r, sort_keys=True))


def main(argv=None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        return 130
    except click.exceptions.ClickException as exc:
        exc.show()
        return 2
    except GckError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    except (OSError, IndexError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
