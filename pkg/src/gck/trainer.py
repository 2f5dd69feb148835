"""Mini-batched MLP over pre-aggregated feature rows, with an optional
quantized activation cache, plus evaluation metrics.

Rows are independent data points, so batching is a plain shuffle-and-split.
When quantize_activations is on, the tensors cached for the backward pass
(the input of every linear layer) are stored through quantize/dequantize;
forward compute stays full precision, exactly like activation-compressed
training.
"""

import logging
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    CorruptionError,
    EmptyInputError,
    ParameterError,
    ShapeError,
    TrainingDivergedError,
)
from .graph import MULTI_CLASS, MULTI_LABEL
from .quantize import dequantize, quantize

log = logging.getLogger(__name__)

_CKPT_MAGIC = b"GCKMLP01"


@dataclass
class MlpConfig:
    layer_sizes: list            # [input, hidden..., output]
    learning_rate: float = 0.01
    dropout: float = 0.0
    batches_per_epoch: int = 1
    epochs: int = 100
    seed: int = 0
    quantize_activations: bool = False
    task_kind: str = MULTI_CLASS
    momentum: float = 0.0        # classical momentum when > 0
    adaptive: bool = False       # Adam-style per-parameter step sizes
    quant_bits: int = 2
    quant_group_size: int | None = None  # None: one row per group
    stochastic_rounding: bool = False

    def validate(self) -> None:
        if len(self.layer_sizes) < 3:
            raise ParameterError("need at least one hidden layer")
        if not 0.0 <= self.dropout < 1.0:
            raise ParameterError(f"dropout must lie in [0,1), got {self.dropout}")
        if self.batches_per_epoch < 1:
            raise ParameterError("batches_per_epoch must be >= 1")
        if self.task_kind not in (MULTI_CLASS, MULTI_LABEL):
            raise ParameterError(f"unknown task_kind {self.task_kind!r}")


@dataclass
class MetricsReport:
    accuracy: float
    micro_f1: float
    micro_sensitivity: float
    micro_specificity: float
    task_kind: str

    def as_dict(self) -> dict:
        return {"accuracy": self.accuracy, "micro_f1": self.micro_f1,
                "micro_sensitivity": self.micro_sensitivity,
                "micro_specificity": self.micro_specificity, "task_kind": self.task_kind}


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_accuracy: float


class Mlp:
    """ReLU MLP; weights in float64 for stable gradient checks."""

    def __init__(self, layer_sizes, seed: int = 0):
        rng = np.random.default_rng(seed)
        self.layer_sizes = list(layer_sizes)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            scale = np.sqrt(2.0 / fan_in)
            self.weights.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @property
    def num_layers(self) -> int:
        return len(self.weights)

    def copy_weights(self):
        return [w.copy() for w in self.weights], [b.copy() for b in self.biases]

    def set_weights(self, weights, biases) -> None:
        self.weights = [w.copy() for w in weights]
        self.biases = [b.copy() for b in biases]

    def logits(self, x: np.ndarray) -> np.ndarray:
        """Inference forward pass: no dropout, nothing cached."""
        a = x
        for l in range(self.num_layers):
            z = a @ self.weights[l] + self.biases[l]
            a = np.maximum(z, 0.0) if l < self.num_layers - 1 else z
        return a

    def forward_train(self, x, dropout, rng, quant_cfg):
        """Forward pass that caches what backward needs.

        Returns (logits, cache). Cached layer inputs are quantized blocks
        when quant_cfg is set; ReLU/dropout masks are kept exact.
        """
        cache = {"inputs": [], "relu_masks": [], "drop_masks": []}

        def stash(a):
            if quant_cfg is None:
                cache["inputs"].append(a)
            else:
                bits, group_size, stochastic, qrng = quant_cfg
                cache["inputs"].append(quantize(a, bits, group_size,
                                                stochastic=stochastic, rng=qrng))

        a = x
        for l in range(self.num_layers):
            stash(a)
            z = a @ self.weights[l] + self.biases[l]
            if l < self.num_layers - 1:
                mask = z > 0
                a = np.where(mask, z, 0.0)
                cache["relu_masks"].append(mask)
                if dropout > 0.0:
                    keep = rng.random(a.shape) >= dropout
                    a = a * keep / (1.0 - dropout)
                    cache["drop_masks"].append(keep)
                else:
                    cache["drop_masks"].append(None)
            else:
                a = z
        return a, cache

    def backward(self, cache, delta_out, dropout):
        """Gradients from the cached forward; delta_out = dLoss/dlogits."""
        grads_w = [None] * self.num_layers
        grads_b = [None] * self.num_layers
        delta = delta_out
        for l in range(self.num_layers - 1, -1, -1):
            a_in = cache["inputs"][l]
            if not isinstance(a_in, np.ndarray):
                a_in = dequantize(a_in)
            grads_w[l] = a_in.T @ delta
            grads_b[l] = delta.sum(axis=0)
            if l > 0:
                delta = delta @ self.weights[l].T
                keep = cache["drop_masks"][l - 1]
                if keep is not None:
                    delta = delta * keep / (1.0 - dropout)
                delta = delta * cache["relu_masks"][l - 1]
        return grads_w, grads_b


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def loss_and_delta(logits: np.ndarray, y: np.ndarray, task_kind: str):
    """(mean loss, dLoss/dlogits) for the task's head."""
    n = logits.shape[0]
    if task_kind == MULTI_CLASS:
        p = _softmax(logits)
        loss = -(y * np.log(np.maximum(p, 1e-300))).sum() / n
        return loss, (p - y) / n
    p = _sigmoid(logits)
    eps = 1e-12
    loss = -(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps)).mean()
    return loss, (p - y) / p.size


def loss_and_grads(model: Mlp, x: np.ndarray, y: np.ndarray, task_kind: str):
    """Full-precision, dropout-free loss and parameter gradients; this is the
    path the finite-difference check certifies."""
    logits, cache = model.forward_train(x, dropout=0.0, rng=None, quant_cfg=None)
    loss, delta = loss_and_delta(logits, y, task_kind)
    grads_w, grads_b = model.backward(cache, delta, dropout=0.0)
    return loss, grads_w, grads_b


def predictions(model: Mlp, z: np.ndarray, task_kind: str) -> np.ndarray:
    """0/1 prediction matrix: argmax one-hot (multi-class) or sigmoid >= 0.5."""
    logits = model.logits(z)
    if task_kind == MULTI_CLASS:
        out = np.zeros_like(logits)
        out[np.arange(len(logits)), logits.argmax(axis=1)] = 1.0
        return out
    return (_sigmoid(logits) >= 0.5).astype(np.float64)


def evaluate(model: Mlp, z: np.ndarray, y: np.ndarray, rows: np.ndarray,
             task_kind: str) -> MetricsReport:
    """Micro-pooled metrics over (node, label) pairs of the selected rows."""
    rows = np.asarray(rows)
    if rows.size == 0:
        raise EmptyInputError("evaluate needs at least one row")
    pred = predictions(model, z[rows], task_kind)
    truth = y[rows]
    tp = float(((pred == 1) & (truth == 1)).sum())
    fp = float(((pred == 1) & (truth == 0)).sum())
    fn = float(((pred == 0) & (truth == 1)).sum())
    tn = float(((pred == 0) & (truth == 0)).sum())

    def ratio(num, den):
        return num / den if den > 0 else 0.0

    if task_kind == MULTI_CLASS:
        accuracy = float((pred.argmax(axis=1) == truth.argmax(axis=1)).mean())
    else:
        accuracy = ratio(tp + tn, tp + tn + fp + fn)
    return MetricsReport(
        accuracy=accuracy,
        micro_f1=ratio(2 * tp, 2 * tp + fp + fn),
        micro_sensitivity=ratio(tp, tp + fn),
        micro_specificity=ratio(tn, tn + fp),
        task_kind=task_kind,
    )


class _Optimizer:
    """Plain SGD by default; classical momentum and Adam behind config flags."""

    def __init__(self, model: Mlp, cfg: MlpConfig):
        self.lr = cfg.learning_rate
        self.momentum = cfg.momentum
        self.adaptive = cfg.adaptive
        shapes = model.weights + model.biases
        self.velocity = [np.zeros_like(p) for p in shapes]
        self.first = [np.zeros_like(p) for p in shapes]
        self.second = [np.zeros_like(p) for p in shapes]
        self.t = 0

    def step(self, model: Mlp, grads_w, grads_b) -> None:
        params = model.weights + model.biases
        grads = grads_w + grads_b
        if self.adaptive:
            self.t += 1
            b1, b2, eps = 0.9, 0.999, 1e-8
            for i, (p, g) in enumerate(zip(params, grads)):
                self.first[i] = b1 * self.first[i] + (1 - b1) * g
                self.second[i] = b2 * self.second[i] + (1 - b2) * g * g
                m_hat = self.first[i] / (1 - b1 ** self.t)
                v_hat = self.second[i] / (1 - b2 ** self.t)
                p -= self.lr * m_hat / (np.sqrt(v_hat) + eps)
        elif self.momentum > 0.0:
            for i, (p, g) in enumerate(zip(params, grads)):
                self.velocity[i] = self.momentum * self.velocity[i] - self.lr * g
                p += self.velocity[i]
        else:
            for p, g in zip(params, grads):
                p -= self.lr * g


def train_mlp(z: np.ndarray, y: np.ndarray, train_rows: np.ndarray,
              val_rows: np.ndarray, cfg: MlpConfig) -> tuple[Mlp, list[EpochRecord]]:
    """Mini-batched training loop returning the best-validation-accuracy model.

    Deterministic for a fixed config and seed. Raises TrainingDivergedError
    if the loss goes non-finite.
    """
    cfg.validate()
    if cfg.layer_sizes[0] != z.shape[1]:
        raise ShapeError(f"model expects input width {cfg.layer_sizes[0]}, Z has {z.shape[1]}")
    if cfg.layer_sizes[-1] != y.shape[1]:
        raise ShapeError(f"model emits {cfg.layer_sizes[-1]} outputs, labels have {y.shape[1]}")
    train_rows = np.asarray(train_rows)
    val_rows = np.asarray(val_rows)
    if train_rows.size == 0:
        raise EmptyInputError("no training rows")

    model = Mlp(cfg.layer_sizes, seed=cfg.seed)
    rng = np.random.default_rng(cfg.seed + 1)
    quant_cfg = None
    if cfg.quantize_activations:
        qrng = np.random.default_rng(cfg.seed + 2) if cfg.stochastic_rounding else None
        quant_cfg = (cfg.quant_bits, cfg.quant_group_size, cfg.stochastic_rounding, qrng)

    optimizer = _Optimizer(model, cfg)
    history: list[EpochRecord] = []
    best = (-1.0, model.copy_weights())
    for epoch in range(cfg.epochs):
        order = rng.permutation(train_rows)
        losses = []
        for batch in np.array_split(order, cfg.batches_per_epoch):
            if batch.size == 0:
                continue
            logits, cache = model.forward_train(z[batch], cfg.dropout, rng, quant_cfg)
            loss, delta = loss_and_delta(logits, y[batch], cfg.task_kind)
            if not np.isfinite(loss):
                raise TrainingDivergedError(
                    f"loss became {loss} at epoch {epoch} (lr={cfg.learning_rate})")
            losses.append(loss)
            grads_w, grads_b = model.backward(cache, delta, cfg.dropout)
            optimizer.step(model, grads_w, grads_b)
        if val_rows.size:
            val_acc = evaluate(model, z, y, val_rows, cfg.task_kind).accuracy
        else:
            val_acc = float("nan")
        history.append(EpochRecord(epoch, float(np.mean(losses)), val_acc))
        score = val_acc if val_rows.size else -float(np.mean(losses))
        if score > best[0]:
            best = (score, model.copy_weights())
    if cfg.epochs > 0:
        model.set_weights(*best[1])
    return model, history


def history_to_csv(history: list[EpochRecord], path) -> None:
    with open(path, "w") as fh:
        fh.write("epoch,train_loss,val_accuracy\n")
        for rec in history:
            fh.write(f"{rec.epoch},{rec.train_loss!r},{rec.val_accuracy!r}\n")


def save_model(model: Mlp, path) -> None:
    """Flat binary checkpoint: magic, layer count, layer sizes, then per layer
    row-major weights and biases, all little-endian float64/uint64."""
    with open(path, "wb") as fh:
        fh.write(_CKPT_MAGIC)
        fh.write(struct.pack("<Q", len(model.layer_sizes)))
        fh.write(struct.pack(f"<{len(model.layer_sizes)}Q", *model.layer_sizes))
        for w, b in zip(model.weights, model.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_model(path) -> Mlp:
    with open(path, "rb") as fh:
        if fh.read(8) != _CKPT_MAGIC:
            raise CorruptionError(f"{path}: bad checkpoint magic")
        header = fh.read(8)
        if len(header) != 8:
            raise CorruptionError(f"{path}: truncated header")
        (n_sizes,) = struct.unpack("<Q", header)
        raw_sizes = fh.read(8 * n_sizes)
        if len(raw_sizes) != 8 * n_sizes:
            raise CorruptionError(f"{path}: truncated layer sizes")
        sizes = struct.unpack(f"<{n_sizes}Q", raw_sizes)
        model = Mlp(sizes, seed=0)
        for l, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            raw = fh.read(8 * (fan_in * fan_out + fan_out))
            if len(raw) != 8 * (fan_in * fan_out + fan_out):
                raise CorruptionError(f"{path}: truncated layer {l}")
            w = np.frombuffer(raw[:8 * fan_in * fan_out], dtype="<f8")
            b = np.frombuffer(raw[8 * fan_in * fan_out:], dtype="<f8")
            model.weights[l] = w.reshape(fan_in, fan_out).astype(np.float64)
            model.biases[l] = b.astype(np.float64)
        if fh.read(1):
            raise CorruptionError(f"{path}: trailing bytes")
    return model


def label_distribution_error(y_orig: np.ndarray, y_coll: np.ndarray) -> float:
    """Macro-averaged |n_l/n - N_l/N| between survivor and original labels."""
    y_orig = np.asarray(y_orig, dtype=np.float64)
    y_coll = np.asarray(y_coll, dtype=np.float64)
    if y_orig.ndim != 2 or y_coll.ndim != 2 or y_orig.shape[1] != y_coll.shape[1]:
        raise ShapeError(f"label matrices disagree: {y_orig.shape} vs {y_coll.shape}")
    if y_coll.shape[0] == 0:
        raise EmptyInputError("collapsed label matrix has no rows")
    if y_orig.shape[0] == 0:
        raise EmptyInputError("original label matrix has no rows")
    orig_ratio = (y_orig > 0.5).mean(axis=0)
    coll_ratio = (y_coll > 0.5).mean(axis=0)
    return float(np.abs(coll_ratio - orig_ratio).mean())
