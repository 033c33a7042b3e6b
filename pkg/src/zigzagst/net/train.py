"""Adam training loop with chronological splits and plateau decay."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ModelConfig, ModelParams, init_params
from .model import Ablation, backward, forward, loss_metrics, mae_loss_and_grad

__all__ = [
    "Batch",
    "Dataset",
    "TrainResult",
    "TrainingDiverged",
    "Adam",
    "chronological_split",
    "train",
    "evaluate",
    "predict",
    "write_history_csv",
]


@dataclass(frozen=True)
class Batch:
    """One training sample: an input window, its image, and the targets."""

    inputs: np.ndarray   # (window, n_nodes, in_features)
    image: np.ndarray    # (p, p)
    targets: np.ndarray  # (horizon, n_nodes, out_features)


@dataclass(frozen=True)
class Dataset:
    train: tuple[Batch, ...]
    val: tuple[Batch, ...]
    test: tuple[Batch, ...]


class TrainingDiverged(RuntimeError):
    def __init__(self, epoch: int):
        super().__init__(f"training loss became non-finite at epoch {epoch}")
        self.epoch = epoch


@dataclass
class TrainResult:
    params: ModelParams
    config: ModelConfig
    history: list[tuple[int, str, float, float, float]]  # (epoch, split, mae, rmse, mape)
    input_lo: np.ndarray
    input_hi: np.ndarray
    image_scale: float


class Adam:
    """Standard Adam over the named parameter arrays."""

    def __init__(self, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}
        self.t = 0

    def step(self, params: ModelParams, grads: ModelParams, lr: float) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        corr1 = 1.0 - b1 ** self.t
        corr2 = 1.0 - b2 ** self.t
        grad_map = dict(grads.named_arrays())
        for name, arr in params.named_arrays():
            g = grad_map[name]
            m = self.m.setdefault(name, np.zeros_like(arr))
            v = self.v.setdefault(name, np.zeros_like(arr))
            m += (1.0 - b1) * (g - m)
            v += (1.0 - b2) * (g * g - v)
            arr -= lr * (m / corr1) / (np.sqrt(v / corr2) + self.eps)


def chronological_split(batches: list[Batch], fractions: tuple[float, ...] = (0.6, 0.2, 0.2)) -> Dataset:
    """Split windows in time order; (train, val, test) or (train, test)."""
    if len(fractions) not in (2, 3) or abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError("fractions must be 2 or 3 values summing to 1")
    n = len(batches)
    n_train = int(round(n * fractions[0]))
    if len(fractions) == 3:
        n_val = int(round(n * fractions[1]))
        return Dataset(
            tuple(batches[:n_train]),
            tuple(batches[n_train : n_train + n_val]),
            tuple(batches[n_train + n_val :]),
        )
    return Dataset(tuple(batches[:n_train]), (), tuple(batches[n_train:]))


def _fit_input_range(batches: tuple[Batch, ...]) -> tuple[np.ndarray, np.ndarray]:
    stack = np.concatenate([b.inputs.reshape(-1, b.inputs.shape[-1]) for b in batches])
    return stack.min(axis=0), stack.max(axis=0)


def _scale_inputs(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    span = np.where(hi > lo, hi - lo, 1.0)
    return np.clip((x - lo) / span, 0.0, 1.0)


def _normalize(batches: tuple[Batch, ...], lo, hi, image_scale) -> list[Batch]:
    return [
        Batch(_scale_inputs(b.inputs, lo, hi), b.image / image_scale, b.targets)
        for b in batches
    ]


def evaluate(
    params: ModelParams,
    config: ModelConfig,
    batches: list[Batch],
    ablation: Ablation = Ablation(),
) -> tuple[float, float, float]:
    """Pooled MAE/RMSE/MAPE over a list of normalized batches."""
    preds = []
    targets = []
    for b in batches:
        preds.append(forward(b.inputs, b.image, params, config, ablation))
        targets.append(b.targets)
    return loss_metrics(np.stack(preds), np.stack(targets))


def predict(result: TrainResult, batch: Batch, ablation: Ablation = Ablation()) -> np.ndarray:
    """Forecast for a raw (unnormalized) batch using stored scalers."""
    x = _scale_inputs(batch.inputs, result.input_lo, result.input_hi)
    return forward(x, batch.image / result.image_scale, result.params, result.config, ablation)


def train(dataset: Dataset, config: ModelConfig, ablation: Ablation = Ablation()) -> TrainResult:
    """Adam training; input min-max scaling is fit on the training split only.

    The learning rate is multiplied by the configured decay whenever the
    monitored MAE (validation when a val split exists, else training)
    fails to improve for ``plateau_patience`` epochs.  Deterministic
    under the config seed.
    """
    if not dataset.train:
        raise ValueError("training split is empty")
    lo, hi = _fit_input_range(dataset.train)
    image_scale = max(float(np.max([b.image.max() for b in dataset.train])), 1e-12)
    train_b = _normalize(dataset.train, lo, hi, image_scale)
    val_b = _normalize(dataset.val, lo, hi, image_scale)
    test_b = _normalize(dataset.test, lo, hi, image_scale)

    rng = np.random.default_rng(config.seed)
    params = init_params(config, rng)
    adam = Adam()
    lr = config.learning_rate
    history: list[tuple[int, str, float, float, float]] = []
    best = np.inf
    stale = 0

    for epoch in range(config.epochs):
        order = rng.permutation(len(train_b))
        try:
            for start in range(0, len(order), config.batch_size):
                chunk = order[start : start + config.batch_size]
                grads = params.zeros_like()
                total = 0.0
                for idx in chunk:
                    b = train_b[idx]
                    pred, cache = forward(b.inputs, b.image, params, config, ablation, want_cache=True)
                    loss, dpred = mae_loss_and_grad(pred, b.targets)
                    total += loss
                    gstep = backward(cache, dpred / len(chunk))
                    for (_, g), (_, gs) in zip(grads.named_arrays(), gstep.named_arrays()):
                        g += gs
                if not np.isfinite(total):
                    raise TrainingDiverged(epoch)
                adam.step(params, grads, lr)
            tr = evaluate(params, config, train_b, ablation)
        except FloatingPointError as exc:
            raise TrainingDiverged(epoch) from exc
        history.append((epoch, "train", *tr))
        if not np.isfinite(tr[0]):
            raise TrainingDiverged(epoch)
        monitored = tr[0]
        if val_b:
            va = evaluate(params, config, val_b, ablation)
            history.append((epoch, "val", *va))
            monitored = va[0]
        if monitored < best - 1e-12:
            best = monitored
            stale = 0
        else:
            stale += 1
            if stale >= config.plateau_patience:
                lr *= config.lr_decay
                stale = 0
    if test_b:
        te = evaluate(params, config, test_b, ablation)
        history.append((config.epochs - 1, "test", *te))
    return TrainResult(params, config, history, lo, hi, image_scale)


def write_history_csv(history, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("epoch,split,mae,rmse,mape\n")
        for epoch, split, mae, rmse, mape in history:
            fh.write(f"{epoch},{split},{mae:.17g},{rmse:.17g},{mape:.17g}\n")
