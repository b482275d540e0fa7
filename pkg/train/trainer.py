"""
Training loop with best-validation model selection.

Inputs are z-scored per sample; targets are normalized with the statistics of
the last input column of their own window (see signals.windows.normalize_window).
Every reported loss is in these normalized units.
"""

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from core.config_loader import ConfigLoader, derive_seed, get_loader
from core.utils import ConfigError, NonFinite, ensure_parent_dir
from gvnn.model import GvnnModel
from linalg.rng import make_rng
from signals.csv_io import format_float
from signals.windows import TEST, TRAIN, VAL, WindowedDataset, normalize_window
from train.loss import mse_loss
from train.optim import Adam, clip_gradients

logger = logging.getLogger(__name__)

NORMALIZATION = "per-window z-score; target scaled by its window's last-column statistics"

EVAL_CHUNK = 512


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-4
    epochs: int = 500
    batch: int = 128
    seed: int = 124
    weight_decay: float = 0.0
    clip_norm: float = 0.0
    window: int = 3
    horizon: int = 1
    stride: int = 1

    def __post_init__(self):
        if not np.isfinite(self.lr) or self.lr < 0.0:
            raise ConfigError(f"lr must be a finite value >= 0, got {self.lr}")
        if self.epochs < 1 or self.batch < 1:
            raise ConfigError(f"epochs and batch must be >= 1, got {self.epochs}, {self.batch}")
        if self.window < 1 or self.horizon < 1 or self.stride < 1:
            raise ConfigError("window, horizon and stride must be >= 1")
        if self.weight_decay < 0.0 or self.clip_norm < 0.0:
            raise ConfigError("weight_decay and clip_norm must be >= 0")

    @classmethod
    def from_mapping(
        cls,
        file_values: Optional[Mapping[str, Any]] = None,
        cli_values: Optional[Mapping[str, Any]] = None,
        loader: Optional[ConfigLoader] = None,
    ) -> "TrainConfig":
        values = (loader or get_loader()).resolve("train", file_values, cli_values)
        try:
            return cls(
                lr=float(values["lr"]),
                epochs=int(values["epochs"]),
                batch=int(values["batch"]),
                seed=int(values["seed"]),
                weight_decay=float(values["weight_decay"]),
                clip_norm=float(values["clip_norm"]),
                window=int(values["window"]),
                horizon=int(values["horizon"]),
                stride=int(values["stride"]),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid train config: {e}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class TrainReport:
    train_loss: List[float]
    val_loss: List[float]
    initial_val_loss: float
    best_epoch: int
    best_val_loss: float
    test_mse: float
    config: Dict[str, Any]
    model: Dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        """JSON body; wall-clock time is kept apart under "timing"."""
        return {
            "train_loss": list(self.train_loss),
            "val_loss": list(self.val_loss),
            "initial_val_loss": self.initial_val_loss,
            "best_epoch": self.best_epoch,
            "best_val_loss": self.best_val_loss,
            "test_mse": self.test_mse,
            "normalization": NORMALIZATION,
            "config": dict(self.config),
            "model": dict(self.model),
            "timing": {"seconds": self.seconds},
        }


def normalized_split(dataset: WindowedDataset, split: str) -> Tuple[np.ndarray, np.ndarray]:
    inputs, targets = dataset.split(split)
    return normalize_window(inputs, targets)


def evaluate_normalized(model: GvnnModel, inputs: np.ndarray, targets: np.ndarray) -> float:
    """Mean per-window MSE of already-normalized windows."""
    if inputs.shape[0] == 0:
        raise ConfigError("Cannot evaluate an empty split")
    total = 0.0
    for start in range(0, inputs.shape[0], EVAL_CHUNK):
        pred = model.predict(inputs[start : start + EVAL_CHUNK])
        diff = pred - targets[start : start + EVAL_CHUNK]
        total += float(np.sum(diff * diff))
    return total / targets.size


def evaluate_mse(dataset: WindowedDataset, model: GvnnModel, split: str = TEST) -> float:
    """Mean per-window MSE of `model` on one split, in normalized units."""
    return evaluate_normalized(model, *normalized_split(dataset, split))


def persistence_mse(dataset: WindowedDataset, split: str = TEST) -> float:
    """MSE of predicting the last input column, in the same units as evaluate_mse."""
    inputs, targets = normalized_split(dataset, split)
    diff = inputs[..., -1] - targets
    return float(np.mean(diff * diff))


def train_forecaster(
    dataset: WindowedDataset, model: GvnnModel, cfg: TrainConfig
) -> TrainReport:
    """
    Train with Adam on shuffled mini-batches and keep the best-validation state.

    On return the model holds the parameters of the epoch with the lowest
    validation loss; the test MSE is measured with those parameters.

    Raises:
        TooShort: If any split is empty
        NonFinite: If the loss or a gradient leaves the finite range (`epoch` is set)
    """
    dataset.require_nonempty()
    train_x, train_y = normalized_split(dataset, TRAIN)
    val_x, val_y = normalized_split(dataset, VAL)

    optimizer = Adam(lr=cfg.lr, weight_decay=cfg.weight_decay)
    started = time.perf_counter()
    initial_val = evaluate_normalized(model, val_x, val_y)
    best_val, best_epoch, best_state = np.inf, 0, model.state()
    train_curve: List[float] = []
    val_curve: List[float] = []
    n_train = train_x.shape[0]

    logger.info(
        f"Training on {n_train} windows for {cfg.epochs} epochs "
        f"(batch {cfg.batch}, lr {cfg.lr:g}); initial val_loss={initial_val:.6e}"
    )
    for epoch in range(1, cfg.epochs + 1):
        order = make_rng(derive_seed(f"shuffle:{epoch}", cfg.seed)).permutation(n_train)
        weighted = 0.0
        try:
            for start in range(0, n_train, cfg.batch):
                idx = order[start : start + cfg.batch]
                pred, cache = model.forward(train_x[idx])
                loss, d_pred = mse_loss(pred, train_y[idx])
                if not np.isfinite(loss):
                    raise NonFinite("Training loss is not finite")
                grads = model.backward(cache, d_pred)
                trainable = model.trainable_parameters()
                step_grads = clip_gradients(
                    {name: grads[name] for name in trainable}, cfg.clip_norm
                )
                optimizer.step(trainable, step_grads)
                weighted += loss * idx.size
            val_loss = evaluate_normalized(model, val_x, val_y)
        except NonFinite as e:
            logger.error(f"Training diverged in epoch {epoch}: {e}")
            raise NonFinite(f"Epoch {epoch}: {e}", epoch=epoch)

        train_loss = weighted / n_train
        train_curve.append(train_loss)
        val_curve.append(val_loss)
        if val_loss < best_val:
            best_val, best_epoch, best_state = val_loss, epoch, model.state()
        logger.info(
            f"Epoch {epoch}/{cfg.epochs}: train_loss={train_loss:.6e} val_loss={val_loss:.6e}"
        )

    model.load_state(best_state)
    test_mse = evaluate_mse(dataset, model, TEST)
    seconds = time.perf_counter() - started
    logger.info(f"Best epoch {best_epoch} (val {best_val:.6e}); test MSE {test_mse:.6e}")
    return TrainReport(
        train_loss=train_curve,
        val_loss=val_curve,
        initial_val_loss=initial_val,
        best_epoch=best_epoch,
        best_val_loss=best_val,
        test_mse=test_mse,
        config=cfg.to_dict(),
        model=model.describe(),
        seconds=seconds,
    )


def write_curve_csv(
    path: Union[str, Path], report: TrainReport, header: Optional[str] = None
) -> Path:
    """epoch,train_loss,val_loss rows after an optional comment header."""
    path = ensure_parent_dir(path)
    lines = [header] if header else []
    lines.append("epoch,train_loss,val_loss")
    for epoch, (tr, va) in enumerate(zip(report.train_loss, report.val_loss), start=1):
        lines.append(f"{epoch},{format_float(tr)},{format_float(va)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_report_json(
    path: Union[str, Path], report: TrainReport, stamp: Optional[Dict[str, Any]] = None
) -> Path:
    """Write the report; `stamp` (format tag and manifest digest) goes first."""
    path = ensure_parent_dir(path)
    payload = dict(stamp or {})
    payload.update(report.to_dict())
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(f"Wrote training report {path}")
    return path
