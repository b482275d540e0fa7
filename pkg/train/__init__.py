from train.experiments import BaselineComparison, ModelConfig, build_forecaster, compare_baselines
from train.loss import mse_loss
from train.optim import Adam, AdamState, adam_step, clip_gradients
from train.trainer import (
    TrainConfig,
    TrainReport,
    evaluate_mse,
    persistence_mse,
    train_forecaster,
    write_curve_csv,
    write_report_json,
)

__all__ = [
    "BaselineComparison",
    "ModelConfig",
    "build_forecaster",
    "compare_baselines",
    "mse_loss",
    "Adam",
    "AdamState",
    "adam_step",
    "clip_gradients",
    "TrainConfig",
    "TrainReport",
    "evaluate_mse",
    "persistence_mse",
    "train_forecaster",
    "write_curve_csv",
    "write_report_json",
]
