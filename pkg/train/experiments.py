"""
Model assembly from configuration and the baseline comparison.

The comparison trains, for each seed, a model with a trainable dense support
and the same model with b frozen at 0, and scores both against the
persistence forecast on the test split.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.config import PROTOCOL_SEEDS
from core.config_loader import ConfigLoader, get_loader
from core.utils import ConfigError
from gvnn.model import GvnnModel, build_model
from gvsa.node_functions import NodeFunctionKind, parse_node_function
from gvsa.supports import SupportMatrix, parse_support_param, support_from_training_split
from signals.windows import TEST, WindowedDataset, make_windows
from train.trainer import TrainConfig, persistence_mse, train_forecaster

logger = logging.getLogger(__name__)

SUPPORT_SOURCES = ("corr", "abs-corr", "file")


@dataclass(frozen=True)
class ModelConfig:
    node_functions: Tuple[str, ...] = ("lde", "ic")
    support: str = "corr"
    support_param: str = "dense"
    renormalize: bool = True
    zave: bool = True
    keep_diagonal: bool = True
    hidden: Tuple[int, ...] = (128,)
    slope: float = 0.01
    init_a: float = 1.0
    init_b: float = 0.1
    theta_noise: float = 0.01

    def __post_init__(self):
        if self.support not in SUPPORT_SOURCES:
            raise ConfigError(
                f"Unknown support source '{self.support}'. Choose from {', '.join(SUPPORT_SOURCES)}"
            )
        if not self.node_functions:
            raise ConfigError("At least one node function is required")
        self.kinds()
        parse_support_param(self.support_param)

    @classmethod
    def from_mapping(
        cls,
        file_values: Optional[Mapping[str, Any]] = None,
        cli_values: Optional[Mapping[str, Any]] = None,
        loader: Optional[ConfigLoader] = None,
    ) -> "ModelConfig":
        values = (loader or get_loader()).resolve("model", file_values, cli_values)
        node_functions = values["node_functions"]
        if isinstance(node_functions, str):
            node_functions = [node_functions]
        hidden = values["hidden"]
        if isinstance(hidden, int):
            hidden = [hidden]
        try:
            return cls(
                node_functions=tuple(str(v) for v in node_functions),
                support=str(values["support"]),
                support_param=str(values["support_param"]),
                renormalize=bool(values["renormalize"]),
                zave=bool(values["zave"]),
                keep_diagonal=bool(values["keep_diagonal"]),
                hidden=tuple(int(h) for h in hidden),
                slope=float(values["slope"]),
                init_a=float(values["init_a"]),
                init_b=float(values["init_b"]),
                theta_noise=float(values["theta_noise"]),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid model config: {e}")

    def kinds(self) -> List[NodeFunctionKind]:
        return [parse_node_function(text, self.keep_diagonal) for text in self.node_functions]

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["node_functions"] = list(self.node_functions)
        payload["hidden"] = list(self.hidden)
        return payload


def build_forecaster(
    signal: np.ndarray,
    dataset: WindowedDataset,
    model_cfg: ModelConfig,
    seed: int,
    freeze_b: bool = False,
    support: Optional[SupportMatrix] = None,
) -> GvnnModel:
    """
    Assemble a model for `dataset`.

    The support is the correlation of the training portion of `signal` unless
    one is given (the "file" source).
    """
    if support is None:
        if model_cfg.support == "file":
            raise ConfigError("Support source 'file' needs a support matrix")
        support = support_from_training_split(
            signal, dataset, absolute=model_cfg.support == "abs-corr"
        )
    param, rank = parse_support_param(model_cfg.support_param)
    return build_model(
        dataset.node_count,
        dataset.window,
        support,
        kinds=model_cfg.kinds(),
        hidden=model_cfg.hidden,
        seed=seed,
        support_param=param,
        rank=rank,
        renormalize=model_cfg.renormalize,
        zave=model_cfg.zave,
        slope=model_cfg.slope,
        init_a=model_cfg.init_a,
        init_b=model_cfg.init_b,
        theta_noise=model_cfg.theta_noise,
        freeze_b=freeze_b,
    )


@dataclass
class BaselineComparison:
    seeds: List[int]
    gvnn: List[float] = field(default_factory=list)
    support_free: List[float] = field(default_factory=list)
    persistence: List[float] = field(default_factory=list)

    def means(self) -> Dict[str, float]:
        return {
            "gvnn": float(np.mean(self.gvnn)),
            "support_free": float(np.mean(self.support_free)),
            "persistence": float(np.mean(self.persistence)),
        }

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["mean"] = self.means()
        return payload


def compare_baselines(
    signal,
    train_cfg: TrainConfig,
    model_cfg: Optional[ModelConfig] = None,
    seeds: Sequence[int] = PROTOCOL_SEEDS,
) -> BaselineComparison:
    """Test MSE of the full model, the b = 0 ablation and persistence, per seed."""
    signal = np.asarray(signal, dtype=np.float64)
    model_cfg = model_cfg or ModelConfig(support_param="dense")
    dataset = make_windows(signal, train_cfg.window, train_cfg.horizon, train_cfg.stride)
    result = BaselineComparison(seeds=list(seeds))
    baseline = persistence_mse(dataset, TEST)
    for seed in seeds:
        cfg = TrainConfig(**{**train_cfg.to_dict(), "seed": int(seed)})
        full = build_forecaster(signal, dataset, model_cfg, int(seed))
        ablation = build_forecaster(signal, dataset, model_cfg, int(seed), freeze_b=True)
        result.gvnn.append(train_forecaster(dataset, full, cfg).test_mse)
        result.support_free.append(train_forecaster(dataset, ablation, cfg).test_mse)
        result.persistence.append(baseline)
        logger.info(
            f"Seed {seed}: gvnn {result.gvnn[-1]:.6e}, support-free "
            f"{result.support_free[-1]:.6e}, persistence {baseline:.6e}"
        )
    return result
