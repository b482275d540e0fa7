"""
Synthetic chaotic benchmarks: coupled Lorenz oscillators, a Hopfield network
and a MacArthur-style competition model.

Every generator takes a MapConfig, draws all randomness from one PCG64 stream
seeded by `cfg.seed`, discards a transient and returns an (N, T) signal.
Defaults live in the `maps` section of core/defaults.yaml.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Union

import numpy as np

from core.config import FORMAT_TAG
from core.config_loader import ConfigLoader, get_loader
from core.utils import ConfigError, DataError, Divergence, TooShort, ensure_parent_dir
from linalg.rng import make_rng

logger = logging.getLogger(__name__)

LORENZ = "lorenz"
HOPFIELD = "hopfield"
MACARTHUR = "macarthur"

MAP_KINDS = (LORENZ, HOPFIELD, MACARTHUR)

DIVERGENCE_LIMIT = 1e6


@dataclass(frozen=True)
class MapConfig:
    """Which map to simulate, its size, its seed and its map-specific constants."""

    kind: str
    nodes: int
    length: int
    seed: int = 124
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in MAP_KINDS:
            raise ConfigError(f"Unknown map '{self.kind}'. Choose from {', '.join(MAP_KINDS)}")
        if self.nodes < 1 or self.length < 1:
            raise ConfigError(f"Map size must be positive, got {self.nodes} x {self.length}")
        for name, value in self.params.items():
            if not np.isfinite(value):
                raise ConfigError(f"Map parameter '{name}' must be finite, got {value}")

    @classmethod
    def from_defaults(
        cls,
        kind: str,
        overrides: Optional[Mapping[str, Any]] = None,
        loader: Optional[ConfigLoader] = None,
    ) -> "MapConfig":
        """
        Packaged defaults for `kind`, with `overrides` applied on top.

        Raises:
            ConfigError: On an unknown map or an override key the map does not have
        """
        values = (loader or get_loader()).map_defaults(kind)
        for key, value in (overrides or {}).items():
            if value is None:
                continue
            if key not in values:
                raise ConfigError(f"Unknown parameter '{key}' for map '{kind}'")
            values[key] = value
        nodes = int(values.pop("nodes"))
        length = int(values.pop("length"))
        seed = int(values.pop("seed"))
        params = {k: float(v) for k, v in values.items()}
        return cls(kind=kind, nodes=nodes, length=length, seed=seed, params=params)

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "MapConfig":
        """
        Rebuild a config from `to_dict()` output, e.g. one stored in a checkpoint.

        Raises:
            DataError: If the payload is not a map config
        """
        try:
            return cls(
                kind=payload["kind"],
                nodes=int(payload["nodes"]),
                length=int(payload["length"]),
                seed=int(payload["seed"]),
                params={k: float(v) for k, v in payload["params"].items()},
            )
        except (KeyError, TypeError, ValueError, AttributeError, ConfigError) as e:
            raise DataError(f"Invalid map config: {e}")

    def param(self, name: str) -> float:
        if name not in self.params:
            raise ConfigError(f"Map '{self.kind}' is missing parameter '{name}'")
        return self.params[name]

    def require_length(self, window: int, horizon: int) -> None:
        if self.length < window + horizon:
            raise TooShort(
                f"Map length {self.length} is shorter than window {window} + horizon {horizon}"
            )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "nodes": self.nodes,
            "length": self.length,
            "seed": self.seed,
            "params": dict(sorted(self.params.items())),
        }


def _check_bounded(state: np.ndarray, step: int) -> None:
    if not np.all(np.isfinite(state)) or np.max(np.abs(state)) > DIVERGENCE_LIMIT:
        raise Divergence(f"State left the ±{DIVERGENCE_LIMIT:g} box at step {step}")


def _lorenz_rhs(state: np.ndarray, sigma: float, rho: float, beta: float, k: float):
    x, y, z = state[:, 0], state[:, 1], state[:, 2]
    diffusion = np.roll(x, 1) + np.roll(x, -1) - 2.0 * x
    return np.stack(
        [sigma * (y - x) + k * diffusion, x * (rho - z) - y, x * y - beta * z], axis=1
    )


def simulate_coupled_lorenz(cfg: MapConfig) -> np.ndarray:
    """
    K = N / 3 Lorenz systems on a ring, diffusively coupled through x.

    Row 3k holds x of system k, rows 3k + 1 and 3k + 2 its y and z. Integrated
    with classical RK4 at step dt; one sample is kept every `subsample` steps
    after `transient` steps are discarded.

    Raises:
        ConfigError: If N is not a multiple of 3
        Divergence: If any state exceeds 1e6 in magnitude
    """
    if cfg.nodes % 3 != 0:
        raise ConfigError(f"Coupled Lorenz needs a node count divisible by 3, got {cfg.nodes}")
    sigma, rho, beta = cfg.param("sigma"), cfg.param("rho"), cfg.param("beta")
    k, dt = cfg.param("coupling"), cfg.param("dt")
    subsample, transient = int(cfg.param("subsample")), int(cfg.param("transient"))
    systems = cfg.nodes // 3

    rng = make_rng(cfg.seed)
    state = rng.uniform(-10.0, 10.0, (systems, 3))
    state[:, 2] += 25.0

    def rk4(s):
        k1 = _lorenz_rhs(s, sigma, rho, beta, k)
        k2 = _lorenz_rhs(s + 0.5 * dt * k1, sigma, rho, beta, k)
        k3 = _lorenz_rhs(s + 0.5 * dt * k2, sigma, rho, beta, k)
        k4 = _lorenz_rhs(s + dt * k3, sigma, rho, beta, k)
        return s + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0

    step = 0

    def advance(s):
        nonlocal step
        step += 1
        with np.errstate(over="ignore", invalid="ignore"):
            s = rk4(s)
        _check_bounded(s, step)
        return s

    for _ in range(transient):
        state = advance(state)

    out = np.empty((cfg.nodes, cfg.length))
    for t in range(cfg.length):
        for _ in range(subsample):
            state = advance(state)
        out[:, t] = state.ravel()
    logger.info(f"Simulated {systems} coupled Lorenz systems for {cfg.length} samples")
    return out


def _hopfield_draws(cfg: MapConfig):
    rng = make_rng(cfg.seed)
    weights = rng.standard_normal((cfg.nodes, cfg.nodes)) / np.sqrt(cfg.nodes)
    return weights, rng.uniform(-1.0, 1.0, cfg.nodes)


def simulate_hopfield(cfg: MapConfig) -> np.ndarray:
    """x(t+1) = tanh(g W x(t)) with Gaussian W of variance 1/N (not symmetric)."""
    gain, transient = cfg.param("gain"), int(cfg.param("transient"))
    weights, state = _hopfield_draws(cfg)
    coupling = gain * weights

    for _ in range(transient):
        state = np.tanh(coupling @ state)
    out = np.empty((cfg.nodes, cfg.length))
    for t in range(cfg.length):
        state = np.tanh(coupling @ state)
        out[:, t] = state
    logger.info(f"Simulated {cfg.nodes}-unit Hopfield network for {cfg.length} samples")
    return out


def simulate_macarthur(cfg: MapConfig) -> np.ndarray:
    """
    Discrete competition: x_i(t+1) = x_i(t) exp(r_i (1 - sum_j A_ij x_j(t))).

    Growth rates are uniform in [rate_low, rate_high]; A has unit diagonal and
    off-diagonal entries uniform in [0, competition_high]. States are clamped to
    [state_min, state_max] after every step.
    """
    transient = int(cfg.param("transient"))
    low, high = cfg.param("state_min"), cfg.param("state_max")
    if not 0.0 < low < high:
        raise ConfigError(f"State clamp must satisfy 0 < min < max, got [{low}, {high}]")
    rng = make_rng(cfg.seed)
    n = cfg.nodes
    rates = rng.uniform(cfg.param("rate_low"), cfg.param("rate_high"), n)
    competition = rng.uniform(0.0, cfg.param("competition_high"), (n, n))
    np.fill_diagonal(competition, 1.0)
    state = rng.uniform(0.1, 1.0, n)

    def step(x):
        return np.clip(x * np.exp(rates * (1.0 - competition @ x)), low, high)

    for _ in range(transient):
        state = step(state)
    out = np.empty((n, cfg.length))
    for t in range(cfg.length):
        state = step(state)
        out[:, t] = state
    logger.info(f"Simulated {n}-species competition model for {cfg.length} samples")
    return out


_SIMULATORS: Dict[str, Callable[[MapConfig], np.ndarray]] = {
    LORENZ: simulate_coupled_lorenz,
    HOPFIELD: simulate_hopfield,
    MACARTHUR: simulate_macarthur,
}


def simulate_map(cfg: MapConfig) -> np.ndarray:
    return _SIMULATORS[cfg.kind](cfg)


def estimate_lyapunov(
    step_fn: Callable[[np.ndarray], np.ndarray],
    x0,
    separation: float = 1e-8,
    steps: int = 2000,
    discard: int = 100,
) -> float:
    """
    Largest Lyapunov exponent of a map by two-trajectory divergence.

    A companion trajectory starts `separation` away from x0 along a fixed unit
    direction; after every step the gap is measured and rescaled back to
    `separation`. The exponent is the mean log growth over the last
    `steps - discard` steps.
    """
    x = np.atleast_1d(np.asarray(x0, dtype=np.float64))
    if steps <= discard:
        raise ConfigError(f"steps ({steps}) must exceed discard ({discard})")
    direction = np.ones_like(x) / np.sqrt(x.size)
    y = x + separation * direction
    total = 0.0
    for k in range(steps):
        x = step_fn(x)
        y = step_fn(y)
        gap = y - x
        distance = float(np.linalg.norm(gap))
        if distance == 0.0:
            # trajectories merged: contracting to machine precision
            return -np.inf
        if k >= discard:
            total += np.log(distance / separation)
        y = x + gap * (separation / distance)
    return total / (steps - discard)


def hopfield_step_fn(cfg: MapConfig):
    """The Hopfield update of `cfg` and its initial state, for Lyapunov estimates."""
    weights, state = _hopfield_draws(cfg)
    coupling = cfg.param("gain") * weights
    return (lambda x: np.tanh(coupling @ x)), state


def write_map_config_json(
    path: Union[str, Path],
    cfg: MapConfig,
    manifest_digest: Optional[str] = None,
    diagnostics: Optional[Mapping[str, Any]] = None,
) -> Path:
    """Provenance sidecar next to a generated signal, with optional diagnostics."""
    path = ensure_parent_dir(path)
    payload = {"format": FORMAT_TAG, "manifest": manifest_digest, "map": cfg.to_dict()}
    if diagnostics:
        payload["diagnostics"] = dict(diagnostics)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.debug(f"Wrote map config sidecar {path}")
    return path

