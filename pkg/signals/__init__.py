from signals.csv_io import load_csv_signal, write_csv_signal
from signals.maps import (
    MapConfig,
    estimate_lyapunov,
    hopfield_step_fn,
    simulate_coupled_lorenz,
    simulate_hopfield,
    simulate_macarthur,
    simulate_map,
    write_map_config_json,
)
from signals.windows import (
    WindowedDataset,
    make_windows,
    normalize_window,
    persistence_forecast,
    zscore_per_sample,
)

__all__ = [
    "load_csv_signal",
    "write_csv_signal",
    "MapConfig",
    "estimate_lyapunov",
    "hopfield_step_fn",
    "simulate_coupled_lorenz",
    "simulate_hopfield",
    "simulate_macarthur",
    "simulate_map",
    "write_map_config_json",
    "WindowedDataset",
    "make_windows",
    "normalize_window",
    "persistence_forecast",
    "zscore_per_sample",
]
