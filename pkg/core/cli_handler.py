"""
CLI Handler for gvnn-kit

One function per subcommand. Each resolves its configuration (flags > config
file > packaged defaults), writes the run manifest, then writes its artifacts
stamped with the manifest digest.

Usage:
    gvnn-kit generate --map hopfield --out data/hopfield.csv
    gvnn-kit train --map hopfield --epochs 300 --out-dir runs/hopfield
    gvnn-kit eval --checkpoint runs/hopfield/checkpoint.json
    gvnn-kit gvft --data data/hopfield.csv --node-fn ic --out gvft.csv --svg gvft.svg
    gvnn-kit verify --trials 100 --out verify.json
    gvnn-kit bench --t-list 64 128 256 512 --out bench.csv
"""

import argparse
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import yaml

from bench.kron_bench import run_benchmark, write_bench_csv, write_bench_svg
from core.config_loader import read_config_file, resolve_config
from core.manifest import RunManifest
from core.utils import ConfigError, DataError, GvnnKitError, sha256_file
from gvft.export import write_coefficients_csv, write_heatmap_svg
from gvft.transform import SIGN_CONVENTION, gvft
from gvnn.checkpoint import load_checkpoint, save_checkpoint
from gvsa.node_functions import parse_node_function
from gvsa.supports import SupportMatrix, build_support_correlation
from signals.csv_io import load_csv_signal, write_csv_signal
from signals.maps import (
    HOPFIELD,
    MapConfig,
    estimate_lyapunov,
    hopfield_step_fn,
    simulate_map,
    write_map_config_json,
)
from signals.windows import make_windows
from theory.reports import require_all_passed, summarize, write_reports_json
from theory.suite import run_theory_suite
from train.experiments import ModelConfig, build_forecaster
from train.trainer import (
    NORMALIZATION,
    TrainConfig,
    evaluate_mse,
    persistence_mse,
    train_forecaster,
    write_curve_csv,
    write_report_json,
)

logger = logging.getLogger(__name__)

REPORT_NAME = "report.json"
CURVE_NAME = "curve.csv"
CHECKPOINT_NAME = "checkpoint.json"


def _sidecar_manifest(out: Path) -> str:
    return f"{out.stem}.manifest.json"


def _parse_params(pairs: Optional[List[str]]) -> Dict[str, Any]:
    """`name=value` flags; values are read as YAML scalars."""
    params: Dict[str, Any] = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigError(f"Expected NAME=VALUE, got '{pair}'")
        name, value = pair.split("=", 1)
        params[name.strip()] = yaml.safe_load(value)
    return params


def _map_config(args: argparse.Namespace, file_cfg: Dict[str, Any], kind: str, seed_attr: str):
    overrides = dict((file_cfg.get("maps") or {}).get(kind) or {})
    overrides.update(_parse_params(getattr(args, "param", None)))
    overrides.update(
        {
            "nodes": getattr(args, "nodes", None),
            "length": getattr(args, "length", None),
            "seed": getattr(args, seed_attr, None),
        }
    )
    return MapConfig.from_defaults(kind, overrides)


def _load_signal(
    args: argparse.Namespace,
    file_cfg: Dict[str, Any],
    span: Optional[Tuple[int, int]] = None,
) -> Tuple[np.ndarray, Dict[str, Any], List[str]]:
    """
    The input signal from --data or --map.

    A (window, horizon) `span` makes a map source fail with TooShort before it
    is simulated.

    Returns:
        (signal, data description for the manifest, input paths to digest)
    """
    if getattr(args, "data", None):
        signal = load_csv_signal(args.data, transpose=args.transpose)
        description = {
            "source": "file",
            "path": str(args.data),
            "sha256": sha256_file(args.data),
            "transpose": bool(args.transpose),
        }
        return signal, description, [args.data]
    if getattr(args, "map", None):
        cfg = _map_config(args, file_cfg, args.map, "map_seed")
        if span:
            cfg.require_length(*span)
        return simulate_map(cfg), {"source": "map", "map": cfg.to_dict()}, []
    raise ConfigError("Give an input signal with --data FILE or --map KIND")


def _model_cli_values(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        "node_functions": args.node_fn,
        "support": args.support,
        "support_param": args.support_param,
        "renormalize": args.renorm,
        "zave": args.zave,
        "keep_diagonal": args.keep_diagonal,
        "hidden": args.hidden,
    }


def _train_cli_values(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        "lr": args.lr,
        "epochs": args.epochs,
        "batch": args.batch,
        "seed": args.seed,
        "weight_decay": args.weight_decay,
        "clip_norm": args.clip_norm,
        "window": args.window,
        "horizon": args.horizon,
        "stride": args.stride,
    }


def _support_from_file(path: Optional[str]):
    if not path:
        raise ConfigError("Support source 'file' needs --support-file")
    return SupportMatrix.fixed(load_csv_signal(path))


def cmd_generate(args: argparse.Namespace, file_cfg: Dict[str, Any]) -> Dict[str, Any]:
    """Simulate a map and write the signal CSV plus its map config sidecar."""
    cfg = _map_config(args, file_cfg, args.map, "seed")
    out = Path(args.out)
    sidecar = out.with_suffix(".json")
    manifest = RunManifest.build(
        "generate", {"map": cfg.to_dict()}, cfg.seed, outputs=[str(out), str(sidecar)]
    )
    manifest.write(out.parent, _sidecar_manifest(out))

    signal = simulate_map(cfg)
    diagnostics = {}
    if cfg.kind == HOPFIELD:
        step_fn, x0 = hopfield_step_fn(cfg)
        diagnostics["lyapunov"] = estimate_lyapunov(step_fn, x0)
        logger.info(f"Hopfield largest Lyapunov exponent {diagnostics['lyapunov']:.4f}")
    write_csv_signal(out, signal, manifest.csv_header())
    write_map_config_json(sidecar, cfg, manifest.digest, diagnostics)
    logger.info(f"Generated {cfg.kind} signal {signal.shape} -> {out}")
    summary = {"signal": str(out), "nodes": signal.shape[0], "length": signal.shape[1]}
    summary.update(diagnostics)
    return summary


def cmd_train(args: argparse.Namespace, file_cfg: Dict[str, Any]) -> Dict[str, Any]:
    """Load or generate a signal, train a forecaster and write report, curve and checkpoint."""
    train_cfg = TrainConfig.from_mapping(file_cfg.get("train"), _train_cli_values(args))
    model_cfg = ModelConfig.from_mapping(file_cfg.get("model"), _model_cli_values(args))
    signal, data, inputs = _load_signal(
        args, file_cfg, (train_cfg.window, train_cfg.horizon)
    )
    if args.support_file:
        inputs.append(args.support_file)

    out_dir = Path(args.out_dir)
    outputs = [out_dir / REPORT_NAME, out_dir / CURVE_NAME, out_dir / CHECKPOINT_NAME]
    config = {
        "train": train_cfg.to_dict(),
        "model": model_cfg.to_dict(),
        "data": data,
        "freeze_b": bool(args.freeze_b),
    }
    manifest = RunManifest.build("train", config, train_cfg.seed, inputs, [str(p) for p in outputs])
    manifest.write(out_dir)

    dataset = make_windows(signal, train_cfg.window, train_cfg.horizon, train_cfg.stride)
    support = _support_from_file(args.support_file) if model_cfg.support == "file" else None
    model = build_forecaster(
        signal, dataset, model_cfg, train_cfg.seed, freeze_b=args.freeze_b, support=support
    )
    report = train_forecaster(dataset, model, train_cfg)

    write_report_json(outputs[0], report, manifest.stamp({}))
    write_curve_csv(outputs[1], report, manifest.csv_header())
    save_checkpoint(outputs[2], model, config, manifest.digest)
    return {
        "out_dir": str(out_dir),
        "best_epoch": report.best_epoch,
        "best_val_loss": report.best_val_loss,
        "test_mse": report.test_mse,
    }


def _eval_signal(args, file_cfg, payload) -> Tuple[np.ndarray, List[str]]:
    if args.data or args.map:
        signal, _, inputs = _load_signal(args, file_cfg)
        return signal, inputs
    data = (payload.get("config") or {}).get("data") or {}
    if data.get("source") == "map":
        return simulate_map(MapConfig.from_dict(data["map"])), []
    if data.get("source") == "file":
        path = data["path"]
        if not Path(path).exists():
            raise DataError(f"Training data {path} is gone; pass --data")
        return load_csv_signal(path, transpose=bool(data.get("transpose"))), [path]
    raise ConfigError("The checkpoint does not record its data; pass --data or --map")


def cmd_eval(args: argparse.Namespace, file_cfg: Dict[str, Any]) -> Dict[str, Any]:
    """Score a checkpoint on one split of a signal, next to the persistence baseline."""
    checkpoint = Path(args.checkpoint)
    model, payload = load_checkpoint(checkpoint)
    train_values = (payload.get("config") or {}).get("train") or {}
    try:
        window = int(train_values.get("window", model.length))
        horizon = int(train_values.get("horizon", 1))
        stride = int(train_values.get("stride", 1))
    except (TypeError, ValueError) as e:
        raise DataError(f"Checkpoint {checkpoint} has an invalid train config: {e}")

    signal, inputs = _eval_signal(args, file_cfg, payload)
    out = Path(args.out) if args.out else checkpoint.with_name("eval.json")
    manifest = RunManifest.build(
        "eval",
        {"split": args.split, "window": window, "horizon": horizon, "stride": stride},
        payload.get("seed"),
        [str(checkpoint)] + list(inputs),
        [str(out)],
    )
    manifest.write(out.parent, _sidecar_manifest(out))

    dataset = make_windows(signal, window, horizon, stride)
    if signal.shape[0] != model.node_count:
        raise DataError(
            f"Signal has {signal.shape[0]} nodes, the checkpoint expects {model.node_count}"
        )
    metrics = {
        "split": args.split,
        "mse": evaluate_mse(dataset, model, args.split),
        "persistence_mse": persistence_mse(dataset, args.split),
        "windows": int(dataset.indices(args.split).size),
        "normalization": NORMALIZATION,
    }
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(
        json.dumps(manifest.stamp(metrics), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    logger.info(f"{args.split} MSE {metrics['mse']:.6e} (persistence {metrics['persistence_mse']:.6e})")
    return {"metrics": str(out), "mse": metrics["mse"]}


def cmd_gvft(args: argparse.Namespace, file_cfg: Dict[str, Any]) -> Dict[str, Any]:
    """Graph-variate Fourier coefficients of a signal against its long-term support."""
    values = resolve_config(
        "gvft",
        file_cfg.get("gvft"),
        {
            "node_function": args.node_fn,
            "support": args.support,
            "keep_diagonal": args.keep_diagonal,
        },
    )
    kind = parse_node_function(str(values["node_function"]), bool(values["keep_diagonal"]))
    signal, data, inputs = _load_signal(args, file_cfg)
    if args.support_file:
        inputs.append(args.support_file)

    out = Path(args.out)
    outputs = [str(out)] + ([str(args.svg)] if args.svg else [])
    config = dict(values, data=data, sign_convention=SIGN_CONVENTION)
    manifest = RunManifest.build("gvft", config, None, inputs, outputs)
    manifest.write(out.parent, _sidecar_manifest(out))

    if values["support"] == "file":
        support = _support_from_file(args.support_file)
    elif values["support"] in ("corr", "abs-corr"):
        support = build_support_correlation(signal, absolute=values["support"] == "abs-corr")
    else:
        raise ConfigError(f"Unknown support source '{values['support']}'")

    result = gvft(signal, support, kind, workers=args.workers)
    write_coefficients_csv(out, result.coefficients, manifest.csv_header())
    if args.svg:
        write_heatmap_svg(args.svg, result.coefficients, f"GVFT coefficients ({kind.label()})")
    return {"coefficients": str(out), "nodes": signal.shape[0], "length": signal.shape[1]}


def cmd_verify(args: argparse.Namespace, file_cfg: Dict[str, Any]) -> Dict[str, Any]:
    """Run the spectral checks; any failed check makes the command fail after writing."""
    values = resolve_config(
        "verify",
        file_cfg.get("verify"),
        {"seed": args.seed, "trials": args.trials, "sizes": args.sizes},
    )
    try:
        seed, trials = int(values["seed"]), int(values["trials"])
        sizes = [int(n) for n in values["sizes"]]
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid verify config: {e}")
    if trials < 0 or any(n < 1 for n in sizes):
        raise ConfigError("trials must be >= 0 and sizes >= 1")

    out = Path(args.out)
    manifest = RunManifest.build(
        "verify", {"seed": seed, "trials": trials, "sizes": sizes}, seed, outputs=[str(out)]
    )
    manifest.write(out.parent, _sidecar_manifest(out))

    reports = run_theory_suite(seed=seed, trials=trials, sizes=sizes, workers=args.workers)
    write_reports_json(out, reports, manifest.stamp({}))
    require_all_passed(reports)
    return {"reports": str(out), "checks": len(reports), "summary": summarize(reports)}


def cmd_bench(args: argparse.Namespace, file_cfg: Dict[str, Any]) -> Dict[str, Any]:
    """Time the naive and batched graph-variate products over several lengths."""
    values = resolve_config(
        "bench",
        file_cfg.get("bench"),
        {
            "batch": args.batch,
            "nodes": args.nodes,
            "t_list": args.t_list,
            "repeats": args.repeats,
            "seed": args.seed,
            "node_function": args.node_fn,
            "path_graph": args.path_graph,
            "parallel": args.parallel,
            "methods": args.methods,
        },
    )
    out = Path(args.out)
    outputs = [str(out)] + ([str(args.svg)] if args.svg else [])
    manifest = RunManifest.build("bench", values, int(values["seed"]), outputs=outputs)
    manifest.write(out.parent, _sidecar_manifest(out))

    try:
        results = run_benchmark(
            batch=int(values["batch"]),
            nodes=int(values["nodes"]),
            t_list=[int(t) for t in values["t_list"]],
            repeats=int(values["repeats"]),
            seed=int(values["seed"]),
            node_function=str(values["node_function"]),
            path_graph=bool(values["path_graph"]),
            parallel=bool(values["parallel"]),
            methods=list(values["methods"]),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid bench config: {e}")
    write_bench_csv(out, results, manifest.csv_header())
    if args.svg:
        write_bench_svg(args.svg, results)
    exponents = {r.method: r.exponent for r in results if r.exponent is not None}
    return {"bench": str(out), "exponents": exponents}


COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "eval": cmd_eval,
    "gvft": cmd_gvft,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def handle_command(args: argparse.Namespace) -> int:
    """
    Run one parsed subcommand.

    Returns:
        Exit code: 0 on success, else the failing error's category code
        (2 config, 3 data, 4 numeric, 5 verification, 1 anything else)
    """
    try:
        file_cfg = read_config_file(args.config)
        summary = COMMANDS[args.command](args, file_cfg)
    except GvnnKitError as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"{args.command} failed: {e}")
        return DataError.exit_code
    except Exception as e:
        logger.error(f"{args.command} failed unexpectedly: {e}", exc_info=True)
        return 1

    print(json.dumps(summary, indent=2, sort_keys=True, default=str))
    return 0
