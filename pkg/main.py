import argparse
import logging
import os
import sys
from importlib import metadata

from dotenv import load_dotenv

from core.cli_handler import handle_command
from core.config import get_settings
from core.log_formatter import EnhancedLogFormatter, configure_file_logging, setup_enhanced_logging
from signals.maps import MAP_KINDS

dotenv_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), ".env")
load_dotenv(dotenv_path=dotenv_path)

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def configure_safe_logging():
    class SafeEnhancedFormatter(EnhancedLogFormatter):
        """Enhanced ASCII formatter with additional Windows safety."""

        def format(self, record):
            try:
                return super().format(record)
            except UnicodeEncodeError:
                prefix = self._get_ascii_prefix(record.name, record.levelname)
                safe_msg = (
                    str(record.getMessage())
                    .encode("ascii", errors="replace")
                    .decode("ascii")
                )
                return f"{prefix} {safe_msg}"

    for handler in logging.root.handlers:
        if isinstance(handler, logging.StreamHandler) and getattr(
            handler.stream, "name", None
        ) in ["<stderr>", "<stdout>"]:
            handler.setFormatter(SafeEnhancedFormatter(use_colors=sys.stderr.isatty()))


def _add_signal_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_argument_group("input signal")
    source.add_argument("--data", help="Signal CSV, one row per node")
    source.add_argument(
        "--transpose", action="store_true", help="The CSV holds time in rows, nodes in columns"
    )
    source.add_argument("--map", choices=MAP_KINDS, help="Generate the signal from a chaotic map")
    source.add_argument("--map-seed", type=int, help="Seed of the generated map")
    source.add_argument("--nodes", type=int, help="Node count of the generated map")
    source.add_argument("--length", type=int, help="Sample count of the generated map")
    source.add_argument(
        "--param", action="append", metavar="NAME=VALUE", help="Map parameter override"
    )


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    model = parser.add_argument_group("model")
    model.add_argument(
        "--node-fn",
        action="append",
        help="Node function per layer: ic, lde or combo:ALPHA,BETA (repeat for more layers)",
    )
    model.add_argument("--support", choices=["corr", "abs-corr", "file"])
    model.add_argument("--support-file", help="Support matrix CSV for --support file")
    model.add_argument("--support-param", help="fixed, dense, lora:R or hira:R")
    model.add_argument("--renorm", action=argparse.BooleanOptionalAction, default=None)
    model.add_argument("--zave", action=argparse.BooleanOptionalAction, default=None)
    model.add_argument("--keep-diagonal", action=argparse.BooleanOptionalAction, default=None)
    model.add_argument("--hidden", type=int, nargs="*", help="Readout hidden widths")
    model.add_argument(
        "--freeze-b", action="store_true", help="Keep b at 0 (support-free ablation)"
    )


def _add_train_flags(parser: argparse.ArgumentParser) -> None:
    train = parser.add_argument_group("training")
    train.add_argument("--window", type=int)
    train.add_argument("--horizon", type=int)
    train.add_argument("--stride", type=int)
    train.add_argument("--lr", type=float)
    train.add_argument("--epochs", type=int)
    train.add_argument("--batch", type=int)
    train.add_argument("--seed", type=int)
    train.add_argument("--weight-decay", type=float)
    train.add_argument("--clip-norm", type=float)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML or key=value config file")
    common.add_argument("--log-level", choices=LOG_LEVELS, help="Console log level")
    common.add_argument("--quiet", action="store_true", help="Only log errors")

    parser = argparse.ArgumentParser(
        prog="gvnn-kit", description="Graph-variate signal analysis and neural networks"
    )
    try:
        version = metadata.version("gvnn-kit")
    except metadata.PackageNotFoundError:
        version = "dev"
    parser.add_argument("--version", action="version", version=f"%(prog)s {version}")
    sub = parser.add_subparsers(dest="command", required=True)

    generate = sub.add_parser("generate", parents=[common], help="Simulate a chaotic map")
    generate.add_argument("--map", choices=MAP_KINDS, required=True)
    generate.add_argument("--out", required=True, help="Signal CSV to write")
    generate.add_argument("--seed", type=int)
    generate.add_argument("--nodes", type=int)
    generate.add_argument("--length", type=int)
    generate.add_argument("--param", action="append", metavar="NAME=VALUE")

    train = sub.add_parser("train", parents=[common], help="Train a forecaster")
    _add_signal_source(train)
    _add_model_flags(train)
    _add_train_flags(train)
    train.add_argument("--out-dir", required=True)

    evaluate = sub.add_parser("eval", parents=[common], help="Evaluate a checkpoint")
    evaluate.add_argument("--checkpoint", required=True)
    _add_signal_source(evaluate)
    evaluate.add_argument("--split", choices=["train", "val", "test"], default="test")
    evaluate.add_argument("--out", help="Metrics JSON (default: eval.json next to the checkpoint)")

    transform = sub.add_parser("gvft", parents=[common], help="Graph-variate Fourier transform")
    _add_signal_source(transform)
    transform.add_argument("--node-fn", help="ic, lde or combo:ALPHA,BETA")
    transform.add_argument("--support", choices=["corr", "abs-corr", "file"])
    transform.add_argument("--support-file")
    transform.add_argument("--keep-diagonal", action=argparse.BooleanOptionalAction, default=None)
    transform.add_argument("--workers", type=int, help="Threads for the eigendecompositions")
    transform.add_argument("--out", required=True, help="Coefficients CSV")
    transform.add_argument("--svg", help="Optional heatmap SVG")

    verify = sub.add_parser("verify", parents=[common], help="Run the spectral checks")
    verify.add_argument("--trials", type=int)
    verify.add_argument("--seed", type=int)
    verify.add_argument("--sizes", type=int, nargs="+")
    verify.add_argument("--workers", type=int)
    verify.add_argument("--out", default="verify.json")

    bench = sub.add_parser("bench", parents=[common], help="Time naive vs batched products")
    bench.add_argument("-B", "--batch", type=int)
    bench.add_argument("-N", "--nodes", type=int)
    bench.add_argument("--t-list", type=int, nargs="+")
    bench.add_argument("--repeats", type=int)
    bench.add_argument("--seed", type=int)
    bench.add_argument("--node-fn")
    bench.add_argument("--path-graph", action=argparse.BooleanOptionalAction, default=None)
    bench.add_argument("--parallel", action=argparse.BooleanOptionalAction, default=None)
    bench.add_argument("--methods", nargs="+", choices=["naive_kron", "batched_low_rank"])
    bench.add_argument("--out", default="bench.csv")
    bench.add_argument("--svg", help="Optional log-log SVG")
    return parser


def main(argv=None) -> int:
    """
    Entry point for the gvnn-kit command line.

    Returns the exit code: 0 success, 2 config error, 3 data error,
    4 numeric failure, 5 verification failure.
    """
    args = build_parser().parse_args(argv)

    if args.quiet:
        level = logging.ERROR
    else:
        level = getattr(logging, args.log_level or get_settings().log_level, logging.INFO)
    setup_enhanced_logging(level, use_colors=sys.stderr.isatty())
    configure_safe_logging()
    configure_file_logging()

    logger.debug(f"Running {args.command}")
    return handle_command(args)


if __name__ == "__main__":
    sys.exit(main())
