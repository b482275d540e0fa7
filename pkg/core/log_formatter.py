"""
Enhanced Log Formatter for gvnn-kit

Provides compact, prefixed log lines for console output and an optional
detailed file log.
"""

import logging
import re
import sys
from typing import Optional

from core.config import get_settings


class EnhancedLogFormatter(logging.Formatter):
    """Log formatter that adds ASCII package prefixes and compacts recurring messages."""

    COLORS = {
        "DEBUG": "\033[36m",  # Cyan
        "INFO": "\033[32m",  # Green
        "WARNING": "\033[33m",  # Yellow
        "ERROR": "\033[31m",  # Red
        "CRITICAL": "\033[35m",  # Magenta
        "RESET": "\033[0m",
    }

    ASCII_PREFIXES = {
        "linalg": "[LINALG]",
        "gvsa": "[GVSA]",
        "gvft": "[GVFT]",
        "gvnn": "[GVNN]",
        "theory": "[THEORY]",
        "signals": "[DATA]",
        "train": "[TRAIN]",
        "bench": "[BENCH]",
        "core": "[CLI]",
        "main": "[CLI]",
    }

    def __init__(self, use_colors: bool = True, *args, **kwargs):
        """
        Initialize the formatter.

        Args:
            use_colors: Whether to use ANSI color codes (default: True)
        """
        super().__init__(*args, **kwargs)
        self.use_colors = use_colors

    def format(self, record: logging.LogRecord) -> str:
        prefix = self._get_ascii_prefix(record.name, record.levelname)
        formatted_msg = self._enhance_message(record.getMessage())

        if self.use_colors:
            color = self.COLORS.get(record.levelname, "")
            reset = self.COLORS["RESET"]
            return f"{prefix} {color}{formatted_msg}{reset}"
        return f"{prefix} {formatted_msg}"

    def _get_ascii_prefix(self, logger_name: str, level_name: str) -> str:
        package = logger_name.split(".")[0]
        return self.ASCII_PREFIXES.get(package, f"[{level_name}]")

    def _enhance_message(self, message: str) -> str:
        # Epoch progress lines from the trainer
        match = re.search(
            r"Epoch (\d+)/(\d+): train_loss=([\d.eE+-]+) val_loss=([\d.eE+-]+)",
            message,
        )
        if match:
            epoch, total, train_loss, val_loss = match.groups()
            return f"epoch {epoch:>4}/{total} | train {float(train_loss):.6f} | val {float(val_loss):.6f}"

        # Benchmark timing lines
        match = re.search(
            r"Timed (\w+) at T=(\d+): median ([\d.eE+-]+)s", message
        )
        if match:
            method, t_len, seconds = match.groups()
            return f"{method:<16} T={t_len:>5}  {float(seconds) * 1e3:9.3f} ms"

        return message


def setup_enhanced_logging(
    log_level: int = logging.INFO, use_colors: bool = True
) -> None:
    """
    Set up enhanced logging for the whole application.

    Args:
        log_level: The logging level to use (default: INFO)
        use_colors: Whether to use ANSI colors (default: True)
    """
    formatter = EnhancedLogFormatter(use_colors=use_colors)
    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    console_handlers = [
        h
        for h in root_logger.handlers
        if isinstance(h, logging.StreamHandler)
        and getattr(h.stream, "name", None) in ["<stderr>", "<stdout>"]
    ]
    for handler in console_handlers:
        handler.setFormatter(formatter)

    if not console_handlers:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        console_handler.setLevel(log_level)
        root_logger.addHandler(console_handler)


def configure_file_logging(log_file: Optional[str] = None) -> bool:
    """
    Configure detailed file logging.

    Uses `log_file` or the GVNN_LOG_FILE setting; does nothing when neither is set.

    Returns:
        bool: True if file logging was configured, False if skipped
    """
    log_file_path = log_file or get_settings().log_file
    if not log_file_path:
        return False

    try:
        file_handler = logging.FileHandler(log_file_path, mode="a")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(
            logging.Formatter(
                "%(asctime)s - %(name)s - %(levelname)s - %(process)d - %(threadName)s "
                "[%(module)s.%(funcName)s:%(lineno)d] - %(message)s"
            )
        )
        logging.getLogger().addHandler(file_handler)
        logging.getLogger(__name__).debug(
            f"Detailed file logging configured to: {log_file_path}"
        )
        return True
    except OSError as e:
        sys.stderr.write(
            f"CRITICAL: Failed to set up file logging to '{log_file_path}': {e}\n"
        )
        return False
