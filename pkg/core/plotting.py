"""
Minimal SVG output through matplotlib.

matplotlib is an optional extra (`pip install gvnn-kit[plot]`). Figures are
built with the object API (no pyplot global state) and saved with a fixed hash
salt and no date metadata, so the same data always gives the same bytes.
"""

import logging
from pathlib import Path
from typing import Union

from core.utils import ConfigError, ensure_parent_dir

logger = logging.getLogger(__name__)

SVG_HASH_SALT = "gvnn-kit"


def new_figure(width: float = 6.0, height: float = 4.0):
    """
    Create a detached matplotlib Figure.

    Raises:
        ConfigError: If matplotlib is not installed
    """
    try:
        import matplotlib
        from matplotlib.figure import Figure
    except ImportError:
        raise ConfigError(
            "SVG output needs matplotlib; install it with: pip install 'gvnn-kit[plot]'"
        )
    matplotlib.rcParams["svg.hashsalt"] = SVG_HASH_SALT
    return Figure(figsize=(width, height))


def save_svg(figure, path: Union[str, Path]) -> Path:
    path = ensure_parent_dir(path)
    figure.savefig(path, format="svg", metadata={"Date": None})
    logger.info(f"Wrote {path}")
    return path
