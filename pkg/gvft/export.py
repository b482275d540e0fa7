"""Coefficient export: CSV table and an optional SVG heatmap."""

from pathlib import Path
from typing import Optional, Union

import numpy as np

from core.plotting import new_figure, save_svg
from signals.csv_io import write_csv_signal


def write_coefficients_csv(
    path: Union[str, Path], coefficients, header: Optional[str] = None
) -> Path:
    """N rows by T columns of coefficients."""
    return write_csv_signal(path, coefficients, header)


def write_heatmap_svg(
    path: Union[str, Path], coefficients, title: str = "GVFT coefficients"
) -> Path:
    """Heatmap of |coefficients| with eigen-index on y and time on x."""
    values = np.abs(np.asarray(coefficients, dtype=np.float64))
    figure = new_figure(width=8.0, height=3.5)
    ax = figure.add_subplot(1, 1, 1)
    image = ax.imshow(values, aspect="auto", origin="lower", interpolation="nearest")
    ax.set_xlabel("time sample")
    ax.set_ylabel("eigen index (ascending)")
    ax.set_title(title)
    figure.colorbar(image, ax=ax)
    figure.tight_layout()
    return save_svg(figure, path)
