"""
Two-tap graph-variate filters, y(t) = a_t x(t) + b_t Ω(t) x(t).

In the eigenbasis of Ω(t) the filter multiplies coefficient i by
h_t(λ_i) = a_t + b_t λ_i, so the spatial and spectral paths agree.
"""

import numpy as np

from core.utils import DimMismatch
from linalg.eigen import SymmetricSpectrum


def frequency_response(spectrum: SymmetricSpectrum, a_t: float, b_t: float) -> np.ndarray:
    return a_t + b_t * spectrum.eigenvalues


def two_tap_filter_spatial(x_t, omega_t, a_t: float, b_t: float) -> np.ndarray:
    x = np.asarray(x_t, dtype=np.float64)
    omega = np.asarray(omega_t, dtype=np.float64)
    if omega.shape != (x.shape[0], x.shape[0]):
        raise DimMismatch(f"Slice {omega.shape} does not match vector of length {x.shape[0]}")
    return a_t * x + b_t * (omega @ x)


def two_tap_filter_spectral(
    x_t, spectrum: SymmetricSpectrum, a_t: float, b_t: float
) -> np.ndarray:
    x = np.asarray(x_t, dtype=np.float64)
    v = spectrum.eigenvectors
    if v.shape[0] != x.shape[0]:
        raise DimMismatch(f"Basis of order {v.shape[0]} for a vector of length {x.shape[0]}")
    response = frequency_response(spectrum, a_t, b_t)
    return v @ (response * (v.T @ x))
