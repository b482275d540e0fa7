from gvft.filters import frequency_response, two_tap_filter_spatial, two_tap_filter_spectral
from gvft.transform import GvftResult, fix_signs, gvft, inverse_gvft

__all__ = [
    "frequency_response",
    "two_tap_filter_spatial",
    "two_tap_filter_spectral",
    "GvftResult",
    "fix_signs",
    "gvft",
    "inverse_gvft",
]
