from gvnn.checkpoint import load_checkpoint, save_checkpoint
from gvnn.gradcheck import (
    GradientCheckResult,
    check_layer_gradients,
    check_model_gradients,
    relative_error,
)
from gvnn.layer import GvnnLayerParams, gvnn_backward, gvnn_forward, leaky_relu
from gvnn.lipschitz import LipschitzBound, lipschitz_bound, two_tap_map
from gvnn.model import GradientSet, GvnnModel, build_model, model_backward, model_forward
from gvnn.readout import MlpReadout

__all__ = [
    "load_checkpoint",
    "save_checkpoint",
    "GradientCheckResult",
    "check_layer_gradients",
    "check_model_gradients",
    "relative_error",
    "GvnnLayerParams",
    "gvnn_backward",
    "gvnn_forward",
    "leaky_relu",
    "LipschitzBound",
    "lipschitz_bound",
    "two_tap_map",
    "GradientSet",
    "GvnnModel",
    "build_model",
    "model_backward",
    "model_forward",
    "MlpReadout",
]
