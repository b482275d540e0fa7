"""
Model checkpoints.

Format (JSON, UTF-8):

    {
      "format": "gvnn-kit v1",
      "type": "gvnn-checkpoint",
      "manifest": "<run manifest digest>" | null,
      "seed": <int> | null,
      "config": {...},                  # resolved run config, echoed verbatim
      "frozen": ["layers.0.b", ...],
      "layers": [
        {"kind": {...}, "renormalize": bool, "zave": bool, "slope": float,
         "support": {"parameterization": str, "base": ARRAY, ...factors},
         "a": ARRAY, "b": ARRAY, "theta": ARRAY}
      ],
      "readout": {"slope": float, "weights": [ARRAY], "biases": [ARRAY]}
    }

ARRAY is {"shape": [...], "data": [...]} with data in row-major order. Python
writes floats in their shortest round-trip form, so loading is bit-exact.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from core.config import FORMAT_TAG
from core.utils import CheckpointError, ensure_parent_dir
from gvnn.layer import GvnnLayerParams
from gvnn.model import GvnnModel
from gvnn.readout import MlpReadout
from gvsa.node_functions import NodeFunctionKind
from gvsa.supports import SupportMatrix

logger = logging.getLogger(__name__)

CHECKPOINT_TYPE = "gvnn-checkpoint"


def _encode(arr: np.ndarray) -> Dict[str, Any]:
    arr = np.asarray(arr, dtype=np.float64)
    return {"shape": list(arr.shape), "data": [float(v) for v in arr.ravel()]}


def _decode(payload: Dict[str, Any]) -> np.ndarray:
    shape = tuple(int(s) for s in payload["shape"])
    data = np.array(payload["data"], dtype=np.float64)
    if data.size != int(np.prod(shape)):
        raise CheckpointError(f"Array data of length {data.size} does not fit shape {shape}")
    if not np.all(np.isfinite(data)):
        raise CheckpointError("Checkpoint holds non-finite values")
    return data.reshape(shape)


def _encode_support(support: SupportMatrix) -> Dict[str, Any]:
    payload = {"parameterization": support.parameterization, "base": _encode(support.base)}
    for name, arr in support.trainable_arrays().items():
        payload[name] = _encode(arr)
    return payload


def _decode_support(payload: Dict[str, Any]) -> SupportMatrix:
    factors = {
        name: _decode(payload[name])
        for name in ("weight", "lora_a", "lora_b")
        if name in payload
    }
    return SupportMatrix(_decode(payload["base"]), payload["parameterization"], **factors)


def checkpoint_payload(
    model: GvnnModel,
    config: Optional[Dict[str, Any]] = None,
    manifest_digest: Optional[str] = None,
) -> Dict[str, Any]:
    layers = []
    for layer in model.layers:
        layers.append(
            {
                "kind": layer.kind.to_dict(),
                "renormalize": layer.renormalize,
                "zave": layer.zave,
                "slope": layer.slope,
                "support": _encode_support(layer.support),
                "a": _encode(layer.a),
                "b": _encode(layer.b),
                "theta": _encode(layer.theta),
            }
        )
    return {
        "format": FORMAT_TAG,
        "type": CHECKPOINT_TYPE,
        "manifest": manifest_digest,
        "seed": model.seed,
        "config": config or {},
        "frozen": sorted(model.frozen),
        "layers": layers,
        "readout": {
            "slope": model.readout.slope,
            "weights": [_encode(w) for w in model.readout.weights],
            "biases": [_encode(b) for b in model.readout.biases],
        },
    }


def save_checkpoint(
    path: Union[str, Path],
    model: GvnnModel,
    config: Optional[Dict[str, Any]] = None,
    manifest_digest: Optional[str] = None,
) -> Path:
    path = ensure_parent_dir(path)
    payload = checkpoint_payload(model, config, manifest_digest)
    path.write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(f"Saved checkpoint to {path}")
    return path


def model_from_payload(payload: Dict[str, Any]) -> GvnnModel:
    if payload.get("type") != CHECKPOINT_TYPE or payload.get("format") != FORMAT_TAG:
        raise CheckpointError(
            f"Not a {FORMAT_TAG} checkpoint (type={payload.get('type')!r}, "
            f"format={payload.get('format')!r})"
        )
    layers = []
    for entry in payload["layers"]:
        layers.append(
            GvnnLayerParams(
                a=_decode(entry["a"]),
                b=_decode(entry["b"]),
                theta=_decode(entry["theta"]),
                support=_decode_support(entry["support"]),
                kind=NodeFunctionKind.from_dict(entry["kind"]),
                renormalize=bool(entry["renormalize"]),
                zave=bool(entry["zave"]),
                slope=float(entry["slope"]),
            )
        )
    readout_payload = payload["readout"]
    readout = MlpReadout(
        weights=[_decode(w) for w in readout_payload["weights"]],
        biases=[_decode(b) for b in readout_payload["biases"]],
        slope=float(readout_payload["slope"]),
    )
    return GvnnModel(
        layers=layers,
        readout=readout,
        frozen=set(payload.get("frozen", [])),
        seed=payload.get("seed"),
    )


def load_checkpoint(path: Union[str, Path]) -> Tuple[GvnnModel, Dict[str, Any]]:
    """
    Load a checkpoint.

    Returns:
        (model, payload) where payload still holds "config", "seed" and "manifest"

    Raises:
        CheckpointError: On unreadable, malformed or inconsistent files
    """
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"Cannot read checkpoint {path}: {e}")
    if not isinstance(payload, dict):
        raise CheckpointError(f"Checkpoint {path} does not hold an object")
    try:
        model = model_from_payload(payload)
    except CheckpointError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointError(f"Malformed checkpoint {path}: {e}")
    except Exception as e:
        # shape errors from the model constructors
        raise CheckpointError(f"Inconsistent checkpoint {path}: {e}")
    logger.info(f"Loaded checkpoint {path} ({len(model.layers)} layers)")
    return model, payload
