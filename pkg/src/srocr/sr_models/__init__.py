from .executor import MissingWeightError, forward, forward_vars
from .graph import (
    GENERATORS,
    PRESET_IDS,
    PRESETS,
    SCALES,
    ArchPreset,
    LayerGraph,
    LayerNode,
    Slot,
    build_model,
    describe,
    get_preset,
    miniature,
    param_count,
)
from .inference import image_to_tensor, receptive_radius, super_resolve, tensor_to_image
from .weights import WeightFormatError, init_weights, load_weights, read_header, save_weights

__all__ = [
    "GENERATORS",
    "PRESET_IDS",
    "PRESETS",
    "SCALES",
    "ArchPreset",
    "LayerGraph",
    "LayerNode",
    "MissingWeightError",
    "Slot",
    "WeightFormatError",
    "build_model",
    "describe",
    "forward",
    "forward_vars",
    "get_preset",
    "image_to_tensor",
    "init_weights",
    "load_weights",
    "miniature",
    "param_count",
    "read_header",
    "receptive_radius",
    "save_weights",
    "super_resolve",
    "tensor_to_image",
]
