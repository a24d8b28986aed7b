from .ops import (
    ACTIVATIONS,
    ConvSpec,
    ShapeError,
    activation,
    as_tensor,
    batch_norm_infer,
    conv2d,
    conv2d_backward,
    conv2d_fast,
    dense,
    elementwise_add,
    pixel_shuffle,
    pixel_unshuffle,
    sigmoid,
)

__all__ = [
    "ACTIVATIONS",
    "ConvSpec",
    "ShapeError",
    "activation",
    "as_tensor",
    "batch_norm_infer",
    "conv2d",
    "conv2d_backward",
    "conv2d_fast",
    "dense",
    "elementwise_add",
    "pixel_shuffle",
    "pixel_unshuffle",
    "sigmoid",
]
