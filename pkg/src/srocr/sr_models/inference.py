"""Page-level inference: Image <-> tensor conversion and tiled upscaling."""
from __future__ import annotations

from typing import Mapping

import numpy as np

from ..degrade.image import Image, luma, quantize
from .executor import forward
from .graph import LayerGraph


def image_to_tensor(img: Image, channels: int) -> np.ndarray:
    """(1, channels, h, w) float32 in [0, 1]; gray pages are replicated across channels."""
    px = img.pixels.astype(np.float32) / 255.0
    if px.ndim == 2:
        return np.repeat(px[None, None], channels, axis=1)
    if channels == 3:
        return px.transpose(2, 0, 1)[None].copy()
    if channels == 1:
        return (luma(img.pixels) / 255.0).astype(np.float32)[None, None]
    raise ValueError(f"cannot map an RGB image onto {channels} channels")


def tensor_to_image(t: np.ndarray, dpi: int | None, gray: bool = True) -> Image:
    """Inverse of image_to_tensor for a single sample, quantized to uint8."""
    t = np.asarray(t, dtype=np.float64)
    if t.ndim != 4 or t.shape[0] != 1:
        raise ValueError(f"expected a (1, c, h, w) tensor, got {t.shape}")
    scaled = t[0] * 255.0
    if scaled.shape[0] == 1:
        return Image(quantize(scaled[0]), dpi)
    rgb = scaled.transpose(1, 2, 0)
    if gray:
        return Image(quantize(luma(rgb)), dpi)
    return Image(quantize(rgb), dpi)


def receptive_radius(graph: LayerGraph) -> int:
    """Upper bound, in input pixels, on how far any output depends on its input."""
    return sum(1 for n in graph.nodes() if n.kind == "conv")


def super_resolve(
    graph: LayerGraph,
    weights: Mapping[str, np.ndarray],
    img: Image,
    tile: int = 64,
) -> Image:
    """Upscale an image by ``graph.scale``.

    Large inputs are processed in ``tile``-sized pieces, each padded by the
    receptive radius, so the stitched result matches a whole-image pass.
    """
    if graph.is_discriminator:
        raise ValueError("the discriminator does not produce images")
    r = graph.scale
    dpi = img.dpi * r if img.dpi else None
    x = image_to_tensor(img, graph.preset.in_channels)
    _, c, h, w = x.shape
    if graph.resampling_only or (h <= tile and w <= tile):
        y = forward(graph, weights, x, fast=True)
        return tensor_to_image(y, dpi, gray=img.channels == 1)
    pad = receptive_radius(graph)
    out = np.empty((1, c, h * r, w * r), dtype=np.float32)
    for y0 in range(0, h, tile):
        for x0 in range(0, w, tile):
            y1, x1 = min(y0 + tile, h), min(x0 + tile, w)
            ya, xa = max(0, y0 - pad), max(0, x0 - pad)
            yb, xb = min(h, y1 + pad), min(w, x1 + pad)
            piece = forward(graph, weights, x[:, :, ya:yb, xa:xb], fast=True)
            oy, ox = (y0 - ya) * r, (x0 - xa) * r
            out[:, :, y0 * r : y1 * r, x0 * r : x1 * r] = piece[:, :, oy : oy + (y1 - y0) * r, ox : ox + (x1 - x0) * r]
    return tensor_to_image(out, dpi, gray=img.channels == 1)
