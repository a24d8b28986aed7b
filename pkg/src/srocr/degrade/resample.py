"""Separable resampling with edge-clamped taps.

Pixel centers map as ``src = (dst + 0.5) / scale - 0.5``. When shrinking,
the kernel is stretched by ``1 / scale`` so every source pixel contributes
(area-style antialiasing); when enlarging, the kernel is evaluated as is.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import sparse

from .image import Image, quantize

KERNELS = ("bicubic", "bilinear", "nearest", "box")


def cubic(x, a: float = -0.5):
    x = np.abs(np.asarray(x, dtype=np.float64))
    x2, x3 = x * x, x * x * x
    near = (a + 2) * x3 - (a + 3) * x2 + 1
    far = a * x3 - 5 * a * x2 + 8 * a * x - 4 * a
    return np.where(x <= 1, near, np.where(x < 2, far, 0.0))


def _triangle(x):
    return np.maximum(0.0, 1.0 - np.abs(x))


def _box(x):
    return ((x >= -0.5) & (x < 0.5)).astype(np.float64)


_SUPPORT = {"bicubic": (cubic, 2.0), "bilinear": (_triangle, 1.0), "box": (_box, 0.5)}


@lru_cache(maxsize=64)
def weight_matrix(n_in: int, n_out: int, kernel: str) -> sparse.csr_matrix:
    """(n_out, n_in) matrix whose rows are the normalized tap weights."""
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")
    scale = n_out / n_in
    centers = (np.arange(n_out) + 0.5) / scale - 0.5
    if kernel == "nearest":
        idx = np.clip(np.floor(centers + 0.5), 0, n_in - 1).astype(np.int64)
        return sparse.csr_matrix((np.ones(n_out), (np.arange(n_out), idx)), shape=(n_out, n_in))
    fn, support = _SUPPORT[kernel]
    stretch = 1.0 / scale if scale < 1 else 1.0
    radius = support * stretch
    lo = np.floor(centers - radius).astype(np.int64)
    span = int(math.ceil(2 * radius)) + 2
    taps = lo[:, None] + np.arange(span)[None, :]
    w = fn((taps - centers[:, None]) / stretch)
    w /= w.sum(axis=1, keepdims=True)
    rows = np.repeat(np.arange(n_out), span)
    cols = np.clip(taps, 0, n_in - 1).ravel()
    # duplicate (row, col) pairs from clamping are summed by the constructor
    return sparse.csr_matrix((w.ravel(), (rows, cols)), shape=(n_out, n_in))


def resize_array(a: np.ndarray, width: int, height: int, kernel: str = "bicubic") -> np.ndarray:
    """Resample a 2-D float array to (height, width); no clamping or rounding."""
    a = np.asarray(a)
    h, w = a.shape
    if width < 1 or height < 1:
        raise ValueError(f"degenerate output size {width}x{height}")
    out = a.astype(np.float64)
    if height != h:
        out = weight_matrix(h, height, kernel) @ out
    if width != w:
        out = (weight_matrix(w, width, kernel) @ out.T).T
    return np.asarray(out)


def resize(img: Image, width: int, height: int, kernel: str = "bicubic") -> Image:
    if (width, height) == (img.width, img.height):
        return img
    px = img.pixels
    if px.ndim == 2:
        out = resize_array(px, width, height, kernel)
    else:
        out = np.stack([resize_array(px[..., c], width, height, kernel) for c in range(3)], axis=-1)
    return img.with_pixels(quantize(out))


def output_size(width: int, height: int, factor: float) -> tuple[int, int]:
    # epsilon guards products like 1700 * 0.35 landing a hair under an integer
    return int(math.floor(width * factor + 1e-9)), int(math.floor(height * factor + 1e-9))


def resample(img: Image, factor: float, kernel: str = "bicubic") -> Image:
    if not factor > 0 or not math.isfinite(factor):
        raise ValueError(f"resample factor must be a positive finite number, got {factor}")
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")
    w, h = output_size(img.width, img.height, factor)
    if w < 1 or h < 1:
        raise ValueError(f"resample by {factor} gives degenerate size {w}x{h}")
    return resize(img, w, h, kernel)
