from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .image import Image, quantize
from .resample import resample

CANONICAL_SCALES = (0.1, 0.2, 0.3, 0.35, 0.4, 0.45, 0.5)


def gaussian_kernel(sigma: float) -> np.ndarray:
    radius = int(math.ceil(3 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2 * sigma * sigma))
    return k / k.sum()


def blur_array(a: np.ndarray, sigma: float) -> np.ndarray:
    k = gaussian_kernel(sigma)
    # mode="nearest" repeats the border pixel, i.e. edge clamping
    out = correlate1d(np.asarray(a, dtype=np.float64), k, axis=0, mode="nearest")
    return correlate1d(out, k, axis=1, mode="nearest")


def gaussian_blur(img: Image, sigma: float) -> Image:
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return img
    px = img.pixels.astype(np.float64)
    if px.ndim == 2:
        out = blur_array(px, sigma)
    else:
        out = np.stack([blur_array(px[..., c], sigma) for c in range(3)], axis=-1)
    return img.with_pixels(quantize(out))


def add_noise(img: Image, sigma: float, seed: int = 0) -> Image:
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return img
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, sigma, size=img.pixels.shape)
    return img.with_pixels(quantize(img.pixels.astype(np.float64) + noise))


@dataclass(frozen=True)
class DegradeSpec:
    scale: float = 0.5
    blur_sigma: float = 0.0
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.scale <= 1:
            raise ValueError(f"scale must be in (0, 1], got {self.scale}")
        if self.blur_sigma < 0 or self.noise_sigma < 0:
            raise ValueError("blur_sigma and noise_sigma must be >= 0")


def degrade_pipeline(img: Image, spec: DegradeSpec) -> Image:
    """Blur, bicubic downscale, then additive noise."""
    out = gaussian_blur(img, spec.blur_sigma)
    if spec.scale != 1.0:
        out = resample(out, spec.scale, "bicubic")
    return add_noise(out, spec.noise_sigma, spec.seed)
