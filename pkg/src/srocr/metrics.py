"""Image fidelity (PSNR, SSIM) and text similarity (Levenshtein, fuzz ratio)."""
from __future__ import annotations

import math
import re
import unicodedata
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .degrade.image import Image, luma

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_C1 = (0.01 * 255) ** 2
SSIM_C2 = (0.03 * 255) ** 2


@dataclass(frozen=True)
class TextScore:
    fuzz: int
    levenshtein: int
    len_ref: int
    len_hyp: int


@dataclass(frozen=True)
class ImageScore:
    psnr_db: float
    ssim: float
    mse: float


def _same_geometry(a: Image, b: Image):
    if a.pixels.shape != b.pixels.shape:
        raise ValueError(f"image geometry mismatch: {a.pixels.shape} vs {b.pixels.shape}")


def mse(a: Image, b: Image) -> float:
    _same_geometry(a, b)
    d = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    return float(np.mean(d * d))


def psnr(a: Image, b: Image) -> float:
    """PSNR in dB; ``math.inf`` for identical images."""
    m = mse(a, b)
    if m == 0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / m)


def ssim_window() -> np.ndarray:
    r = SSIM_WINDOW // 2
    x = np.arange(-r, r + 1, dtype=np.float64)
    g = np.exp(-(x * x) / (2 * SSIM_SIGMA**2))
    return g / g.sum()


def _filter(a, g):
    out = correlate1d(a, g, axis=0, mode="nearest")
    return correlate1d(out, g, axis=1, mode="nearest")


def _ssim_map(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    g = ssim_window()
    mx, my = _filter(x, g), _filter(y, g)
    sxx = _filter(x * x, g) - mx * mx
    syy = _filter(y * y, g) - my * my
    sxy = _filter(x * y, g) - mx * my
    num = (2 * mx * my + SSIM_C1) * (2 * sxy + SSIM_C2)
    den = (mx * mx + my * my + SSIM_C1) * (sxx + syy + SSIM_C2)
    return num / den


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    edges = np.flatnonzero(np.diff(np.concatenate(([0], mask.astype(np.int8), [0]))))
    return list(zip(edges[::2], edges[1::2]))


def ssim_arrays(x: np.ndarray, y: np.ndarray) -> float:
    """Mean SSIM over an 11x11 Gaussian window (sigma 1.5), edges clamped.

    Where x and y agree over a whole window every term cancels and the map
    is exactly 1, so only boxes around differing pixels are evaluated; each
    box carries a window-radius margin, which makes its interior identical
    to a whole-image pass.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    if min(x.shape) < SSIM_WINDOW:
        raise ValueError(f"ssim needs both dimensions >= {SSIM_WINDOW}, got {x.shape}")
    r = SSIM_WINDOW // 2
    h, w = x.shape
    diff = x != y
    total = float(x.size)  # start from an all-ones map
    for r0, r1 in _runs(np.convolve(diff.any(axis=1), np.ones(2 * r + 1), "same") > 0):
        cols = np.flatnonzero(diff[max(0, r0 - r) : r1 + r].any(axis=0))
        c0, c1 = max(0, cols[0] - r), min(w, cols[-1] + r + 1)
        ya, yb = max(0, r0 - r), min(h, r1 + r)
        xa, xb = max(0, c0 - r), min(w, c1 + r)
        m = _ssim_map(x[ya:yb, xa:xb], y[ya:yb, xa:xb])[r0 - ya : r1 - ya, c0 - xa : c1 - xa]
        total += float(m.sum()) - m.size
    return total / x.size


def ssim(a: Image, b: Image) -> float:
    _same_geometry(a, b)
    if a is b or np.array_equal(a.pixels, b.pixels):
        return 1.0
    return ssim_arrays(luma(a.pixels), luma(b.pixels))


def image_score(a: Image, b: Image) -> ImageScore:
    return ImageScore(psnr(a, b), ssim(a, b), mse(a, b))


def levenshtein(a: str, b: str, w_ins: int = 1, w_del: int = 1, w_sub: int = 1) -> int:
    """Weighted edit distance turning ``a`` into ``b``."""
    if min(w_ins, w_del, w_sub) < 1:
        raise ValueError("edit weights must be >= 1")
    if a == b:
        return 0
    if not a or not b:
        return len(b) * w_ins + len(a) * w_del
    # One DP row per character of a. The insertion chain along a row is a
    # running minimum: cur[j] = j*ins + min_{k<=j}(t[k] - k*ins).
    bs = np.array([ord(c) for c in b], dtype=np.int64)
    ramp = np.arange(len(b) + 1, dtype=np.int64) * w_ins
    prev = ramp.copy()
    t = np.empty(len(b) + 1, dtype=np.int64)
    for i, ca in enumerate(a, 1):
        t[0] = i * w_del
        np.minimum(prev[1:] + w_del, prev[:-1] + np.where(bs == ord(ca), 0, w_sub), out=t[1:])
        prev = np.minimum.accumulate(t - ramp) + ramp
    return int(prev[-1])


def fuzz_ratio(a: str, b: str) -> int:
    """Integer similarity 0-100 from the indel-weighted edit distance."""
    total = len(a) + len(b)
    if total == 0:
        return 100
    dist = levenshtein(a, b, 1, 1, 2)
    # round(100 * (total - dist) / total), halves away from zero
    return (200 * (total - dist) + total) // (2 * total)


_WS = re.compile(r"\s+")


def normalize_text(s: str) -> str:
    s = unicodedata.normalize("NFC", s)
    s = s.replace("\r", " ").replace("\n", " ").replace("\t", " ")
    return _WS.sub(" ", s).strip()


def text_score(truth: str, hyp: str) -> TextScore:
    ref, out = normalize_text(truth), normalize_text(hyp)
    return TextScore(fuzz_ratio(ref, out), levenshtein(ref, out), len(ref), len(out))
