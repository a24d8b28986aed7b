"""Dense NCHW kernels used by every network in the package.

Tensors are plain numpy arrays of shape (n, c, h, w). float32 is the working
dtype; float64 passes through unchanged so gradients can be checked in double
precision.

``conv2d`` accumulates in a fixed order (kernel row, kernel column, input
channel) with one rounding per multiply and per add, so it agrees bit-for-bit
with a scalar loop written in the same order. ``conv2d_fast`` is the
im2col/tensordot variant for large inputs and is only required to agree to
1e-5 relative.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class ShapeError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


@dataclass(frozen=True)
class ConvSpec:
    in_channels: int
    out_channels: int
    kernel_size: int = 3
    stride: int = 1
    padding: int = 1
    bias: bool = True

    def __post_init__(self):
        if self.kernel_size < 1 or self.stride < 1 or self.padding < 0:
            raise ValueError(f"invalid conv geometry: {self}")
        if self.in_channels < 1 or self.out_channels < 1:
            raise ValueError(f"invalid channel counts: {self}")

    @property
    def weight_shape(self) -> tuple[int, int, int, int]:
        k = self.kernel_size
        return (self.out_channels, self.in_channels, k, k)

    def output_hw(self, h: int, w: int) -> tuple[int, int]:
        k, s, p = self.kernel_size, self.stride, self.padding
        return (h + 2 * p - k) // s + 1, (w + 2 * p - k) // s + 1


def as_tensor(x, dtype=np.float32) -> np.ndarray:
    arr = np.asarray(x, dtype=dtype)
    if arr.ndim != 4:
        raise ShapeError(f"expected a 4-D (n, c, h, w) tensor, got shape {arr.shape}")
    return arr


def _check_conv(x, weights, bias, spec):
    if x.ndim != 4:
        raise ShapeError(f"conv2d input must be 4-D, got {x.shape}")
    if x.shape[1] != spec.in_channels:
        raise ShapeError(
            f"conv2d input has {x.shape[1]} channels, spec expects {spec.in_channels}"
        )
    if tuple(weights.shape) != spec.weight_shape:
        raise ShapeError(f"conv2d weights {weights.shape} != {spec.weight_shape}")
    if spec.bias:
        if bias is None or tuple(np.shape(bias)) != (spec.out_channels,):
            raise ShapeError(
                f"conv2d bias must have shape ({spec.out_channels},), got "
                f"{None if bias is None else np.shape(bias)}"
            )
    ho, wo = spec.output_hw(x.shape[2], x.shape[3])
    if ho < 1 or wo < 1:
        raise ShapeError(f"conv2d output would be empty for input {x.shape} and {spec}")
    return ho, wo


def _pad(x, p):
    if p == 0:
        return x
    return np.pad(x, ((0, 0), (0, 0), (p, p), (p, p)))


def conv2d(x: np.ndarray, weights: np.ndarray, bias, spec: ConvSpec) -> np.ndarray:
    ho, wo = _check_conv(x, weights, bias, spec)
    dtype = np.result_type(x.dtype, weights.dtype)
    xp = _pad(x, spec.padding).astype(dtype, copy=False)
    w = weights.astype(dtype, copy=False)
    k, s = spec.kernel_size, spec.stride
    out = np.zeros((x.shape[0], spec.out_channels, ho, wo), dtype=dtype)
    for ki in range(k):
        for kj in range(k):
            window = xp[:, :, ki : ki + s * (ho - 1) + 1 : s, kj : kj + s * (wo - 1) + 1 : s]
            for ci in range(spec.in_channels):
                out += w[:, ci, ki, kj].reshape(1, -1, 1, 1) * window[:, ci : ci + 1]
    if spec.bias:
        out += np.asarray(bias, dtype=dtype).reshape(1, -1, 1, 1)
    return out


def conv2d_fast(x: np.ndarray, weights: np.ndarray, bias, spec: ConvSpec) -> np.ndarray:
    ho, wo = _check_conv(x, weights, bias, spec)
    dtype = np.result_type(x.dtype, weights.dtype)
    xp = _pad(x, spec.padding).astype(dtype, copy=False)
    k, s = spec.kernel_size, spec.stride
    # (n, c, ho, wo, k, k)
    cols = sliding_window_view(xp, (k, k), axis=(2, 3))[:, :, ::s, ::s][:, :, :ho, :wo]
    out = np.tensordot(cols, weights.astype(dtype, copy=False), axes=([1, 4, 5], [1, 2, 3]))
    out = np.ascontiguousarray(out.transpose(0, 3, 1, 2))
    if spec.bias:
        out += np.asarray(bias, dtype=dtype).reshape(1, -1, 1, 1)
    return out


def conv2d_backward(x, weights, grad_out, spec: ConvSpec):
    """Gradients of conv2d w.r.t. input, weights and bias."""
    k, s, p = spec.kernel_size, spec.stride, spec.padding
    n, _, h, w = x.shape
    ho, wo = grad_out.shape[2], grad_out.shape[3]
    xp = _pad(x, p)
    gxp = np.zeros_like(xp, dtype=grad_out.dtype)
    gw = np.zeros(spec.weight_shape, dtype=grad_out.dtype)
    for ki in range(k):
        for kj in range(k):
            rows = slice(ki, ki + s * (ho - 1) + 1, s)
            cols = slice(kj, kj + s * (wo - 1) + 1, s)
            gw[:, :, ki, kj] = np.einsum("nohw,nihw->oi", grad_out, xp[:, :, rows, cols])
            gxp[:, :, rows, cols] += np.einsum("nohw,oi->nihw", grad_out, weights[:, :, ki, kj])
    gx = gxp[:, :, p : p + h, p : p + w] if p else gxp
    gb = grad_out.sum(axis=(0, 2, 3)) if spec.bias else None
    return gx, gw, gb


ACTIVATIONS = ("prelu", "leaky_relu", "relu", "sigmoid")


def activation(kind: str, x: np.ndarray, slope: float | None = None) -> np.ndarray:
    if kind not in ACTIVATIONS:
        raise ValueError(f"unknown activation {kind!r}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{kind}: non-finite input")
    if kind in ("prelu", "leaky_relu"):
        a = np.asarray(slope if slope is not None else (0.25 if kind == "prelu" else 0.2), dtype=x.dtype)
        if not np.all(np.isfinite(a)):
            raise ValueError(f"{kind}: slope must be finite")
        return np.where(x < 0, a * x, x)
    if kind == "relu":
        return np.maximum(x, np.zeros((), dtype=x.dtype))
    return sigmoid(x)


def sigmoid(x: np.ndarray) -> np.ndarray:
    # split by sign so exp never overflows
    x = np.asarray(x)
    one = np.ones((), dtype=x.dtype)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = one / (one + np.exp(-x[pos]))
    ez = np.exp(x[~pos])
    out[~pos] = ez / (one + ez)
    return out


def batch_norm_infer(x, gamma, beta, mean, var, eps: float = 1e-5) -> np.ndarray:
    c = x.shape[1]
    for name, v in (("gamma", gamma), ("beta", beta), ("mean", mean), ("var", var)):
        if np.shape(v) != (c,):
            raise ShapeError(f"batch_norm {name} has shape {np.shape(v)}, expected ({c},)")
    if np.any(np.asarray(var) < 0):
        raise ValueError("batch_norm variance must be non-negative")
    dt = x.dtype

    def col(v):
        return np.asarray(v, dtype=dt).reshape(1, c, 1, 1)

    return (x - col(mean)) / np.sqrt(col(var) + dt.type(eps)) * col(gamma) + col(beta)


def pixel_shuffle(x: np.ndarray, r: int) -> np.ndarray:
    n, c, h, w = x.shape
    if r < 1 or c % (r * r):
        raise ShapeError(f"pixel_shuffle: {c} channels not divisible by r^2={r * r}")
    oc = c // (r * r)
    return x.reshape(n, oc, r, r, h, w).transpose(0, 1, 4, 2, 5, 3).reshape(n, oc, h * r, w * r)


def pixel_unshuffle(x: np.ndarray, r: int) -> np.ndarray:
    n, c, h, w = x.shape
    if r < 1 or h % r or w % r:
        raise ShapeError(f"pixel_unshuffle: spatial dims {(h, w)} not divisible by {r}")
    return x.reshape(n, c, h // r, r, w // r, r).transpose(0, 1, 3, 5, 2, 4).reshape(
        n, c * r * r, h // r, w // r
    )


def elementwise_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise ShapeError(f"elementwise_add shape mismatch: {a.shape} vs {b.shape}")
    return a + b


def dense(x: np.ndarray, weights: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """x @ W + b on a batch of flattened vectors; a 1-D x is one sample."""
    x = np.asarray(x)
    single = x.ndim == 1
    flat = x.reshape(1, -1) if single else x.reshape(x.shape[0], -1)
    if weights.ndim != 2 or flat.shape[1] != weights.shape[0]:
        raise ShapeError(f"dense: input length {flat.shape[1]} vs weights {weights.shape}")
    if np.shape(bias) != (weights.shape[1],):
        raise ShapeError(f"dense: bias {np.shape(bias)} vs {weights.shape[1]} outputs")
    out = flat @ weights + bias
    return out[0] if single else out
