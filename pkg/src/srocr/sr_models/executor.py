"""Forward execution of a LayerGraph, differentiable when weights require grad."""
from __future__ import annotations

from typing import Mapping

import numpy as np

from ..tensor_core import ConvSpec, ShapeError
from ..tensor_core import autograd as ag
from .graph import LayerGraph, LayerNode

WeightStore = dict  # slot name -> np.ndarray


class MissingWeightError(KeyError):
    pass


def _conv_spec(node: LayerNode) -> ConvSpec:
    p = node.params
    return ConvSpec(p["in_channels"], p["out_channels"], p["kernel_size"], p["stride"], p["padding"])


class _Runner:
    def __init__(self, params: Mapping[str, ag.Var], fast: bool, logits: bool):
        self.params = params
        self.fast = fast
        self.logits = logits

    def w(self, name: str) -> ag.Var:
        try:
            return self.params[name]
        except KeyError:
            raise MissingWeightError(f"weight slot {name!r} missing") from None

    def run_seq(self, nodes, x: ag.Var) -> ag.Var:
        for node in nodes:
            x = self.run(node, x)
        return x

    def run(self, node: LayerNode, x: ag.Var) -> ag.Var:
        kind, name = node.kind, node.name
        if kind == "conv":
            return ag.conv2d(x, self.w(f"{name}.weight"), self.w(f"{name}.bias"), _conv_spec(node), self.fast)
        if kind == "activation":
            k = node.params["kind"]
            if k == "prelu":
                return ag.prelu(x, self.w(f"{name}.alpha"))
            if k == "leaky_relu":
                return ag.leaky(x, node.params.get("slope", 0.2))
            if k == "relu":
                return ag.relu(x)
            if k == "sigmoid":
                return x if self.logits else ag.sigmoid(x)
            raise ValueError(f"unknown activation {k!r}")
        if kind == "batch_norm":
            return ag.batch_norm(
                x,
                self.w(f"{name}.gamma"),
                self.w(f"{name}.beta"),
                self.w(f"{name}.mean").value,
                self.w(f"{name}.var").value,
                node.params.get("eps", 1e-5),
            )
        if kind == "pixel_shuffle":
            return ag.pixel_shuffle(x, node.params["r"])
        if kind == "scale_residual":
            return ag.scale(x, node.params["beta"])
        if kind in ("residual_block", "global_skip"):
            return ag.add(x, self.run_seq(node.children, x))
        if kind == "rrdb":
            out = self.run_seq(node.children, x)
            return ag.add(x, ag.scale(out, node.params["beta"]))
        if kind == "dense_block":
            feats = [x]
            slope = node.params.get("slope", 0.2)
            last = len(node.children) - 1
            for j, c in enumerate(node.children):
                inp = feats[0] if len(feats) == 1 else ag.concat(feats)
                y = self.run(c, inp)
                if j < last:
                    feats.append(ag.leaky(y, slope))
                else:
                    return ag.add(x, ag.scale(y, node.params["beta"]))
        if kind == "dense":
            return ag.dense(x, self.w(f"{name}.weight"), self.w(f"{name}.bias"))
        raise ValueError(f"unknown layer kind {kind!r}")


def _check_input(graph: LayerGraph, x: np.ndarray):
    if x.ndim != 4:
        raise ShapeError(f"input must be (n, c, h, w), got {x.shape}")
    if x.shape[1] != graph.preset.in_channels:
        raise ShapeError(f"{graph.name} expects {graph.preset.in_channels} channels, got {x.shape[1]}")
    if min(x.shape[2:]) < 4:
        raise ShapeError(f"input spatial dims must be >= 4, got {x.shape[2:]}")
    if graph.is_discriminator:
        s = graph.preset.disc_input
        if x.shape[2:] != (s, s):
            raise ShapeError(f"{graph.name} takes {s}x{s} crops, got {x.shape[2:]}")


def forward_vars(graph: LayerGraph, params: Mapping[str, ag.Var], x: ag.Var,
                 fast: bool = False, logits: bool = False) -> ag.Var:
    """Differentiable forward. ``logits`` drops a discriminator's final sigmoid."""
    _check_input(graph, x.value)
    if graph.resampling_only:
        raise ValueError("bicubic graph has no layers; use degrade.resample")
    return _Runner(params, fast, logits).run_seq(graph.layers, x)


def forward(graph: LayerGraph, weights: Mapping[str, np.ndarray], x, fast: bool = False,
            logits: bool = False) -> np.ndarray:
    """Inference forward pass.

    Generators return (n, c, h*scale, w*scale); the discriminator returns
    (n, 1) probabilities (or raw scores with ``logits=True``).
    A bicubic graph upsamples each channel with the cubic resampler.
    """
    x = np.asarray(x)
    if x.dtype != np.float64:
        x = x.astype(np.float32)
    if graph.resampling_only:
        _check_input(graph, x)
        from ..degrade.resample import resize_array

        n, c, h, w = x.shape
        out = np.empty((n, c, h * graph.scale, w * graph.scale), dtype=x.dtype)
        for i in range(n):
            for j in range(c):
                out[i, j] = resize_array(x[i, j], w * graph.scale, h * graph.scale, "bicubic")
        return out
    missing = [s.name for s in graph.slots() if s.name not in weights]
    if missing:
        raise MissingWeightError(f"{graph.name}: missing weight slots {missing[:5]}")
    params = {k: ag.Var(v) for k, v in weights.items()}
    return forward_vars(graph, params, ag.Var(x), fast=fast, logits=logits).value
