"""Tape-free reverse-mode differentiation over the kernels in ``ops``.

Each ``Var`` remembers its parents and a closure that maps the output
gradient to parent gradients. Nothing is recorded unless some input has
``requires_grad`` set, so the same code path serves inference.
"""
from __future__ import annotations

import contextlib
from typing import Callable, Iterator, Sequence

import numpy as np

from . import ops

_kinks: list | None = None


@contextlib.contextmanager
def record_kinks() -> Iterator[list]:
    """Collect the branch masks of every piecewise-linear op evaluated inside."""
    global _kinks
    saved, _kinks = _kinks, []
    try:
        yield _kinks
    finally:
        _kinks = saved


def note_kink(mask: np.ndarray) -> None:
    if _kinks is not None:
        _kinks.append(np.packbits(mask))


class Var:
    __slots__ = ("value", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, value, requires_grad: bool = False):
        self.value = np.asarray(value)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents: tuple[Var, ...] = ()
        self._backward: Callable | None = None

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"Var(shape={self.value.shape}, dtype={self.value.dtype}, requires_grad={self.requires_grad})"


def from_op(value, parents: Sequence[Var], backward: Callable) -> Var:
    """Wrap an op result. ``backward(g)`` returns one gradient (or None) per parent."""
    out = Var(value)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward
    return out


def backward(root: Var, grad=None) -> None:
    """Accumulate d(root)/d(leaf) into ``leaf.grad`` for every reachable leaf."""
    order: list[Var] = []
    seen: set[int] = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen or not node.requires_grad:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            stack.append((p, False))

    grads = {id(root): np.ones_like(root.value) if grad is None else np.asarray(grad)}
    for node in reversed(order):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        if node._backward is None:
            node.grad = g if node.grad is None else node.grad + g
            continue
        for parent, pg in zip(node._parents, node._backward(g)):
            if pg is None or not parent.requires_grad:
                continue
            key = id(parent)
            grads[key] = pg if key not in grads else grads[key] + pg


def conv2d(x: Var, w: Var, b: Var | None, spec: ops.ConvSpec, fast: bool = False) -> Var:
    kernel = ops.conv2d_fast if fast else ops.conv2d
    value = kernel(x.value, w.value, None if b is None else b.value, spec)

    def back(g):
        gx, gw, gb = ops.conv2d_backward(x.value, w.value, g, spec)
        return (gx, gw) if b is None else (gx, gw, gb)

    parents = (x, w) if b is None else (x, w, b)
    return from_op(value, parents, back)


def add(a: Var, b: Var) -> Var:
    return from_op(ops.elementwise_add(a.value, b.value), (a, b), lambda g: (g, g))


def scale(x: Var, beta: float) -> Var:
    k = x.value.dtype.type(beta)
    return from_op(x.value * k, (x,), lambda g: (g * k,))


def concat(xs: Sequence[Var]) -> Var:
    xs = tuple(xs)
    value = np.concatenate([v.value for v in xs], axis=1)
    bounds = np.cumsum([0] + [v.value.shape[1] for v in xs])

    def back(g):
        return tuple(g[:, bounds[i] : bounds[i + 1]] for i in range(len(xs)))

    return from_op(value, xs, back)


def leaky(x: Var, slope: float) -> Var:
    value = ops.activation("leaky_relu", x.value, slope)
    note_kink(x.value < 0)
    a = x.value.dtype.type(slope)
    return from_op(value, (x,), lambda g: (np.where(x.value < 0, g * a, g),))


def prelu(x: Var, alpha: Var) -> Var:
    a = alpha.value.reshape(())
    value = ops.activation("prelu", x.value, a)
    neg = x.value < 0
    note_kink(neg)

    def back(g):
        ga = np.where(neg, g * x.value, 0).sum().reshape(alpha.value.shape)
        return np.where(neg, g * a, g), ga

    return from_op(value, (x, alpha), back)


def relu(x: Var) -> Var:
    value = ops.activation("relu", x.value)
    note_kink(x.value > 0)
    return from_op(value, (x,), lambda g: (np.where(x.value > 0, g, 0).astype(g.dtype),))


def sigmoid(x: Var) -> Var:
    s = ops.sigmoid(x.value)
    return from_op(s, (x,), lambda g: (g * s * (1 - s),))


def batch_norm(x: Var, gamma: Var, beta: Var, mean, var, eps: float = 1e-5) -> Var:
    """Batch norm with stored statistics; gradients flow to x, gamma and beta."""
    value = ops.batch_norm_infer(x.value, gamma.value, beta.value, mean, var, eps)
    c = x.value.shape[1]
    inv_std = 1.0 / np.sqrt(np.asarray(var, dtype=x.value.dtype) + x.value.dtype.type(eps))
    xhat = (x.value - np.asarray(mean, dtype=x.value.dtype).reshape(1, c, 1, 1)) * inv_std.reshape(1, c, 1, 1)

    def back(g):
        gx = g * (gamma.value * inv_std).reshape(1, c, 1, 1)
        return gx, (g * xhat).sum(axis=(0, 2, 3)), g.sum(axis=(0, 2, 3))

    return from_op(value, (x, gamma, beta), back)


def pixel_shuffle(x: Var, r: int) -> Var:
    return from_op(ops.pixel_shuffle(x.value, r), (x,), lambda g: (ops.pixel_unshuffle(g, r),))


def dense(x: Var, w: Var, b: Var) -> Var:
    shape = x.value.shape
    flat = x.value.reshape(shape[0], -1)
    value = ops.dense(flat, w.value, b.value)

    def back(g):
        return (g @ w.value.T).reshape(shape), flat.T @ g, g.sum(axis=0)

    return from_op(value, (x, w, b), back)
