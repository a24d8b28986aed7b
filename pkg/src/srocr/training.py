"""Losses, SGD steps and the alternating generator/discriminator loop."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .degrade.image import Image
from .degrade.resample import resize_array
from .sr_models import LayerGraph, forward_vars, init_weights
from .tensor_core import ShapeError, sigmoid
from .tensor_core import autograd as ag

MODES = ("l1_only", "gan", "ragan")
SCORE_CLAMP = 1e-7


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    steps_max: int = 1000
    batch: int = 1
    learning_rate: float = 1e-3
    seed: int = 0
    convergence_window: int = 50
    convergence_eps: float = 1e-3
    mode: str = "l1_only"
    adv_weight: float = 1e-3  # weight of the adversarial term in the generator objective

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.learning_rate >= 0:
            raise ValueError("learning_rate must be >= 0")
        if self.convergence_window < 2:
            raise ValueError("convergence_window must be >= 2")
        if self.batch < 1 or self.steps_max < 0:
            raise ValueError("batch must be >= 1 and steps_max >= 0")


@dataclass(frozen=True)
class LossReport:
    step: int
    g_loss: float
    d_loss: float
    l1: float


@dataclass
class TrainState:
    gen: dict[str, np.ndarray]
    disc: dict[str, np.ndarray] | None = None
    step: int = 0


# -- scalar losses -----------------------------------------------------------

def _same_shape(a, b):
    if np.shape(a) != np.shape(b):
        raise ShapeError(f"loss operands differ in shape: {np.shape(a)} vs {np.shape(b)}")


def l1_loss(pred, target) -> float:
    _same_shape(pred, target)
    return float(np.mean(np.abs(np.asarray(pred, np.float64) - np.asarray(target, np.float64))))


def gan_losses(d_real, d_fake) -> tuple[float, float]:
    """Binary cross-entropy on discriminator probabilities: (g_loss, d_loss)."""
    r = np.asarray(d_real, dtype=np.float64)
    f = np.asarray(d_fake, dtype=np.float64)
    for name, v in (("d_real", r), ("d_fake", f)):
        if not np.all(np.isfinite(v)) or np.any(v < 0) or np.any(v > 1):
            raise ValueError(f"{name} scores must lie in (0, 1)")
    r = np.clip(r, SCORE_CLAMP, 1 - SCORE_CLAMP)
    f = np.clip(f, SCORE_CLAMP, 1 - SCORE_CLAMP)
    d_loss = -float(np.mean(np.log(r)) + np.mean(np.log1p(-f)))
    g_loss = -float(np.mean(np.log(f)))
    return g_loss, d_loss


def _softplus(x):
    return np.logaddexp(0.0, x)


def rad_losses(c_real, c_fake) -> tuple[float, float]:
    """Relativistic average losses on raw discriminator scores: (g_loss, d_loss)."""
    r = np.asarray(c_real, dtype=np.float64).ravel()
    f = np.asarray(c_fake, dtype=np.float64).ravel()
    if not (np.all(np.isfinite(r)) and np.all(np.isfinite(f))):
        raise ValueError("rad_losses: non-finite logits")
    real_rel = r - f.mean()
    fake_rel = f - r.mean()
    # -log sigmoid(z) = softplus(-z);  -log(1 - sigmoid(z)) = softplus(z)
    d_loss = float(np.mean(_softplus(-real_rel)) + np.mean(_softplus(fake_rel)))
    g_loss = float(np.mean(_softplus(-fake_rel)) + np.mean(_softplus(real_rel)))
    return g_loss, d_loss


def rad_probabilities(c_real, c_fake) -> tuple[np.ndarray, np.ndarray]:
    r = np.asarray(c_real, dtype=np.float64).ravel()
    f = np.asarray(c_fake, dtype=np.float64).ravel()
    return sigmoid(r - f.mean()), sigmoid(f - r.mean())


# -- differentiable losses ---------------------------------------------------

def l1_var(pred: ag.Var, target: np.ndarray) -> ag.Var:
    _same_shape(pred.value, target)
    diff = pred.value - np.asarray(target, dtype=pred.value.dtype)
    n = diff.size
    ag.note_kink(diff < 0)
    value = np.abs(diff).mean()
    return ag.from_op(np.asarray(value), (pred,), lambda g: (g * np.sign(diff) / n,))


def projection_var(pred: ag.Var, weights: np.ndarray) -> ag.Var:
    """mean(pred * weights): a smooth probe loss for gradient checks."""
    w = np.asarray(weights, dtype=pred.value.dtype)
    _same_shape(pred.value, w)
    n = w.size
    return ag.from_op(np.asarray((pred.value * w).sum() / n), (pred,), lambda g: (g * w / n,))


def _softplus_mean(x: ag.Var, sign: float) -> ag.Var:
    """mean(softplus(sign * x))."""
    v = x.value
    n = v.size
    value = np.asarray(_softplus(sign * v).mean())
    return ag.from_op(value, (x,), lambda g: (g * sign * sigmoid(sign * v) / n,))


def _minus_mean_of(x: ag.Var, y: ag.Var) -> ag.Var:
    """x - mean(y), broadcast."""
    ny = y.value.size
    value = x.value - y.value.mean()

    def back(g):
        return g, np.full_like(y.value, -g.sum() / ny)

    return ag.from_op(value, (x, y), back)


def _sum(*terms: ag.Var) -> ag.Var:
    value = np.asarray(sum(t.value for t in terms))
    return ag.from_op(value, terms, lambda g: tuple(g for _ in terms))


def _weighted(x: ag.Var, k: float) -> ag.Var:
    return ag.from_op(np.asarray(x.value * k), (x,), lambda g: (g * k,))


def adversarial_var(mode: str, c_real: ag.Var, c_fake: ag.Var, role: str) -> ag.Var:
    """Adversarial loss on logits for ``role`` in {"d", "g"}."""
    if mode == "gan":
        if role == "d":
            return _sum(_softplus_mean(c_real, -1.0), _softplus_mean(c_fake, 1.0))
        return _softplus_mean(c_fake, -1.0)
    real_rel = _minus_mean_of(c_real, c_fake)
    fake_rel = _minus_mean_of(c_fake, c_real)
    if role == "d":
        return _sum(_softplus_mean(real_rel, -1.0), _softplus_mean(fake_rel, 1.0))
    return _sum(_softplus_mean(fake_rel, -1.0), _softplus_mean(real_rel, 1.0))


# -- optimisation ------------------------------------------------------------

def _params(graph: LayerGraph, weights: Mapping[str, np.ndarray], trainable: bool) -> dict[str, ag.Var]:
    train = {s.name for s in graph.slots() if s.trainable} if trainable else set()
    return {k: ag.Var(v, requires_grad=k in train) for k, v in weights.items()}


def _sgd(weights: Mapping[str, np.ndarray], params: Mapping[str, ag.Var], lr: float) -> dict[str, np.ndarray]:
    out = {}
    for name, w in weights.items():
        g = params[name].grad
        if g is None or not params[name].requires_grad:
            out[name] = w
        else:
            out[name] = (w - np.asarray(lr, dtype=w.dtype) * g.astype(w.dtype)).astype(w.dtype)
    return out


def _finite(step: int, **losses: float) -> None:
    bad = {k: v for k, v in losses.items() if not math.isfinite(v)}
    if bad:
        raise TrainingError(f"non-finite loss at step {step}: {bad}")


def train_step(
    gen: LayerGraph,
    state: TrainState,
    batch: tuple[np.ndarray, np.ndarray],
    config: TrainConfig,
    disc: LayerGraph | None = None,
) -> tuple[TrainState, LossReport]:
    """One discriminator update (adversarial modes) then one generator update."""
    lr_img, hr_img = (np.asarray(b, dtype=np.float32) for b in batch)
    step = state.step
    adversarial = config.mode != "l1_only"
    if adversarial and (disc is None or state.disc is None):
        raise ValueError(f"mode {config.mode!r} needs a discriminator graph and weights")

    try:
        return _step(gen, state, lr_img, hr_img, config, disc, adversarial)
    except ValueError as exc:
        # activations reject non-finite inputs; surface that as divergence
        if "non-finite" in str(exc):
            raise TrainingError(f"diverged at step {step}: {exc}") from exc
        raise


def _step(gen, state, lr_img, hr_img, config, disc, adversarial):
    step = state.step
    disc_weights = state.disc
    d_loss_value = 0.0
    if adversarial:
        fake = forward_vars(gen, _params(gen, state.gen, False), ag.Var(lr_img), fast=True).value
        dp = _params(disc, disc_weights, True)
        c_real = forward_vars(disc, dp, ag.Var(hr_img), logits=True, fast=True)
        c_fake = forward_vars(disc, dp, ag.Var(fake), logits=True, fast=True)
        d_loss = adversarial_var(config.mode, c_real, c_fake, "d")
        d_loss_value = float(d_loss.value)
        _finite(step, d_loss=d_loss_value)
        ag.backward(d_loss)
        disc_weights = _sgd(disc_weights, dp, config.learning_rate)

    gp = _params(gen, state.gen, True)
    pred = forward_vars(gen, gp, ag.Var(lr_img), fast=True)
    l1 = l1_var(pred, hr_img)
    objective = l1
    g_adv_value = float(l1.value)
    if adversarial:
        dfrozen = _params(disc, disc_weights, False)
        c_real = forward_vars(disc, dfrozen, ag.Var(hr_img), logits=True, fast=True)
        c_fake = forward_vars(disc, dfrozen, pred, logits=True, fast=True)
        g_adv = adversarial_var(config.mode, c_real, c_fake, "g")
        g_adv_value = float(g_adv.value)
        objective = _sum(l1, _weighted(g_adv, config.adv_weight))
    _finite(step, g_loss=g_adv_value, l1=float(l1.value))
    ag.backward(objective)
    gen_weights = _sgd(state.gen, gp, config.learning_rate)
    report = LossReport(step, g_adv_value, d_loss_value, float(l1.value))
    return TrainState(gen_weights, disc_weights, step + 1), report


def converged(history: Sequence[LossReport], window: int, eps: float) -> bool:
    if len(history) < window:
        return False
    tail = history[-window:]
    g = [r.g_loss for r in tail]
    d = [r.d_loss for r in tail]
    return (max(g) - min(g)) < eps and (max(d) - min(d)) < eps


def _batches(dataset, batch: int, rng: np.random.Generator):
    while True:
        order = rng.permutation(len(dataset))
        for start in range(0, len(order), batch):
            idx = sorted(order[start : start + batch])
            yield (
                np.concatenate([np.asarray(dataset[i][0], np.float32).reshape(1, *np.shape(dataset[i][0])[-3:]) for i in idx]),
                np.concatenate([np.asarray(dataset[i][1], np.float32).reshape(1, *np.shape(dataset[i][1])[-3:]) for i in idx]),
            )


def train_loop(
    config: TrainConfig,
    dataset: Sequence[tuple[np.ndarray, np.ndarray]],
    gen: LayerGraph,
    disc: LayerGraph | None = None,
    state: TrainState | None = None,
    on_step: Callable[[LossReport], None] | None = None,
) -> tuple[TrainState, list[LossReport]]:
    """Iterate train_step until ``steps_max`` or until both losses stabilise.

    Stabilised means the g_loss and d_loss ranges over the last
    ``convergence_window`` reports are each below ``convergence_eps``.
    """
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    if state is None:
        state = TrainState(
            init_weights(gen, config.seed),
            init_weights(disc, config.seed + 1) if disc is not None and config.mode != "l1_only" else None,
        )
    rng = np.random.default_rng(config.seed)
    batches = _batches(dataset, config.batch, rng)
    history: list[LossReport] = []
    for _ in range(config.steps_max):
        state, report = train_step(gen, state, next(batches), config, disc)
        history.append(report)
        if on_step is not None:
            on_step(report)
        if converged(history, config.convergence_window, config.convergence_eps):
            break
    return state, history


def text_crops(
    page: Image,
    size: int,
    factor: int,
    count: int,
    seed: int = 0,
    channels: int = 1,
    min_ink: float = 0.05,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """(low-res, high-res) training pairs cut from a rendered page.

    High-res crops are ``size`` square windows holding at least ``min_ink``
    dark pixels; the low-res side is their bicubic reduction by ``factor``.
    Values are intensities in [0, 1], shaped (channels, h, w).
    """
    if size % factor:
        raise ValueError(f"crop size {size} is not divisible by factor {factor}")
    gray = page.to_gray().pixels.astype(np.float32) / 255.0
    h, w = gray.shape
    if h < size or w < size:
        raise ValueError(f"page {w}x{h} is smaller than the {size}px crop")
    # summed-area table for the ink fraction of every window
    sat = np.pad((gray < 0.5).cumsum(0).cumsum(1), ((1, 0), (1, 0)))
    inked = (sat[size:, size:] - sat[:-size, size:] - sat[size:, :-size] + sat[:-size, :-size]) / size**2
    ys, xs = np.nonzero(inked >= min_ink)
    if ys.size == 0:
        raise ValueError("no crop reaches the requested ink fraction")
    rng = np.random.default_rng(seed)
    pairs = []
    for k in rng.choice(ys.size, size=count, replace=ys.size < count):
        hr = gray[ys[k] : ys[k] + size, xs[k] : xs[k] + size]
        lr = resize_array(hr, size // factor, size // factor).astype(np.float32)
        pairs.append((np.repeat(lr[None], channels, 0), np.repeat(hr[None], channels, 0)))
    return pairs


def write_loss_csv(history: Sequence[LossReport], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "g_loss", "d_loss", "l1"])
        for r in history:
            w.writerow([r.step, repr(r.g_loss), repr(r.d_loss), repr(r.l1)])


def read_loss_csv(path) -> list[LossReport]:
    with open(path, newline="") as fh:
        return [
            LossReport(int(row["step"]), float(row["g_loss"]), float(row["d_loss"]), float(row["l1"]))
            for row in csv.DictReader(fh)
        ]


# -- gradient verification ---------------------------------------------------

def check_gradients(
    loss_fn: Callable[[dict[str, ag.Var]], ag.Var],
    params: Mapping[str, np.ndarray],
    trainable: Sequence[str],
    probes: int = 64,
    seed: int = 0,
    eps: float = 1e-3,
    floor: float = 1e-8,
) -> float:
    """Max relative error between reverse-mode and central-difference gradients.

    Everything runs in float64. Each probe picks a trainable slot uniformly,
    then a coordinate in it. Relative error is |a - n| / max(|a|, |n|, floor).

    A central difference straddling a kink of relu/leaky/prelu/abs is not a
    derivative estimate, so a probe whose +eps and -eps evaluations take
    different branches anywhere in the graph is redrawn (up to
    ``20 * probes`` draws in total).
    """
    if probes < 1:
        raise ValueError("probes must be >= 1")
    if not trainable:
        raise ValueError("nothing to probe: no trainable parameters")
    base = {k: np.array(v, dtype=np.float64) for k, v in params.items()}
    train = set(trainable)
    vars_ = {k: ag.Var(v, requires_grad=k in train) for k, v in base.items()}
    loss = loss_fn(vars_)
    ag.backward(loss)
    analytic = {k: (vars_[k].grad if vars_[k].grad is not None else np.zeros_like(base[k])) for k in trainable}

    def evaluate(values):
        with ag.record_kinks() as masks:
            value = float(loss_fn({k: ag.Var(v) for k, v in values.items()}).value)
        return value, masks

    rng = np.random.default_rng(seed)
    names = sorted(trainable)
    worst = 0.0
    done = draws = 0
    while done < probes:
        draws += 1
        if draws > 20 * probes:
            raise RuntimeError(f"only {done} of {probes} probes avoided activation kinks")
        name = names[rng.integers(len(names))]
        idx = tuple(int(rng.integers(d)) for d in base[name].shape)
        orig = base[name][idx]
        base[name][idx] = orig + eps
        up, up_masks = evaluate(base)
        base[name][idx] = orig - eps
        down, down_masks = evaluate(base)
        base[name][idx] = orig
        if any(not np.array_equal(a, b) for a, b in zip(up_masks, down_masks)):
            continue
        done += 1
        numeric = (up - down) / (2 * eps)
        a = float(analytic[name][idx])
        err = abs(a - numeric) / max(abs(a), abs(numeric), floor)
        worst = max(worst, err)
    return worst


def grad_check(
    graph: LayerGraph,
    weights: Mapping[str, np.ndarray],
    x: np.ndarray | None = None,
    loss: str = "l1",
    probes: int = 64,
    seed: int = 0,
    eps: float = 1e-3,
) -> float:
    """Gradient check of a whole graph against a fixed random target."""
    trainable = [s.name for s in graph.slots() if s.trainable]
    if graph.resampling_only or not trainable:
        raise ValueError(f"{graph.name} has no parameters to probe")
    rng = np.random.default_rng(seed + 1)
    if x is None:
        size = graph.preset.disc_input if graph.is_discriminator else 16
        x = rng.random((1, graph.preset.in_channels, size, size))
    x = np.asarray(x, dtype=np.float64)
    out_shape = forward_vars(graph, {k: ag.Var(np.asarray(v, np.float64)) for k, v in weights.items()},
                             ag.Var(x), fast=True).value.shape
    target = rng.random(out_shape)
    if loss == "l1":
        def loss_fn(p):
            return l1_var(forward_vars(graph, p, ag.Var(x), fast=True), target)
    elif loss == "projection":
        def loss_fn(p):
            return projection_var(forward_vars(graph, p, ag.Var(x), fast=True), target - 0.5)
    else:
        raise ValueError(f"unknown grad-check loss {loss!r}")
    return check_gradients(loss_fn, weights, trainable, probes, seed, eps)
