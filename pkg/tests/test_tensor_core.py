import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from srocr.tensor_core import (
    ConvSpec,
    ShapeError,
    activation,
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
from srocr.tensor_core import autograd as ag


def loop_conv(x, w, b, stride, pad):
    """Scalar oracle summing kernel row, kernel column, channel, then bias."""
    n, c, h, wd = x.shape
    o, _, k, _ = w.shape
    xp = np.zeros((n, c, h + 2 * pad, wd + 2 * pad), dtype=x.dtype)
    xp[:, :, pad : pad + h, pad : pad + wd] = x
    ho, wo = (h + 2 * pad - k) // stride + 1, (wd + 2 * pad - k) // stride + 1
    out = np.zeros((n, o, ho, wo), dtype=x.dtype)
    for bi in range(n):
        for oc in range(o):
            for i in range(ho):
                for j in range(wo):
                    acc = x.dtype.type(0)
                    for ki in range(k):
                        for kj in range(k):
                            for ci in range(c):
                                acc = acc + w[oc, ci, ki, kj] * xp[bi, ci, i * stride + ki, j * stride + kj]
                    if b is not None:
                        acc = acc + b[oc]
                    out[bi, oc, i, j] = acc
    return out


class TestConv:
    def test_identity_kernel(self):
        x = np.arange(9, dtype=np.float32).reshape(1, 1, 3, 3)
        spec = ConvSpec(1, 1, kernel_size=1, padding=0, bias=False)
        np.testing.assert_array_equal(conv2d(x, np.ones((1, 1, 1, 1), np.float32), None, spec), x)

    def test_sum_of_elements(self):
        x = np.array([[[[1, 2], [3, 4]]]], dtype=np.float32)
        spec = ConvSpec(1, 1, kernel_size=2, padding=0, bias=False)
        assert conv2d(x, np.ones((1, 1, 2, 2), np.float32), None, spec).tolist() == [[[[10.0]]]]

    def test_matches_loop_oracle_bit_exactly(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((1, 3, 8, 8)).astype(np.float32)
        w = rng.standard_normal((4, 3, 3, 3)).astype(np.float32)
        b = rng.standard_normal(4).astype(np.float32)
        got = conv2d(x, w, b, ConvSpec(3, 4))
        np.testing.assert_array_equal(got, loop_conv(x, w, b, 1, 1))

    def test_strided_matches_oracle(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((2, 2, 7, 6)).astype(np.float32)
        w = rng.standard_normal((3, 2, 3, 3)).astype(np.float32)
        got = conv2d(x, w, None, ConvSpec(2, 3, stride=2, bias=False))
        assert got.shape == (2, 3, 4, 3)
        np.testing.assert_array_equal(got, loop_conv(x, w, None, 2, 1))

    def test_fast_path_agrees(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((2, 5, 11, 9)).astype(np.float32)
        w = rng.standard_normal((6, 5, 3, 3)).astype(np.float32)
        b = rng.standard_normal(6).astype(np.float32)
        for stride in (1, 2):
            spec = ConvSpec(5, 6, stride=stride)
            ref = conv2d(x, w, b, spec)
            np.testing.assert_allclose(conv2d_fast(x, w, b, spec), ref, rtol=1e-5, atol=1e-5)

    def test_shape_errors(self):
        x = np.zeros((1, 2, 4, 4), np.float32)
        with pytest.raises(ShapeError, match="channels"):
            conv2d(x, np.zeros((1, 3, 3, 3), np.float32), np.zeros(1), ConvSpec(3, 1))
        with pytest.raises(ShapeError, match="weights"):
            conv2d(x, np.zeros((1, 2, 2, 2), np.float32), np.zeros(1), ConvSpec(2, 1))
        with pytest.raises(ShapeError, match="bias"):
            conv2d(x, np.zeros((1, 2, 3, 3), np.float32), None, ConvSpec(2, 1))

    def test_invalid_geometry(self):
        with pytest.raises(ValueError):
            ConvSpec(1, 1, kernel_size=0)
        with pytest.raises(ValueError):
            ConvSpec(1, 1, stride=0)

    @settings(max_examples=30, deadline=None)
    @given(alpha=st.floats(-4, 4, allow_nan=False), seed=st.integers(0, 2**16))
    def test_linear_without_bias(self, alpha, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((1, 2, 6, 6)).astype(np.float32)
        w = rng.standard_normal((3, 2, 3, 3)).astype(np.float32)
        spec = ConvSpec(2, 3, bias=False)
        a = np.float32(alpha)
        lhs = conv2d(a * x, w, None, spec)
        rhs = a * conv2d(x, w, None, spec)
        scale = np.abs(rhs).max() + 1e-6
        assert np.abs(lhs - rhs).max() <= 1e-5 * scale

    def test_backward_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((1, 2, 5, 5))
        w = rng.standard_normal((3, 2, 3, 3))
        b = rng.standard_normal(3)
        spec = ConvSpec(2, 3, stride=2)
        g = rng.standard_normal(conv2d(x, w, b, spec).shape)
        gx, gw, gb = conv2d_backward(x, w, g, spec)

        def f(x_, w_, b_):
            return float((conv2d(x_, w_, b_, spec) * g).sum())

        h = 1e-6
        for arr, grad in ((x, gx), (w, gw), (b, gb)):
            idx = tuple(rng.integers(d) for d in arr.shape)
            arr[idx] += h
            up = f(x, w, b)
            arr[idx] -= 2 * h
            down = f(x, w, b)
            arr[idx] += h
            assert abs((up - down) / (2 * h) - grad[idx]) < 1e-6


class TestActivation:
    def test_prelu_definition(self):
        assert activation("prelu", np.array([-2.0]), 0.25).tolist() == [-0.5]
        assert activation("prelu", np.array([3.0]), 0.25).tolist() == [3.0]

    def test_sigmoid_symmetry_point(self):
        assert activation("sigmoid", np.array([0.0])).tolist() == [0.5]

    def test_leaky_matches_scalar_loop(self):
        x = np.random.default_rng(4).standard_normal((2, 3, 4, 4)).astype(np.float32)
        got = activation("leaky_relu", x, 0.2)
        want = np.empty_like(x)
        for idx, v in np.ndenumerate(x):
            want[idx] = np.float32(0.2) * v if v < 0 else v
        np.testing.assert_array_equal(got, want)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            activation("relu", np.array([np.nan]))
        with pytest.raises(ValueError):
            activation("prelu", np.array([1.0]), float("inf"))
        with pytest.raises(ValueError):
            activation("swish", np.array([1.0]))

    @given(arrays(np.float64, st.integers(1, 50), elements=st.floats(-1e6, 1e6)))
    def test_ranges(self, x):
        assert (activation("relu", x) >= 0).all()
        s = sigmoid(np.clip(x, -30, 30))
        assert ((s > 0) & (s < 1)).all()

    def test_sigmoid_extremes_do_not_overflow(self):
        with np.errstate(over="raise"):
            s = sigmoid(np.array([-1000.0, 1000.0]))
        assert s.tolist() == [0.0, 1.0]


class TestBatchNorm:
    def test_identity_parameters(self):
        x = np.random.default_rng(5).standard_normal((1, 2, 3, 3))
        one, zero = np.ones(2), np.zeros(2)
        np.testing.assert_array_equal(batch_norm_infer(x, one, zero, zero, one, eps=0), x)

    def test_affine_definition(self):
        x = np.full((1, 1, 1, 1), 3.0)
        assert batch_norm_infer(x, [2.0], [1.0], [0.0], [1.0], eps=0).item() == 7.0

    def test_matches_per_element_oracle(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((2, 3, 2, 2))
        g, b, m = rng.standard_normal(3), rng.standard_normal(3), rng.standard_normal(3)
        v = rng.random(3) + 0.1
        got = batch_norm_infer(x, g, b, m, v, eps=1e-5)
        for (n, c, i, j), val in np.ndenumerate(x):
            want = (val - m[c]) / np.sqrt(v[c] + 1e-5) * g[c] + b[c]
            assert got[n, c, i, j] == pytest.approx(want, rel=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            batch_norm_infer(np.zeros((1, 2, 1, 1)), np.ones(3), np.zeros(2), np.zeros(2), np.ones(2))


class TestPixelShuffle:
    def test_layout(self):
        x = np.array([1.0, 2.0, 3.0, 4.0]).reshape(1, 4, 1, 1)
        assert pixel_shuffle(x, 2)[0, 0].tolist() == [[1.0, 2.0], [3.0, 4.0]]

    def test_index_formula_oracle(self):
        x = np.random.default_rng(7).standard_normal((1, 8, 2, 2))
        r = 2
        y = pixel_shuffle(x, r)
        assert y.shape == (1, 2, 4, 4)
        for c in range(2):
            for h in range(2):
                for w in range(2):
                    for i in range(r):
                        for j in range(r):
                            assert y[0, c, h * r + i, w * r + j] == x[0, c * r * r + i * r + j, h, w]

    @given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 4), st.integers(1, 4), st.integers(1, 3))
    def test_bijection(self, n, oc, h, w, r):
        x = np.arange(n * oc * r * r * h * w, dtype=np.float64).reshape(n, oc * r * r, h, w)
        y = pixel_shuffle(x, r)
        assert sorted(y.ravel()) == sorted(x.ravel())
        np.testing.assert_array_equal(pixel_unshuffle(y, r), x)

    def test_indivisible_channels(self):
        with pytest.raises(ShapeError):
            pixel_shuffle(np.zeros((1, 3, 2, 2)), 2)


class TestElementwiseAndDense:
    def test_add(self):
        rng = np.random.default_rng(8)
        a, b = rng.standard_normal((2, 3, 4, 4)), rng.standard_normal((2, 3, 4, 4))
        np.testing.assert_array_equal(elementwise_add(a, np.zeros_like(a)), a)
        np.testing.assert_array_equal(elementwise_add(a, b), elementwise_add(b, a))
        want = np.empty_like(a)
        for idx in np.ndindex(a.shape):
            want[idx] = a[idx] + b[idx]
        np.testing.assert_array_equal(elementwise_add(a, b), want)
        with pytest.raises(ShapeError):
            elementwise_add(a, b[:, :2])

    def test_dense_closed_forms(self):
        np.testing.assert_array_equal(dense(np.array([1.0, -2.0, 5.0]), np.eye(3), np.zeros(3)), [1.0, -2.0, 5.0])
        assert dense(np.array([1.0, 1.0]), np.array([[2.0], [3.0]]), np.array([1.0])).tolist() == [6.0]

    def test_dense_1024_to_1_oracle(self):
        rng = np.random.default_rng(9)
        x, w, b = rng.standard_normal(1024), rng.standard_normal((1024, 1)), rng.standard_normal(1)
        acc = 0.0
        for i in range(1024):
            acc += x[i] * w[i, 0]
        assert dense(x, w, b)[0] == pytest.approx(acc + b[0], rel=1e-12)

    def test_dense_mismatch(self):
        with pytest.raises(ShapeError):
            dense(np.ones(3), np.ones((2, 1)), np.ones(1))


class TestAutograd:
    def test_diamond_accumulates(self):
        x = ag.Var(np.array([2.0]), requires_grad=True)
        y = ag.add(ag.scale(x, 3.0), ag.scale(x, 4.0))
        ag.backward(y)
        assert x.grad.tolist() == [7.0]

    def test_no_graph_without_requires_grad(self):
        y = ag.relu(ag.Var(np.array([1.0, -1.0])))
        assert not y.requires_grad and y._backward is None

    def test_kinks_recorded_only_inside_context(self):
        ag.relu(ag.Var(np.array([1.0])))
        with ag.record_kinks() as masks:
            ag.relu(ag.Var(np.array([1.0, -1.0])))
            ag.leaky(ag.Var(np.array([-1.0])), 0.2)
        assert len(masks) == 2

    def test_concat_splits_gradient(self):
        a = ag.Var(np.ones((1, 1, 2, 2)), requires_grad=True)
        b = ag.Var(np.ones((1, 2, 2, 2)), requires_grad=True)
        out = ag.concat([a, b])
        ag.backward(out, np.arange(12.0).reshape(1, 3, 2, 2))
        assert a.grad.ravel().tolist() == [0, 1, 2, 3]
        assert b.grad.ravel().tolist() == list(range(4, 12))
