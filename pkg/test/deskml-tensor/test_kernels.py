#!/usr/bin/env python3
"""Test cases for the numeric kernels"""

from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
import sys
sys.path.insert(0, str(project_root))

from deskml_tensor import (
    BackendMismatchError,
    DType,
    DTypeMismatchError,
    ShapeMismatchError,
    TrackedBackend,
    from_numpy,
    kernels,
)


def naive_conv2d(x, w, b, stride, padding):
    batch, channels, h, width = x.shape
    out_channels, _, kh, kw = w.shape
    oh = (h + 2 * padding - kh) // stride + 1
    ow = (width + 2 * padding - kw) // stride + 1
    xp = np.pad(x.astype(np.float64), ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    out = np.zeros((batch, out_channels, oh, ow))
    for n in range(batch):
        for o in range(out_channels):
            for i in range(oh):
                for j in range(ow):
                    patch = xp[n, :, i * stride:i * stride + kh, j * stride:j * stride + kw]
                    out[n, o, i, j] = np.sum(patch * w[o]) + (b[o] if b is not None else 0.0)
    return out


class TestElementwise:
    """Binary and unary kernels"""

    @pytest.mark.parametrize("op,reference", [
        (kernels.add, np.add),
        (kernels.sub, np.subtract),
        (kernels.mul, np.multiply),
        (kernels.maximum, np.maximum),
    ])
    def test_broadcasting_matches_numpy(self, backend, rng, op, reference):
        a = rng.standard_normal((3, 1, 4)).astype(np.float32)
        b = rng.standard_normal((5, 1)).astype(np.float32)
        out = op(from_numpy(a, backend=backend), from_numpy(b, backend=backend))
        assert out.shape == (3, 5, 4)
        np.testing.assert_array_equal(out.numpy(), reference(a, b))

    def test_scalar_operands(self, backend):
        t = from_numpy(np.array([1.0, 2.0], dtype=np.float32), backend=backend)
        assert (t + 1).tolist() == [2.0, 3.0]
        assert (1 - t).tolist() == [0.0, -1.0]
        assert (t * 2).tolist() == [2.0, 4.0]
        assert (2 / t).tolist() == [2.0, 1.0]
        assert (-t).tolist() == [-1.0, -2.0]

    def test_division_by_zero_follows_ieee(self, backend):
        t = from_numpy(np.array([1.0, -1.0, 0.0], dtype=np.float32), backend=backend)
        out = kernels.div(t, 0.0).numpy()
        assert out[0] == np.inf
        assert out[1] == -np.inf
        assert np.isnan(out[2])

    def test_dtype_mismatch(self, backend):
        a = from_numpy(np.zeros(2, dtype=np.float32), backend=backend)
        b = from_numpy(np.zeros(2, dtype=np.int32), backend=backend)
        with pytest.raises(DTypeMismatchError):
            kernels.add(a, b)

    def test_backend_mismatch(self, backend):
        a = from_numpy(np.zeros(2, dtype=np.float32), backend=backend)
        b = from_numpy(np.zeros(2, dtype=np.float32), backend=TrackedBackend("other"))
        with pytest.raises(BackendMismatchError):
            a + b

    def test_not_broadcastable(self, backend):
        a = from_numpy(np.zeros((2, 3), dtype=np.float32), backend=backend)
        b = from_numpy(np.zeros((4,), dtype=np.float32), backend=backend)
        with pytest.raises(ShapeMismatchError):
            kernels.mul(a, b)

    def test_unary(self, backend, rng):
        x = rng.standard_normal(10).astype(np.float32)
        t = from_numpy(x, backend=backend)
        np.testing.assert_array_equal(kernels.relu(t).numpy(), np.maximum(x, 0))
        np.testing.assert_array_equal(kernels.positive_mask(t).numpy(), (x > 0).astype(np.float32))
        np.testing.assert_allclose(kernels.exp(t).numpy(), np.exp(x), rtol=1e-6)
        positive = from_numpy(np.abs(x) + 0.5, backend=backend)
        np.testing.assert_allclose(kernels.log(positive).numpy(), np.log(np.abs(x) + 0.5), rtol=1e-6)

    def test_positive_mask_is_zero_at_zero(self, backend):
        t = from_numpy(np.array([0.0, 1e-30, -1e-30], dtype=np.float32), backend=backend)
        assert kernels.positive_mask(t).tolist() == [0.0, 1.0, 0.0]


class TestReductions:
    """sum, mean, max, argmax"""

    def test_sum_is_sequential(self, backend, rng):
        x = (rng.standard_normal(257) * 1e4).astype(np.float32)
        expected = np.float32(0.0)
        for value in x:
            expected = np.float32(expected + value)
        assert kernels.sum(from_numpy(x, backend=backend)).item() == float(expected)

    def test_sum_axes(self, backend, rng):
        x = rng.standard_normal((2, 3, 4)).astype(np.float32)
        t = from_numpy(x, backend=backend)
        out = kernels.sum(t, axis=(0, 2), keepdims=True)
        assert out.shape == (1, 3, 1)
        np.testing.assert_allclose(out.numpy(), x.sum(axis=(0, 2), keepdims=True), rtol=1e-5)
        assert kernels.sum(t, axis=-1).shape == (2, 3)

    def test_sum_of_empty_is_zero(self, backend):
        t = from_numpy(np.zeros((0, 3), dtype=np.float32), backend=backend)
        assert kernels.sum(t, axis=0).tolist() == [0.0, 0.0, 0.0]

    def test_bool_sum_counts(self, backend):
        t = from_numpy(np.array([True, False, True]), backend=backend)
        out = kernels.sum(t)
        assert out.dtype is DType.INT32
        assert out.item() == 2

    def test_mean_and_max(self, backend):
        t = from_numpy(np.array([[1.0, 5.0], [3.0, -1.0]], dtype=np.float32), backend=backend)
        assert kernels.mean(t).item() == 2.0
        assert kernels.max(t, axis=1).tolist() == [5.0, 3.0]
        assert kernels.argmax(t, axis=1).tolist() == [1, 0]

    def test_max_over_empty_axis(self, backend):
        with pytest.raises(ShapeMismatchError):
            kernels.max(from_numpy(np.zeros((0,), dtype=np.float32), backend=backend))

    def test_axis_out_of_range(self, backend):
        with pytest.raises(ShapeMismatchError):
            kernels.sum(from_numpy(np.zeros((2,), dtype=np.float32), backend=backend), axis=3)


class TestBroadcastShapes:
    """broadcast_to and sum_to"""

    def test_broadcast_to_is_a_view(self, backend):
        t = from_numpy(np.array([1.0, 2.0, 3.0], dtype=np.float32), backend=backend)
        view = kernels.broadcast_to(t, (2, 3))
        assert view.buffer is t.buffer
        assert view.strides == (0, 1)
        np.testing.assert_array_equal(view.numpy(), np.broadcast_to(t.numpy(), (2, 3)))
        with pytest.raises(ShapeMismatchError):
            kernels.broadcast_to(t, (2, 4))

    def test_sum_to_inverts_broadcast(self, backend, rng):
        x = rng.standard_normal((4, 2, 3)).astype(np.float32)
        out = kernels.sum_to(from_numpy(x, backend=backend), (2, 1))
        np.testing.assert_allclose(out.numpy(), x.sum(axis=(0, 2)).reshape(2, 1), rtol=1e-5)


class TestMatmul:
    """Matrix product"""

    def test_matches_ordered_loop(self, backend, rng):
        a = rng.standard_normal((5, 7)).astype(np.float32)
        b = rng.standard_normal((7, 3)).astype(np.float32)
        out = kernels.matmul(from_numpy(a, backend=backend), from_numpy(b, backend=backend)).numpy()
        expected = np.zeros((5, 3), dtype=np.float32)
        for k in range(7):
            expected = expected + a[:, k:k + 1] * b[k:k + 1, :]
        np.testing.assert_array_equal(out, expected)
        np.testing.assert_allclose(out, a @ b, rtol=1e-5, atol=1e-5)

    def test_transposed_operand(self, backend, rng):
        a = rng.standard_normal((4, 3)).astype(np.float32)
        t = from_numpy(a, backend=backend)
        np.testing.assert_allclose(kernels.matmul(t.T, t).numpy(), a.T @ a, rtol=1e-5, atol=1e-5)

    def test_shape_contract(self, backend):
        a = from_numpy(np.zeros((2, 3), dtype=np.float32), backend=backend)
        with pytest.raises(ShapeMismatchError):
            kernels.matmul(a, a)

    def test_integer_operands_rejected(self, backend):
        a = from_numpy(np.zeros((2, 2), dtype=np.int32), backend=backend)
        with pytest.raises(DTypeMismatchError):
            kernels.matmul(a, a)


class TestConvolution:
    """conv2d, im2col and col2im"""

    @pytest.mark.parametrize("stride,padding", [(1, 0), (1, 1), (2, 1), (2, 0)])
    def test_conv2d_matches_naive(self, backend, rng, stride, padding):
        x = rng.standard_normal((2, 3, 6, 5)).astype(np.float32)
        w = rng.standard_normal((4, 3, 3, 3)).astype(np.float32)
        b = rng.standard_normal(4).astype(np.float32)
        out = kernels.conv2d(from_numpy(x, backend=backend), from_numpy(w, backend=backend),
                             from_numpy(b, backend=backend), stride=stride, padding=padding)
        expected = naive_conv2d(x, w, b, stride, padding)
        assert out.shape == expected.shape
        np.testing.assert_allclose(out.numpy(), expected, rtol=1e-4, atol=1e-4)

    def test_output_size(self):
        assert kernels.conv_output_size(28, 3, 1, 1) == 28
        assert kernels.conv_output_size(28, 3, 2, 1) == 14
        assert kernels.conv_output_size(5, 3, 2, 0) == 2

    def test_col2im_is_adjoint_of_im2col(self, backend, rng):
        x = rng.standard_normal((2, 2, 5, 5))
        cols_shape = kernels.im2col(from_numpy(x.astype(np.float32), backend=backend), 3, 3, 2, 1).shape
        c = rng.standard_normal(cols_shape)
        lhs = np.sum(kernels.im2col(from_numpy(x.astype(np.float32), backend=backend), 3, 3, 2, 1).numpy()
                     .astype(np.float64) * c)
        rhs = np.sum(x * kernels.col2im(from_numpy(c.astype(np.float32), backend=backend),
                                        x.shape, 3, 3, 2, 1).numpy().astype(np.float64))
        assert lhs == pytest.approx(rhs, rel=1e-4, abs=1e-4)

    @pytest.mark.parametrize("x_shape,w_shape", [
        ((1, 2, 4, 4), (3, 1, 3, 3)),
        ((1, 1, 2, 2), (1, 1, 3, 3)),
        ((1, 4, 4), (1, 1, 3, 3)),
    ])
    def test_invalid_shapes(self, backend, x_shape, w_shape):
        x = from_numpy(np.zeros(x_shape, dtype=np.float32), backend=backend)
        w = from_numpy(np.zeros(w_shape, dtype=np.float32), backend=backend)
        with pytest.raises(ShapeMismatchError):
            kernels.conv2d(x, w)


class TestSoftmax:
    """softmax and the fused cross entropy"""

    def test_softmax_rows_sum_to_one(self, backend, rng):
        x = (rng.standard_normal((4, 6)) * 30).astype(np.float32)
        probs = kernels.softmax(from_numpy(x, backend=backend)).numpy()
        np.testing.assert_allclose(probs.sum(axis=1), np.ones(4), rtol=1e-5)

    def test_cross_entropy_matches_reference(self, backend, rng):
        x = rng.standard_normal((5, 3)).astype(np.float32)
        labels = np.array([0, 2, 1, 1, 0], dtype=np.int32)
        loss, probs = kernels.softmax_cross_entropy(from_numpy(x, backend=backend),
                                                    from_numpy(labels, backend=backend))
        shifted = x.astype(np.float64) - x.max(axis=1, keepdims=True)
        logp = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        assert loss.shape == ()
        assert loss.item() == pytest.approx(-logp[np.arange(5), labels].mean(), rel=1e-5)
        np.testing.assert_allclose(probs.numpy(), np.exp(logp), rtol=1e-5, atol=1e-7)

    def test_cross_entropy_is_stable_for_large_logits(self, backend):
        x = np.array([[1000.0, 0.0], [0.0, -1000.0]], dtype=np.float32)
        labels = np.array([0, 0], dtype=np.int32)
        loss, _ = kernels.softmax_cross_entropy(from_numpy(x, backend=backend), from_numpy(labels, backend=backend))
        assert np.isfinite(loss.item())
        assert loss.item() == pytest.approx(0.0, abs=1e-6)
