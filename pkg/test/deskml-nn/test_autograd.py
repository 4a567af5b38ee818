#!/usr/bin/env python3
"""Test cases for graph recording and the backward sweep"""

from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
import sys
sys.path.insert(0, str(project_root))

from deskml_nn import LabelOutOfRangeError, NonScalarLossError, Variable, functions as F, no_grad
from deskml_nn.autograd import backward, is_grad_enabled
from deskml_tensor import DType, from_numpy, use_backend


def leaf(values, requires_grad=True) -> Variable:
    return Variable(from_numpy(np.asarray(values, dtype=np.float32)), requires_grad=requires_grad)


class TestGraphRecording:
    """What a forward pass records"""

    def test_creator_and_generation(self, backend):
        with use_backend(backend):
            x = leaf([1.0, 2.0])
            y = F.mul(x, x)
            z = F.sum(y)
        assert x.is_leaf
        assert y.creator.op_kind == "mul"
        assert z.generation == y.generation + 1
        assert z.requires_grad

    def test_constants_record_nothing(self, backend):
        with use_backend(backend):
            x = leaf([1.0, 2.0], requires_grad=False)
            y = F.add(x, 1.0)
        assert y.creator is None
        assert not y.requires_grad

    def test_no_grad(self, backend):
        with use_backend(backend):
            x = leaf([1.0, 2.0])
            with no_grad():
                assert not is_grad_enabled()
                y = F.relu(x)
            assert is_grad_enabled()
        assert y.creator is None

    def test_operator_sugar(self, backend):
        with use_backend(backend):
            x = leaf([[1.0, 2.0]])
            ones = from_numpy(np.ones((2, 1), dtype=np.float32))
            y = -(x * 2 + 1 - x) @ ones
            backward(F.sum(y))
        assert y.shape == (1, 1)
        assert y.item() == -5.0
        assert x.grad.tolist() == [[-1.0, -1.0]]


class TestBackward:
    """Reverse-mode sweep semantics"""

    @pytest.mark.asyncio
    async def test_square(self, backend):
        with use_backend(backend):
            x = leaf([1.0, -2.0, 3.0])
            await F.sum(F.mul(x, x)).backward()
        np.testing.assert_array_equal(x.grad.numpy(), [2.0, -4.0, 6.0])

    @pytest.mark.asyncio
    async def test_fan_out_accumulates(self, backend):
        with use_backend(backend):
            x = leaf([1.0, 2.0])
            a = F.mul(x, 2.0)
            await F.sum(F.mul(a, a)).backward()
        np.testing.assert_allclose(x.grad.numpy(), [8.0, 16.0])

    @pytest.mark.asyncio
    async def test_diamond(self, backend):
        with use_backend(backend):
            x = leaf([0.5, -1.0])
            b = F.add(x, 1.0)
            c = F.mul(x, 3.0)
            await F.sum(F.mul(b, c)).backward()
        np.testing.assert_allclose(x.grad.numpy(), 6 * np.array([0.5, -1.0]) + 3)

    @pytest.mark.asyncio
    async def test_broadcast_operand_gradient(self, backend):
        with use_backend(backend):
            x = leaf(np.ones((3, 2)))
            b = leaf([1.0, 2.0])
            await F.sum(F.mul(x, b)).backward()
        np.testing.assert_array_equal(b.grad.numpy(), [3.0, 3.0])
        np.testing.assert_array_equal(x.grad.numpy(), [[1.0, 2.0]] * 3)

    @pytest.mark.asyncio
    async def test_non_leaf_gradients_dropped_unless_retained(self, backend):
        with use_backend(backend):
            x = leaf([1.0, 2.0])
            hidden = F.mul(x, 3.0)
            kept = F.mul(x, 2.0).retain_grad()
            await F.sum(F.add(hidden, kept)).backward()
        assert hidden.grad is None
        np.testing.assert_array_equal(kept.grad.numpy(), [1.0, 1.0])

    @pytest.mark.asyncio
    async def test_leaf_gradients_accumulate_across_calls(self, backend):
        with use_backend(backend):
            x = leaf([1.0])
            await F.sum(F.mul(x, 2.0)).backward()
            await F.sum(F.mul(x, 2.0)).backward()
        assert x.grad.tolist() == [4.0]

    def test_non_scalar_loss(self, backend):
        with use_backend(backend):
            x = leaf([1.0, 2.0])
            with pytest.raises(NonScalarLossError):
                backward(F.mul(x, 2.0))

    def test_deep_chain_has_no_recursion_limit(self, backend):
        with use_backend(backend):
            x = leaf([1.0])
            y = x
            for _ in range(3000):
                y = F.add(y, 1.0)
            backward(F.sum(y))
        assert x.grad.tolist() == [1.0]

    def test_untracked_inputs_get_no_gradient(self, backend):
        with use_backend(backend):
            x = leaf([1.0, 2.0])
            c = leaf([3.0, 4.0], requires_grad=False)
            backward(F.sum(F.mul(x, c)))
        assert c.grad is None
        assert x.grad.tolist() == [3.0, 4.0]


class TestLoss:
    """softmax cross entropy contract"""

    def test_label_out_of_range(self, backend):
        with use_backend(backend):
            logits = leaf(np.zeros((2, 3)))
            labels = from_numpy(np.array([0, 3], dtype=np.int32))
            with pytest.raises(LabelOutOfRangeError) as exc_info:
                F.softmax_cross_entropy(logits, labels)
        assert exc_info.value.label == 3

    def test_uniform_logits(self, backend):
        with use_backend(backend):
            logits = leaf(np.zeros((4, 5)))
            labels = from_numpy(np.array([0, 1, 2, 3], dtype=np.int32))
            loss = F.softmax_cross_entropy(logits, labels)
            backward(loss)
        assert loss.item() == pytest.approx(np.log(5), rel=1e-6)
        grad = logits.grad.numpy()
        np.testing.assert_allclose(grad.sum(axis=1), np.zeros(4), atol=1e-7)
        assert grad[0, 0] == pytest.approx((0.2 - 1.0) / 4, rel=1e-5)

    def test_float_labels_rejected(self, backend):
        with use_backend(backend):
            logits = leaf(np.zeros((2, 2)))
            labels = from_numpy(np.zeros(2, dtype=np.float32), DType.FLOAT32)
            with pytest.raises(TypeError):
                F.softmax_cross_entropy(logits, labels)
