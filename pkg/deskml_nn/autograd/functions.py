"""
Differentiable operation suite.

Each op is a FunctionNode subclass plus a lower-case helper that instantiates
and calls it. Backward passes are built from the same deterministic kernels
as the forward passes.
"""

import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from deskml_tensor import Tensor, from_numpy, kernels
from deskml_tensor.tensor_types import DType, ShapeMismatchError

from ..nn_types.errors import LabelOutOfRangeError
from .function import FunctionNode
from .variable import Variable, VariableLike

Axis = Optional[Union[int, Sequence[int]]]


# ---------------------------------------------------------------------- arithmetic

class Add(FunctionNode):
    op_kind = "add"

    def forward(self, a: Tensor, b: Tensor) -> Tensor:
        self.shapes = (a.shape, b.shape)
        return kernels.add(a, b)

    def backward(self, gy: Tensor):
        return kernels.sum_to(gy, self.shapes[0]), kernels.sum_to(gy, self.shapes[1])


class Sub(FunctionNode):
    op_kind = "sub"

    def forward(self, a: Tensor, b: Tensor) -> Tensor:
        self.shapes = (a.shape, b.shape)
        return kernels.sub(a, b)

    def backward(self, gy: Tensor):
        return kernels.sum_to(gy, self.shapes[0]), kernels.sum_to(kernels.neg(gy), self.shapes[1])


class Mul(FunctionNode):
    op_kind = "mul"

    def forward(self, a: Tensor, b: Tensor) -> Tensor:
        self.save_for_backward(a, b)
        return kernels.mul(a, b)

    def backward(self, gy: Tensor):
        a, b = self.saved
        return kernels.sum_to(kernels.mul(gy, b), a.shape), kernels.sum_to(kernels.mul(gy, a), b.shape)


class Neg(FunctionNode):
    op_kind = "neg"

    def forward(self, x: Tensor) -> Tensor:
        return kernels.neg(x)

    def backward(self, gy: Tensor):
        return (kernels.neg(gy),)


class MatMul(FunctionNode):
    op_kind = "matmul"

    def forward(self, a: Tensor, b: Tensor) -> Tensor:
        self.save_for_backward(a, b)
        return kernels.matmul(a, b)

    def backward(self, gy: Tensor):
        a, b = self.saved
        return kernels.matmul(gy, b.T), kernels.matmul(a.T, gy)


class ReLU(FunctionNode):
    op_kind = "relu"

    def forward(self, x: Tensor) -> Tensor:
        self.save_for_backward(kernels.positive_mask(x))
        return kernels.relu(x)

    def backward(self, gy: Tensor):
        (mask,) = self.saved
        return (kernels.mul(gy, mask),)


# ---------------------------------------------------------------------- shape

class Reshape(FunctionNode):
    op_kind = "reshape"

    def __init__(self, shape: Sequence[int]):
        super().__init__()
        self.shape = tuple(shape)

    def forward(self, x: Tensor) -> Tensor:
        self.in_shape = x.shape
        return kernels.reshape(x, self.shape)

    def backward(self, gy: Tensor):
        return (kernels.reshape(gy, self.in_shape),)


class Transpose(FunctionNode):
    op_kind = "transpose"

    def __init__(self, axes: Optional[Sequence[int]] = None):
        super().__init__()
        self.axes = tuple(axes) if axes is not None else None

    def forward(self, x: Tensor) -> Tensor:
        if self.axes is None:
            self.perm = tuple(reversed(range(x.ndim)))
        else:
            self.perm = tuple(a % x.ndim for a in self.axes)
        return kernels.transpose(x, self.perm)

    def backward(self, gy: Tensor):
        inverse = tuple(int(i) for i in np.argsort(self.perm))
        return (kernels.transpose(gy, inverse),)


# ---------------------------------------------------------------------- reductions

def _keepdims_shape(shape: Tuple[int, ...], axis: Axis) -> Tuple[int, ...]:
    if axis is None:
        return (1,) * len(shape)
    axes = {a % len(shape) for a in ((axis,) if isinstance(axis, int) else axis)}
    return tuple(1 if i in axes else n for i, n in enumerate(shape))


class Sum(FunctionNode):
    op_kind = "sum"

    def __init__(self, axis: Axis = None, keepdims: bool = False):
        super().__init__()
        self.axis = axis
        self.keepdims = keepdims

    def forward(self, x: Tensor) -> Tensor:
        self.in_shape = x.shape
        return kernels.sum(x, self.axis, self.keepdims)

    def backward(self, gy: Tensor):
        gy = kernels.reshape(gy, _keepdims_shape(self.in_shape, self.axis))
        return (kernels.broadcast_to(gy, self.in_shape),)


class Mean(FunctionNode):
    op_kind = "mean"

    def __init__(self, axis: Axis = None, keepdims: bool = False):
        super().__init__()
        self.axis = axis
        self.keepdims = keepdims

    def forward(self, x: Tensor) -> Tensor:
        self.in_shape = x.shape
        if self.axis is None:
            self.count = x.size or 1
        else:
            axes = (self.axis,) if isinstance(self.axis, int) else self.axis
            self.count = math.prod(x.shape[a] for a in axes) or 1
        return kernels.mean(x, self.axis, self.keepdims)

    def backward(self, gy: Tensor):
        gy = kernels.reshape(gy, _keepdims_shape(self.in_shape, self.axis))
        scaled = kernels.mul(gy, np.float32(1.0) / np.float32(self.count))
        return (kernels.broadcast_to(scaled, self.in_shape),)


# ---------------------------------------------------------------------- layers

class Linear(FunctionNode):
    """y = x·Wᵀ + b with x [B,in], W [out,in], b [out]"""

    op_kind = "linear"

    def forward(self, x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
        if x.ndim != 2 or weight.ndim != 2 or x.shape[1] != weight.shape[1]:
            raise ShapeMismatchError("linear", x.shape, weight.shape)
        if bias is not None and bias.shape != (weight.shape[0],):
            raise ShapeMismatchError("linear", weight.shape, bias.shape, detail="bias must be [out]")
        self.save_for_backward(x, weight)
        y = kernels.matmul(x, weight.T)
        return kernels.add(y, bias) if bias is not None else y

    def backward(self, gy: Tensor):
        x, weight = self.saved
        gx = kernels.matmul(gy, weight)
        gw = kernels.matmul(gy.T, x)
        if len(self.inputs) == 3:
            return gx, gw, kernels.sum(gy, axis=0)
        return gx, gw


class Conv2d(FunctionNode):
    """Cross-correlation lowered to one matmul over the im2col patch matrix"""

    op_kind = "conv2d"

    def __init__(self, stride: int = 1, padding: int = 0):
        super().__init__()
        self.stride = stride
        self.padding = padding

    def forward(self, x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
        y = kernels.conv2d(x, weight, bias, self.stride, self.padding)
        _, _, kh, kw = weight.shape
        self.x_shape = x.shape
        self.save_for_backward(kernels.im2col(x, kh, kw, self.stride, self.padding), weight)
        return y

    def backward(self, gy: Tensor):
        cols, weight = self.saved
        o, c, kh, kw = weight.shape
        gy_mat = kernels.reshape(kernels.transpose(gy, (0, 2, 3, 1)), (-1, o))
        w_mat = kernels.reshape(weight, (o, c * kh * kw))
        gw = kernels.reshape(kernels.matmul(gy_mat.T, cols), weight.shape)
        gcols = kernels.matmul(gy_mat, w_mat)
        gx = kernels.col2im(gcols, self.x_shape, kh, kw, self.stride, self.padding)
        if len(self.inputs) == 3:
            return gx, gw, kernels.sum(gy, axis=(0, 2, 3))
        return gx, gw


# ---------------------------------------------------------------------- loss

class SoftmaxCrossEntropy(FunctionNode):
    """Batch-mean cross entropy; labels are an integer tensor and receive no gradient"""

    op_kind = "softmax_cross_entropy"

    def forward(self, logits: Tensor, labels: Tensor) -> Tensor:
        if logits.ndim != 2 or labels.shape != (logits.shape[0],):
            raise ShapeMismatchError("softmax_cross_entropy", logits.shape, labels.shape)
        if labels.dtype not in (DType.INT32, DType.UINT8):
            raise TypeError(f"labels must be an integer tensor, got {labels.dtype}")
        classes = logits.shape[1]
        label_values = labels.numpy()
        bad = (label_values < 0) | (label_values >= classes)
        if bad.any():
            raise LabelOutOfRangeError(int(label_values[bad][0]), classes)
        loss, probs = kernels.softmax_cross_entropy(logits, labels)
        self.save_for_backward(probs, labels)
        return loss

    def backward(self, gy: Tensor):
        probs, labels = self.saved
        batch, classes = probs.shape
        onehot = np.zeros((batch, classes), dtype=np.float32)
        onehot[np.arange(batch), labels.numpy().astype(np.int64)] = 1.0
        diff = (probs.numpy() - onehot) / np.float32(batch or 1)
        scale = np.float32(gy.item())
        return from_numpy(diff * scale, DType.FLOAT32, backend=probs.backend), None


# ---------------------------------------------------------------------- helpers

def add(a: VariableLike, b: VariableLike) -> Variable:
    return Add()(a, b)


def sub(a: VariableLike, b: VariableLike) -> Variable:
    return Sub()(a, b)


def mul(a: VariableLike, b: VariableLike) -> Variable:
    return Mul()(a, b)


def neg(x: VariableLike) -> Variable:
    return Neg()(x)


def matmul(a: VariableLike, b: VariableLike) -> Variable:
    return MatMul()(a, b)


def relu(x: VariableLike) -> Variable:
    return ReLU()(x)


def reshape(x: VariableLike, shape: Sequence[int]) -> Variable:
    return Reshape(shape)(x)


def transpose(x: VariableLike, axes: Optional[Sequence[int]] = None) -> Variable:
    return Transpose(axes)(x)


def flatten(x: VariableLike) -> Variable:
    """[B, ...] -> [B, prod(...)]"""
    batch = x.shape[0]
    return Reshape((batch, -1))(x)


def sum(x: VariableLike, axis: Axis = None, keepdims: bool = False) -> Variable:  # noqa: A001
    return Sum(axis, keepdims)(x)


def mean(x: VariableLike, axis: Axis = None, keepdims: bool = False) -> Variable:
    return Mean(axis, keepdims)(x)


def linear(x: VariableLike, weight: VariableLike, bias: Optional[VariableLike] = None) -> Variable:
    if bias is None:
        return Linear()(x, weight)
    return Linear()(x, weight, bias)


def conv2d(x: VariableLike, weight: VariableLike, bias: Optional[VariableLike] = None,
           stride: int = 1, padding: int = 0) -> Variable:
    node = Conv2d(stride, padding)
    if bias is None:
        return node(x, weight)
    return node(x, weight, bias)


def softmax_cross_entropy(logits: VariableLike, labels: Union[Tensor, Variable]) -> Variable:
    return SoftmaxCrossEntropy()(logits, labels)
