"""
Numeric kernels over Tensors.

All reductions and the matmul inner product accumulate in ascending index order
(numpy's add.accumulate is strictly sequential), so results are bit-reproducible
and match a naive loop written in the same order. Outputs are fresh contiguous
tensors on the first operand's backend unless documented as views.
"""

import math
from numbers import Number
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .backend import TrackedBackend
from .tensor import Tensor, contiguous_strides, from_numpy
from .tensor_types.dtype import DType
from .tensor_types.errors import BackendMismatchError, DTypeMismatchError, ShapeMismatchError

Operand = Union[Tensor, Number]
Axis = Optional[Union[int, Sequence[int]]]


# ---------------------------------------------------------------------- helpers

def _backend_of(op: str, *operands: Operand) -> TrackedBackend:
    backend = None
    for operand in operands:
        if isinstance(operand, Tensor):
            if backend is None:
                backend = operand.backend
            elif operand.backend is not backend:
                raise BackendMismatchError(op, backend.backend_id, operand.backend_id)
    return backend


def _wrap(array: np.ndarray, dtype: DType, backend: TrackedBackend) -> Tensor:
    return from_numpy(array, dtype, backend=backend)


def _normalize_axes(axis: Axis, ndim: int) -> Tuple[int, ...]:
    if axis is None:
        return tuple(range(ndim))
    axes = (axis,) if isinstance(axis, int) else tuple(axis)
    normalized = []
    for a in axes:
        if not -ndim <= a < ndim:
            raise ShapeMismatchError("reduce", (ndim,), detail=f"axis {a} out of range")
        normalized.append(a % ndim)
    return tuple(sorted(set(normalized)))


def ordered_sum(array: np.ndarray, axes: Tuple[int, ...], keepdims: bool = False) -> np.ndarray:
    """Sum over `axes` accumulating in ascending flat order of the reduced sub-index"""
    if array.dtype == np.bool_:
        array = array.astype(np.int32)
    kept = [a for a in range(array.ndim) if a not in axes]
    moved = np.transpose(array, kept + list(axes))
    out_shape = tuple(array.shape[a] for a in kept)
    count = math.prod(array.shape[a] for a in axes)
    flat = moved.reshape(out_shape + (count,))
    if count == 0:
        result = np.zeros(out_shape, dtype=array.dtype)
    else:
        result = np.add.accumulate(flat, axis=-1, dtype=array.dtype)[..., -1]
    if keepdims:
        result = result.reshape(tuple(1 if a in axes else n for a, n in enumerate(array.shape)))
    return np.asarray(result)


# ---------------------------------------------------------------------- elementwise

def _binary(op: str, a: Operand, b: Operand, fn) -> Tensor:
    backend = _backend_of(op, a, b)
    if backend is None:
        raise TypeError(f"{op} needs at least one Tensor operand")
    left = a if isinstance(a, Tensor) else None
    right = b if isinstance(b, Tensor) else None
    dtype = (left if left is not None else right).dtype
    if left is not None and right is not None and left.dtype is not right.dtype:
        raise DTypeMismatchError(op, str(left.dtype), str(right.dtype))
    x = left.numpy() if left is not None else np.asarray(a, dtype=dtype.numpy_dtype)
    y = right.numpy() if right is not None else np.asarray(b, dtype=dtype.numpy_dtype)
    try:
        shape = np.broadcast_shapes(x.shape, y.shape)
    except ValueError:
        raise ShapeMismatchError(op, x.shape, y.shape, detail="not broadcastable") from None
    result = fn(x, y)
    return _wrap(np.asarray(result, dtype=dtype.numpy_dtype).reshape(shape), dtype, backend)


def add(a: Operand, b: Operand) -> Tensor:
    return _binary("add", a, b, np.add)


def sub(a: Operand, b: Operand) -> Tensor:
    return _binary("sub", a, b, np.subtract)


def mul(a: Operand, b: Operand) -> Tensor:
    return _binary("mul", a, b, np.multiply)


def div(a: Operand, b: Operand) -> Tensor:
    def true_div(x, y):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.true_divide(x, y)
    return _binary("div", a, b, true_div)


def maximum(a: Operand, b: Operand) -> Tensor:
    return _binary("maximum", a, b, np.maximum)


def _unary(t: Tensor, fn) -> Tensor:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        result = fn(t.numpy())
    return _wrap(np.asarray(result, dtype=t.dtype.numpy_dtype), t.dtype, t.backend)


def neg(t: Tensor) -> Tensor:
    return _unary(t, np.negative)


def exp(t: Tensor) -> Tensor:
    return _unary(t, np.exp)


def log(t: Tensor) -> Tensor:
    return _unary(t, np.log)


def relu(t: Tensor) -> Tensor:
    zero = t.dtype.numpy_dtype.type(0)
    return _unary(t, lambda x: np.where(x > zero, x, zero))


def positive_mask(t: Tensor) -> Tensor:
    """1 where t > 0 else 0, same dtype; relu's subgradient with 0 at 0"""
    return _unary(t, lambda x: (x > 0).astype(t.dtype.numpy_dtype))


# ---------------------------------------------------------------------- reductions

def sum(t: Tensor, axis: Axis = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    axes = _normalize_axes(axis, t.ndim)
    dtype = DType.INT32 if t.dtype is DType.BOOL else t.dtype
    return _wrap(ordered_sum(t.numpy(), axes, keepdims), dtype, t.backend)


def mean(t: Tensor, axis: Axis = None, keepdims: bool = False) -> Tensor:
    axes = _normalize_axes(axis, t.ndim)
    count = math.prod(t.shape[a] for a in axes)
    total = ordered_sum(t.numpy(), axes, keepdims)
    scale = np.float32(1.0) / np.float32(count or 1)
    return _wrap(total.astype(np.float32) * scale, DType.FLOAT32, t.backend)


def max(t: Tensor, axis: Axis = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    axes = _normalize_axes(axis, t.ndim)
    if any(t.shape[a] == 0 for a in axes):
        raise ShapeMismatchError("max", t.shape, detail="reduction over an empty axis")
    return _wrap(np.max(t.numpy(), axis=axes, keepdims=keepdims), t.dtype, t.backend)


def argmax(t: Tensor, axis: int = -1) -> Tensor:
    axes = _normalize_axes(axis, t.ndim)
    return _wrap(np.argmax(t.numpy(), axis=axes[0]).astype(np.int32), DType.INT32, t.backend)


# ---------------------------------------------------------------------- shape ops

def reshape(t: Tensor, shape: Sequence[int]) -> Tensor:
    """View when `t` is contiguous; otherwise a contiguous copy"""
    shape = list(shape)
    if shape.count(-1) > 1:
        raise ShapeMismatchError("reshape", t.shape, shape, detail="at most one -1")
    if -1 in shape:
        known = math.prod(s for s in shape if s != -1)
        if known == 0 or t.size % known:
            raise ShapeMismatchError("reshape", t.shape, shape)
        shape[shape.index(-1)] = t.size // known
    if math.prod(shape) != t.size:
        raise ShapeMismatchError("reshape", t.shape, shape)
    if t.is_contiguous():
        return Tensor(t.buffer, t.dtype, shape, contiguous_strides(shape), t.offset)
    return _wrap(np.array(t.numpy()).reshape(shape), t.dtype, t.backend)


def transpose(t: Tensor, axes: Optional[Sequence[int]] = None) -> Tensor:
    """Axis permutation as a view (reverses axes by default)"""
    axes = tuple(reversed(range(t.ndim))) if axes is None else tuple(a % t.ndim for a in axes)
    if sorted(axes) != list(range(t.ndim)):
        raise ShapeMismatchError("transpose", t.shape, detail=f"invalid permutation {axes}")
    return Tensor(t.buffer, t.dtype,
                  [t.shape[a] for a in axes],
                  [t.strides[a] for a in axes],
                  t.offset)


def broadcast_to(t: Tensor, shape: Sequence[int]) -> Tensor:
    """Stride-0 view of `t` expanded to `shape`"""
    shape = tuple(shape)
    if len(shape) < t.ndim:
        raise ShapeMismatchError("broadcast_to", t.shape, shape)
    lead = len(shape) - t.ndim
    strides = [0] * lead
    for i, (extent, stride) in enumerate(zip(t.shape, t.strides)):
        target = shape[lead + i]
        if extent == target:
            strides.append(stride)
        elif extent == 1:
            strides.append(0)
        else:
            raise ShapeMismatchError("broadcast_to", t.shape, shape)
    return Tensor(t.buffer, t.dtype, shape, strides, t.offset)


def sum_to(t: Tensor, shape: Sequence[int]) -> Tensor:
    """Reduce a broadcast result back to `shape` (inverse of broadcasting)"""
    shape = tuple(shape)
    if t.shape == shape:
        return t
    lead = t.ndim - len(shape)
    if lead < 0:
        raise ShapeMismatchError("sum_to", t.shape, shape)
    axes = tuple(range(lead)) + tuple(
        lead + i for i, extent in enumerate(shape) if extent == 1 and t.shape[lead + i] != 1
    )
    reduced = ordered_sum(t.numpy(), axes, keepdims=True)
    return _wrap(reduced.reshape(shape), t.dtype, t.backend)


# ---------------------------------------------------------------------- matmul

def ordered_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """[M,K]·[K,N] with the inner product accumulated k = 0, 1, ..., K-1"""
    m, k = a.shape
    n = b.shape[1]
    out = np.zeros((m, n), dtype=a.dtype)
    for i in range(k):
        out += a[:, i:i + 1] * b[i:i + 1, :]
    return out


def matmul(a: Tensor, b: Tensor) -> Tensor:
    backend = _backend_of("matmul", a, b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeMismatchError("matmul", a.shape, b.shape)
    if a.dtype is not DType.FLOAT32 or b.dtype is not DType.FLOAT32:
        raise DTypeMismatchError("matmul", str(a.dtype), str(b.dtype))
    return _wrap(ordered_matmul(np.ascontiguousarray(a.numpy()), np.ascontiguousarray(b.numpy())),
                 DType.FLOAT32, backend)


# ---------------------------------------------------------------------- convolution

def conv_output_size(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size + 2 * padding - kernel) // stride + 1


def _check_conv(x_shape, w_shape, stride: int, padding: int):
    if len(x_shape) != 4 or len(w_shape) != 4 or x_shape[1] != w_shape[1]:
        raise ShapeMismatchError("conv2d", x_shape, w_shape)
    if stride < 1 or padding < 0:
        raise ShapeMismatchError("conv2d", x_shape, w_shape, detail=f"stride={stride} padding={padding}")
    _, _, h, w = x_shape
    _, _, kh, kw = w_shape
    if h + 2 * padding < kh or w + 2 * padding < kw:
        raise ShapeMismatchError("conv2d", x_shape, w_shape, detail="kernel larger than padded input")


def _im2col_array(x: np.ndarray, kh: int, kw: int, stride: int, padding: int) -> np.ndarray:
    b, c, h, w = x.shape
    oh = conv_output_size(h, kh, stride, padding)
    ow = conv_output_size(w, kw, stride, padding)
    xp = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    cols = np.empty((b, c, kh, kw, oh, ow), dtype=x.dtype)
    for i in range(kh):
        for j in range(kw):
            cols[:, :, i, j, :, :] = xp[:, :, i:i + stride * oh:stride, j:j + stride * ow:stride]
    return cols.transpose(0, 4, 5, 1, 2, 3).reshape(b * oh * ow, c * kh * kw)


def im2col(x: Tensor, kh: int, kw: int, stride: int = 1, padding: int = 0) -> Tensor:
    """[B,C,H,W] -> [B*OH*OW, C*kh*kw] patch matrix"""
    return _wrap(_im2col_array(x.numpy(), kh, kw, stride, padding), x.dtype, x.backend)


def col2im(cols: Tensor, x_shape: Sequence[int], kh: int, kw: int, stride: int = 1, padding: int = 0) -> Tensor:
    """Adjoint of im2col; overlapping patches are summed in (i, j) ascending order"""
    b, c, h, w = x_shape
    oh = conv_output_size(h, kh, stride, padding)
    ow = conv_output_size(w, kw, stride, padding)
    patches = cols.numpy().reshape(b, oh, ow, c, kh, kw).transpose(0, 3, 4, 5, 1, 2)
    xp = np.zeros((b, c, h + 2 * padding, w + 2 * padding), dtype=patches.dtype)
    for i in range(kh):
        for j in range(kw):
            xp[:, :, i:i + stride * oh:stride, j:j + stride * ow:stride] += patches[:, :, i, j, :, :]
    return _wrap(xp[:, :, padding:padding + h, padding:padding + w], cols.dtype, cols.backend)


def conv2d(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None, stride: int = 1, padding: int = 0) -> Tensor:
    """Cross-correlation, [B,C,H,W] * [O,C,kh,kw] -> [B,O,OH,OW]"""
    _backend_of("conv2d", x, weight, bias)
    _check_conv(x.shape, weight.shape, stride, padding)
    b, _, h, w = x.shape
    o, c, kh, kw = weight.shape
    oh = conv_output_size(h, kh, stride, padding)
    ow = conv_output_size(w, kw, stride, padding)
    cols = _im2col_array(x.numpy(), kh, kw, stride, padding)
    wmat = np.ascontiguousarray(weight.numpy().reshape(o, c * kh * kw).T)
    out = ordered_matmul(cols, wmat)
    if bias is not None:
        out = out + bias.numpy().reshape(1, o)
    out = out.reshape(b, oh, ow, o).transpose(0, 3, 1, 2)
    return _wrap(out, DType.FLOAT32, x.backend)


# ---------------------------------------------------------------------- losses

def softmax(t: Tensor, axis: int = -1) -> Tensor:
    x = t.numpy()
    z = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(z)
    axes = _normalize_axes(axis, t.ndim)
    return _wrap(e / ordered_sum(e, axes, keepdims=True), DType.FLOAT32, t.backend)


def softmax_cross_entropy(logits: Tensor, labels: Tensor) -> Tuple[Tensor, Tensor]:
    """
    Batch-mean cross entropy of integer labels under softmax(logits).

    Returns:
        (scalar loss tensor of shape [], softmax probabilities [B, C])
    """
    _backend_of("softmax_cross_entropy", logits, labels)
    x = logits.numpy()
    batch = x.shape[0]
    z = x - np.max(x, axis=1, keepdims=True)
    e = np.exp(z)
    denom = ordered_sum(e, (1,), keepdims=True)
    log_denom = np.log(denom)
    picked = z[np.arange(batch), labels.numpy().astype(np.int64)].reshape(batch, 1)
    per_sample = (log_denom - picked).reshape(batch)
    total = ordered_sum(per_sample, (0,))
    loss = np.asarray(total / np.float32(batch or 1), dtype=np.float32)
    probs = e / denom
    return _wrap(loss, DType.FLOAT32, logits.backend), _wrap(probs, DType.FLOAT32, logits.backend)
