"""
Dense strided tensor.

A Tensor is (dtype, shape, strides, offset) over a backend-owned flat buffer.
Strides and offset are counted in elements. Slicing, transposition and
broadcasting produce views over the same buffer; kernels produce fresh
contiguous tensors.
"""

import math
from numbers import Number
from typing import Any, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .backend import Buffer, TrackedBackend, get_backend
from .tensor_types.dtype import DType
from .tensor_types.errors import (
    DTypeOverflowError,
    IndexOutOfBoundsError,
    InvalidSliceError,
    RaggedInputError,
    ShapeMismatchError,
    ZeroStepError,
)
from .tensor_types.slice_spec import Ellipsis_, Index, NewAxis, Range, SliceSpec, to_slice_spec

Shape = Tuple[int, ...]

_FLOAT32_MAX = float(np.finfo(np.float32).max)
_INT_RANGES = {
    DType.INT32: (-(2 ** 31), 2 ** 31 - 1),
    DType.UINT8: (0, 255),
    DType.BOOL: (0, 1),
}


def contiguous_strides(shape: Sequence[int]) -> Shape:
    strides = []
    acc = 1
    for extent in reversed(shape):
        strides.append(acc)
        acc *= extent
    return tuple(reversed(strides))


class Tensor:
    """n-dimensional view over a tracked buffer"""

    __slots__ = ("dtype", "shape", "strides", "offset", "buffer", "__weakref__")

    def __init__(self, buffer: Buffer, dtype: DType, shape: Sequence[int],
                 strides: Optional[Sequence[int]] = None, offset: int = 0):
        self.buffer = buffer
        self.dtype = dtype
        self.shape: Shape = tuple(int(s) for s in shape)
        self.strides: Shape = tuple(strides) if strides is not None else contiguous_strides(self.shape)
        self.offset = int(offset)

    # ------------------------------------------------------------------ metadata

    @property
    def backend(self) -> TrackedBackend:
        return self.buffer.backend

    @property
    def backend_id(self) -> int:
        return self.buffer.backend.backend_id

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    @property
    def nbytes(self) -> int:
        return self.size * self.dtype.itemsize

    @property
    def released(self) -> bool:
        return self.buffer.released

    def is_contiguous(self) -> bool:
        """Row-major layout, ignoring strides of extent-1 axes"""
        if self.size == 0:
            return True
        expected = contiguous_strides(self.shape)
        return all(n == 1 or s == e for n, s, e in zip(self.shape, self.strides, expected))

    # ------------------------------------------------------------------ data access

    def numpy(self) -> np.ndarray:
        """Read-only ndarray of the elements; zero-copy when the layout allows it"""
        data = self.buffer.data
        if self.size == 0:
            return np.zeros(self.shape, dtype=data.dtype)
        if self.is_contiguous():
            view = data[self.offset:self.offset + self.size].reshape(self.shape)
        elif all(s >= 0 for s in self.strides):
            itemsize = data.itemsize
            view = np.lib.stride_tricks.as_strided(
                data[self.offset:],
                shape=self.shape,
                strides=tuple(s * itemsize for s in self.strides),
                writeable=False,
            )
        else:
            view = data[self._element_indices()]
        view = view.view()
        view.flags.writeable = False
        return view

    def _element_indices(self) -> np.ndarray:
        index = np.full(self.shape, self.offset, dtype=np.int64)
        for axis, (extent, stride) in enumerate(zip(self.shape, self.strides)):
            steps = np.arange(extent, dtype=np.int64) * stride
            index = index + steps.reshape([extent if a == axis else 1 for a in range(self.ndim)])
        return index

    def item(self) -> Union[float, int, bool]:
        if self.size != 1:
            raise ShapeMismatchError("item", self.shape, detail="tensor must hold exactly one element")
        return self.numpy().reshape(-1)[0].item()

    def tolist(self) -> Any:
        return self.numpy().tolist()

    def iter_tensors(self) -> Iterator["Tensor"]:
        yield self

    # ------------------------------------------------------------------ views

    def slice(self, spec: Union[SliceSpec, Sequence[object]]) -> "Tensor":
        return slice_tensor(self, spec)

    def __getitem__(self, key) -> "Tensor":
        return slice_tensor(self, to_slice_spec(key))

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return kernels.reshape(self, shape)

    def transpose(self, *axes) -> "Tensor":
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return kernels.transpose(self, axes or None)

    @property
    def T(self) -> "Tensor":
        return kernels.transpose(self)

    def contiguous(self) -> "Tensor":
        return to_contiguous(self)

    # ------------------------------------------------------------------ lifecycle

    def to(self, backend: TrackedBackend) -> "Tensor":
        """Copy into another backend; returns self if already there"""
        if backend is self.backend:
            return self
        return from_numpy(np.array(self.numpy()), self.dtype, backend=backend)

    def astype(self, dtype: DType) -> "Tensor":
        if dtype is self.dtype:
            return self
        return from_numpy(self.numpy().astype(dtype.numpy_dtype), dtype, backend=self.backend)

    def dispose(self) -> None:
        """Release the underlying buffer now; every view over it becomes unusable"""
        self.backend.release(self.buffer)

    def _assign_(self, values: Union["Tensor", np.ndarray]) -> "Tensor":
        """
        In-place overwrite of a contiguous tensor's elements.

        Reserved for optimizer updates and weight restoration; everything else
        treats tensors as immutable.
        """
        if not self.is_contiguous():
            raise ShapeMismatchError("assign", self.shape, detail="in-place writes require a contiguous tensor")
        source = values.numpy() if isinstance(values, Tensor) else np.asarray(values)
        if tuple(source.shape) != self.shape:
            raise ShapeMismatchError("assign", self.shape, source.shape)
        data = self.buffer.data
        data[self.offset:self.offset + self.size] = source.astype(self.dtype.numpy_dtype, copy=False).reshape(-1)
        return self

    # ------------------------------------------------------------------ operators

    def __add__(self, other):
        return kernels.add(self, other)

    def __radd__(self, other):
        return kernels.add(other, self)

    def __sub__(self, other):
        return kernels.sub(self, other)

    def __rsub__(self, other):
        return kernels.sub(other, self)

    def __mul__(self, other):
        return kernels.mul(self, other)

    def __rmul__(self, other):
        return kernels.mul(other, self)

    def __truediv__(self, other):
        return kernels.div(self, other)

    def __rtruediv__(self, other):
        return kernels.div(other, self)

    def __neg__(self):
        return kernels.neg(self)

    def __matmul__(self, other):
        return kernels.matmul(self, other)

    def __len__(self) -> int:
        if not self.shape:
            raise TypeError("len() of a 0-d tensor")
        return self.shape[0]

    def __repr__(self) -> str:
        if self.buffer.released:
            return f"Tensor(<released>, dtype={self.dtype}, shape={list(self.shape)})"
        return f"Tensor({self.numpy().tolist()}, dtype={self.dtype}, shape={list(self.shape)})"


# ---------------------------------------------------------------------- creation

def from_numpy(array: Union[np.ndarray, Number], dtype: Optional[DType] = None,
               backend: Optional[TrackedBackend] = None) -> Tensor:
    """Copy an ndarray into a fresh contiguous tensor"""
    array = np.asarray(array)
    dtype = dtype or DType.from_numpy(array.dtype)
    backend = backend or get_backend()
    data = np.array(array, dtype=dtype.numpy_dtype, copy=True, order="C")
    return Tensor(backend.allocate(data), dtype, data.shape)


def zeros(shape: Sequence[int], dtype: DType = DType.FLOAT32, backend: Optional[TrackedBackend] = None) -> Tensor:
    return from_numpy(np.zeros(tuple(shape), dtype=dtype.numpy_dtype), dtype, backend)


def full(shape: Sequence[int], value: Number, dtype: DType = DType.FLOAT32,
         backend: Optional[TrackedBackend] = None) -> Tensor:
    return from_numpy(np.full(tuple(shape), value, dtype=dtype.numpy_dtype), dtype, backend)


def _infer_shape(data: Any, path: Tuple[int, ...] = ()) -> Shape:
    if not isinstance(data, (list, tuple)):
        return ()
    if len(data) == 0:
        return (0,)
    child_shapes = [_infer_shape(child, path + (i,)) for i, child in enumerate(data)]
    first = child_shapes[0]
    for i, child_shape in enumerate(child_shapes[1:], start=1):
        if child_shape != first:
            expected = first[0] if first else 0
            actual = child_shape[0] if child_shape else 0
            if first and child_shape and len(first) == len(child_shape) and first[0] == child_shape[0]:
                # mismatch is deeper; report the first differing axis
                axis = next(a for a in range(len(first)) if first[a] != child_shape[a])
                expected, actual = first[axis], child_shape[axis]
            raise RaggedInputError(path + (i,), expected, actual)
    return (len(data),) + first


def _flatten(data: Any) -> Iterator[Any]:
    if isinstance(data, (list, tuple)):
        for child in data:
            yield from _flatten(child)
    else:
        yield data


def _check_representable(value: Any, dtype: DType) -> Any:
    if isinstance(value, (np.generic,)):
        value = value.item()
    if not isinstance(value, (int, float, bool)):
        raise DTypeOverflowError(value, str(dtype))
    if dtype is DType.FLOAT32:
        # ints compare exactly; math.isfinite would overflow on them
        if (isinstance(value, int) or math.isfinite(value)) and abs(value) > _FLOAT32_MAX:
            raise DTypeOverflowError(value, str(dtype))
        return float(value)
    if isinstance(value, float) and (not math.isfinite(value) or not value.is_integer()):
        raise DTypeOverflowError(value, str(dtype))
    low, high = _INT_RANGES[dtype]
    if not low <= int(value) <= high:
        raise DTypeOverflowError(value, str(dtype))
    return bool(value) if dtype is DType.BOOL else int(value)


def tensor_from_nested(data: Any, dtype: DType = DType.FLOAT32,
                       backend: Optional[TrackedBackend] = None) -> Tensor:
    """
    Build a contiguous tensor from nested lists.

    Raises:
        RaggedInputError: siblings of different lengths
        DTypeOverflowError: a value the dtype cannot hold (never wrapped)
    """
    shape = _infer_shape(data)
    values = [_check_representable(v, dtype) for v in _flatten(data)]
    array = np.array(values, dtype=dtype.numpy_dtype).reshape(shape)
    return from_numpy(array, dtype, backend)


tensor = tensor_from_nested


# ---------------------------------------------------------------------- slicing

def slice_tensor(t: Tensor, spec: Union[SliceSpec, Sequence[object]]) -> Tensor:
    """View selection with Range/Index/NewAxis/Ellipsis selectors; never copies"""
    spec = to_slice_spec(tuple(spec))
    ellipses = sum(isinstance(s, Ellipsis_) for s in spec)
    if ellipses > 1:
        raise InvalidSliceError("at most one Ellipsis is allowed")
    consumed = sum(isinstance(s, (Range, Index)) for s in spec)
    if consumed > t.ndim:
        raise InvalidSliceError(f"{consumed} axis selectors for a rank-{t.ndim} tensor")

    fill = (Range(),) * (t.ndim - consumed)
    if ellipses:
        at = next(i for i, s in enumerate(spec) if isinstance(s, Ellipsis_))
        spec = spec[:at] + fill + spec[at + 1:]
    else:
        spec = spec + fill

    shape: List[int] = []
    strides: List[int] = []
    offset = t.offset
    axis = 0
    for selector in spec:
        if isinstance(selector, NewAxis):
            shape.append(1)
            strides.append(0)
            continue
        extent, stride = t.shape[axis], t.strides[axis]
        if isinstance(selector, Index):
            i = selector.i
            if not -extent <= i < extent:
                raise IndexOutOfBoundsError(i, axis, extent)
            offset += (i + extent if i < 0 else i) * stride
        else:
            if selector.step == 0:
                raise ZeroStepError(axis)
            start, stop, step = slice(selector.start, selector.stop, selector.step).indices(extent)
            length = len(range(start, stop, step))
            if length:
                offset += start * stride
            shape.append(length)
            strides.append(stride * step)
        axis += 1
    return Tensor(t.buffer, t.dtype, shape, strides, offset)


def to_contiguous(t: Tensor) -> Tensor:
    """Return `t` itself when row-major with offset 0, else a materialized copy"""
    if t.offset == 0 and t.is_contiguous():
        return t
    return from_numpy(np.array(t.numpy()), t.dtype, backend=t.backend)


from . import kernels  # noqa: E402
