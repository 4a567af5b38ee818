#!/usr/bin/env python3
"""Test cases for Tensor construction, views and slicing"""

import math
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
import sys
sys.path.insert(0, str(project_root))

from deskml_tensor import (
    DType,
    DTypeOverflowError,
    IndexOutOfBoundsError,
    Index,
    InvalidSliceError,
    NewAxis,
    Range,
    RaggedInputError,
    ShapeMismatchError,
    ZeroStepError,
    from_numpy,
    full,
    slice_tensor,
    tensor_from_nested,
    to_contiguous,
    use_backend,
    zeros,
)


def random_key(rng: np.random.Generator, shape):
    """A random valid indexing key for an array of `shape`"""
    items = []
    axis = 0
    used_ellipsis = False
    while axis < len(shape):
        choice = rng.integers(0, 10)
        if choice == 0:
            items.append(None)
            continue
        if choice == 1 and not used_ellipsis:
            used_ellipsis = True
            skip = int(rng.integers(0, len(shape) - axis + 1))
            items.append(Ellipsis)
            axis += skip
            continue
        if choice < 4 and shape[axis] > 0:
            items.append(int(rng.integers(-shape[axis], shape[axis])))
        else:
            def bound():
                return None if rng.random() < 0.3 else int(rng.integers(-7, 8))
            step = None if rng.random() < 0.3 else int(rng.choice([-3, -2, -1, 1, 2, 3]))
            items.append(slice(bound(), bound(), step))
        axis += 1
        # after an Ellipsis every remaining axis must be named so the fill matches `skip`
        if not used_ellipsis and rng.random() < 0.25:
            break
    if rng.random() < 0.1:
        items.append(None)
    return tuple(items)


class TestConstruction:
    """Nested-list and ndarray construction"""

    def test_nested_float(self, backend):
        t = tensor_from_nested([[1.0, 2.0], [3.0, 4.5]], backend=backend)
        assert t.shape == (2, 2)
        assert t.dtype is DType.FLOAT32
        assert t.tolist() == [[1.0, 2.0], [3.0, 4.5]]
        assert t.is_contiguous()

    def test_nested_scalar_and_empty(self, backend):
        scalar = tensor_from_nested(7, DType.INT32, backend=backend)
        assert scalar.shape == ()
        assert scalar.item() == 7
        empty = tensor_from_nested([], backend=backend)
        assert empty.shape == (0,)
        assert empty.size == 0

    def test_ragged_input(self, backend):
        with pytest.raises(RaggedInputError) as exc_info:
            tensor_from_nested([[1, 2], [3]], backend=backend)
        assert exc_info.value.path == [1]

    def test_ragged_deeper_axis(self, backend):
        with pytest.raises(RaggedInputError):
            tensor_from_nested([[[1, 2], [3, 4]], [[5, 6], [7]]], backend=backend)

    @pytest.mark.parametrize("values,dtype", [
        ([256], DType.UINT8),
        ([-1], DType.UINT8),
        ([2 ** 31], DType.INT32),
        ([1.5], DType.INT32),
        ([2], DType.BOOL),
        ([1e39], DType.FLOAT32),
        ([10 ** 400], DType.FLOAT32),
        ([-(10 ** 400)], DType.FLOAT32),
    ])
    def test_overflow_is_rejected(self, backend, values, dtype):
        with pytest.raises(DTypeOverflowError):
            tensor_from_nested(values, dtype, backend=backend)

    def test_float_infinity_is_representable(self, backend):
        t = tensor_from_nested([math.inf, -math.inf], backend=backend)
        assert t.tolist() == [math.inf, -math.inf]

    def test_zeros_and_full(self, backend):
        assert zeros((2, 3), backend=backend).numpy().sum() == 0
        t = full((3,), 2, DType.INT32, backend=backend)
        assert t.tolist() == [2, 2, 2]
        assert t.dtype is DType.INT32

    def test_numpy_is_read_only(self, backend):
        t = from_numpy(np.arange(6, dtype=np.float32).reshape(2, 3), backend=backend)
        with pytest.raises(ValueError):
            t.numpy()[0, 0] = 5.0

    def test_from_numpy_copies(self, backend):
        source = np.arange(4, dtype=np.int32)
        t = from_numpy(source, backend=backend)
        source[0] = 99
        assert t.tolist() == [0, 1, 2, 3]

    def test_default_backend_binding(self, backend):
        with use_backend(backend):
            t = zeros((2,))
        assert t.backend is backend

    def test_item_requires_single_element(self, backend):
        with pytest.raises(ShapeMismatchError):
            zeros((2,), backend=backend).item()


class TestSlicing:
    """Views produced by slice specifications"""

    def test_basic_views_share_buffer(self, backend):
        data = np.arange(24, dtype=np.float32).reshape(2, 3, 4)
        t = from_numpy(data, backend=backend)
        view = t[1, :, ::2]
        assert view.buffer is t.buffer
        assert view.shape == (3, 2)
        np.testing.assert_array_equal(view.numpy(), data[1, :, ::2])

    def test_selector_objects(self, backend):
        data = np.arange(12, dtype=np.int32).reshape(3, 4)
        t = from_numpy(data, backend=backend)
        view = slice_tensor(t, (Range(None, None, -1), NewAxis(), Index(-1)))
        np.testing.assert_array_equal(view.numpy(), data[::-1, None, -1])

    def test_index_out_of_bounds(self, backend):
        t = zeros((3, 2), backend=backend)
        with pytest.raises(IndexOutOfBoundsError) as exc_info:
            t[3]
        assert exc_info.value.axis == 0
        with pytest.raises(IndexOutOfBoundsError):
            t[:, -3]

    def test_zero_step(self, backend):
        with pytest.raises(ZeroStepError):
            zeros((4,), backend=backend)[::0]

    @pytest.mark.parametrize("key", [
        (Ellipsis, 0, Ellipsis),
        (0, 0, 0),
        True,
        "a",
    ])
    def test_invalid_keys(self, backend, key):
        with pytest.raises(InvalidSliceError):
            zeros((2, 2), backend=backend)[key]

    def test_empty_ranges(self, backend):
        t = from_numpy(np.arange(5, dtype=np.float32), backend=backend)
        assert t[3:1].shape == (0,)
        assert t[10:].shape == (0,)
        assert t[3:1].numpy().shape == (0,)

    def test_random_views_match_gather(self, backend):
        """Materialized slices equal numpy's gather, including views of views"""
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 1200:
            ndim = int(rng.integers(0, 5))
            shape = tuple(int(s) for s in rng.integers(0, 6, size=ndim))
            data = rng.standard_normal(shape).astype(np.float32) if ndim else np.float32(rng.standard_normal())
            data = np.asarray(data)
            t = from_numpy(data, backend=backend)

            key = random_key(rng, shape)
            view = t[key]
            expected = data[key]
            np.testing.assert_array_equal(view.numpy(), expected)
            assert view.shape == np.shape(expected)
            assert view.buffer is t.buffer

            if view.ndim:
                inner_key = random_key(rng, view.shape)
                np.testing.assert_array_equal(view[inner_key].numpy(), np.asarray(expected)[inner_key])
            t.dispose()
            checked += 1

    def test_contiguous_copy_of_strided_view(self, backend):
        data = np.arange(20, dtype=np.float32).reshape(4, 5)
        t = from_numpy(data, backend=backend)
        view = t[::-2, 1:4]
        dense = to_contiguous(view)
        assert dense.buffer is not t.buffer
        assert dense.is_contiguous()
        assert dense.offset == 0
        np.testing.assert_array_equal(dense.numpy(), data[::-2, 1:4])
        assert to_contiguous(t) is t


class TestShapeViews:
    """reshape and transpose"""

    def test_reshape_contiguous_is_view(self, backend):
        t = from_numpy(np.arange(6, dtype=np.float32), backend=backend)
        r = t.reshape(2, -1)
        assert r.shape == (2, 3)
        assert r.buffer is t.buffer

    def test_reshape_strided_copies(self, backend):
        data = np.arange(12, dtype=np.float32).reshape(3, 4)
        t = from_numpy(data, backend=backend)
        r = t.T.reshape(-1)
        assert r.buffer is not t.buffer
        np.testing.assert_array_equal(r.numpy(), data.T.reshape(-1))

    def test_reshape_rejects_bad_shapes(self, backend):
        t = zeros((6,), backend=backend)
        with pytest.raises(ShapeMismatchError):
            t.reshape(4, -1)
        with pytest.raises(ShapeMismatchError):
            t.reshape(-1, -1)

    def test_transpose(self, backend):
        data = np.arange(24, dtype=np.int32).reshape(2, 3, 4)
        t = from_numpy(data, backend=backend)
        np.testing.assert_array_equal(t.transpose(2, 0, 1).numpy(), data.transpose(2, 0, 1))
        np.testing.assert_array_equal(t.T.numpy(), data.T)
        with pytest.raises(ShapeMismatchError):
            t.transpose(0, 0, 1)

    def test_astype_and_to(self, backend):
        from deskml_tensor import TrackedBackend

        t = from_numpy(np.array([1.0, 2.0], dtype=np.float32), backend=backend)
        as_int = t.astype(DType.INT32)
        assert as_int.dtype is DType.INT32
        assert as_int.tolist() == [1, 2]
        assert t.astype(DType.FLOAT32) is t

        other = TrackedBackend("other")
        moved = t.to(other)
        assert moved.backend is other
        assert moved.tolist() == [1.0, 2.0]
        assert t.to(backend) is t
