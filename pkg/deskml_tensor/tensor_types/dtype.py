"""Element types supported by deskml tensors"""

from enum import Enum

import numpy as np


class DType(Enum):
    """Tensor element type; value is the archive dtype code"""
    FLOAT32 = 0
    INT32 = 1
    UINT8 = 2
    BOOL = 3

    @property
    def itemsize(self) -> int:
        return _ITEMSIZE[self]

    @property
    def numpy_dtype(self) -> np.dtype:
        """Little-endian numpy dtype used for storage and the wire"""
        return _NUMPY[self]

    @property
    def code(self) -> int:
        return self.value

    @classmethod
    def from_code(cls, code: int) -> "DType":
        return cls(code)

    @classmethod
    def from_numpy(cls, dtype: np.dtype) -> "DType":
        kind = np.dtype(dtype)
        for member, np_dtype in _NUMPY.items():
            if kind == np_dtype or kind == np_dtype.newbyteorder("="):
                return member
        raise TypeError(f"unsupported numpy dtype: {kind}")

    def __str__(self) -> str:
        return self.name.lower()


_ITEMSIZE = {
    DType.FLOAT32: 4,
    DType.INT32: 4,
    DType.UINT8: 1,
    DType.BOOL: 1,
}

_NUMPY = {
    DType.FLOAT32: np.dtype("<f4"),
    DType.INT32: np.dtype("<i4"),
    DType.UINT8: np.dtype("u1"),
    DType.BOOL: np.dtype("?"),
}

float32 = DType.FLOAT32
int32 = DType.INT32
uint8 = DType.UINT8
bool_ = DType.BOOL
