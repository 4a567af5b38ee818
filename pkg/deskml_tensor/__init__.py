"""
deskml-tensor - dense strided tensors on a tracked-allocation backend.

Main Components:
- Tensor: strided view over a backend-owned buffer, with Python slicing syntax
- TrackedBackend / tidy: live-buffer accounting with scoped release
- kernels: elementwise, reduction, matmul and convolution kernels
- archive: bit-exact TensorArchive encoding (the .dmlt format)
"""

from . import kernels
from .archive import TensorArchive, decode, encode, encoded_size, load_archive, save_archive
from .backend import (
    Buffer,
    TrackedBackend,
    TrackedScope,
    get_backend,
    get_default_backend,
    reset_backend,
    set_backend,
    tidy,
    tidy_sync,
    use_backend,
)
from .tensor import Tensor, from_numpy, full, slice_tensor, tensor, tensor_from_nested, to_contiguous, zeros
from .tensor_types import *  # noqa: F401,F403
from .tensor_types import __all__ as _types_all

__all__ = [
    "kernels",
    # Archive
    "TensorArchive",
    "encode",
    "decode",
    "encoded_size",
    "save_archive",
    "load_archive",
    # Backend
    "Buffer",
    "TrackedBackend",
    "TrackedScope",
    "get_backend",
    "get_default_backend",
    "set_backend",
    "reset_backend",
    "use_backend",
    "tidy",
    "tidy_sync",
    # Tensor
    "Tensor",
    "tensor",
    "tensor_from_nested",
    "from_numpy",
    "zeros",
    "full",
    "slice_tensor",
    "to_contiguous",
] + list(_types_all)
