from .dtype import DType, float32, int32, uint8, bool_
from .slice_spec import Range, Index, NewAxis, Ellipsis_, Selector, SliceSpec, to_slice_spec
from .errors import (
    TensorError,
    RaggedInputError,
    DTypeOverflowError,
    DTypeMismatchError,
    IndexOutOfBoundsError,
    ZeroStepError,
    InvalidSliceError,
    ShapeMismatchError,
    UseAfterReleaseError,
    BackendMismatchError,
    ScopeError,
    ArchiveError,
    DuplicateNameError,
    ArchiveDecodeError,
    BadMagicError,
    UnsupportedVersionError,
    TruncatedInputError,
    TrailingGarbageError,
    InvalidDTypeError,
    InvalidPayloadError,
)

__all__ = [
    # Types
    "DType",
    "float32",
    "int32",
    "uint8",
    "bool_",
    "Range",
    "Index",
    "NewAxis",
    "Ellipsis_",
    "Selector",
    "SliceSpec",
    "to_slice_spec",
    # Errors
    "TensorError",
    "RaggedInputError",
    "DTypeOverflowError",
    "DTypeMismatchError",
    "IndexOutOfBoundsError",
    "ZeroStepError",
    "InvalidSliceError",
    "ShapeMismatchError",
    "UseAfterReleaseError",
    "BackendMismatchError",
    "ScopeError",
    "ArchiveError",
    "DuplicateNameError",
    "ArchiveDecodeError",
    "BadMagicError",
    "UnsupportedVersionError",
    "TruncatedInputError",
    "TrailingGarbageError",
    "InvalidDTypeError",
    "InvalidPayloadError",
]
