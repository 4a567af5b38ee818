"""
Tensor and archive error classes
"""

from typing import Optional, Sequence


class TensorError(Exception):
    """Base tensor error"""

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.name = self.__class__.__name__


class RaggedInputError(TensorError):
    """Nested input lists are not rectangular"""

    def __init__(self, path: Sequence[int], expected: int, actual: int) -> None:
        super().__init__(
            f"RaggedInput: sibling at index path {list(path)} has length {actual}, expected {expected}"
        )
        self.path = list(path)


class DTypeOverflowError(TensorError):
    """Value cannot be represented in the requested dtype"""

    def __init__(self, value: object, dtype: str) -> None:
        super().__init__(f"DTypeOverflow: {value!r} cannot be represented as {dtype}")
        self.value = value
        self.dtype = dtype


class DTypeMismatchError(TensorError):
    """Operands carry different dtypes"""

    def __init__(self, op: str, left: str, right: str) -> None:
        super().__init__(f"{op}: dtype mismatch {left} vs {right}")


class IndexOutOfBoundsError(TensorError):
    """Index selector outside [-extent, extent)"""

    def __init__(self, index: int, axis: int, extent: int) -> None:
        super().__init__(f"IndexOutOfBounds: index {index} on axis {axis} with extent {extent}")
        self.index = index
        self.axis = axis
        self.extent = extent


class ZeroStepError(TensorError):
    """Range selector with step 0"""

    def __init__(self, axis: int) -> None:
        super().__init__(f"ZeroStep: slice step cannot be zero (axis {axis})")
        self.axis = axis


class InvalidSliceError(TensorError):
    """Malformed slice specification"""

    def __init__(self, message: str) -> None:
        super().__init__(f"InvalidSlice: {message}")


class ShapeMismatchError(TensorError):
    """Operand shapes violate an operation contract"""

    def __init__(self, op: str, *shapes: Sequence[int], detail: Optional[str] = None) -> None:
        rendered = " vs ".join(str(list(s)) for s in shapes)
        message = f"ShapeMismatch in {op}: {rendered}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)
        self.op = op
        self.shapes = [tuple(s) for s in shapes]


class UseAfterReleaseError(TensorError):
    """Access to a buffer that was released"""

    def __init__(self, handle: int) -> None:
        super().__init__(f"UseAfterRelease: buffer {handle} has been released")
        self.handle = handle


class BackendMismatchError(TensorError):
    """Operands live on different backends"""

    def __init__(self, op: str, left: int, right: int) -> None:
        super().__init__(f"{op}: operands belong to backends {left} and {right}; use Tensor.to() first")


class ScopeError(TensorError):
    """tidy scopes exited out of order"""

    def __init__(self, message: str) -> None:
        super().__init__(f"ScopeError: {message}")


class ArchiveError(Exception):
    """Base tensor archive error"""

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.name = self.__class__.__name__


class DuplicateNameError(ArchiveError):
    """Archive entry names must be unique"""

    def __init__(self, entry: str) -> None:
        super().__init__(f"DuplicateName: archive already holds an entry named {entry!r}")
        self.entry = entry


class ArchiveDecodeError(ArchiveError):
    """Base class for every decode failure"""


class BadMagicError(ArchiveDecodeError):
    def __init__(self, found: bytes) -> None:
        super().__init__(f"BadMagic: expected b'DMLT', found {bytes(found)!r}")


class UnsupportedVersionError(ArchiveDecodeError):
    def __init__(self, version: int) -> None:
        super().__init__(f"UnsupportedVersion: archive version {version} (supported: 1)")
        self.version = version


class TruncatedInputError(ArchiveDecodeError):
    def __init__(self, offset: int, needed: int, available: int) -> None:
        super().__init__(
            f"TruncatedInput: need {needed} bytes at offset {offset}, only {available} available"
        )


class TrailingGarbageError(ArchiveDecodeError):
    def __init__(self, extra: int) -> None:
        super().__init__(f"TrailingGarbage: {extra} bytes after declared content")
        self.extra = extra


class InvalidDTypeError(ArchiveDecodeError):
    def __init__(self, code: int) -> None:
        super().__init__(f"InvalidDType: unknown dtype code {code}")
        self.code = code


class InvalidPayloadError(ArchiveDecodeError):
    def __init__(self, message: str) -> None:
        super().__init__(f"InvalidPayload: {message}")
