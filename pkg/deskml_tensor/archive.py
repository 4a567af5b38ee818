"""
Tensor archive: an ordered name -> tensor collection with a bit-exact binary form.

Layout (little-endian, no padding, no checksum):

    "DMLT" | version u32 = 1 | count u32
    per entry: name_len u32 | name (UTF-8) | dtype u8 | ndim u8 | shape ndim x u32 | payload

The same bytes are used on the wire and for .dmlt files on disk.
"""

import math
import struct
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np

from .backend import TrackedBackend
from .tensor import Tensor, from_numpy, to_contiguous
from .tensor_types.dtype import DType
from .tensor_types.errors import (
    BadMagicError,
    DuplicateNameError,
    InvalidDTypeError,
    InvalidPayloadError,
    TrailingGarbageError,
    TruncatedInputError,
    UnsupportedVersionError,
)

MAGIC = b"DMLT"
ARCHIVE_VERSION = 1
HEADER_SIZE = 12
MAX_NDIM = 255

_HEADER = struct.Struct("<4sII")
_U32 = struct.Struct("<I")
_ENTRY_META = struct.Struct("<BB")


class TensorArchive:
    """Ordered, uniquely named collection of tensors"""

    def __init__(self, entries: Optional[Iterable[Tuple[str, Tensor]]] = None):
        self._entries: Dict[str, Tensor] = {}
        for name, t in entries or ():
            self.add(name, t)

    def add(self, name: str, t: Tensor) -> "TensorArchive":
        if name in self._entries:
            raise DuplicateNameError(name)
        if t.ndim > MAX_NDIM:
            raise ValueError(f"tensor {name!r} has {t.ndim} dimensions, at most {MAX_NDIM} are encodable")
        self._entries[name] = t
        return self

    def __getitem__(self, name: str) -> Tensor:
        return self._entries[name]

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def names(self) -> List[str]:
        return list(self._entries)

    def items(self) -> List[Tuple[str, Tensor]]:
        return list(self._entries.items())

    def iter_tensors(self) -> Iterator[Tensor]:
        yield from self._entries.values()

    def encoded_size(self) -> int:
        return encoded_size((name, t.dtype, t.shape) for name, t in self._entries.items())

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}: {t.dtype}{list(t.shape)}" for n, t in self._entries.items())
        return f"TensorArchive({inner})"


def encoded_size(entries: Iterable[Tuple[str, DType, Tuple[int, ...]]]) -> int:
    """12 + sum(6 + name_len + 4*ndim + itemsize*numel)"""
    total = HEADER_SIZE
    for name, dtype, shape in entries:
        total += 6 + len(name.encode("utf-8")) + 4 * len(shape) + dtype.itemsize * math.prod(shape)
    return total


def encode(archive: TensorArchive) -> bytes:
    parts = [_HEADER.pack(MAGIC, ARCHIVE_VERSION, len(archive))]
    for name, t in archive.items():
        raw_name = name.encode("utf-8")
        dense = to_contiguous(t)
        parts.append(_U32.pack(len(raw_name)))
        parts.append(raw_name)
        parts.append(_ENTRY_META.pack(t.dtype.code, t.ndim))
        parts.append(struct.pack(f"<{t.ndim}I", *t.shape))
        parts.append(np.ascontiguousarray(dense.numpy(), dtype=t.dtype.numpy_dtype).tobytes())
    return b"".join(parts)


class _Reader:
    """Bounds-checked cursor; never reads past the input"""

    def __init__(self, data: Union[bytes, bytearray, memoryview]):
        self.view = memoryview(data).cast("B")
        self.pos = 0

    @property
    def remaining(self) -> int:
        return len(self.view) - self.pos

    def take(self, n: int) -> memoryview:
        if n > self.remaining:
            raise TruncatedInputError(self.pos, n, self.remaining)
        chunk = self.view[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return _U32.unpack(self.take(4))[0]


def decode(data: Union[bytes, bytearray, memoryview], backend: Optional[TrackedBackend] = None) -> TensorArchive:
    """
    Inverse of encode.

    Raises:
        BadMagicError, UnsupportedVersionError, TruncatedInputError,
        TrailingGarbageError, InvalidDTypeError, InvalidPayloadError
    """
    reader = _Reader(data)
    head = bytes(reader.view[:4])
    if head != MAGIC[:len(head)]:
        raise BadMagicError(head)
    magic, version, count = _HEADER.unpack(reader.take(HEADER_SIZE))
    if version != ARCHIVE_VERSION:
        raise UnsupportedVersionError(version)

    archive = TensorArchive()
    try:
        for _ in range(count):
            _read_entry(reader, archive, backend)
        if reader.remaining:
            raise TrailingGarbageError(reader.remaining)
    except Exception:
        for t in archive.iter_tensors():
            t.dispose()
        raise
    return archive


def _read_entry(reader: _Reader, archive: TensorArchive, backend: Optional[TrackedBackend]) -> None:
    name_len = reader.u32()
    try:
        name = bytes(reader.take(name_len)).decode("utf-8")
    except UnicodeDecodeError as e:
        raise InvalidPayloadError(f"entry name is not valid UTF-8 ({e.reason})") from None
    dtype_code, ndim = _ENTRY_META.unpack(reader.take(2))
    try:
        dtype = DType.from_code(dtype_code)
    except ValueError:
        raise InvalidDTypeError(dtype_code) from None
    shape = struct.unpack(f"<{ndim}I", reader.take(4 * ndim))
    payload = reader.take(dtype.itemsize * math.prod(shape))
    raw = np.frombuffer(payload, dtype=np.uint8)
    if dtype is DType.BOOL and raw.size and raw.max() > 1:
        raise InvalidPayloadError(f"bool entry {name!r} holds bytes other than 0 and 1")
    try:
        values = raw.view(dtype.numpy_dtype).reshape(shape)
    except ValueError as e:
        raise InvalidPayloadError(f"entry {name!r} with shape {list(shape)} is not representable ({e})") from None
    if name in archive:
        raise InvalidPayloadError(f"duplicate entry name {name!r}")
    archive.add(name, from_numpy(values, dtype, backend=backend))


def save_archive(archive: TensorArchive, path: Union[str, Path]) -> int:
    """Write a .dmlt file; returns the number of bytes written"""
    data = encode(archive)
    Path(path).write_bytes(data)
    return len(data)


def load_archive(path: Union[str, Path], backend: Optional[TrackedBackend] = None) -> TensorArchive:
    return decode(Path(path).read_bytes(), backend=backend)
