"""
Length-prefixed frames.

    length u32 LE | tag u8 | body

length counts the tag byte plus the body, so it is never zero.
"""

import asyncio
import struct
import time
from dataclasses import dataclass, field
from typing import Optional, Union

from deskml_common import get_settings

from .dist_types import ConnectionClosedError, FrameTooLargeError, MalformedMessageError

LENGTH_PREFIX = struct.Struct("<I")
TAG = struct.Struct("<B")
PREFIX_SIZE = LENGTH_PREFIX.size


@dataclass(frozen=True)
class Frame:
    tag: int
    body: bytes
    received_at: float = field(default=0.0, compare=False)

    @property
    def wire_size(self) -> int:
        return PREFIX_SIZE + 1 + len(self.body)


def encode_frame(tag: int, body: Union[bytes, bytearray, memoryview]) -> bytes:
    if not 0 <= tag <= 255:
        raise ValueError(f"tag {tag} does not fit in u8")
    return LENGTH_PREFIX.pack(len(body) + 1) + TAG.pack(tag) + bytes(body)


def _check_length(length: int, max_frame_bytes: int) -> None:
    if length == 0:
        raise MalformedMessageError("zero-length frame has no tag")
    if length > max_frame_bytes:
        raise FrameTooLargeError(length, max_frame_bytes)


def parse_frame(data: Union[bytes, bytearray, memoryview], max_frame_bytes: Optional[int] = None) -> Frame:
    """Decode exactly one frame from a complete buffer"""
    max_frame_bytes = max_frame_bytes or get_settings().max_frame_bytes
    data = bytes(data)
    if len(data) < PREFIX_SIZE:
        raise MalformedMessageError(f"frame prefix needs {PREFIX_SIZE} bytes, got {len(data)}")
    (length,) = LENGTH_PREFIX.unpack_from(data)
    _check_length(length, max_frame_bytes)
    if len(data) - PREFIX_SIZE < length:
        raise MalformedMessageError(f"frame declares {length} bytes, {len(data) - PREFIX_SIZE} present")
    if len(data) - PREFIX_SIZE > length:
        raise MalformedMessageError(f"{len(data) - PREFIX_SIZE - length} bytes after the frame")
    return Frame(tag=data[PREFIX_SIZE], body=data[PREFIX_SIZE + 1:])


async def read_frame(reader: asyncio.StreamReader, max_frame_bytes: Optional[int] = None,
                     peer: str = "peer") -> Frame:
    """
    Read one frame. received_at is the perf_counter time the length prefix arrived.

    Raises:
        ConnectionClosedError: EOF before or inside a frame
        FrameTooLargeError, MalformedMessageError
    """
    max_frame_bytes = max_frame_bytes or get_settings().max_frame_bytes
    try:
        prefix = await reader.readexactly(PREFIX_SIZE)
    except asyncio.IncompleteReadError as e:
        raise ConnectionClosedError(peer, len(e.partial)) from None
    received_at = time.perf_counter()
    (length,) = LENGTH_PREFIX.unpack(prefix)
    _check_length(length, max_frame_bytes)
    try:
        payload = await reader.readexactly(length)
    except asyncio.IncompleteReadError as e:
        raise ConnectionClosedError(peer, PREFIX_SIZE + len(e.partial)) from None
    return Frame(tag=payload[0], body=payload[1:], received_at=received_at)
