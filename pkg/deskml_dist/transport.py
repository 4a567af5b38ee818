"""
Transports carry frames between the coordinator and one worker.

StreamTransport wraps an asyncio stream pair (TCP). MemoryTransport pairs
live in one event loop and feed each other's StreamReader directly, so the
same frame reader serves both. ThrottledTransport paces an inner transport
through a LinkLimiter; several throttled transports may share one limiter to
model a single access point.
"""

import asyncio
import math
import time
from abc import ABC, abstractmethod
from typing import Awaitable, Callable, Optional, Tuple

from deskml_common import get_logger, get_settings

from .framing import Frame, read_frame
from .protocol import Message, decode_message, encode_message

logger = get_logger("deskml_dist.transport", enable_file_logging=False)

CHUNK_BYTES = 64 * 1024
IDLE_GAP_S = 0.01


class BaseTransport(ABC):
    """Base class for transports

    Counts bytes in each direction. recv_message() returns the decoded
    message together with the frame it came from.
    """

    def __init__(self, peer: str, max_frame_bytes: Optional[int] = None):
        self.peer = peer
        self.max_frame_bytes = max_frame_bytes or get_settings().max_frame_bytes
        self.bytes_sent = 0
        self.bytes_received = 0

    @property
    @abstractmethod
    def name(self) -> str:
        """Transport kind"""
        pass

    @abstractmethod
    async def send_bytes(self, data: bytes) -> None:
        """Write already-framed bytes"""
        pass

    @abstractmethod
    async def recv_frame(self) -> Frame:
        """Read one frame"""
        pass

    @abstractmethod
    async def close(self) -> None:
        pass

    async def send(self, message: Message) -> int:
        data = encode_message(message)
        await self.send_bytes(data)
        return len(data)

    async def recv(self) -> Tuple[Message, Frame]:
        frame = await self.recv_frame()
        return decode_message(frame), frame

    async def recv_message(self) -> Message:
        message, _ = await self.recv()
        return message

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(peer={self.peer!r}, sent={self.bytes_sent}, received={self.bytes_received})"


class StreamTransport(BaseTransport):
    def __init__(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter,
                 peer: Optional[str] = None, max_frame_bytes: Optional[int] = None):
        if peer is None:
            address = writer.get_extra_info("peername")
            peer = f"{address[0]}:{address[1]}" if isinstance(address, tuple) else str(address)
        super().__init__(peer, max_frame_bytes)
        self.reader = reader
        self.writer = writer

    @property
    def name(self) -> str:
        return "stream"

    async def send_bytes(self, data: bytes) -> None:
        self.writer.write(data)
        await self.writer.drain()
        self.bytes_sent += len(data)

    async def recv_frame(self) -> Frame:
        frame = await read_frame(self.reader, self.max_frame_bytes, self.peer)
        self.bytes_received += frame.wire_size
        return frame

    async def close(self) -> None:
        if self.writer.is_closing():
            return
        self.writer.close()
        try:
            await self.writer.wait_closed()
        except (ConnectionError, OSError):
            pass


class MemoryTransport(BaseTransport):
    """One end of an in-process pipe; build pairs with memory_pipe()"""

    def __init__(self, peer: str, max_frame_bytes: Optional[int] = None):
        super().__init__(peer, max_frame_bytes)
        self.reader = asyncio.StreamReader()
        self.other: Optional["MemoryTransport"] = None
        self.closed = False

    @property
    def name(self) -> str:
        return "memory"

    async def send_bytes(self, data: bytes) -> None:
        if self.closed or self.other is None or self.other.closed:
            raise ConnectionResetError(f"memory pipe to {self.peer} is closed")
        self.other.reader.feed_data(data)
        self.bytes_sent += len(data)
        await asyncio.sleep(0)

    async def recv_frame(self) -> Frame:
        frame = await read_frame(self.reader, self.max_frame_bytes, self.peer)
        self.bytes_received += frame.wire_size
        return frame

    async def close(self) -> None:
        if self.closed:
            return
        self.closed = True
        if self.other is not None and not self.other.reader.at_eof():
            self.other.reader.feed_eof()
        if not self.reader.at_eof():
            self.reader.feed_eof()


def memory_pipe(left: str = "coordinator", right: str = "worker",
                max_frame_bytes: Optional[int] = None) -> Tuple[MemoryTransport, MemoryTransport]:
    """Connected (left-end, right-end); each end's peer is the other side's name"""
    a = MemoryTransport(peer=right, max_frame_bytes=max_frame_bytes)
    b = MemoryTransport(peer=left, max_frame_bytes=max_frame_bytes)
    a.other, b.other = b, a
    return a, b


class LinkLimiter:
    """
    Serializing bandwidth budget of cap bits/sec.

    Every reservation is placed after the previous one on a virtual timeline, so
    concurrent users of one limiter split the cap between them. Sleeping past
    the timeline while busy is credited to the next reservation; only a gap of
    more than idle_gap_s (or one reservation's wire time) restarts it at now.
    """

    def __init__(self, cap_bps: float, idle_gap_s: float = IDLE_GAP_S,
                 clock: Callable[[], float] = time.perf_counter,
                 sleep: Callable[[float], Awaitable[None]] = asyncio.sleep):
        if not cap_bps > 0:
            raise ValueError(f"bandwidth cap must be positive, got {cap_bps}")
        self.cap_bps = float(cap_bps)
        self.idle_gap_s = idle_gap_s
        self._clock = clock
        self._sleep = sleep
        self._next_free: Optional[float] = None
        self.bytes_total = 0

    async def reserve(self, nbytes: int) -> None:
        now = self._clock()
        wire_s = nbytes * 8.0 / self.cap_bps
        if self._next_free is None or now - self._next_free > max(wire_s, self.idle_gap_s):
            self._next_free = now
        self._next_free += wire_s
        self.bytes_total += nbytes
        delay = self._next_free - now
        if delay > 0:
            await self._sleep(delay)


SharedLink = LinkLimiter


class ThrottledTransport(BaseTransport):
    """
    Paces an inner transport to at most cap bits/sec.

    Outgoing frames are released in chunks through the limiter. Incoming frames
    are delivered only once the limiter has accounted for their size, which
    delays them as if they had crossed the capped link.
    """

    def __init__(self, inner: BaseTransport, limiter: LinkLimiter, chunk_bytes: int = CHUNK_BYTES):
        super().__init__(inner.peer, inner.max_frame_bytes)
        self.inner = inner
        self.limiter = limiter
        self.chunk_bytes = chunk_bytes

    @property
    def name(self) -> str:
        return f"throttled({self.inner.name})"

    async def _pace(self, nbytes: int) -> None:
        for start in range(0, nbytes, self.chunk_bytes):
            await self.limiter.reserve(min(self.chunk_bytes, nbytes - start))

    async def send_bytes(self, data: bytes) -> None:
        view = memoryview(data)
        for start in range(0, len(data), self.chunk_bytes):
            chunk = view[start:start + self.chunk_bytes]
            await self.limiter.reserve(len(chunk))
            await self.inner.send_bytes(bytes(chunk))
        self.bytes_sent += len(data)

    async def recv_frame(self) -> Frame:
        frame = await self.inner.recv_frame()
        await self._pace(frame.wire_size)
        self.bytes_received += frame.wire_size
        return frame

    async def close(self) -> None:
        await self.inner.close()


def throttle(transport: BaseTransport, cap_bps: Optional[float],
             link: Optional[LinkLimiter] = None) -> BaseTransport:
    """
    Wrap `transport` with a bandwidth cap.

    A None or infinite cap returns the transport unchanged. When `link` is
    given the transport draws from that shared budget instead of its own.
    """
    if link is None:
        if cap_bps is None or math.isinf(cap_bps):
            return transport
        link = LinkLimiter(cap_bps)
    return ThrottledTransport(transport, link)
