"""
Tracked-allocation backend.

Every tensor buffer is registered with the backend that allocated it and with the
innermost active scope at allocation time. Leaving a scope releases whatever it
owns except the retained set, which moves to the enclosing scope. Released buffers
refuse further access, so a missing `tidy` return shows up as an error instead of
silently reading freed memory.
"""

import inspect
import itertools
import threading
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from typing import Any, Awaitable, Callable, Dict, Iterable, Iterator, Optional, Set, Tuple, TypeVar, Union

import numpy as np

from deskml_common.deskml_logging import get_logger

from .tensor_types.errors import ScopeError, UseAfterReleaseError

logger = get_logger("deskml_tensor.backend", enable_file_logging=False)

T = TypeVar("T")

_backend_ids = itertools.count(1)


@dataclass(eq=False)
class TrackedScope:
    """Allocation scope; live_set holds buffer handles owned by this scope"""
    scope_id: int
    live_set: Set[int] = field(default_factory=set)


class Buffer:
    """Flat storage owned by a backend"""

    __slots__ = ("handle", "backend", "scope", "_data", "released")

    def __init__(self, handle: int, backend: "TrackedBackend", scope: TrackedScope, data: np.ndarray):
        self.handle = handle
        self.backend = backend
        self.scope = scope
        self._data = data
        self.released = False

    @property
    def data(self) -> np.ndarray:
        if self.released:
            raise UseAfterReleaseError(self.handle)
        return self._data

    @property
    def size(self) -> int:
        return 0 if self.released else int(self._data.size)

    def __repr__(self) -> str:
        state = "released" if self.released else f"size={self._data.size}"
        return f"Buffer(handle={self.handle}, backend={self.backend.backend_id}, {state})"


class TrackedBackend:
    """Host-memory backend that counts live buffers and owns tidy scopes"""

    def __init__(self, name: str = "tracked"):
        self.backend_id = next(_backend_ids)
        self.name = name
        self._lock = threading.Lock()
        self._handles = itertools.count(1)
        self._scope_ids = itertools.count(1)
        self._buffers: Dict[int, Buffer] = {}
        self.root_scope = TrackedScope(scope_id=0)
        self._stack: ContextVar[Tuple[TrackedScope, ...]] = ContextVar(
            f"deskml_scope_stack_{self.backend_id}", default=()
        )

    @property
    def live_count(self) -> int:
        return len(self._buffers)

    @property
    def live_bytes(self) -> int:
        with self._lock:
            return sum(b.data.nbytes for b in self._buffers.values())

    def is_live(self, buffer: Buffer) -> bool:
        return self._buffers.get(buffer.handle) is buffer

    def current_scope(self) -> TrackedScope:
        stack = self._stack.get()
        return stack[-1] if stack else self.root_scope

    def scope_depth(self) -> int:
        return len(self._stack.get())

    def allocate(self, data: np.ndarray) -> Buffer:
        """Take ownership of a flat array and register it in the innermost scope"""
        flat = np.ascontiguousarray(data).reshape(-1)
        scope = self.current_scope()
        with self._lock:
            handle = next(self._handles)
            buffer = Buffer(handle, self, scope, flat)
            self._buffers[handle] = buffer
            scope.live_set.add(handle)
        return buffer

    def release(self, buffer: Buffer) -> None:
        """Explicit release; releasing twice is a no-op"""
        if buffer.backend is not self:
            raise ValueError(f"buffer {buffer.handle} belongs to backend {buffer.backend.backend_id}")
        with self._lock:
            self._release_locked(buffer)

    def _release_locked(self, buffer: Buffer) -> None:
        if buffer.released:
            return
        buffer.scope.live_set.discard(buffer.handle)
        self._buffers.pop(buffer.handle, None)
        buffer.released = True
        buffer._data = None

    def enter_scope(self) -> TrackedScope:
        scope = TrackedScope(scope_id=next(self._scope_ids))
        self._stack.set(self._stack.get() + (scope,))
        return scope

    def exit_scope(self, scope: TrackedScope, retained: Iterable[Buffer] = ()) -> int:
        """Pop `scope`, move retained buffers to the enclosing scope, release the rest"""
        stack = self._stack.get()
        if not stack or stack[-1] is not scope:
            raise ScopeError(f"scope {scope.scope_id} is not the innermost active scope")
        self._stack.set(stack[:-1])
        enclosing = stack[-2] if len(stack) > 1 else self.root_scope

        keep = {b.handle for b in retained if b.backend is self and b.scope is scope and not b.released}
        released = 0
        with self._lock:
            for handle in sorted(scope.live_set):
                buffer = self._buffers[handle]
                if handle in keep:
                    buffer.scope = enclosing
                    enclosing.live_set.add(handle)
                else:
                    buffer.scope.live_set.discard(handle)
                    self._buffers.pop(handle, None)
                    buffer.released = True
                    buffer._data = None
                    released += 1
            scope.live_set.clear()

        logger.debug("scope exit", scope=scope.scope_id, released=released, retained=len(keep),
                     live=self.live_count)
        return released

    def __repr__(self) -> str:
        return f"TrackedBackend(id={self.backend_id}, name={self.name!r}, live={self.live_count})"


_default_backend = TrackedBackend("default")
_current_backend: ContextVar[Optional[TrackedBackend]] = ContextVar("deskml_current_backend", default=None)


def get_backend() -> TrackedBackend:
    """Backend used for new tensors in the current execution context"""
    return _current_backend.get() or _default_backend


def get_default_backend() -> TrackedBackend:
    return _default_backend


def set_backend(backend: TrackedBackend):
    """Bind `backend` to the current context; returns a token for `reset_backend`"""
    return _current_backend.set(backend)


def reset_backend(token) -> None:
    _current_backend.reset(token)


@contextmanager
def use_backend(backend: TrackedBackend) -> Iterator[TrackedBackend]:
    token = set_backend(backend)
    try:
        yield backend
    finally:
        reset_backend(token)


def iter_retained_buffers(value: Any) -> Iterator[Buffer]:
    """Walk a tidy return value; anything exposing iter_tensors() contributes its buffers"""
    if value is None or isinstance(value, (str, bytes, bytearray, int, float, bool)):
        return
    iter_tensors = getattr(value, "iter_tensors", None)
    if callable(iter_tensors):
        for tensor in iter_tensors():
            yield tensor.buffer
        return
    if isinstance(value, dict):
        for item in value.values():
            yield from iter_retained_buffers(item)
    elif isinstance(value, (list, tuple, set, frozenset)):
        for item in value:
            yield from iter_retained_buffers(item)


async def tidy(body: Callable[[], Union[T, Awaitable[T]]], backend: Optional[TrackedBackend] = None) -> T:
    """
    Run `body` inside a fresh allocation scope.

    Buffers allocated while `body` runs are released when it returns, except those
    reachable from its return value (tensors, Variables, Layers, optimizers, and
    containers of them), which move to the enclosing scope.

    Args:
        body: sync or async callable
        backend: defaults to the context backend

    Returns:
        Whatever `body` returned
    """
    backend = backend or get_backend()
    scope = backend.enter_scope()
    try:
        result = body()
        if inspect.isawaitable(result):
            result = await result
    except BaseException:
        backend.exit_scope(scope)
        raise
    backend.exit_scope(scope, iter_retained_buffers(result))
    return result


def tidy_sync(body: Callable[[], T], backend: Optional[TrackedBackend] = None) -> T:
    """Synchronous tidy for code paths without awaits"""
    backend = backend or get_backend()
    scope = backend.enter_scope()
    try:
        result = body()
    except BaseException:
        backend.exit_scope(scope)
        raise
    backend.exit_scope(scope, iter_retained_buffers(result))
    return result
