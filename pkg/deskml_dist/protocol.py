"""
Protocol messages.

Bodies are little-endian with fixed-width fields first; the one
variable-length field of a message (a name, a JSON config, a reason string or
an encoded tensor archive) always runs to the end of the body.

    Join              1  protocol_version u32 | worker_name utf-8
    JoinAck           2  worker_id u32 | model_config json
    WeightsBroadcast  3  step u64 | archive
    BatchAssignment   4  step u64 | archive("images", "labels")
    GradientUpload    5  step u64 | worker_id u32 | local_batch u32 | archive
    StepAck           6  step u64
    Shutdown          7  reason utf-8
"""

import struct
from dataclasses import dataclass
from enum import IntEnum
from typing import ClassVar, Dict, Optional, Type, Union

from deskml_tensor import TensorArchive, TrackedBackend, decode

from .dist_types import MalformedMessageError, UnknownTagError
from .framing import Frame, encode_frame

_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_UPLOAD_HEAD = struct.Struct("<QII")


class MessageTag(IntEnum):
    JOIN = 1
    JOIN_ACK = 2
    WEIGHTS_BROADCAST = 3
    BATCH_ASSIGNMENT = 4
    GRADIENT_UPLOAD = 5
    STEP_ACK = 6
    SHUTDOWN = 7


def _text(raw: bytes, field_name: str) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise MalformedMessageError(f"{field_name} is not valid UTF-8 ({e.reason})") from None


def _fixed(body: bytes, layout: struct.Struct, message: str, exact: bool = False):
    if len(body) < layout.size or (exact and len(body) != layout.size):
        raise MalformedMessageError(f"{message} body of {len(body)} bytes, expected "
                                    f"{'exactly' if exact else 'at least'} {layout.size}")
    return layout.unpack_from(body)


class Message:
    """Base class for protocol messages"""

    TAG: ClassVar[MessageTag]

    def encode_body(self) -> bytes:
        raise NotImplementedError

    @classmethod
    def decode_body(cls, body: bytes) -> "Message":
        raise NotImplementedError

    def to_frame(self) -> bytes:
        return encode_frame(int(self.TAG), self.encode_body())


@dataclass(frozen=True)
class Join(Message):
    TAG: ClassVar[MessageTag] = MessageTag.JOIN
    protocol_version: int
    worker_name: str

    def encode_body(self) -> bytes:
        return _U32.pack(self.protocol_version) + self.worker_name.encode("utf-8")

    @classmethod
    def decode_body(cls, body: bytes) -> "Join":
        (version,) = _fixed(body, _U32, "Join")
        return cls(version, _text(body[_U32.size:], "worker_name"))


@dataclass(frozen=True)
class JoinAck(Message):
    TAG: ClassVar[MessageTag] = MessageTag.JOIN_ACK
    worker_id: int
    model_config: bytes

    def encode_body(self) -> bytes:
        return _U32.pack(self.worker_id) + self.model_config

    @classmethod
    def decode_body(cls, body: bytes) -> "JoinAck":
        (worker_id,) = _fixed(body, _U32, "JoinAck")
        return cls(worker_id, body[_U32.size:])


class _ArchiveMessage(Message):
    archive: bytes

    def tensors(self, backend: Optional[TrackedBackend] = None) -> TensorArchive:
        """Decode the embedded archive into `backend`"""
        return decode(self.archive, backend=backend)


@dataclass(frozen=True)
class WeightsBroadcast(_ArchiveMessage):
    TAG: ClassVar[MessageTag] = MessageTag.WEIGHTS_BROADCAST
    step: int
    archive: bytes

    def encode_body(self) -> bytes:
        return _U64.pack(self.step) + self.archive

    @classmethod
    def decode_body(cls, body: bytes) -> "WeightsBroadcast":
        (step,) = _fixed(body, _U64, "WeightsBroadcast")
        return cls(step, body[_U64.size:])


@dataclass(frozen=True)
class BatchAssignment(_ArchiveMessage):
    TAG: ClassVar[MessageTag] = MessageTag.BATCH_ASSIGNMENT
    step: int
    archive: bytes

    def encode_body(self) -> bytes:
        return _U64.pack(self.step) + self.archive

    @classmethod
    def decode_body(cls, body: bytes) -> "BatchAssignment":
        (step,) = _fixed(body, _U64, "BatchAssignment")
        return cls(step, body[_U64.size:])


@dataclass(frozen=True)
class GradientUpload(_ArchiveMessage):
    TAG: ClassVar[MessageTag] = MessageTag.GRADIENT_UPLOAD
    step: int
    worker_id: int
    local_batch: int
    archive: bytes

    def encode_body(self) -> bytes:
        return _UPLOAD_HEAD.pack(self.step, self.worker_id, self.local_batch) + self.archive

    @classmethod
    def decode_body(cls, body: bytes) -> "GradientUpload":
        step, worker_id, local_batch = _fixed(body, _UPLOAD_HEAD, "GradientUpload")
        return cls(step, worker_id, local_batch, body[_UPLOAD_HEAD.size:])


@dataclass(frozen=True)
class StepAck(Message):
    TAG: ClassVar[MessageTag] = MessageTag.STEP_ACK
    step: int

    def encode_body(self) -> bytes:
        return _U64.pack(self.step)

    @classmethod
    def decode_body(cls, body: bytes) -> "StepAck":
        (step,) = _fixed(body, _U64, "StepAck", exact=True)
        return cls(step)


@dataclass(frozen=True)
class Shutdown(Message):
    TAG: ClassVar[MessageTag] = MessageTag.SHUTDOWN
    reason: str

    def encode_body(self) -> bytes:
        return self.reason.encode("utf-8")

    @classmethod
    def decode_body(cls, body: bytes) -> "Shutdown":
        return cls(_text(body, "reason"))


MESSAGE_TYPES: Dict[int, Type[Message]] = {
    int(cls.TAG): cls
    for cls in (Join, JoinAck, WeightsBroadcast, BatchAssignment, GradientUpload, StepAck, Shutdown)
}


def decode_message(frame: Union[Frame, tuple]) -> Message:
    """
    Raises:
        UnknownTagError, MalformedMessageError
    """
    tag, body = (frame.tag, frame.body) if isinstance(frame, Frame) else frame
    cls = MESSAGE_TYPES.get(tag)
    if cls is None:
        raise UnknownTagError(tag)
    return cls.decode_body(bytes(body))


def encode_message(message: Message) -> bytes:
    return message.to_frame()
