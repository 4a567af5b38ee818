from enum import Enum
from typing import Optional


class DistErrorCode(Enum):
    """Error codes for distributed runtime failures."""
    FRAME_TOO_LARGE = "DIST_FRAME_TOO_LARGE"
    UNKNOWN_TAG = "DIST_UNKNOWN_TAG"
    MALFORMED = "DIST_MALFORMED_MESSAGE"
    VERSION_MISMATCH = "DIST_VERSION_MISMATCH"
    UNEXPECTED = "DIST_UNEXPECTED_MESSAGE"
    CONNECTION_CLOSED = "DIST_CONNECTION_CLOSED"
    WORKER_LOST = "DIST_WORKER_LOST"
    TOO_MANY_WORKERS = "DIST_TOO_MANY_WORKERS"
    INVALID_PLAN = "DIST_INVALID_PLAN"


class DistError(Exception):
    """Base error class for the distributed runtime."""

    def __init__(self, message: str, code: Optional[DistErrorCode] = None):
        super().__init__(message)
        self.code = code
        self.name = self.__class__.__name__


class ProtocolError(DistError):
    """Wire-level failure: framing or message decoding."""


class FrameTooLargeError(ProtocolError):
    def __init__(self, length: int, limit: int):
        super().__init__(f"FrameTooLarge: frame of {length} bytes exceeds the {limit} byte limit",
                         DistErrorCode.FRAME_TOO_LARGE)
        self.length = length
        self.limit = limit


class UnknownTagError(ProtocolError):
    def __init__(self, tag: int):
        super().__init__(f"UnknownTag: message tag {tag}", DistErrorCode.UNKNOWN_TAG)
        self.tag = tag


class MalformedMessageError(ProtocolError):
    def __init__(self, message: str):
        super().__init__(f"MalformedMessage: {message}", DistErrorCode.MALFORMED)


class VersionMismatchError(ProtocolError):
    def __init__(self, expected: int, actual: Optional[int] = None, detail: str = ""):
        got = f", got {actual}" if actual is not None else ""
        super().__init__(f"VersionMismatch: protocol version {expected} required{got}{detail}",
                         DistErrorCode.VERSION_MISMATCH)
        self.expected = expected
        self.actual = actual


class UnexpectedMessageError(ProtocolError):
    def __init__(self, expected: str, actual: str, step: Optional[int] = None):
        at = f" at step {step}" if step is not None else ""
        super().__init__(f"UnexpectedMessage: expected {expected}, received {actual}{at}", DistErrorCode.UNEXPECTED)
        self.expected = expected
        self.actual = actual
        self.step = step


class ConnectionClosedError(ProtocolError):
    def __init__(self, peer: str, partial: int = 0):
        detail = f" after {partial} bytes of a frame" if partial else ""
        super().__init__(f"ConnectionClosed: {peer} closed the stream{detail}", DistErrorCode.CONNECTION_CLOSED)
        self.peer = peer


class WorkerLostError(DistError):
    """A worker disconnected or failed during a step; the run is aborted."""

    def __init__(self, worker_id: int, step: Optional[int], reason: str):
        at = f" during step {step}" if step is not None else ""
        super().__init__(f"WorkerLost: worker {worker_id}{at}: {reason}", DistErrorCode.WORKER_LOST)
        self.worker_id = worker_id
        self.step = step


class TooManyWorkersError(DistError):
    def __init__(self, global_batch: int, workers: int):
        super().__init__(f"TooManyWorkers: global batch {global_batch} cannot be split across {workers} workers",
                         DistErrorCode.TOO_MANY_WORKERS)
        self.global_batch = global_batch
        self.workers = workers


class InvalidRunPlanError(DistError):
    def __init__(self, message: str):
        super().__init__(f"InvalidRunPlan: {message}", DistErrorCode.INVALID_PLAN)
