"""
deskml-dist - parameter-server data-parallel training.

Main Components:
- framing / protocol: length-prefixed frames and the seven protocol messages
- transport: TCP stream, in-process memory pipe and bandwidth-throttled transports
- coordinator: join, per-step broadcast/assign/barrier/aggregate/update, TCP server
- worker: the worker loop and its retrying TCP connect
- accounting: batch partitioning and per-step payload accounting
"""

from .accounting import PayloadBreakdown, partition_batch, partition_ranges, payload_accounting
from .coordinator import (
    CoordinatorState,
    WorkerHandle,
    admit_worker,
    aggregate_gradients,
    coordinator_step,
    create_state,
    dataset_for_plan,
    run,
    run_with_transports,
    serve,
    single_process_run,
    worker_batch_sizes,
)
from .dist_types import *  # noqa: F401,F403
from .dist_types import __all__ as _types_all
from .framing import Frame, encode_frame, parse_frame, read_frame
from .local import run_local
from .protocol import (
    BatchAssignment,
    GradientUpload,
    Join,
    JoinAck,
    Message,
    MessageTag,
    Shutdown,
    StepAck,
    WeightsBroadcast,
    decode_message,
    encode_message,
)
from .transport import (
    BaseTransport,
    LinkLimiter,
    MemoryTransport,
    SharedLink,
    StreamTransport,
    ThrottledTransport,
    memory_pipe,
    throttle,
)
from .worker import WorkerReport, connect, parse_address, run_worker, worker_loop

__all__ = [
    # Accounting
    "PayloadBreakdown",
    "partition_batch",
    "partition_ranges",
    "payload_accounting",
    # Coordinator
    "CoordinatorState",
    "WorkerHandle",
    "admit_worker",
    "aggregate_gradients",
    "coordinator_step",
    "create_state",
    "dataset_for_plan",
    "run",
    "run_with_transports",
    "serve",
    "single_process_run",
    "worker_batch_sizes",
    "run_local",
    # Wire
    "Frame",
    "encode_frame",
    "parse_frame",
    "read_frame",
    "Message",
    "MessageTag",
    "Join",
    "JoinAck",
    "WeightsBroadcast",
    "BatchAssignment",
    "GradientUpload",
    "StepAck",
    "Shutdown",
    "encode_message",
    "decode_message",
    # Transports
    "BaseTransport",
    "StreamTransport",
    "MemoryTransport",
    "ThrottledTransport",
    "LinkLimiter",
    "SharedLink",
    "memory_pipe",
    "throttle",
    # Worker
    "WorkerReport",
    "worker_loop",
    "connect",
    "parse_address",
    "run_worker",
] + list(_types_all)
