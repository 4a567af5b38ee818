"""
Worker side of the protocol.

Join, receive the model config, then per step: restore the broadcast
weights, compute gradients of the assigned batch inside a tidy scope, upload
them and wait for the acknowledgement. Shutdown ends the loop.
"""

import asyncio
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from tenacity import AsyncRetrying, retry_if_exception_type, stop_after_attempt, wait_fixed

from deskml_common import get_logger, get_settings
from deskml_common.version import PROTOCOL_VERSION
from deskml_data import normalize_images
from deskml_nn import archive_gradients, build_model, compute_loss, parse_model_config, restore_model
from deskml_tensor import TrackedBackend, encode, tidy, use_backend

from .dist_types import UnexpectedMessageError, VersionMismatchError
from .protocol import BatchAssignment, GradientUpload, Join, JoinAck, Message, Shutdown, StepAck, WeightsBroadcast
from .transport import BaseTransport, StreamTransport

logger = get_logger("deskml_dist.worker", enable_file_logging=False)

VERSION_REJECTED = "VersionMismatch"


@dataclass
class WorkerReport:
    """What a worker did before it stopped"""

    name: str
    worker_id: Optional[int] = None
    steps: int = 0
    shutdown_reason: Optional[str] = None
    baseline_live: int = 0
    live_after_step: List[int] = field(default_factory=list)


def _expect(message: Message, kind, step: Optional[int] = None):
    if not isinstance(message, kind):
        raise UnexpectedMessageError(kind.__name__, type(message).__name__, step)
    if step is not None and getattr(message, "step", step) != step:
        raise UnexpectedMessageError(f"{kind.__name__}(step={step})", f"{kind.__name__}(step={message.step})", step)
    return message


async def worker_loop(transport: BaseTransport, backend: Optional[TrackedBackend] = None,
                      name: str = "worker") -> WorkerReport:
    """
    Run the worker protocol on an established transport until Shutdown.

    The transport is closed when the loop fails, whatever the error, so the
    coordinator sees the connection drop instead of waiting for an upload.

    Raises:
        VersionMismatchError: the coordinator rejected the Join
        ProtocolError, ArchiveError: undecodable traffic
    """
    backend = backend or TrackedBackend(f"worker:{name}")
    with use_backend(backend):
        try:
            return await _run(transport, backend, name)
        except Exception as e:
            logger.error("Worker aborted", worker=name, error=getattr(e, "name", type(e).__name__), detail=str(e))
            await transport.close()
            raise


async def _run(transport: BaseTransport, backend: TrackedBackend, name: str) -> WorkerReport:
    report = WorkerReport(name=name)
    await transport.send(Join(PROTOCOL_VERSION, name))
    reply = await transport.recv_message()
    if isinstance(reply, Shutdown):
        if reply.reason.startswith(VERSION_REJECTED):
            raise VersionMismatchError(PROTOCOL_VERSION, detail=f" ({reply.reason})")
        report.shutdown_reason = reply.reason
        return report
    ack = _expect(reply, JoinAck)
    report.worker_id = ack.worker_id
    model = build_model(parse_model_config(ack.model_config))
    report.baseline_live = backend.live_count
    logger.info("Worker joined", worker=name, worker_id=ack.worker_id, parameters=model.parameter_count())

    last_step = -1
    while True:
        message = await transport.recv_message()
        if isinstance(message, Shutdown):
            report.shutdown_reason = message.reason
            break
        weights = _expect(message, WeightsBroadcast)
        step = weights.step
        if step <= last_step:
            raise UnexpectedMessageError(f"WeightsBroadcast(step>{last_step})", f"WeightsBroadcast(step={step})", step)
        last_step = step

        restored = weights.tensors(backend)
        try:
            restore_model(model, restored)
        finally:
            for t in restored.iter_tensors():
                t.dispose()

        message = await transport.recv_message()
        if isinstance(message, Shutdown):
            report.shutdown_reason = message.reason
            break
        assignment = _expect(message, BatchAssignment, step)
        batch = assignment.tensors(backend)
        labels = batch["labels"]
        local_batch = labels.shape[0]
        images = normalize_images(batch["images"])

        async def gradients() -> bytes:
            model.zero_grad()
            loss = await compute_loss(model, images, labels)
            await loss.backward()
            return encode(archive_gradients(model))

        try:
            payload = await tidy(gradients, backend)
        finally:
            images.dispose()
            for t in batch.iter_tensors():
                t.dispose()

        await transport.send(GradientUpload(step, ack.worker_id, local_batch, payload))
        message = await transport.recv_message()
        if isinstance(message, Shutdown):
            report.shutdown_reason = message.reason
            break
        _expect(message, StepAck, step)
        report.steps += 1
        report.live_after_step.append(backend.live_count)
        logger.debug("Worker step done", worker=name, step=step, local_batch=local_batch)

    logger.info("Worker shut down", worker=name, steps=report.steps, reason=report.shutdown_reason)
    return report


def parse_address(address: str) -> Tuple[str, int]:
    host, sep, port = address.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"address must look like host:port, got {address!r}")
    return host or "127.0.0.1", int(port)


async def connect(address: str, retries: Optional[int] = None, backoff_s: Optional[float] = None) -> StreamTransport:
    """Open a stream to the coordinator, retrying while it is not yet listening"""
    settings = get_settings()
    host, port = parse_address(address)
    async for attempt in AsyncRetrying(
        stop=stop_after_attempt(retries or settings.connect_retries),
        wait=wait_fixed(settings.connect_backoff_s if backoff_s is None else backoff_s),
        retry=retry_if_exception_type(OSError),
        reraise=True,
    ):
        with attempt:
            reader, writer = await asyncio.open_connection(host, port)
    return StreamTransport(reader, writer, peer=f"{host}:{port}")


async def run_worker(address: str, name: str = "worker") -> WorkerReport:
    transport = await connect(address)
    try:
        return await worker_loop(transport, name=name)
    finally:
        await transport.close()
