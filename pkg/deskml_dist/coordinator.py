"""
Parameter-server coordinator.

One step: broadcast weights, hand each worker its slice of the step's batch,
wait until every worker has uploaded gradients, average them weighted by
local batch size in ascending worker id order, apply the optimizer, and
acknowledge. A worker that disconnects or misbehaves aborts the run.
"""

import asyncio
import json
import time
from dataclasses import dataclass, field
from typing import Awaitable, Callable, Dict, List, Optional, Set, Tuple, Union

import numpy as np

from deskml_common import get_logger, get_settings
from deskml_common.version import PROTOCOL_VERSION
from deskml_data import BatchIterator, Dataset, EpochSampler, gather_batch, open_dataset, synth_dataset
from deskml_nn import Layer, MomentumSGD, archive_model, build_model, train_step
from deskml_tensor import TensorArchive, TrackedBackend, encode, from_numpy, get_backend, use_backend
from deskml_tensor.tensor_types import ArchiveError, DType

from .accounting import partition_batch, partition_ranges
from .dist_types import (
    DistError,
    MalformedMessageError,
    ProtocolError,
    RunPlan,
    RunResult,
    StepRecord,
    UnexpectedMessageError,
    VersionMismatchError,
    WorkerLostError,
)
from .protocol import BatchAssignment, GradientUpload, Join, JoinAck, Shutdown, StepAck, WeightsBroadcast
from .transport import BaseTransport, LinkLimiter, StreamTransport, throttle
from .worker import VERSION_REJECTED

logger = get_logger("deskml_dist.coordinator", enable_file_logging=False)

_LOST = (ProtocolError, ArchiveError, ConnectionError, OSError)


@dataclass
class WorkerHandle:
    worker_id: int
    name: str
    transport: BaseTransport


@dataclass
class CoordinatorState:
    """Authoritative model and optimizer plus the per-step barrier bookkeeping"""

    plan: RunPlan
    model: Layer
    optimizer: MomentumSGD
    dataset: Dataset
    sampler: EpochSampler
    workers: List[WorkerHandle]
    batch_sizes: List[int]
    backend: TrackedBackend
    step: int = 0
    uploaded: Set[int] = field(default_factory=set)

    @property
    def global_batch(self) -> int:
        return sum(self.batch_sizes)

    @property
    def parameter_names(self) -> List[str]:
        return self.optimizer.names


def worker_batch_sizes(plan: RunPlan) -> List[int]:
    if plan.regime == "fixed_local":
        return [plan.local_batch] * plan.workers
    return partition_batch(plan.global_batch, plan.workers)


def dataset_for_plan(plan: RunPlan, backend: Optional[TrackedBackend] = None) -> Dataset:
    """The plan's dataset (.dmlt file or IDX "images,labels" pair), or a synthetic set shaped for its model"""
    if plan.dataset:
        return open_dataset(plan.dataset, classes=plan.model.classes, backend=backend)
    classes = plan.model.classes
    n = max(plan.synth_samples // classes, 1) * classes
    return synth_dataset(n, classes, plan.model.in_shape, seed=plan.seed, backend=backend)


def create_state(plan: RunPlan, workers: List[WorkerHandle], dataset: Optional[Dataset] = None,
                 backend: Optional[TrackedBackend] = None) -> CoordinatorState:
    backend = backend or get_backend()
    with use_backend(backend):
        model = build_model(plan.model)
        optimizer = MomentumSGD(model, lr=plan.lr, momentum=plan.momentum)
        dataset = dataset or dataset_for_plan(plan, backend)
    return CoordinatorState(
        plan=plan,
        model=model,
        optimizer=optimizer,
        dataset=dataset,
        sampler=EpochSampler(len(dataset), seed=plan.seed),
        workers=sorted(workers, key=lambda w: w.worker_id),
        batch_sizes=worker_batch_sizes(plan),
        backend=backend,
    )


# ---------------------------------------------------------------------- join

async def admit_worker(transport: BaseTransport, worker_id: int, model_config: bytes,
                       timeout: Optional[float] = None) -> WorkerHandle:
    """
    Read the worker's Join and answer with its id and the model config.

    Raises:
        VersionMismatchError: the worker speaks another protocol version (it is told so and disconnected)
    """
    timeout = timeout or get_settings().join_timeout_s
    message = await asyncio.wait_for(transport.recv_message(), timeout)
    if not isinstance(message, Join):
        raise UnexpectedMessageError("Join", type(message).__name__)
    if message.protocol_version != PROTOCOL_VERSION:
        await transport.send(Shutdown(f"{VERSION_REJECTED}: coordinator speaks protocol {PROTOCOL_VERSION}"))
        await transport.close()
        raise VersionMismatchError(PROTOCOL_VERSION, message.protocol_version)
    await transport.send(JoinAck(worker_id, model_config))
    logger.info("Worker joined", worker_id=worker_id, name=message.worker_name, peer=transport.peer)
    return WorkerHandle(worker_id=worker_id, name=message.worker_name, transport=transport)


def model_config_payload(plan: RunPlan) -> bytes:
    return json.dumps(plan.model.model_dump(mode="json"), sort_keys=True).encode("utf-8")


def link_limiters(plan: RunPlan, count: int) -> List[Optional[LinkLimiter]]:
    """One limiter per link, or the same shared limiter for every link"""
    if plan.bandwidth_cap is None:
        return [None] * count
    if plan.shared_link:
        shared = LinkLimiter(plan.bandwidth_cap)
        return [shared] * count
    return [LinkLimiter(plan.bandwidth_cap) for _ in range(count)]


# ---------------------------------------------------------------------- step

async def _exchange(state: CoordinatorState, handle: WorkerHandle, step: int, weights: bytes,
                    indices: np.ndarray) -> Tuple[GradientUpload, float]:
    """Send weights and batch to one worker, then wait for its upload; returns (upload, compute seconds)"""
    transport = handle.transport
    try:
        await transport.send(WeightsBroadcast(step, weights))
        images, labels = gather_batch(state.dataset, indices, state.backend)
        try:
            payload = encode(TensorArchive([("images", images), ("labels", labels)]))
        finally:
            images.dispose()
            labels.dispose()
        await transport.send(BatchAssignment(step, payload))
        sent_at = time.perf_counter()
        message, frame = await transport.recv()
    except _LOST as e:
        raise WorkerLostError(handle.worker_id, step, str(e)) from e

    if isinstance(message, Shutdown):
        raise WorkerLostError(handle.worker_id, step, f"worker shut down: {message.reason}")
    if not isinstance(message, GradientUpload) or message.step != step or message.worker_id != handle.worker_id:
        raise WorkerLostError(handle.worker_id, step, f"unexpected {message!r:.120}")
    if message.local_batch != len(indices):
        raise WorkerLostError(handle.worker_id, step,
                              f"uploaded local_batch {message.local_batch}, assigned {len(indices)}")
    state.uploaded.add(handle.worker_id)
    return message, max(frame.received_at - sent_at, 0.0)


def aggregate_gradients(state: CoordinatorState, uploads: List[GradientUpload]) -> List[np.ndarray]:
    """
    g = sum_k float32(b_k / B) * g_k, summed in ascending worker id.

    Raises:
        MalformedMessageError: an upload's archive does not match the parameter enumeration
    """
    names = state.parameter_names
    total = sum(u.local_batch for u in uploads)
    summed: List[Optional[np.ndarray]] = [None] * len(names)
    for upload in sorted(uploads, key=lambda u: u.worker_id):
        archive = upload.tensors(state.backend)
        try:
            if archive.names() != names:
                raise MalformedMessageError(f"worker {upload.worker_id} gradient names {archive.names()} "
                                            f"differ from the parameter enumeration")
            weight = np.float32(upload.local_batch / total)
            for i, name in enumerate(names):
                contribution = weight * archive[name].numpy()
                summed[i] = contribution if summed[i] is None else summed[i] + contribution
        finally:
            for t in archive.iter_tensors():
                t.dispose()
    return summed


async def coordinator_step(state: CoordinatorState, step: int) -> StepRecord:
    """
    One synchronous SGD step across all workers.

    Raises:
        WorkerLostError: a worker failed; the caller aborts the run
    """
    started = time.perf_counter()
    down_before = sum(w.transport.bytes_sent for w in state.workers)
    up_before = sum(w.transport.bytes_received for w in state.workers)
    state.step = step
    state.uploaded = set()

    weights = encode(archive_model(state.model))
    indices = state.sampler.indices_for_step(step, state.global_batch)
    ranges = partition_ranges(state.batch_sizes)

    tasks = [
        asyncio.ensure_future(_exchange(state, handle, step, weights, indices[start:stop]))
        for handle, (start, stop) in zip(state.workers, ranges)
    ]
    try:
        results = await asyncio.gather(*tasks)
    except BaseException:
        for task in tasks:
            task.cancel()
        await asyncio.gather(*tasks, return_exceptions=True)
        raise

    uploads = [upload for upload, _ in results]
    compute_s = max((seconds for _, seconds in results), default=0.0)

    update_started = time.perf_counter()
    try:
        averaged = aggregate_gradients(state, uploads)
    except (ProtocolError, ArchiveError) as e:
        raise WorkerLostError(-1, step, str(e)) from e
    grads = [from_numpy(g, DType.FLOAT32, backend=state.backend) for g in averaged]
    try:
        state.optimizer.apply(grads)
    finally:
        for g in grads:
            g.dispose()
    update_s = time.perf_counter() - update_started

    for handle in state.workers:
        try:
            await handle.transport.send(StepAck(step))
        except _LOST as e:
            raise WorkerLostError(handle.worker_id, step, str(e)) from e

    wall_s = time.perf_counter() - started
    samples = state.global_batch
    return StepRecord(
        step=step,
        wall_ms=wall_s * 1000.0,
        compute_ms=compute_s * 1000.0,
        comm_ms=max(wall_s - compute_s - update_s, 0.0) * 1000.0,
        samples=samples,
        samples_per_sec=samples / wall_s if wall_s > 0 else 0.0,
        bytes_down=sum(w.transport.bytes_sent for w in state.workers) - down_before,
        bytes_up=sum(w.transport.bytes_received for w in state.workers) - up_before,
        update_ms=update_s * 1000.0,
        batch_sizes=list(state.batch_sizes),
    )


async def broadcast_shutdown(state: CoordinatorState, reason: str) -> None:
    for handle in state.workers:
        try:
            await handle.transport.send(Shutdown(reason))
        except _LOST:
            pass
        await handle.transport.close()


def final_parameters(model: Layer) -> Dict[str, np.ndarray]:
    return {name: np.array(p.data.numpy()) for name, p in model.named_parameters()}


async def run(state: CoordinatorState) -> RunResult:
    """Run plan.steps steps, then shut the workers down"""
    result = RunResult()
    plan = state.plan
    logger.info("Run started", workers=len(state.workers), regime=plan.regime, global_batch=state.global_batch,
                steps=plan.steps, bandwidth_cap=plan.bandwidth_cap)
    try:
        with use_backend(state.backend):
            for step in range(plan.steps):
                record = await coordinator_step(state, step)
                result.records.append(record)
                logger.info("Step finished", step=step, wall_ms=round(record.wall_ms, 3),
                            compute_ms=round(record.compute_ms, 3), samples=record.samples)
    except WorkerLostError as e:
        logger.error("Run aborted", error=e.name, detail=str(e))
        result.aborted = str(e)
        await broadcast_shutdown(state, f"aborted: {e}")
        raise
    finally:
        result.parameters = final_parameters(state.model)
    await broadcast_shutdown(state, "run complete")
    return result


# ---------------------------------------------------------------------- entry points

async def run_with_transports(plan: RunPlan, transports: List[BaseTransport], dataset: Optional[Dataset] = None,
                              backend: Optional[TrackedBackend] = None) -> RunResult:
    """Admit one worker per transport (ids in list order) and run the plan"""
    config = model_config_payload(plan)
    limiters = link_limiters(plan, len(transports))
    handles = []
    for worker_id, (transport, limiter) in enumerate(zip(transports, limiters)):
        if limiter is not None:
            transport = throttle(transport, plan.bandwidth_cap, link=limiter)
        handles.append(await admit_worker(transport, worker_id, config))
    return await run(create_state(plan, handles, dataset, backend))


async def serve(plan: RunPlan, host: str = "127.0.0.1", port: int = 0, dataset: Optional[Dataset] = None,
                on_listening: Optional[Callable[[int], Union[None, Awaitable[None]]]] = None,
                backend: Optional[TrackedBackend] = None) -> RunResult:
    """
    Listen for plan.workers TCP workers, then run the plan.

    Workers with a mismatched protocol version are turned away and do not
    count towards the worker total.
    """
    settings = get_settings()
    incoming: "asyncio.Queue[StreamTransport]" = asyncio.Queue()

    async def on_connect(reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        await incoming.put(StreamTransport(reader, writer))

    server = await asyncio.start_server(on_connect, host, port)
    bound = server.sockets[0].getsockname()[1]
    logger.info("Coordinator listening", host=host, port=bound, workers=plan.workers)
    if on_listening is not None:
        maybe = on_listening(bound)
        if asyncio.iscoroutine(maybe):
            await maybe

    config = model_config_payload(plan)
    limiters = link_limiters(plan, plan.workers)
    handles: List[WorkerHandle] = []
    try:
        deadline = time.monotonic() + settings.join_timeout_s
        while len(handles) < plan.workers:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise WorkerLostError(len(handles), None, f"only {len(handles)} of {plan.workers} workers joined")
            try:
                transport = await asyncio.wait_for(incoming.get(), remaining)
            except asyncio.TimeoutError:
                continue
            limiter = limiters[len(handles)]
            if limiter is not None:
                transport = throttle(transport, plan.bandwidth_cap, link=limiter)
            try:
                handles.append(await admit_worker(transport, len(handles), config, timeout=remaining))
            except (DistError, asyncio.TimeoutError) as e:
                logger.warning("Worker rejected", peer=transport.peer, reason=str(e) or type(e).__name__)
                await transport.close()
        return await run(create_state(plan, handles, dataset, backend))
    finally:
        server.close()
        await server.wait_closed()


async def single_process_run(plan: RunPlan, dataset: Optional[Dataset] = None,
                             backend: Optional[TrackedBackend] = None) -> Dict[str, np.ndarray]:
    """
    The same plan trained in one process on the unsplit global batch.

    Batches come from a BatchIterator seeded like the coordinator's sampler, so
    step s sees exactly the samples the workers of step s see together.
    """
    backend = backend or get_backend()
    with use_backend(backend):
        model = build_model(plan.model)
        optimizer = MomentumSGD(model, lr=plan.lr, momentum=plan.momentum)
        dataset = dataset or dataset_for_plan(plan, backend)
        iterator = BatchIterator(dataset, sum(worker_batch_sizes(plan)), seed=plan.seed, backend=backend)
        for _ in range(plan.steps):
            batch = iterator.next_batch() or iterator.next_batch()
            images, labels = batch
            try:
                await train_step(model, optimizer, images, labels, backend)
            finally:
                images.dispose()
                labels.dispose()
        return final_parameters(model)
