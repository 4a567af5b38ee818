"""
Distributed throughput sweep.

Each sweep point runs the coordinator inside the driver process and K
workers either as `python -m deskml_dist worker` subprocesses on loopback or
as in-process tasks over memory pipes. Sweep points run one after another.
A point whose run fails is kept in the output with empty timing fields.
"""

import asyncio
import math
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import pandas as pd

from deskml_common import get_logger
from deskml_data import Dataset
from deskml_data.data_types import DatasetError
from deskml_dist import RunPlan, RunResult, StepRecord, parse_run_plan, run_local, serve
from deskml_dist.dist_types import DistError
from deskml_tensor import TrackedBackend, get_backend, use_backend

from .bench_types import DISTRIBUTED_COLUMNS, SYNTH, DistributedBenchConfig, parse_bench_config
from .standalone import bench_dataset

logger = get_logger("deskml_bench.distributed", enable_file_logging=False)

PROJECT_ROOT = Path(__file__).resolve().parents[1]
REAP_TIMEOUT_S = 5.0


def plan_for_point(config: DistributedBenchConfig, workers: int) -> RunPlan:
    """The run plan of one sweep point; raises InvalidRunPlanError for impossible points"""
    batch_key = "global_batch" if config.regime == "fixed_global" else "local_batch"
    return parse_run_plan({
        "regime": config.regime,
        batch_key: config.batch,
        "workers": workers,
        "steps": config.steps,
        "lr": config.lr,
        "momentum": config.momentum,
        "seed": config.seed,
        "bandwidth_cap": config.bandwidth_cap,
        "shared_link": config.shared_link,
        "model": config.model,
        "dataset": None if config.dataset == SYNTH else config.dataset,
        "synth_samples": config.synth_samples,
    })


def median_step(records: Sequence[StepRecord], warmup_steps: int = 0) -> StepRecord:
    """
    The step with the (lower) median wall time among the measured steps.

    Reporting one real step keeps compute + comm <= wall, which separate
    medians of the three series would not.
    """
    measured = list(records[warmup_steps:]) or list(records)
    if not measured:
        raise ValueError("no step records to summarize")
    ordered = sorted(measured, key=lambda r: r.wall_ms)
    return ordered[(len(ordered) - 1) // 2]


def summarize_point(config: DistributedBenchConfig, workers: int, result: RunResult) -> Dict[str, Any]:
    record = median_step(result.records, config.warmup_steps)
    wall_s = record.wall_ms / 1000.0
    return {
        "K": workers,
        "regime": config.regime,
        "global_batch": record.samples,
        "step_wall_s": wall_s,
        "compute_s": record.compute_ms / 1000.0,
        "comm_s": record.comm_ms / 1000.0,
        "samples_per_sec": record.samples / wall_s if wall_s > 0 else 0.0,
    }


def failed_point(config: DistributedBenchConfig, workers: int) -> Dict[str, Any]:
    global_batch = config.batch if config.regime == "fixed_global" else config.batch * workers
    row = {column: math.nan for column in DISTRIBUTED_COLUMNS}
    row.update({"K": workers, "regime": config.regime, "global_batch": global_batch})
    return row


def worker_command(port: int, name: str, host: str = "127.0.0.1") -> List[str]:
    return [sys.executable, "-m", "deskml_dist", "worker", "--connect", f"{host}:{port}", "--name", name]


def _worker_env() -> Dict[str, str]:
    env = dict(os.environ)
    paths = [str(PROJECT_ROOT)] + ([env["PYTHONPATH"]] if env.get("PYTHONPATH") else [])
    env["PYTHONPATH"] = os.pathsep.join(paths)
    return env


async def spawn_workers(port: int, count: int) -> List[asyncio.subprocess.Process]:
    env = _worker_env()
    processes = []
    for k in range(count):
        processes.append(await asyncio.create_subprocess_exec(
            *worker_command(port, f"worker-{k}"),
            stdout=asyncio.subprocess.DEVNULL,
            stderr=asyncio.subprocess.DEVNULL,
            env=env,
        ))
    return processes


async def reap_workers(processes: Sequence[asyncio.subprocess.Process], timeout: float = REAP_TIMEOUT_S) -> None:
    """Wait for every worker to exit, terminating and then killing stragglers"""
    for process in processes:
        if process.returncode is not None:
            continue
        try:
            await asyncio.wait_for(process.wait(), timeout)
            continue
        except asyncio.TimeoutError:
            pass
        process.terminate()
        try:
            await asyncio.wait_for(process.wait(), timeout)
        except asyncio.TimeoutError:
            process.kill()
            await process.wait()


async def run_point_processes(plan: RunPlan, dataset: Dataset, backend: TrackedBackend) -> RunResult:
    processes: List[asyncio.subprocess.Process] = []

    async def launch(port: int) -> None:
        processes.extend(await spawn_workers(port, plan.workers))

    try:
        return await serve(plan, "127.0.0.1", 0, dataset=dataset, on_listening=launch, backend=backend)
    finally:
        await reap_workers(processes)


async def run_point(config: DistributedBenchConfig, plan: RunPlan, dataset: Dataset,
                    backend: TrackedBackend) -> RunResult:
    if config.in_process:
        result, _ = await run_local(plan, dataset, backend)
        return result
    return await run_point_processes(plan, dataset, backend)


async def bench_distributed(config: Union[DistributedBenchConfig, Mapping[str, Any]],
                            dataset: Optional[Dataset] = None,
                            backend: Optional[TrackedBackend] = None) -> pd.DataFrame:
    """
    Rows (K, regime, global_batch, step_wall_s, compute_s, comm_s, samples_per_sec), one per worker count.

    Timings come from the median step after the warmup steps. A point that
    fails (lost worker, impossible plan, dataset too small) is logged and
    recorded with empty timing fields; the sweep continues.
    """
    config = parse_bench_config(DistributedBenchConfig, config)
    backend = backend or get_backend()
    rows = []
    with use_backend(backend):
        owned = dataset is None
        dataset = dataset or bench_dataset(config.dataset, config.model, config.synth_samples, config.seed, backend)
        try:
            for workers in config.workers:
                try:
                    plan = plan_for_point(config, workers)
                    with logger.log_execution_time("distributed sweep point", K=workers, regime=config.regime):
                        result = await run_point(config, plan, dataset, backend)
                    rows.append(summarize_point(config, workers, result))
                except (DistError, DatasetError) as e:
                    logger.error("Sweep point failed", K=workers, regime=config.regime, error=e.name, detail=str(e))
                    rows.append(failed_point(config, workers))
        finally:
            if owned:
                for t in dataset.iter_tensors():
                    t.dispose()
    return pd.DataFrame(rows, columns=DISTRIBUTED_COLUMNS)
