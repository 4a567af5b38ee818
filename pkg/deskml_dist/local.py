"""In-process runs: coordinator and K workers as tasks of one event loop over memory pipes"""

import asyncio
from typing import List, Optional, Tuple

from deskml_data import Dataset
from deskml_tensor import TrackedBackend

from .coordinator import run_with_transports
from .dist_types import RunPlan, RunResult
from .transport import memory_pipe
from .worker import WorkerReport, worker_loop


async def run_local(plan: RunPlan, dataset: Optional[Dataset] = None,
                    backend: Optional[TrackedBackend] = None) -> Tuple[RunResult, List[WorkerReport]]:
    """
    Run `plan` with plan.workers in-process workers, each on its own backend.

    Raises whatever the coordinator raises; worker tasks are cancelled then.
    """
    pipes = [memory_pipe("coordinator", f"worker-{k}") for k in range(plan.workers)]
    workers = [
        asyncio.ensure_future(worker_loop(worker_end, TrackedBackend(f"worker-{k}"), name=f"worker-{k}"))
        for k, (_, worker_end) in enumerate(pipes)
    ]
    try:
        result = await run_with_transports(plan, [coordinator_end for coordinator_end, _ in pipes], dataset, backend)
    except BaseException:
        for task in workers:
            task.cancel()
        await asyncio.gather(*workers, return_exceptions=True)
        raise
    reports = await asyncio.gather(*workers)
    return result, list(reports)
