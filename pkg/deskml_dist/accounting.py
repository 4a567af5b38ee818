"""Batch partitioning and per-step payload accounting"""

import math
from dataclasses import dataclass
from typing import List, Mapping, Optional, Sequence, Tuple

from deskml_tensor import encoded_size
from deskml_tensor.tensor_types import DType

from .dist_types import TooManyWorkersError
from .framing import PREFIX_SIZE

TAG_SIZE = 1
STEP_HEAD = 8
UPLOAD_HEAD = 16
FLAT_WEIGHTS_NAME = "weights"


def partition_batch(global_batch: int, workers: int) -> List[int]:
    """
    Split global_batch into `workers` shares differing by at most one, larger shares first.

    Raises:
        TooManyWorkersError: global_batch < workers
    """
    if workers < 1:
        raise ValueError(f"worker count must be at least 1, got {workers}")
    if global_batch < workers:
        raise TooManyWorkersError(global_batch, workers)
    base, extra = divmod(global_batch, workers)
    return [base + 1 if k < extra else base for k in range(workers)]


def partition_ranges(sizes: Sequence[int]) -> List[Tuple[int, int]]:
    """Contiguous [start, stop) ranges for consecutive shares"""
    ranges = []
    start = 0
    for size in sizes:
        ranges.append((start, start + size))
        start += size
    return ranges


@dataclass(frozen=True)
class PayloadBreakdown:
    """Bytes per worker per step, frame prefixes included"""

    down_weights: int
    down_batch: int
    up_grads: int

    @property
    def total(self) -> int:
        return self.down_weights + self.down_batch + self.up_grads


def payload_accounting(param_count: float, local_batch: int, image_shape: Sequence[int],
                       image_dtype: DType = DType.UINT8,
                       param_shapes: Optional[Mapping[str, Sequence[int]]] = None) -> PayloadBreakdown:
    """
    Wire bytes one worker exchanges in one step.

    Weights and gradients are float32. Without param_shapes the parameters are
    accounted as one flat entry; with them, one entry per named parameter as
    the real archive would carry. A parameter count of zero means no weight
    or gradient traffic.

    Gradients travel in the same archive layout as the weights, but an upload
    frame carries step, worker_id and local_batch (16 bytes) where a broadcast
    carries only the step (8 bytes), so up_grads is always down_weights + 8.
    """
    param_count = int(round(param_count))
    if param_shapes is not None:
        entries = [(name, DType.FLOAT32, tuple(shape)) for name, shape in param_shapes.items()]
        param_count = sum(math.prod(shape) for _, _, shape in entries)
    else:
        entries = [(FLAT_WEIGHTS_NAME, DType.FLOAT32, (param_count,))]

    if param_count == 0 and not param_shapes:
        down_weights = up_grads = 0
    else:
        archive = encoded_size(entries)
        down_weights = PREFIX_SIZE + TAG_SIZE + STEP_HEAD + archive
        up_grads = PREFIX_SIZE + TAG_SIZE + UPLOAD_HEAD + archive

    batch_archive = encoded_size([
        ("images", image_dtype, (local_batch, *image_shape)),
        ("labels", DType.INT32, (local_batch,)),
    ])
    down_batch = PREFIX_SIZE + TAG_SIZE + STEP_HEAD + batch_archive
    return PayloadBreakdown(down_weights=down_weights, down_batch=down_batch, up_grads=up_grads)
