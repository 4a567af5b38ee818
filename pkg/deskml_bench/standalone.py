"""
Standalone throughput sweep.

For every batch size a freshly initialized model is trained for the configured
number of epochs; each epoch is timed from its first step to its last and
reported as one row. Evaluation is not part of the timed region.
"""

import time
from itertools import chain
from typing import Any, Mapping, Optional, Union

import pandas as pd

from deskml_common import get_logger
from deskml_data import BatchIterator, Dataset, open_dataset, synth_dataset
from deskml_nn import ModelConfig, MomentumSGD, build_model, train_epoch
from deskml_tensor import TrackedBackend, get_backend, use_backend

from .bench_types import STANDALONE_COLUMNS, SYNTH, StandaloneBenchConfig, parse_bench_config

logger = get_logger("deskml_bench.standalone", enable_file_logging=False)


def bench_dataset(source: str, model: ModelConfig, synth_samples: int, seed: int,
                  backend: Optional[TrackedBackend] = None) -> Dataset:
    """A .dmlt file or IDX "images,labels" pair, or a synthetic set shaped for `model` when source is 'synth'"""
    if source != SYNTH:
        return open_dataset(source, classes=model.classes, backend=backend)
    n = max(synth_samples // model.classes, 1) * model.classes
    return synth_dataset(n, model.classes, model.in_shape, seed=seed, backend=backend)


async def bench_standalone(config: Union[StandaloneBenchConfig, Mapping[str, Any]],
                           dataset: Optional[Dataset] = None,
                           backend: Optional[TrackedBackend] = None) -> pd.DataFrame:
    """
    Rows (batch_size, epoch_wall_s, samples_per_sec), one per batch size, repeat and epoch.

    samples_per_sec is the dataset size over the epoch wall time. With
    epochs=0 the frame has the header and no rows.
    """
    config = parse_bench_config(StandaloneBenchConfig, config)
    backend = backend or get_backend()
    rows = []
    with use_backend(backend):
        owned = dataset is None
        dataset = dataset or bench_dataset(config.dataset, config.model, config.synth_samples, config.seed, backend)
        n = len(dataset)
        try:
            for batch_size in config.batch_sizes:
                for repeat in range(config.repeats):
                    if config.epochs == 0:
                        continue
                    model = build_model(config.model)
                    optimizer = MomentumSGD(model, lr=config.lr, momentum=config.momentum)
                    iterator = BatchIterator(dataset, batch_size, seed=config.seed, drop_last=False, backend=backend)
                    try:
                        for epoch in range(config.epochs):
                            started = time.perf_counter()
                            losses = await train_epoch(model, optimizer, iterator, backend)
                            wall_s = time.perf_counter() - started
                            rows.append({
                                "batch_size": batch_size,
                                "epoch_wall_s": wall_s,
                                "samples_per_sec": n / wall_s if wall_s > 0 else 0.0,
                            })
                            logger.info("Standalone epoch", batch_size=batch_size, repeat=repeat, epoch=epoch,
                                        wall_s=round(wall_s, 4), last_loss=losses[-1] if losses else None)
                    finally:
                        for t in chain(model.iter_tensors(), optimizer.iter_tensors()):
                            t.dispose()
        finally:
            if owned:
                for t in dataset.iter_tensors():
                    t.dispose()
    return pd.DataFrame(rows, columns=STANDALONE_COLUMNS)
