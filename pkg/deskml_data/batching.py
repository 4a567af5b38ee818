"""
Seeded batch iteration.

The sample order of epoch e is a permutation drawn from a generator seeded with
(seed, e); step s of a run with batch size B reads positions
[(s mod E)·B, (s mod E)·B + B) of epoch s div E, where E = N div B. Any process
holding (N, seed) derives the same index sequence.
"""

from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from deskml_tensor import Tensor, TrackedBackend, from_numpy
from deskml_tensor.tensor_types import DType

from .data_types import Dataset, InvalidDatasetConfigError

Batch = Tuple[Tensor, Tensor]


class EpochSampler:
    """Per-epoch seeded permutations of range(n)"""

    def __init__(self, n: int, seed: int = 0, shuffle: bool = True):
        if n < 0:
            raise InvalidDatasetConfigError(f"sample count must be non-negative, got {n}")
        self.n = n
        self.seed = seed
        self.shuffle = shuffle
        self._cached_epoch: Optional[int] = None
        self._cached: Optional[np.ndarray] = None

    def permutation(self, epoch: int) -> np.ndarray:
        if epoch != self._cached_epoch:
            if self.shuffle:
                order = np.random.default_rng([self.seed, epoch]).permutation(self.n)
            else:
                order = np.arange(self.n)
            self._cached_epoch, self._cached = epoch, order
        return self._cached

    def batches_per_epoch(self, batch_size: int) -> int:
        _check_batch_size(batch_size)
        return self.n // batch_size

    def indices_for_step(self, step: int, batch_size: int) -> np.ndarray:
        """Sample indices of global step `step` under drop-last batching"""
        per_epoch = self.batches_per_epoch(batch_size)
        if per_epoch == 0:
            raise InvalidDatasetConfigError(f"batch size {batch_size} exceeds dataset size {self.n}")
        epoch, position = divmod(step, per_epoch)
        start = position * batch_size
        return self.permutation(epoch)[start:start + batch_size]


def _check_batch_size(batch_size: int) -> None:
    if batch_size < 1:
        raise InvalidDatasetConfigError(f"batch size must be positive, got {batch_size}")


def gather_batch(dataset: Dataset, indices: Sequence[int],
                 backend: Optional[TrackedBackend] = None) -> Batch:
    """Raw uint8 images and int32 labels for the given sample indices"""
    idx = np.asarray(indices, dtype=np.int64)
    images = dataset.images.numpy()[idx]
    labels = dataset.labels.numpy()[idx]
    return from_numpy(images, DType.UINT8, backend=backend), from_numpy(labels, DType.INT32, backend=backend)


def normalize_images(images: Tensor) -> Tensor:
    """uint8 -> float32 in [0, 1] via x / 255"""
    scaled = images.numpy().astype(np.float32) / np.float32(255.0)
    return from_numpy(scaled, DType.FLOAT32, backend=images.backend)


class BatchIterator:
    """
    Cursor over a dataset in seeded order.

    next_batch() returns (float32 images [B,C,H,W] in [0,1], int32 labels [B])
    until the epoch is exhausted, then None once, after which the next epoch
    begins. With drop_last the short tail batch is never emitted.
    """

    def __init__(self, dataset: Dataset, batch_size: int, seed: int = 0, shuffle: bool = True,
                 drop_last: bool = True, backend: Optional[TrackedBackend] = None):
        _check_batch_size(batch_size)
        self.dataset = dataset
        self.batch_size = batch_size
        self.sampler = EpochSampler(len(dataset), seed, shuffle)
        self.drop_last = drop_last
        self.backend = backend
        self.epoch = 0
        self.cursor = 0

    def __len__(self) -> int:
        n = len(self.dataset)
        if self.drop_last:
            return n // self.batch_size
        return -(-n // self.batch_size)

    def next_indices(self) -> Optional[np.ndarray]:
        n = len(self.dataset)
        start = self.cursor * self.batch_size
        stop = min(start + self.batch_size, n)
        if start >= n or (self.drop_last and stop - start < self.batch_size):
            self.epoch += 1
            self.cursor = 0
            return None
        self.cursor += 1
        return self.sampler.permutation(self.epoch)[start:stop]

    def next_batch(self) -> Optional[Batch]:
        indices = self.next_indices()
        if indices is None:
            return None
        raw_images, labels = gather_batch(self.dataset, indices, self.backend)
        images = normalize_images(raw_images)
        raw_images.dispose()
        return images, labels

    def __iter__(self) -> Iterator[Batch]:
        """One epoch"""
        while True:
            batch = self.next_batch()
            if batch is None:
                return
            yield batch


def next_batch(it: BatchIterator) -> Optional[Batch]:
    return it.next_batch()
