#!/usr/bin/env python3
"""Test cases for seeded batch iteration"""

from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
import sys
sys.path.insert(0, str(project_root))

from deskml_data import (
    BatchIterator,
    EpochSampler,
    InvalidDatasetConfigError,
    gather_batch,
    next_batch,
    normalize_images,
    synth_dataset,
)
from deskml_tensor import DType, from_numpy


@pytest.fixture
def dataset(backend):
    return synth_dataset(10, classes=2, shape=(1, 2, 2), seed=4, backend=backend)


class TestEpochSampler:
    """Per-epoch permutations"""

    def test_permutation_is_seeded_per_epoch(self):
        a = EpochSampler(50, seed=3)
        b = EpochSampler(50, seed=3)
        assert a.permutation(0).tolist() == b.permutation(0).tolist()
        assert a.permutation(1).tolist() == b.permutation(1).tolist()
        assert a.permutation(0).tolist() != a.permutation(1).tolist()
        assert sorted(a.permutation(2).tolist()) == list(range(50))
        expected = np.random.default_rng([3, 1]).permutation(50)
        assert a.permutation(1).tolist() == expected.tolist()

    def test_no_shuffle(self):
        assert EpochSampler(4, shuffle=False).permutation(7).tolist() == [0, 1, 2, 3]

    def test_indices_for_step(self):
        sampler = EpochSampler(10, seed=1)
        assert sampler.batches_per_epoch(3) == 3
        assert sampler.indices_for_step(1, 3).tolist() == sampler.permutation(0)[3:6].tolist()
        # step 3 wraps into epoch 1
        assert sampler.indices_for_step(3, 3).tolist() == sampler.permutation(1)[0:3].tolist()

    def test_invalid(self):
        with pytest.raises(InvalidDatasetConfigError):
            EpochSampler(-1)
        with pytest.raises(InvalidDatasetConfigError):
            EpochSampler(4).batches_per_epoch(0)
        with pytest.raises(InvalidDatasetConfigError):
            EpochSampler(4).indices_for_step(0, 5)


class TestBatchIterator:
    """Drop-last batches with an end-of-epoch marker"""

    def test_drop_last_and_epoch_marker(self, backend, dataset):
        it = BatchIterator(dataset, 4, seed=0, backend=backend)
        assert len(it) == 2
        first = it.next_batch()
        second = it.next_batch()
        assert first is not None and second is not None
        assert next_batch(it) is None
        assert it.epoch == 1
        assert it.next_batch() is not None

    def test_keep_tail(self, backend, dataset):
        it = BatchIterator(dataset, 4, drop_last=False, backend=backend)
        sizes = [images.shape[0] for images, _ in it]
        assert sizes == [4, 4, 2]
        assert len(it) == 3

    def test_batch_contents_follow_sampler(self, backend, dataset):
        it = BatchIterator(dataset, 5, seed=9, backend=backend)
        images, labels = it.next_batch()
        order = EpochSampler(10, seed=9).permutation(0)[:5]
        assert images.dtype is DType.FLOAT32
        assert images.shape == (5, 1, 2, 2)
        assert labels.tolist() == dataset.labels.numpy()[order].tolist()
        expected = dataset.images.numpy()[order].astype(np.float32) / np.float32(255.0)
        np.testing.assert_array_equal(images.numpy(), expected)

    def test_iteration_yields_one_epoch(self, backend, dataset):
        it = BatchIterator(dataset, 3, backend=backend)
        assert len(list(it)) == 3
        assert len(list(it)) == 3
        assert it.epoch == 2

    def test_same_seed_same_order(self, backend, dataset):
        a = [labels.tolist() for _, labels in BatchIterator(dataset, 2, seed=5, backend=backend)]
        b = [labels.tolist() for _, labels in BatchIterator(dataset, 2, seed=5, backend=backend)]
        assert a == b

    def test_raw_image_buffers_released(self, backend, dataset):
        baseline = backend.live_count
        images, labels = BatchIterator(dataset, 4, backend=backend).next_batch()
        assert backend.live_count == baseline + 2
        images.dispose()
        labels.dispose()
        assert backend.live_count == baseline

    def test_invalid_batch_size(self, backend, dataset):
        with pytest.raises(InvalidDatasetConfigError):
            BatchIterator(dataset, 0, backend=backend)


def test_gather_and_normalize(backend, dataset):
    images, labels = gather_batch(dataset, [3, 0], backend=backend)
    assert images.dtype is DType.UINT8
    assert labels.tolist() == [dataset.labels.numpy()[3], dataset.labels.numpy()[0]]
    full_white = from_numpy(np.full((1, 1, 1, 1), 255, dtype=np.uint8), backend=backend)
    assert normalize_images(full_white).tolist() == [[[[1.0]]]]
