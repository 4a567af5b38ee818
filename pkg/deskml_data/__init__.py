"""
deskml-data - dataset ingestion and seeded batching.

Main Components:
- load_idx: IDX image/label files (MNIST layout)
- synth_dataset: seeded class-conditional synthetic images
- BatchIterator / EpochSampler: drop-last batches in a per-epoch seeded order
- save_dataset / load_dataset: datasets as .dmlt archives
- open_dataset: an archive path or an IDX "images,labels" pair
"""

from .batching import BatchIterator, EpochSampler, gather_batch, next_batch, normalize_images
from .data_types import *  # noqa: F401,F403
from .data_types import __all__ as _types_all
from .idx import load_idx, read_idx_images, read_idx_labels, write_idx_images, write_idx_labels
from .storage import load_dataset, open_dataset, save_dataset
from .synthetic import synth_dataset

__all__ = [
    "BatchIterator",
    "EpochSampler",
    "gather_batch",
    "next_batch",
    "normalize_images",
    "load_idx",
    "read_idx_images",
    "read_idx_labels",
    "write_idx_images",
    "write_idx_labels",
    "synth_dataset",
    "save_dataset",
    "load_dataset",
    "open_dataset",
] + list(_types_all)
