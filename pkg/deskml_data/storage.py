"""Datasets persisted as .dmlt tensor archives, and dataset sources by name"""

from pathlib import Path
from typing import Optional, Union

import numpy as np

from deskml_tensor import TensorArchive, TrackedBackend, from_numpy, load_archive, save_archive
from deskml_tensor.tensor_types import DType

from .data_types import Dataset, DatasetError
from .idx import load_idx

IMAGES_KEY = "images"
LABELS_KEY = "labels"
CLASSES_KEY = "classes"


def save_dataset(dataset: Dataset, path: Union[str, Path]) -> int:
    classes = from_numpy(np.asarray(dataset.classes, dtype=np.int32), DType.INT32, backend=dataset.images.backend)
    try:
        archive = TensorArchive([
            (IMAGES_KEY, dataset.images),
            (LABELS_KEY, dataset.labels),
            (CLASSES_KEY, classes),
        ])
        return save_archive(archive, path)
    finally:
        classes.dispose()


def load_dataset(path: Union[str, Path], backend: Optional[TrackedBackend] = None) -> Dataset:
    """
    Read a dataset written by save_dataset.

    Raises:
        ArchiveError: the file is not a well-formed archive
        DatasetError: entries are missing or fail Dataset validation
    """
    archive = load_archive(path, backend=backend)
    missing = [k for k in (IMAGES_KEY, LABELS_KEY, CLASSES_KEY) if k not in archive]
    try:
        if missing:
            raise DatasetError(f"{path} is not a dataset archive, missing entries {missing}")
        classes = int(archive[CLASSES_KEY].item())
        archive[CLASSES_KEY].dispose()
        return Dataset(images=archive[IMAGES_KEY], labels=archive[LABELS_KEY], classes=classes)
    except Exception:
        for t in archive.iter_tensors():
            t.dispose()
        raise


def open_dataset(source: Union[str, Path], classes: int = 10, backend: Optional[TrackedBackend] = None) -> Dataset:
    """
    A .dmlt archive path, or an IDX pair written as "images.idx[.gz],labels.idx[.gz]".

    `classes` only applies to IDX pairs; archives carry their own.
    """
    source = str(source)
    if "," not in source:
        return load_dataset(source, backend=backend)
    parts = [part.strip() for part in source.split(",")]
    if len(parts) != 2 or not all(parts):
        raise DatasetError(f"IDX source must be 'images,labels', got {source!r}")
    return load_idx(parts[0], parts[1], classes=classes, backend=backend)
