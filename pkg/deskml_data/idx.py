"""
IDX reader and writer.

IDX files carry a big-endian header: magic u32 (0x00000803 for uint8 image
stacks, 0x00000801 for uint8 label vectors), then one u32 per dimension,
then the raw row-major bytes. Files ending in .gz are read through gzip.
"""

import gzip
import struct
from pathlib import Path
from typing import Optional, Union

import numpy as np

from deskml_common import get_logger
from deskml_tensor import TrackedBackend, from_numpy
from deskml_tensor.tensor_types import DType

from .data_types import CountMismatchError, Dataset, IdxBadMagicError, IdxTruncatedError

logger = get_logger("deskml_data.idx", enable_file_logging=False)

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801

PathLike = Union[str, Path]


def _read_bytes(path: PathLike) -> bytes:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as f:
            return f.read()
    return path.read_bytes()


def _parse(path: PathLike, raw: bytes, magic: int, ndim: int) -> np.ndarray:
    header = 4 + 4 * ndim
    if len(raw) < 4:
        raise IdxTruncatedError(path, 4, len(raw))
    (actual,) = struct.unpack(">I", raw[:4])
    if actual != magic:
        raise IdxBadMagicError(path, magic, actual)
    if len(raw) < header:
        raise IdxTruncatedError(path, header, len(raw))
    dims = struct.unpack(f">{ndim}I", raw[4:header])
    needed = header + int(np.prod(dims, dtype=np.int64))
    if len(raw) < needed:
        raise IdxTruncatedError(path, needed, len(raw))
    return np.frombuffer(raw, dtype=np.uint8, count=needed - header, offset=header).reshape(dims)


def read_idx_images(path: PathLike) -> np.ndarray:
    """[N, H, W] uint8"""
    return _parse(path, _read_bytes(path), IMAGES_MAGIC, 3)


def read_idx_labels(path: PathLike) -> np.ndarray:
    """[N] uint8"""
    return _parse(path, _read_bytes(path), LABELS_MAGIC, 1)


def load_idx(images_path: PathLike, labels_path: PathLike, classes: int = 10,
             backend: Optional[TrackedBackend] = None) -> Dataset:
    """
    Load an IDX image/label pair as a grayscale Dataset [N, 1, H, W].

    Raises:
        IdxBadMagicError, IdxTruncatedError, CountMismatchError
    """
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise CountMismatchError(images.shape[0], labels.shape[0])
    n, h, w = images.shape
    logger.info("IDX dataset loaded", images=str(images_path), samples=n, height=h, width=w)
    return Dataset(
        images=from_numpy(images.reshape(n, 1, h, w), DType.UINT8, backend=backend),
        labels=from_numpy(labels.astype(np.int32), DType.INT32, backend=backend),
        classes=classes,
    )


def write_idx_images(path: PathLike, images: np.ndarray) -> None:
    images = np.asarray(images, dtype=np.uint8)
    if images.ndim != 3:
        raise ValueError(f"IDX images must be [N, H, W], got shape {images.shape}")
    Path(path).write_bytes(struct.pack(">4I", IMAGES_MAGIC, *images.shape) + images.tobytes())


def write_idx_labels(path: PathLike, labels: np.ndarray) -> None:
    labels = np.asarray(labels, dtype=np.uint8)
    if labels.ndim != 1:
        raise ValueError(f"IDX labels must be [N], got shape {labels.shape}")
    Path(path).write_bytes(struct.pack(">2I", LABELS_MAGIC, labels.shape[0]) + labels.tobytes())
