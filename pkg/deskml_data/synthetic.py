"""Seeded class-conditional synthetic images"""

from typing import Optional, Sequence

import numpy as np

from deskml_common import get_logger
from deskml_tensor import TrackedBackend, from_numpy
from deskml_tensor.tensor_types import DType

from .data_types import Dataset, InvalidDatasetConfigError

logger = get_logger("deskml_data.synthetic", enable_file_logging=False)

DEFAULT_NOISE = 24.0


def synth_dataset(n: int, classes: int = 10, shape: Sequence[int] = (1, 28, 28), seed: int = 0,
                  noise: float = DEFAULT_NOISE, backend: Optional[TrackedBackend] = None) -> Dataset:
    """
    n images, n / classes per class.

    Class k is a fixed random intensity pattern drawn from the seed, plus
    independent gaussian pixel noise, clipped to [0, 255]. Patterns are far
    apart relative to the noise, so the classes are linearly separable.

    Raises:
        InvalidDatasetConfigError: n not divisible by classes, or bad shape
    """
    shape = tuple(int(s) for s in shape)
    if classes < 2:
        raise InvalidDatasetConfigError(f"classes must be at least 2, got {classes}")
    if n < 0 or n % classes:
        raise InvalidDatasetConfigError(f"n={n} is not a non-negative multiple of classes={classes}")
    if len(shape) != 3 or any(s <= 0 for s in shape):
        raise InvalidDatasetConfigError(f"shape must be three positive extents [C, H, W], got {list(shape)}")
    if noise < 0:
        raise InvalidDatasetConfigError(f"noise must be non-negative, got {noise}")

    rng = np.random.default_rng(seed)
    prototypes = rng.uniform(0.0, 255.0, size=(classes,) + shape)
    labels = rng.permutation(np.repeat(np.arange(classes, dtype=np.int32), n // classes))
    pixels = prototypes[labels] + rng.normal(0.0, noise, size=(n,) + shape)
    images = np.clip(np.rint(pixels), 0, 255).astype(np.uint8)

    logger.debug("Synthetic dataset generated", samples=n, classes=classes, shape=list(shape), seed=seed)
    return Dataset(
        images=from_numpy(images, DType.UINT8, backend=backend),
        labels=from_numpy(labels, DType.INT32, backend=backend),
        classes=classes,
    )
