"""Dataset container"""

from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

from deskml_tensor import Tensor
from deskml_tensor.tensor_types import DType

from .errors import CountMismatchError, DatasetError


@dataclass
class Dataset:
    """uint8 images [N, C, H, W] with int32 labels [N] in [0, classes)"""

    images: Tensor
    labels: Tensor
    classes: int

    def __post_init__(self):
        if self.images.dtype is not DType.UINT8 or self.images.ndim != 4:
            raise DatasetError(f"images must be uint8 [N, C, H, W], got {self.images.dtype} {list(self.images.shape)}")
        if self.labels.dtype is not DType.INT32 or self.labels.ndim != 1:
            raise DatasetError(f"labels must be int32 [N], got {self.labels.dtype} {list(self.labels.shape)}")
        if self.images.shape[0] != self.labels.shape[0]:
            raise CountMismatchError(self.images.shape[0], self.labels.shape[0])
        if self.classes < 1:
            raise DatasetError(f"classes must be positive, got {self.classes}")
        values = self.labels.numpy()
        if values.size and (values.min() < 0 or values.max() >= self.classes):
            raise DatasetError(f"labels must lie in [0, {self.classes})")

    def __len__(self) -> int:
        return self.images.shape[0]

    @property
    def image_shape(self) -> Tuple[int, int, int]:
        return tuple(self.images.shape[1:])

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels.numpy(), minlength=self.classes)

    def iter_tensors(self) -> Iterator[Tensor]:
        yield self.images
        yield self.labels
