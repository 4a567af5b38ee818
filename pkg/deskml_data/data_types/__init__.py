from .dataset import Dataset
from .errors import (
    DatasetError,
    IdxBadMagicError,
    IdxTruncatedError,
    CountMismatchError,
    InvalidDatasetConfigError,
)

__all__ = [
    "Dataset",
    # Errors
    "DatasetError",
    "IdxBadMagicError",
    "IdxTruncatedError",
    "CountMismatchError",
    "InvalidDatasetConfigError",
]
