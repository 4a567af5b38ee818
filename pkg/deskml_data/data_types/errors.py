"""
Dataset error classes
"""

from pathlib import Path
from typing import Union


class DatasetError(Exception):
    """Base dataset error"""

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.name = self.__class__.__name__


class IdxBadMagicError(DatasetError):
    """IDX header magic is not the expected one"""

    def __init__(self, path: Union[str, Path], expected: int, actual: int) -> None:
        super().__init__(f"BadMagic: {path} has magic 0x{actual:08x}, expected 0x{expected:08x}")
        self.path = str(path)
        self.expected = expected
        self.actual = actual


class IdxTruncatedError(DatasetError):
    """IDX file ends before its header-declared content"""

    def __init__(self, path: Union[str, Path], needed: int, available: int) -> None:
        super().__init__(f"TruncatedInput: {path} needs {needed} bytes, only {available} present")
        self.path = str(path)
        self.needed = needed
        self.available = available


class CountMismatchError(DatasetError):
    """Image and label files disagree on the sample count"""

    def __init__(self, images: int, labels: int) -> None:
        super().__init__(f"CountMismatch: {images} images but {labels} labels")
        self.images = images
        self.labels = labels


class InvalidDatasetConfigError(DatasetError):
    """Dataset generation or iteration parameters rejected"""

    def __init__(self, message: str) -> None:
        super().__init__(f"InvalidConfig: {message}")
