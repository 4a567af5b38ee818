"""
Benchmark error classes
"""

from pathlib import Path
from typing import Union


class BenchError(Exception):
    """Base benchmark error"""

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.name = self.__class__.__name__


class MalformedCSVError(BenchError):
    """A results CSV cannot be read or does not carry a known schema"""

    def __init__(self, path: Union[str, Path], detail: str) -> None:
        super().__init__(f"MalformedCSV: {path}: {detail}")
        self.path = str(path)
        self.detail = detail


class InvalidBenchConfigError(BenchError):
    """Sweep parameters rejected"""

    def __init__(self, message: str) -> None:
        super().__init__(f"InvalidConfig: {message}")
