"""
Autograd and nn-api error classes
"""

from typing import List, Sequence


class NNError(Exception):
    """Base nn error"""

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.name = self.__class__.__name__


class NonScalarLossError(NNError):
    """backward() called on a non-scalar Variable"""

    def __init__(self, shape: Sequence[int]) -> None:
        super().__init__(f"NonScalarLoss: backward needs a scalar loss, got shape {list(shape)}")
        self.shape = list(shape)


class LabelOutOfRangeError(NNError):
    """Class label outside [0, C)"""

    def __init__(self, label: int, classes: int) -> None:
        super().__init__(f"LabelOutOfRange: label {label} not in [0, {classes})")
        self.label = label
        self.classes = classes


class MissingGradientError(NNError):
    """Optimizer step or gradient archive with a parameter lacking .grad"""

    def __init__(self, parameter: str) -> None:
        super().__init__(f"MissingGradient: parameter {parameter!r} has no gradient; run backward first")
        self.parameter = parameter


class InvalidConfigError(NNError):
    """Model or optimizer configuration rejected"""

    def __init__(self, message: str) -> None:
        super().__init__(f"InvalidConfig: {message}")


class NameMismatchError(NNError):
    """Archive entry names differ from the model's parameter enumeration"""

    def __init__(self, missing: List[str], unexpected: List[str], order_differs: bool = False) -> None:
        details = []
        if missing:
            details.append(f"missing {missing}")
        if unexpected:
            details.append(f"unexpected {unexpected}")
        if order_differs and not details:
            details.append("entries are out of parameter order")
        super().__init__(f"NameMismatch: {'; '.join(details)}")
        self.missing = missing
        self.unexpected = unexpected
        self.order_differs = order_differs


class ParameterShapeMismatchError(NNError):
    """Archive entry shape or dtype differs from the parameter it restores"""

    def __init__(self, parameter: str, expected: Sequence[int], actual: Sequence[int]) -> None:
        super().__init__(
            f"ShapeMismatch: parameter {parameter!r} expects {list(expected)}, archive holds {list(actual)}"
        )
        self.parameter = parameter
        self.expected = list(expected)
        self.actual = list(actual)
