"""FunctionNode base class: one recorded operation in the define-by-run graph"""

import weakref
from abc import ABC, abstractmethod
from typing import Callable, Optional, Sequence, Tuple

from deskml_tensor import Tensor

from .variable import Variable, VariableLike, as_variable, is_grad_enabled


class FunctionNode(ABC):
    """
    Base class for differentiable operations.

    Subclasses implement forward on raw Tensors and backward mapping the
    upstream gradient to one gradient per input (None for no contribution).
    Calling the node runs forward and, when any input requires grad, links the
    output Variable back to this node.
    """

    op_kind: str = "function"

    def __init__(self):
        self.inputs: Tuple[Variable, ...] = ()
        self.saved: Tuple[Tensor, ...] = ()
        self.generation = 0
        self.output: Callable[[], Optional[Variable]] = lambda: None

    def __call__(self, *inputs: VariableLike) -> Variable:
        like = next((x for x in inputs if isinstance(x, Variable)), None)
        variables = [as_variable(x, like) for x in inputs]
        y = self.forward(*[v.data for v in variables])
        out = Variable(y)
        if is_grad_enabled() and any(v.requires_grad for v in variables):
            self.generation = max(v.generation for v in variables) + 1
            self.inputs = tuple(variables)
            out.set_creator(self)
            self.output = weakref.ref(out)
        else:
            self.saved = ()
        return out

    def save_for_backward(self, *tensors: Tensor) -> None:
        self.saved = tensors

    @abstractmethod
    def forward(self, *xs: Tensor) -> Tensor:
        """Compute the output tensor"""

    @abstractmethod
    def backward(self, gy: Tensor) -> Sequence[Optional[Tensor]]:
        """Gradient for each input given the output gradient"""

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(op_kind={self.op_kind!r}, generation={self.generation})"
