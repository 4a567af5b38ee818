"""Variable: the autograd layer wrapped around a Tensor"""

import heapq
import itertools
from contextlib import contextmanager
from contextvars import ContextVar
from numbers import Number
from typing import TYPE_CHECKING, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from deskml_tensor import Tensor, from_numpy, kernels
from deskml_tensor.tensor_types import DType

from ..nn_types.errors import NonScalarLossError

if TYPE_CHECKING:
    from .function import FunctionNode

_grad_enabled: ContextVar[bool] = ContextVar("deskml_grad_enabled", default=True)


def is_grad_enabled() -> bool:
    return _grad_enabled.get()


@contextmanager
def no_grad():
    """Suppress graph recording in the current context"""
    token = _grad_enabled.set(False)
    try:
        yield
    finally:
        _grad_enabled.reset(token)


class Variable:
    """
    Differentiable wrapper around a Tensor.

    Args:
        data: wrapped tensor
        requires_grad: whether gradients flow into this Variable
        name: optional label used in reprs and diagnostics
    """

    def __init__(self, data: Tensor, requires_grad: bool = False, name: Optional[str] = None):
        if not isinstance(data, Tensor):
            raise TypeError(f"Variable wraps a Tensor, got {type(data).__name__}")
        self.data = data
        self.grad: Optional[Tensor] = None
        self.creator: Optional["FunctionNode"] = None
        self.requires_grad = requires_grad
        self.generation = 0
        self.name = name
        self.retains_grad = False

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self) -> DType:
        return self.data.dtype

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def is_leaf(self) -> bool:
        return self.creator is None

    def set_creator(self, node: "FunctionNode") -> None:
        self.creator = node
        self.generation = node.generation
        self.requires_grad = True

    def retain_grad(self) -> "Variable":
        """Keep this non-leaf Variable's gradient after backward"""
        self.retains_grad = True
        return self

    def iter_tensors(self) -> Iterator[Tensor]:
        yield self.data
        if self.grad is not None:
            yield self.grad

    async def backward(self) -> None:
        backward(self)

    def item(self):
        return self.data.item()

    # operator sugar; the function module is imported lazily to avoid a cycle

    def __add__(self, other):
        return _functions().add(self, other)

    def __radd__(self, other):
        return _functions().add(other, self)

    def __sub__(self, other):
        return _functions().sub(self, other)

    def __rsub__(self, other):
        return _functions().sub(other, self)

    def __mul__(self, other):
        return _functions().mul(self, other)

    def __rmul__(self, other):
        return _functions().mul(other, self)

    def __neg__(self):
        return _functions().neg(self)

    def __matmul__(self, other):
        return _functions().matmul(self, other)

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        op = f", creator={self.creator.op_kind}" if self.creator else ""
        return f"Variable{label}(shape={list(self.shape)}, dtype={self.dtype}{op})"


class Parameter(Variable):
    """Trainable Variable owned by a Layer"""

    def __init__(self, data: Tensor, name: Optional[str] = None):
        super().__init__(data, requires_grad=True, name=name)


VariableLike = Union[Variable, Tensor, Number]


def as_variable(value: VariableLike, like: Optional[Variable] = None) -> Variable:
    if isinstance(value, Variable):
        return value
    if isinstance(value, Tensor):
        return Variable(value)
    dtype = like.dtype if like is not None else DType.FLOAT32
    backend = like.data.backend if like is not None else None
    return Variable(from_numpy(np.asarray(value, dtype=dtype.numpy_dtype), dtype, backend=backend))


def _functions():
    from . import functions
    return functions


def backward(loss: Variable) -> None:
    """
    Reverse-mode sweep from a scalar loss.

    Nodes are visited in strictly decreasing generation, so every consumer of a
    Variable has contributed before the Variable's own creator runs. Leaf
    Variables accumulate into .grad; non-leaf gradients are dropped unless
    retain_grad() was requested.
    """
    if loss.data.size != 1 or loss.ndim > 1:
        raise NonScalarLossError(loss.shape)

    seed = from_numpy(np.ones(loss.shape, dtype=loss.dtype.numpy_dtype), loss.dtype, backend=loss.data.backend)
    pending: Dict[int, Tuple[Variable, Tensor]] = {id(loss): (loss, seed)}
    order = itertools.count()
    heap: List[Tuple[int, int, "FunctionNode"]] = []
    queued = set()

    def push(node: "FunctionNode") -> None:
        if id(node) not in queued:
            queued.add(id(node))
            heapq.heappush(heap, (-node.generation, next(order), node))

    def deliver(var: Variable, grad: Tensor) -> None:
        if var.creator is None:
            var.grad = grad if var.grad is None else kernels.add(var.grad, grad)
            return
        if id(var) in pending:
            _, acc = pending[id(var)]
            pending[id(var)] = (var, kernels.add(acc, grad))
        else:
            pending[id(var)] = (var, grad)
        push(var.creator)

    if loss.creator is None:
        if loss.requires_grad:
            deliver(loss, seed)
        return
    push(loss.creator)

    while heap:
        _, _, node = heapq.heappop(heap)
        output = node.output()
        if output is None or id(output) not in pending:
            continue
        _, gy = pending.pop(id(output))
        if output.retains_grad:
            output.grad = gy
        grads = node.backward(gy)
        for var, gx in zip(node.inputs, grads):
            if gx is None or not var.requires_grad:
                continue
            deliver(var, gx)
