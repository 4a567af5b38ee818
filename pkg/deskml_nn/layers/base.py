"""Base layer class definition"""
from abc import ABC, abstractmethod
from typing import Dict, Iterator, List, Tuple, Union

from deskml_tensor import Tensor

from ..autograd import Parameter, Variable

Inputs = Union[Variable, Tensor, List[Union[Variable, Tensor]]]


class Layer(ABC):
    """Base class for layers and models

    Parameters and child layers assigned as attributes are registered in
    assignment order; enumeration walks that order depth-first and yields
    dotted names such as "l1.weight".
    """

    def __init__(self):
        object.__setattr__(self, "_members", {})

    def __setattr__(self, key, value):
        members: Dict[str, object] = self.__dict__.get("_members")
        if members is None:
            raise AttributeError(f"{self.__class__.__name__}.__init__ must call super().__init__() first")
        if isinstance(value, (Parameter, Layer)):
            members[key] = value
        else:
            members.pop(key, None)
        object.__setattr__(self, key, value)

    def __delattr__(self, key):
        self._members.pop(key, None)
        object.__delattr__(self, key)

    @property
    def name(self) -> str:
        """Layer name"""
        return self.__class__.__name__

    def children(self) -> Iterator[Tuple[str, "Layer"]]:
        for key, member in self._members.items():
            if isinstance(member, Layer):
                yield key, member

    def named_parameters(self) -> List[Tuple[str, Parameter]]:
        """Unique (dotted name, Parameter) pairs in registration order"""
        seen = set()
        result: List[Tuple[str, Parameter]] = []

        def walk(layer: "Layer", prefix: str):
            for key, member in layer._members.items():
                path = f"{prefix}{key}"
                if isinstance(member, Parameter):
                    if id(member) not in seen:
                        seen.add(id(member))
                        result.append((path, member))
                else:
                    walk(member, f"{path}.")

        walk(self, "")
        return result

    def parameters(self) -> List[Parameter]:
        return [p for _, p in self.named_parameters()]

    def parameter_count(self) -> int:
        return sum(p.data.size for p in self.parameters())

    def zero_grad(self) -> None:
        """Clear (not zero-fill) every parameter gradient"""
        for p in self.parameters():
            p.grad = None

    def iter_tensors(self) -> Iterator[Tensor]:
        for p in self.parameters():
            yield p.data

    @abstractmethod
    async def forward(self, inputs: List[Variable]) -> List[Variable]:
        """Map a list of input Variables to a list of output Variables"""
        pass

    async def call(self, inputs: Inputs) -> List[Variable]:
        if not isinstance(inputs, (list, tuple)):
            inputs = [inputs]
        return await self.forward([x if isinstance(x, Variable) else Variable(x) for x in inputs])

    async def c(self, *inputs: Union[Variable, Tensor]) -> Variable:
        """Single-output convenience over call()"""
        outputs = await self.call(list(inputs))
        if len(outputs) != 1:
            raise ValueError(f"{self.name}.c expects exactly one output, got {len(outputs)}; use call()")
        return outputs[0]

    def __repr__(self) -> str:
        children = ", ".join(f"{k}={v!r}" for k, v in self.children())
        return f"{self.name}({children})"
