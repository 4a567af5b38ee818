"""Optimizers"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Sequence, Union

import numpy as np

from deskml_common import get_logger
from deskml_tensor import Tensor, zeros

from ..autograd import Parameter
from ..layers import Layer
from ..nn_types.errors import InvalidConfigError, MissingGradientError

logger = get_logger("deskml_nn.optim", enable_file_logging=False)

ParamSource = Union[Layer, Iterable[Parameter]]


def _named(source: ParamSource) -> List[tuple]:
    if isinstance(source, Layer):
        return source.named_parameters()
    return [(p.name or f"param{i}", p) for i, p in enumerate(source)]


@dataclass
class MomentumSGDState:
    """lr, momentum and one zero-initialized velocity per parameter, in enumeration order"""

    lr: float
    momentum: float
    velocity: List[Tensor] = field(default_factory=list)

    def __post_init__(self):
        if not self.lr > 0:
            raise InvalidConfigError(f"lr must be positive, got {self.lr}")
        if not 0.0 <= self.momentum < 1.0:
            raise InvalidConfigError(f"momentum must be in [0, 1), got {self.momentum}")

    @classmethod
    def for_parameters(cls, params: Sequence[Parameter], lr: float, momentum: float) -> "MomentumSGDState":
        state = cls(lr=lr, momentum=momentum)
        state.velocity = [zeros(p.shape, p.dtype, backend=p.data.backend) for p in params]
        return state


def momentum_sgd_step(params: Sequence[Parameter], grads: Sequence[Optional[Tensor]], state: MomentumSGDState,
                      names: Optional[Sequence[str]] = None) -> None:
    """
    v <- momentum * v + g, then p <- p - lr * v, in place and in parameter order.

    Raises:
        MissingGradientError: some parameter has no gradient
    """
    if len(params) != len(state.velocity) or len(params) != len(grads):
        raise ValueError(f"{len(params)} parameters, {len(grads)} gradients, {len(state.velocity)} velocities")
    for i, g in enumerate(grads):
        if g is None:
            name = names[i] if names else (params[i].name or f"param{i}")
            raise MissingGradientError(name)

    lr = np.float32(state.lr)
    mu = np.float32(state.momentum)
    for p, g, v in zip(params, grads, state.velocity):
        v_next = mu * v.numpy() + g.numpy()
        v._assign_(v_next)
        p.data._assign_(p.data.numpy() - lr * v_next)


class Optimizer(ABC):
    """Base class for optimizers

    Holds the parameter enumeration at construction time; step() applies one
    update from the gradients currently stored on the parameters.
    """

    def __init__(self, params: ParamSource):
        named = _named(params)
        self.names = [n for n, _ in named]
        self.params = [p for _, p in named]

    @property
    @abstractmethod
    def name(self) -> str:
        """Optimizer name"""
        pass

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None

    @abstractmethod
    def apply(self, grads: Sequence[Optional[Tensor]]) -> None:
        """Apply one update from explicit gradients"""
        pass

    async def step(self) -> None:
        self.apply([p.grad for p in self.params])

    def iter_tensors(self) -> Iterator[Tensor]:
        return iter(())


class MomentumSGD(Optimizer):
    """Heavy-ball SGD without dampening or Nesterov correction"""

    def __init__(self, params: ParamSource, lr: float = 0.01, momentum: float = 0.9):
        super().__init__(params)
        self.state = MomentumSGDState.for_parameters(self.params, lr, momentum)
        logger.debug("Optimizer created", optimizer=self.name, parameters=len(self.params), lr=lr, momentum=momentum)

    @property
    def name(self) -> str:
        return "momentum_sgd"

    @property
    def lr(self) -> float:
        return self.state.lr

    @property
    def momentum(self) -> float:
        return self.state.momentum

    def apply(self, grads: Sequence[Optional[Tensor]]) -> None:
        momentum_sgd_step(self.params, grads, self.state, names=self.names)

    def iter_tensors(self) -> Iterator[Tensor]:
        yield from self.state.velocity
