"""Concrete layers"""

import math
from typing import List, Optional, Sequence

import numpy as np

from deskml_tensor import from_numpy, zeros
from deskml_tensor.tensor_types import DType

from ..autograd import Parameter, Variable, functions as F
from .base import Layer


def uniform_fan_in(rng: np.random.Generator, shape: Sequence[int], fan_in: int) -> np.ndarray:
    """uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) as float32"""
    bound = 1.0 / math.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=tuple(shape)).astype(np.float32)


class Linear(Layer):
    """y = x·Wᵀ + b

    Args:
        in_features: input width
        out_features: output width
        rng: generator for the weight draw; a fresh unseeded one when omitted
    """

    def __init__(self, in_features: int, out_features: int, rng: Optional[np.random.Generator] = None):
        super().__init__()
        rng = rng or np.random.default_rng()
        self.in_features = in_features
        self.out_features = out_features
        self.weight = Parameter(from_numpy(uniform_fan_in(rng, (out_features, in_features), in_features),
                                           DType.FLOAT32), name="weight")
        self.bias = Parameter(zeros((out_features,)), name="bias")

    async def forward(self, inputs: List[Variable]) -> List[Variable]:
        (x,) = inputs
        return [F.linear(x, self.weight, self.bias)]

    def __repr__(self) -> str:
        return f"Linear({self.in_features}, {self.out_features})"


class Conv2d(Layer):
    """2-D cross-correlation with square kernels"""

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int,
                 stride: int = 1, padding: int = 0, rng: Optional[np.random.Generator] = None):
        super().__init__()
        rng = rng or np.random.default_rng()
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.stride = stride
        self.padding = padding
        fan_in = in_channels * kernel_size * kernel_size
        shape = (out_channels, in_channels, kernel_size, kernel_size)
        self.weight = Parameter(from_numpy(uniform_fan_in(rng, shape, fan_in), DType.FLOAT32), name="weight")
        self.bias = Parameter(zeros((out_channels,)), name="bias")

    async def forward(self, inputs: List[Variable]) -> List[Variable]:
        (x,) = inputs
        return [F.conv2d(x, self.weight, self.bias, stride=self.stride, padding=self.padding)]

    def __repr__(self) -> str:
        return (f"Conv2d({self.in_channels}, {self.out_channels}, k={self.kernel_size}, "
                f"stride={self.stride}, padding={self.padding})")


class ReLU(Layer):
    async def forward(self, inputs: List[Variable]) -> List[Variable]:
        return [F.relu(x) for x in inputs]


class Flatten(Layer):
    async def forward(self, inputs: List[Variable]) -> List[Variable]:
        return [F.flatten(x) for x in inputs]
