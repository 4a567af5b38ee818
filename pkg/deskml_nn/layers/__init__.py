from .base import Layer
from .layers import Conv2d, Flatten, Linear, ReLU, uniform_fan_in

__all__ = [
    "Layer",
    "Linear",
    "Conv2d",
    "ReLU",
    "Flatten",
    "uniform_fan_in",
]
