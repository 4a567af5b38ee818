"""Functional namespace, e.g. deskml_nn.functions.softmax_cross_entropy(logits, labels)"""

from .autograd.functions import (  # noqa: F401
    add,
    conv2d,
    flatten,
    linear,
    matmul,
    mean,
    mul,
    neg,
    relu,
    reshape,
    softmax_cross_entropy,
    sub,
    sum,
    transpose,
)

__all__ = [
    "add",
    "sub",
    "mul",
    "neg",
    "matmul",
    "relu",
    "reshape",
    "transpose",
    "flatten",
    "sum",
    "mean",
    "linear",
    "conv2d",
    "softmax_cross_entropy",
]
