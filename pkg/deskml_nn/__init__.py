"""
deskml-nn - define-by-run autograd and the layer/optimizer API.

Main Components:
- Variable / FunctionNode: dynamically recorded graph with reverse-mode backward
- Layer, Linear, Conv2d, ReLU, Flatten and the MLP / SmallCNN models
- MomentumSGD optimizer
- archive_model / restore_model: weights and gradients as tensor archives
- train_step / train_epoch / evaluate_accuracy: the training loop
"""

from . import functions
from .autograd import (
    FunctionNode,
    GradCheckReport,
    Parameter,
    Variable,
    as_variable,
    backward,
    finite_difference_check,
    is_grad_enabled,
    no_grad,
)
from .layers import Conv2d, Flatten, Layer, Linear, ReLU
from .models import MLP, SmallCNN, build_model
from .nn_types import *  # noqa: F401,F403
from .nn_types import __all__ as _types_all
from .optim import MomentumSGD, MomentumSGDState, Optimizer, momentum_sgd_step
from .serialization import archive_gradients, archive_model, load_checkpoint, restore_model, save_checkpoint
from .training import compute_loss, evaluate_accuracy, train_epoch, train_step

__all__ = [
    "functions",
    # Autograd
    "Variable",
    "Parameter",
    "FunctionNode",
    "as_variable",
    "backward",
    "no_grad",
    "is_grad_enabled",
    "finite_difference_check",
    "GradCheckReport",
    # Layers and models
    "Layer",
    "Linear",
    "Conv2d",
    "ReLU",
    "Flatten",
    "MLP",
    "SmallCNN",
    "build_model",
    # Optimizers
    "Optimizer",
    "MomentumSGD",
    "MomentumSGDState",
    "momentum_sgd_step",
    # Serialization
    "archive_model",
    "archive_gradients",
    "restore_model",
    "save_checkpoint",
    "load_checkpoint",
    # Training
    "compute_loss",
    "train_step",
    "train_epoch",
    "evaluate_accuracy",
] + list(_types_all)
