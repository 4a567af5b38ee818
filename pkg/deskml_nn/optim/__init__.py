from .optimizer import MomentumSGD, MomentumSGDState, Optimizer, momentum_sgd_step

__all__ = [
    "Optimizer",
    "MomentumSGD",
    "MomentumSGDState",
    "momentum_sgd_step",
]
