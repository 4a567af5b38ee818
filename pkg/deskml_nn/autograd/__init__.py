from .variable import Parameter, Variable, as_variable, backward, is_grad_enabled, no_grad
from .function import FunctionNode
from . import functions
from .gradcheck import GradCheckReport, finite_difference_check

__all__ = [
    "Variable",
    "Parameter",
    "as_variable",
    "backward",
    "no_grad",
    "is_grad_enabled",
    "FunctionNode",
    "functions",
    "GradCheckReport",
    "finite_difference_check",
]
