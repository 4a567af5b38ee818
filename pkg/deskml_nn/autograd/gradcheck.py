"""Central finite-difference check of analytic gradients"""

import inspect
from dataclasses import dataclass, field
from typing import Awaitable, Callable, Union

import numpy as np

from deskml_common import get_logger

from .variable import Variable, no_grad

logger = get_logger("deskml_nn.gradcheck", enable_file_logging=False)

ScalarFn = Callable[[Variable], Union[Variable, Awaitable[Variable]]]


@dataclass
class GradCheckReport:
    max_rel_error: float
    passed: bool
    tol: float
    h: float
    analytic: np.ndarray = field(repr=False)
    numeric: np.ndarray = field(repr=False)


async def _evaluate(f: ScalarFn, x: Variable) -> Variable:
    result = f(x)
    if inspect.isawaitable(result):
        result = await result
    return result


async def finite_difference_check(f: ScalarFn, x: Variable, h: float = 1e-3, tol: float = 1e-3) -> GradCheckReport:
    """
    Compare x.grad after backward against central differences of f.

    Each element of x.data is perturbed in place by ±h and restored. The
    difference quotient is taken in float64 over the step actually applied
    after float32 rounding. The error is max|analytic - numeric| divided by
    max(|analytic|∞, |numeric|∞, 1e-8).
    """
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")

    x.grad = None
    x.requires_grad = True
    y = await _evaluate(f, x)
    await y.backward()
    base = np.array(x.data.numpy(), dtype=np.float32)
    if x.grad is None:
        analytic = np.zeros(base.shape, dtype=np.float64)
    else:
        analytic = np.array(x.grad.numpy(), dtype=np.float64)

    numeric = np.zeros(base.shape, dtype=np.float64)
    probe = base.copy()
    try:
        with no_grad():
            for i in range(base.size):
                origin = base.flat[i]
                plus = np.float32(origin + np.float32(h))
                minus = np.float32(origin - np.float32(h))
                probe.flat[i] = plus
                x.data._assign_(probe)
                f_plus = float((await _evaluate(f, x)).item())
                probe.flat[i] = minus
                x.data._assign_(probe)
                f_minus = float((await _evaluate(f, x)).item())
                probe.flat[i] = origin
                numeric.flat[i] = (f_plus - f_minus) / (float(plus) - float(minus))
    finally:
        x.data._assign_(base)

    scale = max(float(np.max(np.abs(analytic), initial=0.0)), float(np.max(np.abs(numeric), initial=0.0)), 1e-8)
    err = float(np.max(np.abs(analytic - numeric), initial=0.0)) / scale
    report = GradCheckReport(max_rel_error=err, passed=err <= tol, tol=tol, h=h, analytic=analytic, numeric=numeric)
    logger.debug("Gradient check finished", elements=base.size, max_rel_error=err, passed=report.passed)
    return report
