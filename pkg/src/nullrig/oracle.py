"""Central finite differences with Richardson extrapolation.

This is the independent derivative oracle: it only ever evaluates functions on
plain floats and never touches jet arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EvaluationError


@dataclass(frozen=True)
class FinDiffConfig:
    step: float = 1e-5
    richardson_levels: int = 2
    # second differences divide by step**2; a larger step keeps rounding small
    second_step: float = 1e-3

    def __post_init__(self):
        if not (0.0 < self.step < 1e-2):
            raise ValueError("step must lie in (0, 1e-2)")
        if not (0.0 < self.second_step < 1e-1):
            raise ValueError("second_step must lie in (0, 1e-1)")
        if int(self.richardson_levels) < 1:
            raise ValueError("richardson_levels must be >= 1")


DEFAULT = FinDiffConfig()


def _eval(f, x):
    y = np.asarray(f(x), dtype=float)
    if not np.all(np.isfinite(y)):
        raise EvaluationError(f"non-finite function value at {x}")
    return y


def _richardson(stencil: Callable[[float], np.ndarray], h: float, levels: int) -> np.ndarray:
    # error expansion is even in h for all central stencils used here
    table = [stencil(h / 2 ** i) for i in range(levels)]
    for j in range(1, levels):
        fac = 4.0 ** j
        table = [(fac * table[i + 1] - table[i]) / (fac - 1.0) for i in range(len(table) - 1)]
    return table[0]


def fd_derivative(f: Callable, point, direction: int, config: FinDiffConfig = DEFAULT) -> np.ndarray:
    """d f / d x_direction at ``point`` (f may be vector valued)."""
    x0 = np.asarray(point, dtype=float)
    e = np.zeros_like(x0)
    e[direction] = 1.0

    def central(h):
        return (_eval(f, x0 + h * e) - _eval(f, x0 - h * e)) / (2.0 * h)

    return _richardson(central, config.step, config.richardson_levels)


def fd_gradient(f: Callable, point, config: FinDiffConfig = DEFAULT) -> np.ndarray:
    """All first partials, stacked on a trailing axis."""
    x0 = np.asarray(point, dtype=float)
    return np.stack([fd_derivative(f, x0, i, config) for i in range(x0.size)], axis=-1)


def fd_second(f: Callable, point, i: int, j: int, config: FinDiffConfig = DEFAULT) -> np.ndarray:
    x0 = np.asarray(point, dtype=float)
    ei = np.zeros_like(x0)
    ej = np.zeros_like(x0)
    ei[i] = 1.0
    ej[j] = 1.0

    def mixed(h):
        return (_eval(f, x0 + h * ei + h * ej) - _eval(f, x0 + h * ei - h * ej)
                - _eval(f, x0 - h * ei + h * ej) + _eval(f, x0 - h * ei - h * ej)) / (4.0 * h * h)

    return _richardson(mixed, config.second_step, config.richardson_levels)


def fd_hessian(f: Callable, point, config: FinDiffConfig = DEFAULT) -> np.ndarray:
    x0 = np.asarray(point, dtype=float)
    n = x0.size
    cols = {}
    for i in range(n):
        for j in range(i, n):
            cols[i, j] = fd_second(f, x0, i, j, config)
    shape = cols[0, 0].shape
    out = np.empty(shape + (n, n))
    for (i, j), v in cols.items():
        out[..., i, j] = v
        out[..., j, i] = v
    return out
