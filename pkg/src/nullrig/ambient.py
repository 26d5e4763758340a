"""Ambient semi-Riemannian manifolds given in a single coordinate chart.

Curvature convention used everywhere in the package::

    R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
    R(X, Y, Z, W) = g(R(X, Y)Z, W)

In components ``R[d, c, a, b] = R^d_{cab}`` with ``R(d_a, d_b) d_c = R^d_{cab} d_d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jet as J
from .errors import DegeneracyError, ConfigurationError

SIGNATURE_RTOL = 1e-8


def _always(_x) -> bool:
    return True


@dataclass(frozen=True)
class AmbientManifold:
    dim: int
    index: int
    metric_fn: Callable
    chart_domain: Callable = _always
    name: str = "ambient"
    family: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.dim < 3:
            raise ConfigurationError("ambient dimension must be at least 3")
        if not (1 <= self.index <= self.dim - 1):
            raise ConfigurationError("ambient index must lie in 1..dim-1")

    def metric(self, x):
        """Metric matrix at ``x``; ``x`` may be a jet."""
        return self.metric_fn(x)

    def metric_value(self, x) -> np.ndarray:
        return np.asarray(J.value(self.metric_fn(np.asarray(x, dtype=float))), dtype=float)


@dataclass(frozen=True)
class AmbientVector:
    base: np.ndarray
    components: np.ndarray


# ---------------------------------------------------------------------------
# parametrized metric families (the only user-definable ones)
# ---------------------------------------------------------------------------


def constant_metric(matrix) -> Callable:
    mat = np.array(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or not np.allclose(mat, mat.T):
        raise ConfigurationError("constant metric must be a symmetric square matrix")

    def metric_fn(x):
        return mat.copy()

    return metric_fn


_WARPS = {
    "sin": lambda t, a, b, c: a * np.sin(b * t + c),
    "cosh": lambda t, a, b, c: a * np.cosh(b * t + c),
    "exp": lambda t, a, b, c: a * np.exp(b * t + c),
    "linear": lambda t, a, b, c: a + b * t,
}


def warped_metric(base, fiber, warp: str, coord: int, params=(1.0, 1.0, 0.0)) -> Callable:
    """``base (+) w(x_coord)^2 fiber`` with ``w`` from a fixed family.

    ``coord`` indexes a base coordinate.  Families: ``sin``, ``cosh``, ``exp``
    (``a f(b t + c)``) and ``linear`` (``a + b t``).
    """
    base = np.array(base, dtype=float)
    fiber = np.array(fiber, dtype=float)
    if warp not in _WARPS:
        raise ConfigurationError(f"unknown warp family {warp!r}; expected one of {sorted(_WARPS)}")
    p, q = base.shape[0], fiber.shape[0]
    if not (0 <= coord < p):
        raise ConfigurationError("warp coordinate must be a base coordinate")
    a, b, c = (list(params) + [0.0, 0.0, 0.0])[:3]
    wfn = _WARPS[warp]

    def metric_fn(x):
        w = wfn(x[coord], a, b, c)
        fib = (w * w) * fiber
        top = J.concatenate([base, np.zeros((p, q))], axis=1)
        bottom = J.concatenate([np.zeros((q, p)), fib], axis=1)
        return J.concatenate([top, bottom], axis=0)

    return metric_fn


def from_family(spec: dict, name: str = "ambient") -> AmbientManifold:
    """Build an ambient manifold from a family description (config/catalog)."""
    kind = spec.get("family")
    if kind == "constant":
        mat = np.array(spec["matrix"], dtype=float)
        fn = constant_metric(mat)
        dim = mat.shape[0]
    elif kind == "warped":
        fn = warped_metric(spec["base"], spec["fiber"], spec["warp"], int(spec["coord"]),
                           spec.get("params", (1.0, 1.0, 0.0)))
        dim = len(spec["base"]) + len(spec["fiber"])
    else:
        raise ConfigurationError(f"unknown ambient family {kind!r}")
    index = int(spec["index"])
    return AmbientManifold(dim, index, fn, name=name, family=dict(spec))


# ---------------------------------------------------------------------------
# generic connection algebra (works on jets and arrays)
# ---------------------------------------------------------------------------


def christoffel_from(ginv, dg):
    """Levi-Civita symbols ``G[c, a, b]`` from the inverse metric and
    ``dg[b, d, a] = d_a g_bd``."""
    term = (dg.transpose(1, 2, 0) + dg.transpose(1, 0, 2) - dg.transpose(2, 0, 1))
    return 0.5 * J.einsum("cd,dab->cab", ginv, term)


def christoffel_from_metric_jet(g):
    """Christoffel jet of a metric jet seeded in its own coordinates."""
    dg = g.gradient()
    ginv = J.inv(g.truncate(dg.order))
    return christoffel_from(ginv, dg)


def curvature_from(G, dG):
    """``R[d, c, a, b]`` from coefficients ``G[k, i, j]`` (nabla_i d_j = G^k_ij d_k)
    and ``dG[k, i, j, a] = d_a G^k_ij``."""
    lin = J.einsum("dbca->dcab", dG) - J.einsum("dacb->dcab", dG)
    quad = J.einsum("dae,ebc->dcab", G, G) - J.einsum("dbe,eac->dcab", G, G)
    return lin + quad


def lower_first(g, R):
    """``R_lowered[a, b, c, d] = g(R(d_a, d_b) d_c, d_d)``."""
    return J.einsum("ed,ecab->abcd", g, R)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def _check_domain(m: AmbientManifold, x):
    if not m.chart_domain(np.asarray(x, dtype=float)):
        raise ConfigurationError(f"point {x} outside the chart domain of {m.name}")


def _metric_jet(m: AmbientManifold, x, order: int):
    xj = J.lift(x, order=order)
    g = m.metric(xj)
    if not J.is_jet(g):
        g = J._to_jet(g, order, xj.nvars)
    val = g.value
    if abs(np.linalg.det(val)) < 1e-14 * max(1.0, np.abs(val).max()) ** val.shape[0]:
        raise DegeneracyError(f"ambient metric singular at {x}")
    return g


def christoffel(m: AmbientManifold, x) -> np.ndarray:
    """``G[c, a, b] = Gamma^c_ab`` of the Levi-Civita connection at ``x``."""
    _check_domain(m, x)
    return christoffel_from_metric_jet(_metric_jet(m, x, 1)).value


def ambient_curvature(m: AmbientManifold, x) -> np.ndarray:
    """``R[d, c, a, b]`` at ``x``."""
    _check_domain(m, x)
    G = christoffel_from_metric_jet(_metric_jet(m, x, 2))
    return curvature_from(G.truncate(0), G.gradient()).value


def ambient_cov_deriv(m: AmbientManifold, V: Callable, X: AmbientVector) -> AmbientVector:
    """``nabla-bar_X V`` for a vector field ``V`` given as a function of coordinates."""
    x = np.asarray(X.base, dtype=float)
    _check_domain(m, x)
    xj = J.lift(x, order=1)
    Vj = V(xj)
    if not J.is_jet(Vj):
        Vj = J._to_jet(Vj, 1, xj.nvars)
    G = christoffel(m, x)
    comp = Vj.grad @ X.components + np.einsum("cab,a,b->c", G, X.components, Vj.value)
    return AmbientVector(x, comp)


def ambient_cov_deriv_along(m: AmbientManifold, f: Callable, V: Callable, u, direction: int) -> AmbientVector:
    """``nabla-bar_{f_* d_direction} V`` for a field ``V(u)`` along the map ``f``."""
    uj = J.lift(u, order=1)
    x = f(uj)
    Vj = V(uj)
    if not J.is_jet(Vj):
        Vj = J._to_jet(Vj, 1, uj.nvars)
    Xc = x.grad[:, direction]
    G = christoffel(m, x.value)
    comp = Vj.grad[:, direction] + np.einsum("cab,a,b->c", G, Xc, Vj.value)
    return AmbientVector(x.value, comp)


def signature_counts(matrix, rtol: float = SIGNATURE_RTOL) -> tuple[int, int, int]:
    """(negative, zero, positive) eigenvalue counts of a symmetric matrix."""
    w = np.linalg.eigvalsh(0.5 * (matrix + np.transpose(matrix)))
    tol = rtol * max(np.abs(w).max(), 1e-300)
    return int((w < -tol).sum()), int((np.abs(w) <= tol).sum()), int((w > tol).sum())


def check_signature(m: AmbientManifold, x) -> None:
    g = m.metric_value(x)
    if not np.allclose(g, g.T, atol=1e-12):
        raise DegeneracyError("ambient metric is not symmetric")
    neg, zero, pos = signature_counts(g)
    if zero:
        raise DegeneracyError(f"ambient metric singular at {x}")
    if neg != m.index:
        raise DegeneracyError(f"ambient metric index {neg} != declared {m.index}")
