"""Null transversal rigging, rigging 1-forms, screen projection and rigged metric."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import jet as J
from .ambient import AmbientManifold, christoffel, signature_counts
from .errors import ContradictionError, TransversalConstructionError, UnsupportedError
from .submanifold import SEED_RTOL, _selector

DET_FLOOR = 1e-10


@dataclass
class Rigging:
    """Transversal fields ``N`` (ambient, N x r) and forms ``omega`` (r x n).

    ``closed`` holds one entry per index: True, False or None (unknown).
    """

    N: object
    omega: object
    closed: tuple = ()


@dataclass(frozen=True)
class RiggedMetric:
    base: np.ndarray
    matrix: np.ndarray
    sign_convention: float


def construct_transversal(xi, screen, screen_signs, W, W_signs, gbar, seeds: Sequence[int]):
    """Null transversal frame dual to ``xi`` and orthogonal to screen and ``W``.

    All arguments may be jets; ``seeds`` are ambient coordinate indices.
    """
    Nd = J.value(gbar).shape[0]
    V = _selector(Nd, seeds)
    G = J.einsum("aj,ab,bk->jk", V, gbar, xi)
    gv = np.asarray(J.value(G))
    s = np.linalg.svd(gv, compute_uv=False)
    if s.size == 0 or s[-1] <= SEED_RTOL * max(np.abs(gv).max(), 1e-300):
        raise TransversalConstructionError("seed pairing with the radical is singular")
    Wt = J.einsum("aj,ij->ai", V, J.inv(G))
    for basis, signs in ((screen, screen_signs), (W, W_signs)):
        if np.asarray(signs).size:
            coef = J.einsum("ai,ab,bc->ic", Wt, gbar, basis) * np.asarray(signs)
            Wt = Wt - J.einsum("ac,ic->ai", basis, coef)
    S = J.einsum("ai,ab,bj->ij", Wt, gbar, Wt)
    return Wt - 0.5 * J.einsum("aj,ij->ai", xi, S)


def omega_forms(N, gbar, Jm):
    """``omega[i, j] = gbar(d_j, N_i)`` in tangent coordinates."""
    return J.einsum("ai,ab,bj->ij", N, gbar, Jm)


def projector_matrix(xi_tc, omega):
    n = J.value(xi_tc).shape[0]
    return np.eye(n) - J.einsum("ir,rj->ij", xi_tc, omega)


def projection_P(xi_tc, omega, X):
    """``PX = X - sum_i omega_i(X) xi_i`` (tangent coordinates)."""
    return X - J.einsum("ir,rj,j->i", xi_tc, omega, X)


def rigged_matrix(g, omega, sign: float = 1.0):
    return g + sign * J.einsum("ri,rj->ij", omega, omega)


def rigged_metric(g, omega, sign: float = 1.0, base=None, expected_index: int | None = None) -> RiggedMetric:
    """Nondegenerate metric ``g + sign * sum omega_i (x) omega_i`` (values)."""
    if sign not in (1, -1, 1.0, -1.0):
        raise ValueError("sign convention must be +1 or -1")
    mat = np.asarray(J.value(rigged_matrix(g, omega, sign)), dtype=float)
    mat = 0.5 * (mat + mat.T)
    if abs(np.linalg.det(mat)) <= DET_FLOOR:
        raise ContradictionError("rigged metric is degenerate; the frame is invalid")
    if expected_index is not None and sign > 0:
        neg = signature_counts(mat)[0]
        if neg != expected_index:
            raise ContradictionError(f"rigged metric has index {neg}, expected {expected_index}")
    return RiggedMetric(None if base is None else np.asarray(base), mat, float(sign))


def exterior_derivative(omega_jet) -> np.ndarray:
    """``d omega[r, i, j] = d_i omega_rj - d_j omega_ri`` (values)."""
    dO = np.asarray(omega_jet.gradient().value)  # [r, j, i] = d_i omega_rj
    return dO.transpose(0, 2, 1) - dO


def is_closed(domega, tol: float = 1e-9) -> tuple[bool, ...]:
    d = np.asarray(domega)
    return tuple(bool(np.abs(d[i]).max(initial=0.0) < tol) for i in range(d.shape[0]))


@dataclass(frozen=True)
class ConformalFit:
    conformal: tuple[bool, ...]
    lam: tuple[float, ...]
    residual: tuple[float, ...]


def is_conformal_rigging(m: AmbientManifold, N_ext: Callable | None, x, tol: float = 1e-9) -> ConformalFit:
    """Least-squares test of ``L_N gbar = lambda gbar`` for an ambient extension.

    ``N_ext(x)`` returns the r transversal fields (N x r) on an ambient
    neighbourhood; it must accept jets.
    """
    if N_ext is None:
        raise UnsupportedError("no ambient extension of the rigging available")
    x = np.asarray(x, dtype=float)
    xj = J.lift(x, order=1)
    Nj = N_ext(xj)
    if not J.is_jet(Nj):
        Nj = J._to_jet(Nj, 1, xj.nvars)
    G = christoffel(m, x)
    g = m.metric_value(x)
    Nv, dN = Nj.value, Nj.grad  # dN[c, i, a] = d_a N_i^c
    flags, lams, res = [], [], []
    for i in range(Nv.shape[1]):
        cov = dN[:, i, :] + np.einsum("cab,b->ca", G, Nv[:, i])  # [c, a] = (nabla_a N)^c
        low = g @ cov  # [b, a] = gbar(nabla_a N, d_b)
        S = low + low.T
        lam = float(np.sum(S * g) / np.sum(g * g))
        r = float(np.abs(S - lam * g).max())
        flags.append(r < tol)
        lams.append(lam)
        res.append(r)
    return ConformalFit(tuple(flags), tuple(lams), tuple(res))
