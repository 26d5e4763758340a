"""Null submanifolds: pullback metric, radical and screen frames, classification.

All frame constructions are closed-form linear algebra with a pivot/ordering
pattern fixed per chart (:class:`FramePattern`).  Rank and sign decisions only
read values, so the same code runs on jets and the resulting frame fields are
smooth wherever the pattern stays valid.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import jet as J
from .ambient import AmbientManifold
from .errors import (ImmersionError, NotNullError, RechartError, ScreenSelectionError,
                     TransversalConstructionError, UnsupportedError)

RANK_RTOL = 1e-8
PIVOT_RTOL = 1e-8
SEED_RTOL = 1e-6


def _always(_u) -> bool:
    return True


@dataclass(frozen=True)
class Immersion:
    sub_dim: int
    map_fn: Callable
    domain: Callable = _always
    name: str = "immersion"

    def __post_init__(self):
        if self.sub_dim < 2:
            raise UnsupportedError("submanifold dimension must be at least 2")

    def __call__(self, u):
        return self.map_fn(u)


@dataclass(frozen=True)
class PullbackMetric:
    base: np.ndarray
    matrix: np.ndarray


def numerical_rank(matrix, rtol: float = RANK_RTOL) -> int:
    s = np.linalg.svd(np.atleast_2d(matrix), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int((s > rtol * s[0]).sum())


def jacobian(f: Immersion, u) -> np.ndarray:
    uj = J.lift(u, order=1)
    return np.asarray(f(uj).grad)


def pullback(m: AmbientManifold, f: Immersion, u) -> PullbackMetric:
    u = np.asarray(u, dtype=float)
    uj = J.lift(u, order=1)
    x = f(uj)
    Jm = x.grad
    if numerical_rank(Jm) < f.sub_dim:
        raise ImmersionError(f"Jacobian of {f.name} is rank deficient at {u}")
    g = m.metric_value(x.value)
    mat = Jm.T @ g @ Jm
    return PullbackMetric(u, 0.5 * (mat + mat.T))


def classify(n: int, k: int, r: int) -> str:
    """Case label of an ``r``-null submanifold of dimension ``n``, codimension ``k``."""
    if n < 1 or k < 1 or not (0 <= r <= min(n, k)):
        raise ValueError("need n, k >= 1 and 0 <= r <= min(n, k)")
    if r == 0:
        return "nondegenerate"
    if r < min(n, k):
        return "r-lightlike"
    if r == k < n:
        return "coisotropic"
    if r == n < k:
        return "isotropic"
    return "totally-null"


SUPPORTED = ("r-lightlike", "coisotropic")


# ---------------------------------------------------------------------------
# pattern (chart-fixed pivot and ordering choices)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FramePattern:
    r: int
    radical_pivots: tuple[int, ...]
    radical_free: tuple[int, ...]
    screen_order: tuple[int, ...]
    normal_pivots: tuple[int, ...]
    normal_free: tuple[int, ...]
    screen_transversal: tuple[int, ...]
    seeds: tuple[int, ...]


def _greedy_columns(mat: np.ndarray, rtol: float = RANK_RTOL) -> list[int]:
    """Leftmost maximal set of linearly independent columns."""
    chosen: list[int] = []
    scale = max(np.abs(mat).max(), 1e-300)
    for j in range(mat.shape[1]):
        trial = chosen + [j]
        sub = mat[:, trial]
        s = np.linalg.svd(sub, compute_uv=False)
        if s.size == len(trial) and s[-1] > rtol * scale:
            chosen = trial
    return chosen


def _selector(size: int, cols: Sequence[int]) -> np.ndarray:
    S = np.zeros((size, len(cols)))
    for a, c in enumerate(cols):
        S[c, a] = 1.0
    return S


def kernel_fixed(M, rows: Sequence[int], pivots: Sequence[int], free: Sequence[int]):
    """Kernel basis of ``M`` (rows x cols) with unit entries in the free columns.

    ``M[rows][:, pivots]`` must be invertible; the remaining equations are then
    implied by the known rank.
    """
    ncols = J.value(M).shape[1]
    rows, pivots, free = list(rows), list(pivots), list(free)
    if not free:
        return np.zeros((ncols, 0))
    S_free = _selector(ncols, free)
    if not pivots:
        return S_free
    block = M[np.ix_(rows, pivots)]
    bval = J.value(block)
    s = np.linalg.svd(bval, compute_uv=False)
    if s[-1] <= PIVOT_RTOL * max(np.abs(J.value(M)).max(), 1e-300):
        raise RechartError("pivot block became singular; pivot pattern broke down")
    rhs = M[np.ix_(rows, free)]
    Y = -J.einsum("ij,jk->ik", J.inv(block), rhs)
    return J.einsum("ij,jk->ik", _selector(ncols, pivots), Y) + S_free


def gram_schmidt(C, G, order: Sequence[int] | None = None):
    """Sign-aware Gram-Schmidt of the columns of ``C`` under metric ``G``.

    Returns ``(E, signs)`` with ``E^T G E = diag(signs)``.
    """
    cval = J.value(C)
    ncand = cval.shape[1]
    order = list(range(ncand)) if order is None else list(order)
    gscale = max(np.abs(J.value(G)).max(), 1e-300)
    cols, signs = [], []
    for idx in order:
        c = C[:, idx]
        v = c
        for e, s in zip(cols, signs):
            v = v - s * J.einsum("a,ab,b->", c, G, e) * e
        n2 = J.einsum("a,ab,b->", v, G, v)
        cnorm = float(np.dot(J.value(c), J.value(c)))
        if abs(float(J.value(n2))) <= PIVOT_RTOL * gscale * max(cnorm, 1e-300):
            raise ScreenSelectionError("candidate is null after orthogonalization")
        sgn = 1.0 if float(J.value(n2)) > 0 else -1.0
        cols.append(v / np.sqrt(sgn * n2))
        signs.append(sgn)
    if not cols:
        return np.zeros((cval.shape[0], 0)), np.zeros(0)
    return J.stack(cols, axis=1), np.array(signs)


def _find_gs_order(C: np.ndarray, G: np.ndarray, cols: Sequence[int]) -> tuple[int, ...]:
    for perm in itertools.permutations(cols):
        try:
            gram_schmidt(C, G, perm)
            return tuple(perm)
        except ScreenSelectionError:
            continue
    raise ScreenSelectionError("no candidate order yields a nondegenerate screen")


def _pick_seeds(gbar: np.ndarray, xi: np.ndarray) -> tuple[int, ...]:
    N, r = xi.shape
    pair = gbar @ xi  # row s: gbar(e_s, xi_j)
    scale = max(np.abs(pair).max(), 1e-300)
    for combo in itertools.combinations(range(N), r):
        s = np.linalg.svd(pair[list(combo)], compute_uv=False)
        if s[-1] > SEED_RTOL * scale:
            return combo
    raise TransversalConstructionError("no seed subset pairs invertibly with the radical")


def detect_pattern(m: AmbientManifold, f: Immersion, u, rigging_fn: Callable | None = None) -> FramePattern:
    """Choose pivots and orderings from values at ``u``.

    ``rigging_fn(u)`` (optional) returns prescribed transversal fields; the
    screen is then the part of TM orthogonal to them.
    """
    u = np.asarray(u, dtype=float)
    pm = pullback(m, f, u)
    g = pm.matrix
    n = f.sub_dim
    rank = numerical_rank(g)
    r = n - rank
    if r == 0:
        raise NotNullError("induced metric is nondegenerate (r = 0)")
    piv = _greedy_columns(g)
    if len(piv) != rank:
        raise RechartError("could not select radical pivots")
    free = [j for j in range(n) if j not in piv]
    Xi = np.asarray(kernel_fixed(g, piv, piv, free))

    uj = J.lift(u, order=1)
    x = f(uj)
    Jm = x.grad
    gbar = m.metric_value(x.value)
    Nr = None if rigging_fn is None else np.asarray(J.value(rigging_fn(u)), dtype=float)
    if Nr is None:
        C = np.eye(n)
    else:
        C = np.eye(n) - Xi @ (Nr.T @ gbar @ Jm)
    screen_order = _find_gs_order(C, g, piv) if piv else ()
    M = Jm.T @ gbar
    npiv = _greedy_columns(M)
    if len(npiv) != n:
        raise ImmersionError("tangent space does not have full rank")
    nfree = [j for j in range(m.dim) if j not in npiv]
    Z = np.asarray(kernel_fixed(M, range(n), npiv, nfree))
    xi_amb = Jm @ Xi
    if Nr is not None:
        Z = Z - xi_amb @ (Nr.T @ gbar @ Z)
    chosen: list[int] = []
    basis = xi_amb
    for a in range(Z.shape[1]):
        trial = np.concatenate([basis, Z[:, [a]]], axis=1)
        if numerical_rank(trial) == trial.shape[1]:
            chosen.append(a)
            basis = trial
    k = m.dim - n
    if len(chosen) != k - r:
        raise RechartError("could not complete the radical inside the normal bundle")
    st_order = _find_gs_order(Z, gbar, chosen) if chosen else ()
    seeds = _pick_seeds(gbar, xi_amb)
    return FramePattern(r, tuple(piv), tuple(free), tuple(screen_order), tuple(npiv),
                        tuple(nfree), tuple(st_order), tuple(seeds))


# ---------------------------------------------------------------------------
# frames (jet generic)
# ---------------------------------------------------------------------------


@dataclass
class NullFrame:
    """Adapted frame at one point; entries may be jets or arrays.

    Tangent-coordinate expressions carry the suffix ``_tc``; ambient
    components have none.  ``transversal`` is filled by the rigging step.
    """

    base: np.ndarray
    xi_tc: object
    xi: object
    screen_tc: object
    screen: object
    screen_signs: np.ndarray
    screen_transversal: object
    st_signs: np.ndarray
    transversal: object = None


def radical_basis(pm: PullbackMetric | object, pattern: FramePattern | None = None):
    """Kernel of the induced metric in tangent coordinates (n x r)."""
    g = pm.matrix if isinstance(pm, PullbackMetric) else pm
    if pattern is None:
        gv = np.asarray(J.value(g))
        rank = numerical_rank(gv)
        if rank == gv.shape[0]:
            raise NotNullError("induced metric is nondegenerate (r = 0)")
        piv = _greedy_columns(gv)
        free = [j for j in range(gv.shape[0]) if j not in piv]
    else:
        piv, free = pattern.radical_pivots, pattern.radical_free
    return kernel_fixed(g, piv, piv, free)


def screen_basis(g, xi_tc, pattern: FramePattern, Omega=None):
    """Screen in tangent coordinates: Gram-Schmidt over pivot directions.

    With ``Omega`` the candidates are first projected along the radical,
    giving the screen induced by that rigging.
    """
    n = J.value(g).shape[0]
    if Omega is None:
        C = np.eye(n)
    else:
        C = np.eye(n) - J.einsum("ir,rj->ij", xi_tc, Omega)
    return gram_schmidt(C, g, pattern.screen_order)


def screen_transversal_basis(Jm, gbar, pattern: FramePattern):
    M = J.einsum("ai,ab->ib", Jm, gbar)
    n = J.value(M).shape[0]
    Z = kernel_fixed(M, range(n), pattern.normal_pivots, pattern.normal_free)
    N = J.value(gbar).shape[0]
    if not pattern.screen_transversal:
        return np.zeros((N, 0)), np.zeros(0)
    return gram_schmidt(Z, gbar, pattern.screen_transversal)


def validate_rank(g_value: np.ndarray, r: int) -> None:
    n = g_value.shape[0]
    if numerical_rank(g_value) != n - r:
        raise RechartError(f"nullity changed: expected r = {r}")
