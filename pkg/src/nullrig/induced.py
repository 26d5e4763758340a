"""Induced geometry of a rigged null submanifold at one point.

:class:`GeometryBundle` seeds one jet in the combined directions ``(u, y)``
where ``u`` are submanifold coordinates and ``y`` ambient offsets, evaluates
``x = f(u) + y`` and the ambient metric there.  Derivatives along ``y`` give
ambient Christoffels and curvature along M; derivatives along ``u`` give all
the induced objects.  Every attribute is computed lazily.

Array conventions (tangent coordinates unless noted, ``m`` indexes the
radical/rigging, ``al`` the screen transversal, ``c`` ambient components)::

    Gamma[k, i, j]   nabla_{d_i} d_j = Gamma[k, i, j] d_k
    hl[m, i, j]      h^l(d_i, d_j) = sum_m hl[m, i, j] N_m
    hs[al, i, j]     h^s(d_i, d_j) = sum_al hs[al, i, j] W_al
    A_N[m, k, i]     (A_{N_m} d_i)^k
    tau[m, l, i]     gbar(nabla-bar_{d_i} N_m, xi_l)
    A_star[m, k, i]  (A*_{xi_m} d_i)^k
    hstar[m, i, j]   h*(d_i, P d_j) = sum_m hstar[m, i, j] xi_m
    R[d, c, a, b]    R(d_a, d_b) d_c = R[d, c, a, b] d_d
"""

from __future__ import annotations

from functools import cached_property
from typing import Callable

import numpy as np

from . import jet as J
from .ambient import AmbientManifold, christoffel_from, christoffel_from_metric_jet, curvature_from
from .errors import ConfigurationError, ContradictionError, RechartError
from .rigging import construct_transversal, exterior_derivative, omega_forms, projector_matrix, rigged_matrix
from .submanifold import (FramePattern, Immersion, gram_schmidt, kernel_fixed, radical_basis,
                          screen_basis, validate_rank)


class GeometryBundle:
    """All induced objects at ``u``; quantities are jets of decreasing order.

    ``order`` is the jet order of the immersion.  Curvatures need 3, the
    connection-level objects 2 and the frame alone 1.
    """

    def __init__(self, ambient: AmbientManifold, immersion: Immersion, u, pattern: FramePattern,
                 order: int = 3, sign: float = 1.0, rigging_fn: Callable | None = None):
        if order < 1:
            raise ValueError("order must be at least 1")
        self.m = ambient
        self.f = immersion
        self.u = np.asarray(u, dtype=float)
        self.pattern = pattern
        self.K = int(order)
        self.sign = float(sign)
        self.rigging_fn = rigging_fn
        self.n = immersion.sub_dim
        self.Nd = ambient.dim
        self.r = pattern.r
        if not immersion.domain(self.u):
            raise ConfigurationError(f"point {self.u} outside the immersion domain")

    # -- seeds ------------------------------------------------------------
    @cached_property
    def _seed(self):
        p = J.lift(np.concatenate([self.u, np.zeros(self.Nd)]), order=self.K)
        x = self.f(p[: self.n])
        if not J.is_jet(x):
            x = J._to_jet(x, self.K, p.nvars)
        if not self.m.chart_domain(x.value):
            raise ConfigurationError(f"image point {x.value} outside the ambient chart")
        gfull = self.m.metric(x + p[self.n:])
        if not J.is_jet(gfull):
            gfull = J._to_jet(gfull, self.K, p.nvars)
        return x, gfull

    @property
    def _udirs(self):
        return range(self.n)

    @cached_property
    def x(self):
        return self._seed[0].restrict(self._udirs)

    @cached_property
    def point(self) -> np.ndarray:
        return self.x.value

    @cached_property
    def Jm(self):
        return self.x.gradient()

    @cached_property
    def H(self):
        return self.Jm.gradient()

    @cached_property
    def gbar(self):
        return self._seed[1].restrict(self._udirs).truncate(self.K - 1)

    @cached_property
    def _Gbar_full(self):
        gfull = self._seed[1]
        dg = gfull.gradient()[:, :, self.n:]
        return christoffel_from(J.inv(gfull.truncate(self.K - 1)), dg)

    @cached_property
    def Gbar(self):
        """Ambient Christoffels along M (order K-1)."""
        return self._Gbar_full.restrict(self._udirs)

    @cached_property
    def Rbar(self) -> np.ndarray:
        """Ambient curvature at f(u) in ambient components."""
        Gf = self._Gbar_full
        dG = Gf.gradient()[:, :, :, self.n:]
        return np.asarray(curvature_from(Gf.value, dG.value))

    # -- induced metric and frame ----------------------------------------
    @cached_property
    def g(self):
        g = J.einsum("ai,ab,bj->ij", self.Jm, self.gbar, self.Jm)
        return 0.5 * (g + g.T)

    @cached_property
    def _validated(self):
        validate_rank(np.asarray(self.g.value), self.r)
        return True

    @cached_property
    def xi_tc(self):
        assert self._validated
        return radical_basis(self.g, self.pattern)

    @cached_property
    def xi(self):
        return J.einsum("ai,im->am", self.Jm, self.xi_tc)

    @cached_property
    def _catalog_N(self):
        uj = J.lift(self.u, order=self.K - 1)
        N = self.rigging_fn(uj)
        if not J.is_jet(N):
            N = J._to_jet(N, self.K - 1, self.n)
        return N

    @cached_property
    def _screen(self):
        if self.rigging_fn is None:
            return screen_basis(self.g, self.xi_tc, self.pattern)
        return screen_basis(self.g, self.xi_tc, self.pattern, Omega=self.omega)

    @cached_property
    def screen_tc(self):
        return self._screen[0]

    @cached_property
    def screen_signs(self) -> np.ndarray:
        return np.asarray(self._screen[1])

    @cached_property
    def screen(self):
        return J.einsum("ai,ib->ab", self.Jm, self.screen_tc)

    @cached_property
    def _W(self):
        pat = self.pattern
        if not pat.screen_transversal:
            return np.zeros((self.Nd, 0)), np.zeros(0)
        M = J.einsum("ai,ab->ib", self.Jm, self.gbar)
        Z = kernel_fixed(M, range(self.n), pat.normal_pivots, pat.normal_free)
        if self.rigging_fn is not None:
            # keep the screen transversal orthogonal to the prescribed rigging
            Z = Z - J.einsum("am,mb->ab", self.xi, J.einsum("am,ac,cb->mb", self.N, self.gbar, Z))
        return gram_schmidt(Z, self.gbar, pat.screen_transversal)

    @cached_property
    def W(self):
        return self._W[0]

    @cached_property
    def W_signs(self) -> np.ndarray:
        return np.asarray(self._W[1])

    @cached_property
    def N(self):
        if self.rigging_fn is not None:
            return self._catalog_N
        return construct_transversal(self.xi, self.screen, self.screen_signs, self.W, self.W_signs,
                                     self.gbar, self.pattern.seeds)

    @cached_property
    def omega(self):
        return omega_forms(self.N, self.gbar, self.Jm)

    @cached_property
    def P(self):
        return projector_matrix(self.xi_tc, self.omega)

    @cached_property
    def frame_tc(self) -> np.ndarray:
        """Tangent frame ``[xi_1..xi_r | e_1..e_{n-r}]`` as columns (values)."""
        return np.concatenate([np.asarray(J.value(self.xi_tc)), np.asarray(J.value(self.screen_tc))], axis=1)

    @cached_property
    def T_proj(self):
        """Tangent part of an ambient vector in tangent coordinates (n x N)."""
        a = J.einsum("im,am,ab->ib", self.xi_tc, self.N, self.gbar)
        b = J.einsum("ia,a,ca,cb->ib", self.screen_tc, self.screen_signs, self.screen, self.gbar)
        return a + b

    def decompose(self, V):
        """Split ambient vectors ``V[c, ...]`` into frame parts (values).

        Returns tangent coordinates, ltr coefficients (on ``N_m``) and
        screen-transversal coefficients (on ``W_al``).
        """
        V = np.asarray(V, dtype=float)
        T = self.val("T_proj")
        xi, g, W = self.val("xi"), self.val("gbar"), self.val("W")
        tan = np.tensordot(T, V, axes=(1, 0))
        ltr = np.tensordot(xi.T @ g, V, axes=(1, 0))
        st = np.tensordot((W * self.W_signs).T @ g, V, axes=(1, 0))
        return tan, ltr, st

    def recompose(self, tan, ltr, st) -> np.ndarray:
        Jm, N, W = self.val("Jm"), self.val("N"), self.val("W")
        return (np.tensordot(Jm, tan, axes=(1, 0)) + np.tensordot(N, ltr, axes=(1, 0))
                + np.tensordot(W, st, axes=(1, 0)))

    # -- rigged metric -----------------------------------------------------
    @cached_property
    def gt(self):
        gt = rigged_matrix(self.g, self.omega, self.sign)
        return 0.5 * (gt + gt.T)

    @cached_property
    def Gt(self):
        """Levi-Civita coefficients of the rigged metric (order K-2)."""
        gv = np.asarray(self.gt.value)
        if abs(np.linalg.det(gv)) <= 1e-10:
            raise ContradictionError("rigged metric is degenerate")
        return christoffel_from_metric_jet(self.gt)

    @cached_property
    def Rt(self) -> np.ndarray:
        G = self.Gt
        return np.asarray(curvature_from(G.value, G.gradient().value))

    @cached_property
    def domega(self) -> np.ndarray:
        return exterior_derivative(self.omega)

    # -- Gauss / Weingarten -----------------------------------------------
    @cached_property
    def Vd(self):
        """``Vd[c, i, j] = (nabla-bar_{d_i} d_j)^c`` along M (order K-2)."""
        return self.H.transpose(0, 2, 1) + J.einsum("cab,ai,bj->cij", self.Gbar, self.Jm, self.Jm)

    @cached_property
    def Gamma(self):
        return J.einsum("kc,cij->kij", self.T_proj, self.Vd)

    @cached_property
    def hl(self):
        return J.einsum("cm,cd,dij->mij", self.xi, self.gbar, self.Vd)

    @cached_property
    def hs(self):
        if self.W_signs.size == 0:
            return np.zeros((0, self.n, self.n))
        return J.einsum("ca,a,cd,dij->aij", self.W, self.W_signs, self.gbar, self.Vd)

    def along(self, F):
        """``nabla-bar_{d_i}`` of ambient frame fields ``F[c, p]``: result ``[c, p, i]``."""
        if J.value(F).shape[1] == 0:
            return np.zeros((self.Nd, 0, self.n))
        return F.gradient() + J.einsum("cab,ai,bp->cpi", self.Gbar, self.Jm, F)

    @cached_property
    def DN(self):
        return self.along(self.N)

    @cached_property
    def A_N(self):
        return -J.einsum("kc,cmi->mki", self.T_proj, self.DN)

    @cached_property
    def tau(self):
        return J.einsum("cl,cd,dmi->mli", self.xi, self.gbar, self.DN)

    @cached_property
    def Ds(self):
        """``Ds[al, m, i]``: S(TM-perp) coefficient of ``nabla-bar_{d_i} N_m``."""
        if self.W_signs.size == 0:
            return np.zeros((0, self.r, self.n))
        return J.einsum("ca,a,cd,dmi->ami", self.W, self.W_signs, self.gbar, self.DN)

    @cached_property
    def DW(self):
        return self.along(self.W)

    @cached_property
    def A_W(self):
        """``A_W[al, k, i] = (A_{W_al} d_i)^k``."""
        if self.W_signs.size == 0:
            return np.zeros((0, self.n, self.n))
        return -J.einsum("kc,cai->aki", self.T_proj, self.DW)

    @cached_property
    def Dl_W(self):
        """``Dl_W[m, al, i]``: ltr coefficient (on ``N_m``) of ``nabla-bar_{d_i} W_al``."""
        if self.W_signs.size == 0:
            return np.zeros((self.r, 0, self.n))
        return J.einsum("cm,cd,dai->mai", self.xi, self.gbar, self.DW)

    # -- screen split -------------------------------------------------------
    @cached_property
    def Dxi_tc(self):
        """``Dxi_tc[k, m, i] = (nabla_{d_i} xi_m)^k``."""
        xi = self.xi_tc.truncate(self.K - 1)
        return xi.gradient() + J.einsum("kil,lm->kmi", self.Gamma, xi)

    @cached_property
    def A_star(self):
        return -J.einsum("kl,lmi->mki", self.P, self.Dxi_tc)

    @cached_property
    def nabla_t(self):
        """``nabla_t[l, m, i]``: radical coefficient (on ``xi_l``) of ``nabla_{d_i} xi_m``."""
        return J.einsum("lk,kmi->lmi", self.omega, self.Dxi_tc)

    @cached_property
    def DP(self):
        """``DP[k, j, i] = (nabla_{d_i} P d_j)^k``."""
        return self.P.gradient() + J.einsum("kil,lj->kji", self.Gamma, self.P)

    @cached_property
    def hstar(self):
        return J.einsum("mk,kji->mij", self.omega, self.DP)

    @cached_property
    def nabla_star(self):
        return J.einsum("kl,lji->kji", self.P, self.DP)

    @cached_property
    def R(self) -> np.ndarray:
        G = self.Gamma
        return np.asarray(curvature_from(G.value, G.gradient().value))

    # -- value helpers --------------------------------------------------------
    def val(self, name: str) -> np.ndarray:
        return np.asarray(J.value(getattr(self, name)), dtype=float)
