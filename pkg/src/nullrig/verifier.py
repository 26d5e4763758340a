"""Identity checks: predicted formulas against directly computed ground truth.

Every check maps a :class:`~nullrig.induced.GeometryBundle` to a residual.
Ground-truth sides never use the formula under test: the Levi-Civita
connection and curvature of the rigged metric come from its own Christoffel
symbols, covariant derivatives of metrics from component derivatives.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import catalog as cat
from . import jet as J
from .ambient import lower_first, signature_counts
from .errors import ConfigurationError, NumericalError, UnsupportedError
from .induced import GeometryBundle
from .oracle import FinDiffConfig, fd_gradient, fd_hessian
from .rigging import is_closed, is_conformal_rigging
from .submanifold import SUPPORTED, classify, detect_pattern, numerical_rank

SUITES = ("all", "frames", "metric", "connection", "curvature", "conformal", "oracle")

# Overall signs of the correction groups in the jump formulas, adjudicated
# once against ground truth (see ``adjudicate_signs``) and frozen here.
SIGN_CONSTANTS = {
    "rigged-metric-derivative": (1.0, 1.0, 1.0),
    "rigged-connection-jump": 1.0,
    "rigged-curvature-screen": 1.0,
    "rigged-curvature-radical": 1.0,
}

TOL_FRAME = 1e-9
TOL_METRIC = 1e-10
TOL_FIRST = 1e-9
TOL_LEMMA = 1e-8
TOL_CURV = 1e-7
TOL_GAUSS = 1e-8
TOL_ORACLE = 1e-5
DET_FLOOR = 1e-10
CONFORMAL_TOL = 1e-9
PHI_TOL = 1e-6


# ---------------------------------------------------------------------------
# records
# ---------------------------------------------------------------------------


@dataclass
class IdentityCheck:
    id: str
    suite: str
    samples: int
    max_residual: float | None
    mean_residual: float | None
    tolerance: float
    status: str
    skip_reason: str | None = None
    comparison: str = "below"

    def to_dict(self) -> dict:
        d = {
            "id": self.id, "suite": self.suite, "samples": self.samples,
            "max_residual": self.max_residual, "mean_residual": self.mean_residual,
            "tolerance": self.tolerance, "comparison": self.comparison, "status": self.status,
        }
        if self.skip_reason is not None:
            d["skip_reason"] = self.skip_reason
        return d


@dataclass
class ResidualReport:
    example: str
    checks: list[IdentityCheck]
    environment: dict
    diagnostics: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "fail" if any(c.status == "fail" for c in self.checks) else "pass"

    def check(self, check_id: str) -> IdentityCheck:
        for c in self.checks:
            if c.id == check_id:
                return c
        raise KeyError(check_id)

    def to_dict(self) -> dict:
        return {"example": self.example, "status": self.status, "environment": self.environment,
                "checks": [c.to_dict() for c in self.checks], "diagnostics": self.diagnostics}


# ---------------------------------------------------------------------------
# context
# ---------------------------------------------------------------------------


@dataclass
class Context:
    entry: cat.CatalogEntry
    sign: float
    mode: str
    rigging_fn: Callable | None
    pattern: object
    classification: str
    q: int
    closed: bool = True
    conformal_reason: str | None = None
    samples: np.ndarray | None = None
    order: int = 3

    def bundle(self, u, order: int | None = None) -> GeometryBundle:
        return GeometryBundle(self.entry.ambient, self.entry.immersion, u, self.pattern,
                              order=self.order if order is None else order, sign=self.sign,
                              rigging_fn=self.rigging_fn)


def _amax(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.abs(x).max()) if x.size else 0.0


def _v(b: GeometryBundle, name: str) -> np.ndarray:
    return b.val(name)


def _frame(b: GeometryBundle) -> np.ndarray:
    return b.frame_tc


def _tau_diag(b: GeometryBundle) -> np.ndarray:
    t = _v(b, "tau")
    return np.stack([t[m, m] for m in range(t.shape[0])])


def _forms(b: GeometryBundle):
    """``a[m, i, j] = g(A*_m d_i, d_j)``, ``bN[m, i, j] = g(A_{N_m} d_i, d_j)``."""
    g = _v(b, "g")
    a = np.einsum("mki,kj->mij", _v(b, "A_star"), g)
    bN = np.einsum("mki,kj->mij", _v(b, "A_N"), g)
    return a, bN


def _Q(b: GeometryBundle) -> np.ndarray:
    a, bN = _forms(b)
    Om, td = _v(b, "omega"), _tau_diag(b)
    return 0.5 * (2 * a - bN - bN.transpose(0, 2, 1)
                  + np.einsum("mi,mj->mij", Om, td) + np.einsum("mj,mi->mij", Om, td))


def _cov_metric(metric_jet, Gamma) -> np.ndarray:
    """``D[a, j, k] = (nabla_{d_a} h)(d_j, d_k)`` for a metric-like jet ``h``."""
    h = np.asarray(metric_jet.value)
    dh = np.asarray(metric_jet.gradient().value)  # [j, k, a]
    return (dh.transpose(2, 0, 1) - np.einsum("laj,lk->ajk", Gamma, h)
            - np.einsum("lak,jl->ajk", Gamma, h))


# ---------------------------------------------------------------------------
# frame checks
# ---------------------------------------------------------------------------


def r_radical(b, ctx):
    return _amax(_v(b, "xi").T @ _v(b, "gbar") @ _v(b, "Jm"))


def r_rank(b, ctx):
    g = _v(b, "g")
    return float(abs(g.shape[0] - numerical_rank(g) - ctx.pattern.r))


def r_screen(b, ctx):
    e, gb, xi = _v(b, "screen"), _v(b, "gbar"), _v(b, "xi")
    return max(_amax(e.T @ gb @ e - np.diag(b.screen_signs)), _amax(e.T @ gb @ xi))


def r_screen_transversal(b, ctx):
    W, gb, Jm = _v(b, "W"), _v(b, "gbar"), _v(b, "Jm")
    return max(_amax(W.T @ gb @ Jm), _amax(W.T @ gb @ W - np.diag(b.W_signs)))


def r_rig_dual(b, ctx):
    return _amax(_v(b, "N").T @ _v(b, "gbar") @ _v(b, "xi") - np.eye(ctx.pattern.r))


def r_rig_null(b, ctx):
    N = _v(b, "N")
    return _amax(N.T @ _v(b, "gbar") @ N)


def r_rig_orth(b, ctx):
    N, gb = _v(b, "N"), _v(b, "gbar")
    return max(_amax(N.T @ gb @ _v(b, "screen")), _amax(N.T @ gb @ _v(b, "W")))


def r_omega_frame(b, ctx):
    Om = _v(b, "omega")
    return max(_amax(Om @ _v(b, "xi_tc") - np.eye(ctx.pattern.r)), _amax(Om @ _v(b, "screen_tc")))


def r_projection(b, ctx):
    P = _v(b, "P")
    return max(_amax(P @ P - P), _amax(P @ _v(b, "xi_tc")), _amax(P @ _v(b, "screen_tc") - _v(b, "screen_tc")))


def r_tangent_split(b, ctx):
    xi, E, Om, g = _v(b, "xi_tc"), _v(b, "screen_tc"), _v(b, "omega"), _v(b, "g")
    rec = xi @ Om + E @ np.diag(b.screen_signs) @ E.T @ g
    return _amax(rec - np.eye(g.shape[0]))


def r_ambient_split(b, ctx):
    eye = np.eye(b.Nd)
    return _amax(b.recompose(*b.decompose(eye)) - eye)


# ---------------------------------------------------------------------------
# metric checks
# ---------------------------------------------------------------------------


def v_det(b, ctx):
    return float(abs(np.linalg.det(_v(b, "gt"))))


def r_index(b, ctx):
    neg = signature_counts(_v(b, "gt"))[0]
    return float(abs(neg - (ctx.q - ctx.pattern.r)))


def r_index_general(b, ctx):
    # negative directions of S(TM-perp) are not seen by the rigged metric
    neg = signature_counts(_v(b, "gt"))[0]
    return float(abs(neg - (ctx.q - ctx.pattern.r - int(np.sum(b.W_signs < 0)))))


def r_xi_norm(b, ctx):
    xi = _v(b, "xi_tc")
    return _amax(xi.T @ _v(b, "gt") @ xi - ctx.sign * np.eye(xi.shape[1]))


def r_omega_dual(b, ctx):
    # g~(xi, .) = sign * omega; the sign -1 variant carries the factor explicitly
    return _amax(ctx.sign * _v(b, "omega") - _v(b, "xi_tc").T @ _v(b, "gt"))


# ---------------------------------------------------------------------------
# connection checks
# ---------------------------------------------------------------------------


def r_torsion(b, ctx):
    G = _v(b, "Gamma")
    return _amax(G - G.transpose(0, 2, 1))


def r_hsym(b, ctx):
    hl, hs = _v(b, "hl"), _v(b, "hs")
    return max(_amax(hl - hl.transpose(0, 2, 1)), _amax(hs - hs.transpose(0, 2, 1)))


def r_gauss_split(b, ctx):
    Vd = _v(b, "Vd")
    return _amax(b.recompose(_v(b, "Gamma"), _v(b, "hl"), _v(b, "hs")) - Vd)


def r_weingarten_split(b, ctx):
    # frame arrays carry the rigging index first; recompose wants components first
    tan = -_v(b, "A_N").transpose(1, 0, 2)
    ltr = _v(b, "tau").transpose(1, 0, 2)
    return _amax(b.recompose(tan, ltr, _v(b, "Ds")) - _v(b, "DN"))


def r_screen_split(b, ctx):
    DP, xi = _v(b, "DP"), _v(b, "xi_tc")
    r1 = _amax(_v(b, "nabla_star") + np.einsum("km,mij->kji", xi, _v(b, "hstar")) - DP)
    r2 = _amax(-_v(b, "A_star").transpose(1, 0, 2) + np.einsum("kl,lmi->kmi", xi, _v(b, "nabla_t"))
               - _v(b, "Dxi_tc"))
    Ov = _v(b, "omega")
    r3 = _amax(np.einsum("mk,kji->mji", Ov, _v(b, "nabla_star")))  # nabla* stays in the screen
    r4 = _amax(np.einsum("mk,nki->mni", Ov, _v(b, "A_star")))  # A* is screen valued
    return max(r1, r2, r3, r4)


def r_nonmetric(b, ctx):
    D = _cov_metric(b.g, _v(b, "Gamma"))
    hl, Om = _v(b, "hl"), _v(b, "omega")
    pred = np.einsum("maj,mk->ajk", hl, Om) + np.einsum("mak,mj->ajk", hl, Om)
    return _amax(D - pred)


def r_form_pairing(b, ctx):
    a, _ = _forms(b)
    P = _v(b, "P")
    lhs = np.einsum("mik,kj->mij", _v(b, "hl"), P)
    return _amax(lhs - a @ P)


def r_transversal_pairing(b, ctx):
    _, bN = _forms(b)
    return _amax(_v(b, "hstar") - bN @ _v(b, "P"))


def r_radical_self(b, ctx):
    hl, xi = _v(b, "hl"), _v(b, "xi_tc")
    return max(_amax(hl[m] @ xi[:, m]) for m in range(xi.shape[1]))


def r_star_radical(b, ctx):
    As, xi = _v(b, "A_star"), _v(b, "xi_tc")
    return max(_amax(As[m] @ xi[:, m]) for m in range(xi.shape[1]))


def r_star_selfadjoint(b, ctx):
    a, _ = _forms(b)
    E = _v(b, "screen_tc")
    S = np.einsum("mij,ia,jb->mab", a, E, E)
    return _amax(S - S.transpose(0, 2, 1))


def r_st_metric(b, ctx):
    """h^s paired with W plus the D^l term against g(A_W X, Y)."""
    hs, eps = _v(b, "hs"), b.W_signs
    lhs = hs * eps[:, None, None] + np.einsum("mai,mj->aij", _v(b, "Dl_W"), _v(b, "omega"))
    rhs = np.einsum("aki,kj->aij", _v(b, "A_W"), _v(b, "g"))
    return _amax(lhs - rhs)


def r_st_transversal(b, ctx):
    lhs = _v(b, "Ds") * b.W_signs[:, None, None]
    rhs = np.einsum("mk,aki->ami", _v(b, "omega"), _v(b, "A_W"))
    return _amax(lhs - rhs)


def lemma_prediction(b: GeometryBundle, signs=None) -> np.ndarray:
    """Predicted ``(nabla_{d_a} g~)(d_j, d_k)`` from shape operators and tau."""
    s1, s2, s3 = SIGN_CONSTANTS["rigged-metric-derivative"] if signs is None else signs
    a, bN = _forms(b)
    P, Om, td = _v(b, "P"), _v(b, "omega"), _tau_diag(b)
    F = (a - bN) @ P  # F[m, a, k] = g(A* X, PZ) - g(A_N X, PZ)
    return (s1 * np.einsum("mj,mak->ajk", Om, F) + s2 * np.einsum("mk,maj->ajk", Om, F)
            + s3 * 2.0 * np.einsum("ma,mj,mk->ajk", td, Om, Om))


def r_lemma(b, ctx, signs=None):
    D = _cov_metric(b.gt, _v(b, "Gamma"))
    F = _frame(b)
    return _amax(np.einsum("ajk,ax,jy,kz->xyz", D - lemma_prediction(b, signs), F, F, F))


def jump_prediction(b: GeometryBundle, sign=None) -> np.ndarray:
    s = SIGN_CONSTANTS["rigged-connection-jump"] if sign is None else sign
    return _v(b, "Gamma") + s * np.einsum("km,mij->kij", _v(b, "xi_tc"), _Q(b))


def r_jump(b, ctx, sign=None):
    return _amax(_v(b, "Gt") - jump_prediction(b, sign))


def r_rigged_lc(b, ctx):
    Gt = _v(b, "Gt")
    return max(_amax(_cov_metric(b.gt, Gt)), _amax(Gt - Gt.transpose(0, 2, 1)))


# ---------------------------------------------------------------------------
# curvature checks
# ---------------------------------------------------------------------------


def _symmetry_residual(Rlow: np.ndarray) -> float:
    anti1 = Rlow + Rlow.transpose(1, 0, 2, 3)
    anti2 = Rlow + Rlow.transpose(0, 1, 3, 2)
    pair = Rlow - Rlow.transpose(2, 3, 0, 1)
    bianchi = Rlow + Rlow.transpose(1, 2, 0, 3) + Rlow.transpose(2, 0, 1, 3)
    return max(_amax(anti1), _amax(anti2), _amax(pair), _amax(bianchi))


def r_R_anti(b, ctx):
    R = b.R
    return _amax(R + R.transpose(0, 1, 3, 2))


def r_Rt_sym(b, ctx):
    return _symmetry_residual(np.asarray(lower_first(_v(b, "gt"), b.Rt)))


def r_Rbar_sym(b, ctx):
    return _symmetry_residual(np.asarray(lower_first(_v(b, "gbar"), b.Rbar)))


def curvature_screen_prediction(b: GeometryBundle, sign=None) -> np.ndarray:
    """``[a, b, c, d]``: predicted g~(R~(d_a, d_b) d_c, P d_d)."""
    s = SIGN_CONSTANTS["rigged-curvature-screen"] if sign is None else sign
    g, P = _v(b, "g"), _v(b, "P")
    a, _ = _forms(b)
    Q = _Q(b)
    aP = a @ P
    base = np.einsum("ecab,ef,fd->abcd", b.R, g, P)
    corr = np.einsum("mac,mbd->abcd", Q, aP) - np.einsum("mbc,mad->abcd", Q, aP)
    return base + s * corr


def r_curv_screen(b, ctx, sign=None):
    lhs = np.einsum("ecab,ef,fd->abcd", b.Rt, _v(b, "gt"), _v(b, "P"))
    F = _frame(b)
    return _amax(np.einsum("abcd,ax,by,cz,dw->xyzw", lhs - curvature_screen_prediction(b, sign), F, F, F, F))


def curvature_radical_prediction(b: GeometryBundle, sign=None) -> np.ndarray:
    """``[a, b, c, j]``: predicted g~(R~(d_a, d_b) d_c, xi_j) as displayed."""
    s = SIGN_CONSTANTS["rigged-curvature-radical"] if sign is None else sign
    g, P, xi = _v(b, "g"), _v(b, "P"), _v(b, "xi_tc")
    a, bN = _forms(b)
    td = _tau_diag(b)
    Om = _v(b, "omega")
    base = -np.einsum("euab,uj,el,lc->abcj", b.R, xi, g, P)
    bU = np.einsum("muy,uj->mjy", bN, xi)  # <A_{N_m} U_j, d_y>
    c1 = np.einsum("mjb,mac->abcj", bU, a) - np.einsum("mja,mbc->abcj", bU, a)
    wU = Om @ xi  # omega_m(U_j)
    c2 = np.einsum("ma,mbc,mj->abcj", td, a, wU) - np.einsum("mb,mac,mj->abcj", td, a, wU)
    return base + s * (-0.5 * c1 - 0.5 * c2)


def r_curv_radical(b, ctx, sign=None):
    xi = _v(b, "xi_tc")
    lhs = np.einsum("ecab,ef,fj->abcj", b.Rt, _v(b, "gt"), xi)
    F = _frame(b)
    return _amax(np.einsum("abcj,ax,by,cz->xyzj", lhs - curvature_radical_prediction(b, sign), F, F, F))


def gauss_sides(b: GeometryBundle, projected: bool = True):
    """Left and right sides of the tangential Gauss equation on (X, Y, PZ, PU)."""
    Jm, gb, P, g = _v(b, "Jm"), _v(b, "gbar"), _v(b, "P"), _v(b, "g")
    JP = Jm @ P
    lhs = np.einsum("efpq,pa,qb,fc,eh,hd->abcd", b.Rbar, Jm, Jm, JP, gb, JP)
    hl, hs, hst = _v(b, "hl"), _v(b, "hs"), _v(b, "hstar")
    Z = P if projected else np.eye(P.shape[0])
    hlZ = np.einsum("maf,fc->mac", hl, Z)
    hsZ = np.einsum("aif,fc->aic", hs, Z)
    hsU = np.einsum("aif,fd->aid", hs, P)
    eps = b.W_signs
    rhs = (np.einsum("efab,fc,eh,hd->abcd", b.R, Z, g, P)
           + np.einsum("mbd,mac->abcd", hst, hlZ) - np.einsum("mad,mbc->abcd", hst, hlZ)
           + np.einsum("s,sbd,sac->abcd", eps, hsU, hsZ) - np.einsum("s,sad,sbc->abcd", eps, hsU, hsZ))
    return lhs, rhs


def r_gauss(b, ctx):
    lhs, rhs = gauss_sides(b, True)
    F = _frame(b)
    return _amax(np.einsum("abcd,ax,by,cz,dw->xyzw", lhs - rhs, F, F, F, F))


def r_gauss_mixed(b, ctx):
    lhs, rhs = gauss_sides(b, False)
    F = _frame(b)
    return _amax(np.einsum("abcd,ax,by,cz,dw->xyzw", lhs - rhs, F, F, F, F))


# ---------------------------------------------------------------------------
# conformal checks
# ---------------------------------------------------------------------------


def _dxi_self(b: GeometryBundle) -> np.ndarray:
    """Columns ``nabla-bar_{xi_m} xi_m`` (ambient components)."""
    D = np.asarray(J.value(b.along(b.xi)))
    xi = _v(b, "xi_tc")
    return np.stack([D[:, m, :] @ xi[:, m] for m in range(xi.shape[1])], axis=1)


def r_pregeodesic(b, ctx):
    v = _dxi_self(b)
    c = np.einsum("cm,cd,dm->m", _v(b, "N"), _v(b, "gbar"), v)
    return _amax(v - _v(b, "xi") * c)


def r_geodesic(b, ctx):
    return _amax(_dxi_self(b))


def r_tau_xi(b, ctx):
    t, xi = _v(b, "tau"), _v(b, "xi_tc")
    return max(abs(float(t[m, m] @ xi[:, m])) for m in range(xi.shape[1]))


@dataclass(frozen=True)
class ConformalScreen:
    conformal: bool
    phi: float | None
    residual: float
    case: str


def conformal_screen(b: GeometryBundle, tol: float = CONFORMAL_TOL) -> ConformalScreen:
    """Fit ``g(A_N X, PY) = phi g(A* X, Y)`` over frame pairs."""
    a, bN = _forms(b)
    P, F = _v(b, "P"), _frame(b)
    lhs = np.einsum("mij,ix,jy->mxy", bN @ P, F, F)
    rhs = np.einsum("mij,ix,jy->mxy", a, F, F)
    na, nb = _amax(rhs), _amax(lhs)
    if na < tol and nb < tol:
        return ConformalScreen(True, None, 0.0, "both-zero")
    if na < tol:
        return ConformalScreen(False, None, nb, "no-factor")
    phi = float(np.sum(lhs * rhs) / np.sum(rhs * rhs))
    res = _amax(lhs - phi * rhs)
    ok = res < tol and abs(phi) > tol
    return ConformalScreen(ok, phi, res, "conformal" if ok else "not-conformal")


def conformal_rigging_at(ctx: Context, b: GeometryBundle):
    """Return ``(conformal, reason)`` for the active rigging at the bundle point."""
    ext = ctx.entry.N_ext
    if ext is None:
        return False, "no ambient extension of the rigging"
    x = b.point
    Nx = np.asarray(J.value(ext(x)), dtype=float)
    if _amax(Nx - _v(b, "N")) > 1e-9:
        return False, "ambient extension does not match the active rigging"
    fit = is_conformal_rigging(ctx.entry.ambient, ext, x, CONFORMAL_TOL)
    if not all(fit.conformal):
        return False, "rigging is not conformal"
    return True, None


# ---------------------------------------------------------------------------
# expected values
# ---------------------------------------------------------------------------


def _sectional_rt(b):
    Rl = np.asarray(lower_first(_v(b, "gt"), b.Rt))
    gt = _v(b, "gt")
    return Rl[1, 2, 2, 1] / (gt[1, 1] * gt[2, 2] - gt[1, 2] ** 2)


_MEASURES: dict[str, tuple[str, Callable, float]] = {
    "rank_r": ("frames", lambda b, c: float(b.g.value.shape[0] - numerical_rank(_v(b, "g"))), 0.5),
    "pullback": ("frames", lambda b, c: _v(b, "g"), 1e-10),
    "N": ("metric", lambda b, c: _v(b, "N")[:, 0], 1e-10),
    "omega": ("metric", lambda b, c: _v(b, "omega"), 1e-10),
    "gt": ("metric", lambda b, c: _v(b, "gt"), 1e-10),
    "index_gt": ("metric", lambda b, c: float(signature_counts(_v(b, "gt"))[0]), 0.5),
    "closed": ("metric", lambda b, c: all(is_closed(b.domega)), 0.5),
    "domega_s_theta": ("metric", lambda b, c: b.domega[0, 0, 1], 1e-9),
    "hl": ("connection", lambda b, c: _amax(_v(b, "hl")), 1e-9),
    "hl_thth": ("connection", lambda b, c: _v(b, "hl")[0, 1, 1], 1e-9),
    "A_N": ("connection", lambda b, c: _v(b, "A_N")[0], 1e-9),
    "A_star": ("connection", lambda b, c: _v(b, "A_star")[0], 1e-9),
    "R": ("curvature", lambda b, c: _amax(b.R), 1e-8),
    "Rt": ("curvature", lambda b, c: _amax(b.Rt), 1e-8),
    "sectional_Rt": ("curvature", lambda b, c: _sectional_rt(b), 1e-8),
    "tau_of_xi": ("conformal", lambda b, c: r_tau_xi(b, c), 1e-9),
    "phi": ("conformal", lambda b, c: conformal_screen(b).phi, PHI_TOL),
    "conformal_screen": ("conformal", lambda b, c: _screen_label(conformal_screen(b)), 0.5),
    "conformal_rigging": ("conformal", lambda b, c: conformal_rigging_at(c, b)[0], 0.5),
}

_SIGN_DEPENDENT = {"gt", "index_gt", "Rt", "sectional_Rt"}


def _screen_label(cs: ConformalScreen):
    return "both-zero" if cs.case == "both-zero" else cs.conformal


def _compare(measured, expected) -> float:
    if isinstance(expected, (bool, str)) or isinstance(measured, (bool, str)):
        return 0.0 if measured == expected else 1.0
    if measured is None:
        return float("inf")
    m = np.asarray(measured, dtype=float)
    e = np.asarray(expected, dtype=float)
    if e.ndim == 0 and m.ndim > 0:
        return _amax(m - float(e))
    return _amax(m - e)


def expected_check(key: str, exp: cat.Expected):
    suite, measure, tol = _MEASURES[key]

    def fn(b, ctx):
        val = exp.value(b.u) if callable(exp.value) else exp.value
        return _compare(measure(b, ctx), val)

    def skip(ctx):
        if exp.rigging_dependent and ctx.rigging_fn is None:
            return "expected value refers to the catalog rigging"
        if key in _SIGN_DEPENDENT and ctx.sign < 0:
            return "expected value assumes the rigged-metric sign +1"
        return None

    return Check(f"expected:{key}", suite, fn, tol, skip)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    id: str
    suite: str
    fn: Callable
    tolerance: float
    skip: Callable | None = None
    comparison: str = "below"


def _needs_w(ctx):
    return None if ctx.pattern.screen_transversal else "screen transversal bundle is zero (coisotropic)"


def _needs_sign_plus(ctx):
    return None if ctx.sign > 0 else "index assertion disabled under the rigged-metric sign -1"


def _needs_coisotropic(ctx):
    return None if ctx.classification == "coisotropic" else f"requires a coisotropic submanifold, got {ctx.classification}"


def _needs_closed_coisotropic(ctx):
    reason = _needs_coisotropic(ctx)
    if reason:
        return reason
    return None if ctx.closed else "normalization not closed"


def _needs_adjudicated(ctx):
    return None if ctx.sign > 0 else "sign constants were adjudicated under the rigged-metric sign +1"


def _adjudicated_closed(ctx):
    return _needs_adjudicated(ctx) or _needs_closed_coisotropic(ctx)


def _needs_conformal(ctx):
    return ctx.conformal_reason


CHECKS: list[Check] = [
    Check("radical-rank", "frames", r_rank, 0.5),
    Check("radical-orthogonality", "frames", r_radical, TOL_FRAME),
    Check("screen-orthonormality", "frames", r_screen, TOL_FRAME),
    Check("screen-transversal-frame", "frames", r_screen_transversal, TOL_FRAME, _needs_w),
    Check("rigging-duality", "frames", r_rig_dual, TOL_FRAME),
    Check("rigging-null", "frames", r_rig_null, TOL_FRAME),
    Check("rigging-orthogonality", "frames", r_rig_orth, TOL_FRAME),
    Check("rigging-forms-on-frame", "frames", r_omega_frame, TOL_FRAME),
    Check("screen-projection", "frames", r_projection, TOL_FRAME),
    Check("tangent-decomposition", "frames", r_tangent_split, TOL_FRAME),
    Check("ambient-decomposition", "frames", r_ambient_split, TOL_FRAME),
    Check("rigged-metric-nondegenerate", "metric", v_det, DET_FLOOR, comparison="above"),
    Check("rigged-metric-index", "metric", r_index, 0.5, _needs_sign_plus),
    Check("rigged-metric-index-counted", "metric", r_index_general, 0.5, _needs_sign_plus),
    Check("rigged-radical-norm", "metric", r_xi_norm, TOL_METRIC),
    Check("rigging-form-duality", "metric", r_omega_dual, TOL_METRIC),
    Check("connection-torsion-free", "connection", r_torsion, TOL_FIRST),
    Check("second-forms-symmetric", "connection", r_hsym, TOL_FIRST),
    Check("gauss-decomposition", "connection", r_gauss_split, TOL_FIRST),
    Check("weingarten-decomposition", "connection", r_weingarten_split, TOL_FIRST),
    Check("screen-split", "connection", r_screen_split, TOL_FIRST),
    Check("non-metricity", "connection", r_nonmetric, TOL_FIRST),
    Check("radical-form-pairing", "connection", r_form_pairing, TOL_FIRST),
    Check("transversal-form-pairing", "connection", r_transversal_pairing, TOL_FIRST),
    Check("radical-self-pairing", "connection", r_radical_self, TOL_FIRST),
    Check("screen-shape-kills-radical", "connection", r_star_radical, TOL_FIRST),
    Check("screen-shape-self-adjoint", "connection", r_star_selfadjoint, TOL_FIRST),
    Check("screen-transversal-metric", "connection", r_st_metric, TOL_FIRST, _needs_w),
    Check("screen-transversal-transversal", "connection", r_st_transversal, TOL_FIRST, _needs_w),
    Check("rigged-connection-levi-civita", "connection", r_rigged_lc, TOL_FIRST),
    Check("rigged-metric-derivative", "connection", r_lemma, TOL_LEMMA, _needs_adjudicated),
    Check("rigged-connection-jump", "connection", r_jump, TOL_LEMMA, _adjudicated_closed),
    Check("induced-curvature-antisymmetry", "curvature", r_R_anti, TOL_LEMMA),
    Check("rigged-curvature-symmetries", "curvature", r_Rt_sym, TOL_LEMMA),
    Check("ambient-curvature-symmetries", "curvature", r_Rbar_sym, TOL_FRAME),
    Check("rigged-curvature-screen", "curvature", r_curv_screen, TOL_CURV, _adjudicated_closed),
    Check("rigged-curvature-radical", "curvature", r_curv_radical, TOL_CURV, _adjudicated_closed),
    Check("gauss-screen", "curvature", r_gauss, TOL_GAUSS),
    Check("pregeodesic-radical", "conformal", r_pregeodesic, TOL_FIRST),
    Check("conformal-rigging-tau", "conformal", r_tau_xi, TOL_FIRST, _needs_conformal),
    Check("conformal-rigging-geodesic", "conformal", r_geodesic, TOL_FIRST, _needs_conformal),
]


def check_ids() -> list[str]:
    return [c.id for c in CHECKS]


# ---------------------------------------------------------------------------
# oracle checks
# ---------------------------------------------------------------------------


# (name, bundle attribute, jet order needed for one derivative)
_ORACLE_QUANTITIES = (
    ("immersion-jacobian", "x", 1),
    ("immersion-hessian", "x", 2),
    ("ambient-metric", "gbar", 1),
    ("ambient-christoffel", "Gbar", 2),
    ("radical-frame", "xi_tc", 2),
    ("screen-frame", "screen_tc", 2),
    ("rigging", "N", 2),
    ("rigging-forms", "omega", 2),
    ("screen-projector", "P", 2),
    ("induced-metric", "g", 2),
    ("rigged-metric", "gt", 2),
    ("rigged-metric-hessian", "gt", 3),
    ("induced-connection", "Gamma", 3),
    ("rigged-connection", "Gt", 3),
    ("ambient-metric-offsets", None, 0),
)


def oracle_residuals(ctx: Context, u, config: FinDiffConfig | None = None) -> dict[str, float]:
    """Jet derivatives against central differences at ``u``.

    Every quantity's finite differences use plain values of lower-order
    builds; the immersion and ambient metric are differenced on floats.
    Residuals are absolute errors scaled by ``max(1, |derivative|)``.
    """
    config = config or FinDiffConfig()
    u = np.asarray(u, dtype=float)
    hi = ctx.bundle(u, order=3)
    out: dict[str, float] = {}

    def scaled(a, b):
        return _amax(a - b) / max(1.0, _amax(b))

    f = ctx.entry.immersion
    fval = lambda p: np.asarray(J.value(f(p)), dtype=float)  # noqa: E731
    out["immersion-jacobian"] = scaled(np.asarray(hi.Jm.value), fd_gradient(fval, u, config))
    out["immersion-hessian"] = scaled(np.asarray(hi.H.value), fd_hessian(fval, u, config))

    m = ctx.entry.ambient
    x = hi.point
    full = hi._seed[1].gradient().value[:, :, hi.n:]  # d/dy of the ambient metric
    out["ambient-metric-offsets"] = scaled(full, fd_gradient(m.metric_value, x, config))

    low = {}

    def values(p, order):
        key = (tuple(p), order)
        if key not in low:
            b = ctx.bundle(p, order=order)
            low[key] = b
        return low[key]

    for name, attr, order in _ORACLE_QUANTITIES:
        if attr is None or name.startswith("immersion"):
            continue
        jet = getattr(hi, attr)
        if name.endswith("-hessian"):
            d2 = np.asarray(jet.hess if jet.order >= 2 else jet.gradient().gradient().value)
            fn = lambda p, a=attr, o=order - 2: values(p, max(o, 1)).val(a)  # noqa: E731
            out[name] = scaled(d2, fd_hessian(fn, u, config))
            continue
        d1 = np.asarray(jet.gradient().value)
        fn = lambda p, a=attr, o=order - 1: values(p, max(o, 1)).val(a)  # noqa: E731
        out[name] = scaled(d1, fd_gradient(fn, u, config))
    return out


# ---------------------------------------------------------------------------
# suite runner
# ---------------------------------------------------------------------------


def _rng(seed: int, example: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, zlib.crc32(example.encode())]))


def prepare(example: str, sign: float = 1.0, rigging: str = "catalog") -> Context:
    """Validate an example and fix its frame pattern at the reference point."""
    entry = cat.entry(example)
    if sign not in (1, -1, 1.0, -1.0):
        raise ConfigurationError("sign convention must be +1 or -1")
    if rigging not in ("auto", "catalog"):
        raise ConfigurationError("rigging must be 'auto' or 'catalog'")
    m = entry.ambient
    u0 = np.asarray(entry.reference, dtype=float)
    from .submanifold import pullback
    pm = pullback(m, entry.immersion, u0)
    r = entry.n - numerical_rank(pm.matrix)
    label = classify(entry.n, entry.k, r)
    if label not in SUPPORTED:
        raise UnsupportedError(f"example {example!r} is {label}; only {' and '.join(SUPPORTED)} are supported")
    rf = entry.rigging_fn if rigging == "catalog" else None
    pattern = detect_pattern(m, entry.immersion, u0, rf)
    return Context(entry, float(sign), rigging, rf, pattern, label, m.index)


def _select(suite: str) -> list[Check]:
    if suite not in SUITES:
        raise ConfigurationError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}")
    return [c for c in CHECKS if suite == "all" or c.suite == suite]


def run_suite(example: str, suite: str = "all", tolerance: float | None = None, samples: int = 50,
              seed: int = 42, sign: float = 1.0, rigging: str = "catalog",
              overrides: dict | None = None, margin: float = cat.DEFAULT_MARGIN,
              oracle_probes: int = 10) -> ResidualReport:
    """Run one suite on one catalog example; deterministic in ``seed``.

    ``tolerance`` replaces the default of every residual-type check;
    ``overrides`` maps check ids to tolerances and wins over both.
    """
    if samples < 1:
        raise ConfigurationError("samples must be >= 1")
    if tolerance is not None and not tolerance > 0:
        raise ConfigurationError("tolerance must be positive")
    overrides = dict(overrides or {})
    for k, v in overrides.items():
        if not v > 0:
            raise ConfigurationError(f"tolerance override for {k!r} must be positive")
    ctx = prepare(example, sign, rigging)
    rng = _rng(seed, example)
    pts = ctx.entry.sample(samples, rng, margin)
    ctx.samples = pts
    bundles = [ctx.bundle(u) for u in pts]

    ctx.closed = all(all(is_closed(b.domega)) for b in bundles)
    reasons = [conformal_rigging_at(ctx, b)[1] for b in bundles]
    ctx.conformal_reason = next((r for r in reasons if r), None)

    checks = _select(suite)
    checks = checks + [expected_check(k, e) for k, e in ctx.entry.expected.items()
                       if suite in ("all", _MEASURES[k][0])]
    known = {c.id for c in checks} | {f"oracle:{n}" for n, _, _ in _ORACLE_QUANTITIES}
    unknown = sorted(set(overrides) - known - set(check_ids()) - {f"expected:{k}" for k in _MEASURES})
    if unknown:
        raise ConfigurationError(f"unknown check ids in tolerance overrides: {', '.join(unknown)}")

    records: list[IdentityCheck] = []
    for chk in checks:
        tol = chk.tolerance
        if tolerance is not None and chk.comparison == "below" and not chk.id.startswith("expected:") \
                and tol < 0.5:
            tol = tolerance
        tol = overrides.get(chk.id, tol)
        reason = chk.skip(ctx) if chk.skip else None
        if reason:
            records.append(IdentityCheck(chk.id, chk.suite, 0, None, None, tol, "skipped", reason, chk.comparison))
            continue
        vals = np.array([float(chk.fn(b, ctx)) for b in bundles])
        if chk.comparison == "above":
            worst = float(vals.min())
            ok = bool(np.all(vals > tol))
        else:
            worst = float(vals.max())
            ok = bool(np.all(vals < tol))
        records.append(IdentityCheck(chk.id, chk.suite, len(vals), worst, float(vals.mean()), tol,
                                     "pass" if ok else "fail", None, chk.comparison))

    if suite in ("all", "oracle"):
        probes = pts[: min(oracle_probes, len(pts))]
        table: dict[str, list[float]] = {}
        for u in probes:
            for k, v in oracle_residuals(ctx, u).items():
                table.setdefault(k, []).append(v)
        for name, _, _ in _ORACLE_QUANTITIES:
            vals = np.array(table[name])
            cid = f"oracle:{name}"
            tol = overrides.get(cid, TOL_ORACLE)
            records.append(IdentityCheck(cid, "oracle", len(vals), float(vals.max()), float(vals.mean()), tol,
                                         "pass" if bool(np.all(vals < tol)) else "fail"))

    env = environment(ctx, suite, samples, seed, margin, tolerance)
    diag = diagnostics(ctx, bundles) if suite in ("all", "connection", "curvature") else {}
    return ResidualReport(example, records, env, diag)


def environment(ctx: Context, suite, samples, seed, margin, tolerance) -> dict:
    p = ctx.pattern
    return {
        "sign_convention": int(ctx.sign),
        "rigging_mode": ctx.mode if ctx.rigging_fn is not None or ctx.mode == "auto" else "auto (no catalog rigging)",
        "screen": ("orthogonal to the catalog rigging" if ctx.rigging_fn is not None
                   else f"Gram-Schmidt over coordinate directions {list(p.screen_order)}"),
        "classification": ctx.classification,
        "r": p.r,
        "ambient_index": ctx.q,
        "closed_normalization": ctx.closed,
        "sign_constants": {k: list(v) if isinstance(v, tuple) else v for k, v in SIGN_CONSTANTS.items()},
        "bracket_pairing": "induced degenerate metric g",
        "sum_placement": "each i-term summed as a whole",
        "suite": suite, "samples": samples, "seed": seed, "margin": margin,
        "tolerance": tolerance,
    }


def diagnostics(ctx: Context, bundles) -> dict:
    """Raw residuals reported for inspection only (never pass/fail)."""
    out: dict = {}
    if ctx.classification == "coisotropic" and not ctx.closed:
        out["jump_closed_formula_on_non_closed"] = max(r_jump(b, ctx) for b in bundles)
    out["gauss_printed_mixed_arguments"] = max(r_gauss_mixed(b, ctx) for b in bundles)
    out["gauss_projected_arguments"] = max(r_gauss(b, ctx) for b in bundles)
    return out


# ---------------------------------------------------------------------------
# sign adjudication
# ---------------------------------------------------------------------------


def adjudicate_signs(examples=None, samples: int = 5, seed: int = 0) -> dict:
    """Pick the sign of each correction group that best matches ground truth.

    The metric-derivative formula is scored on every coisotropic example,
    the jump formulas only on closed ones.  Returns the chosen constants and the
    residual for each candidate so the frozen values can be audited.
    """
    if examples is None:
        examples = [e.id for e in cat.catalog() if not e.rejection_only]
    bundles, closed = [], []
    for ex in examples:
        ctx = prepare(ex)
        if ctx.classification != "coisotropic":
            continue
        pts = ctx.entry.sample(samples, _rng(seed, ex))
        bs = [(ctx, ctx.bundle(u)) for u in pts]
        bundles += bs
        if all(all(is_closed(b.domega)) for _, b in bs):
            closed += bs
    result: dict = {}
    triples = [(a, b, c) for a in (1.0, -1.0) for b in (1.0, -1.0) for c in (1.0, -1.0)]
    scores = {t: max(r_lemma(b, c, t) for c, b in bundles) for t in triples}
    result["rigged-metric-derivative"] = (min(scores, key=scores.get), scores)
    for key, fn in (("rigged-connection-jump", r_jump), ("rigged-curvature-screen", r_curv_screen),
                    ("rigged-curvature-radical", r_curv_radical)):
        sc = {s: max(fn(b, c, s) for c, b in closed) for s in (1.0, -1.0)}
        result[key] = (min(sc, key=sc.get), sc)
    return result
