"""Worked example geometries with analytic riggings and expected values.

Expected values carry a provenance tag: ``TRIVIAL`` (forced by the
construction) or ``DERIVED`` (hand derivation re-checked by the
finite-difference oracle and frozen in the test suite).  Values may be
callables of the chart point ``u``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jet as J
from .ambient import AmbientManifold, from_family
from .errors import ConfigurationError
from .submanifold import Immersion

DEFAULT_MARGIN = 1e-2


@dataclass(frozen=True)
class Expected:
    value: object
    tag: str
    note: str = ""
    # True when the value refers to the catalog rigging or to sign +1
    rigging_dependent: bool = False


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    description: str
    ambient_spec: dict
    immersion_text: str
    immersion: Immersion
    box: tuple
    reference: tuple
    classification: str
    closed: bool
    rigging_fn: Callable | None = None
    N_ext: Callable | None = None
    expected: dict = field(default_factory=dict)
    rejection_only: bool = False
    # distance of u to an excluded degenerate locus inside the box
    avoid: Callable | None = None

    @property
    def ambient(self) -> AmbientManifold:
        return from_family(self.ambient_spec, name=self.id)

    @property
    def n(self) -> int:
        return self.immersion.sub_dim

    @property
    def k(self) -> int:
        return self.ambient.dim - self.n

    def inside(self, u, margin: float = DEFAULT_MARGIN) -> bool:
        lo, hi = (np.asarray(b, dtype=float) for b in self.box)
        u = np.asarray(u, dtype=float)
        if not (np.all(u >= lo + margin) and np.all(u <= hi - margin)):
            return False
        return self.avoid is None or float(self.avoid(u)) >= margin

    def sample(self, count: int, rng: np.random.Generator, margin: float = DEFAULT_MARGIN) -> np.ndarray:
        """Uniform points of the chart box, ``margin`` away from its edges
        and from excluded degenerate loci."""
        lo, hi = (np.asarray(b, dtype=float) for b in self.box)
        if np.any(hi - lo <= 2 * margin):
            raise ConfigurationError("sampling margin leaves an empty chart box")
        out = []
        tries = 0
        while len(out) < count:
            u = lo + (hi - lo) * rng.random(lo.size)
            tries += 1
            if self.inside(u, margin):
                out.append(u)
            elif tries > 1000 * max(count, 1):
                raise ConfigurationError("sampling margin excludes the whole chart")
        return np.array(out).reshape(count, lo.size)


def _mink(dim: int = 4, index: int = 1) -> dict:
    d = [-1.0] * index + [1.0] * (dim - index)
    return {"family": "constant", "matrix": np.diag(d).tolist(), "index": index}


def _nhat(th, ph):
    return [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)]


def _margin_box(lo, hi, margin):
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)

    def inside(u):
        return bool(np.all(u >= lo + margin) and np.all(u <= hi - margin))

    return inside


# -- immersions --------------------------------------------------------------


def _hyperplane(u):
    return J.stack([u[0], u[0], u[1], u[2]])


def _cone(u):
    s, th, ph = u[0], u[1], u[2]
    n = _nhat(th, ph)
    return J.stack([s, s * n[0], s * n[1], s * n[2]])


def _cone_rigging(u):
    n = _nhat(u[1], u[2])
    return J.stack([-0.5 + 0.0 * u[0], 0.5 * n[0], 0.5 * n[1], 0.5 * n[2]]).reshape(4, 1)


def _cone_rigging_ext(x):
    rho = np.sqrt(x[1] * x[1] + x[2] * x[2] + x[3] * x[3])
    return J.stack([-0.5 + 0.0 * x[0], 0.5 * x[1] / rho, 0.5 * x[2] / rho, 0.5 * x[3] / rho]).reshape(4, 1)


TILT = 0.3


def _rotated(n, e_th, v, z):
    # null N with gbar(N, xi) = 1 turned by v towards e_theta
    h = 0.5 * v * v
    comps = [-0.5 - h + z] + [0.5 * n[a] + v * e_th[a] - h * n[a] for a in range(3)]
    return J.stack(comps).reshape(4, 1)


def _e_theta(th, ph):
    return [np.cos(th) * np.cos(ph), np.cos(th) * np.sin(ph), -np.sin(th)]


def _tilted_rigging(u):
    th, ph = u[1], u[2]
    return _rotated(_nhat(th, ph), _e_theta(th, ph), TILT * np.sin(th), 0.0 * u[0])


EXACT_TILT = 0.3


def _exact_tilt_rigging(u):
    # omega = ds + c sin(theta) dtheta = d(s - c cos(theta))
    s, th, ph = u[0], u[1], u[2]
    return _rotated(_nhat(th, ph), _e_theta(th, ph), EXACT_TILT * np.sin(th) / s, 0.0 * s)


def _tilted_rigging_ext(x):
    rho = np.sqrt(x[1] * x[1] + x[2] * x[2] + x[3] * x[3])
    xh = [x[1] / rho, x[2] / rho, x[3] / rho]
    sin2 = xh[0] * xh[0] + xh[1] * xh[1]
    ve = [TILT * xh[0] * xh[2], TILT * xh[1] * xh[2], -TILT * sin2]
    h = 0.5 * TILT * TILT * sin2
    comps = [-0.5 - h + 0.0 * x[0]] + [0.5 * xh[a] + ve[a] - h * xh[a] for a in range(3)]
    return J.stack(comps).reshape(4, 1)


def _flat_r2(u):
    return J.stack([u[0], u[1], u[0], u[1], u[2]])


def _cone_line(u):
    s, th, ph, w = u[0], u[1], u[2], u[3]
    n = _nhat(th, ph)
    return J.stack([s, s * n[0], s * n[1], s * n[2], w, w])


def _cone_line_rigging(u):
    n = _nhat(u[1], u[2])
    z = 0.0 * u[0]
    col1 = [-0.5 + z, 0.5 * n[0], 0.5 * n[1], 0.5 * n[2], z, z]
    col2 = [z, z, z, z, -0.5 + z, 0.5 + z]
    return J.stack([J.stack(col1), J.stack(col2)], axis=1)


def _cone_line_rigging_ext(x):
    rho = np.sqrt(x[1] * x[1] + x[2] * x[2] + x[3] * x[3])
    z = 0.0 * x[0]
    col1 = [-0.5 + z, 0.5 * x[1] / rho, 0.5 * x[2] / rho, 0.5 * x[3] / rho, z, z]
    col2 = [z, z, z, z, -0.5 + z, 0.5 + z]
    return J.stack([J.stack(col1), J.stack(col2)], axis=1)


def _r1_surface(u):
    return J.stack([u[0], u[1], u[0], np.sinh(u[1])])


def _null_line_sphere(u):
    return J.stack([u[0], u[0], u[1], u[2]])


def _const_rigging(cols):
    arr = np.asarray(cols, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)

    def fn(x):
        return J._to_jet(arr, x.order, x.nvars) if J.is_jet(x) else arr.copy()

    return fn


def _plane4(u):
    return J.stack([u[0], u[1], u[0], u[1]])


def _plane6(u):
    z = 0.0 * u[0]
    return J.stack([u[0], u[1], u[0], u[1], z, z])


# -- expected values -----------------------------------------------------------


def _cone_gt(u):
    s, th = u[0], u[1]
    return np.diag([1.0, s * s, (s * np.sin(th)) ** 2])


def _cone_N(u):
    return np.array([-0.5, *(0.5 * np.array(_nhat(u[1], u[2])))])


def _cone_A_N(u):
    # A_N = -(1/2s) P; with P = diag(0, 1, 1) in the chart
    return -np.diag([0.0, 1.0, 1.0]) / (2.0 * u[0])


def _cone_A_star(u):
    return -np.diag([0.0, 1.0, 1.0]) / u[0]


def _cone_hl_thth(u):
    return -u[0]


def _exact_tilt_gt(u):
    s, th = u[0], u[1]
    w = EXACT_TILT * np.sin(th)
    return np.array([[1.0, w, 0.0], [w, s * s + w * w, 0.0], [0.0, 0.0, (s * np.sin(th)) ** 2]])


def _r1_g(u):
    return np.diag([0.0, np.cosh(u[1]) ** 2 - 1.0])


def _sphere_Rt_sec(u):
    # sectional curvature of the (theta, phi) block of the rigged metric
    return 1.0


_PI = np.pi
_TWO_PI = 2.0 * np.pi


def _build() -> dict[str, CatalogEntry]:
    entries: list[CatalogEntry] = []
    m = DEFAULT_MARGIN

    box = ((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0))
    entries.append(CatalogEntry(
        id="null-hyperplane",
        description="null hyperplane t = x in Minkowski 4-space",
        ambient_spec=_mink(4, 1),
        immersion_text="(u, v, w) -> (u, u, v, w)",
        immersion=Immersion(3, _hyperplane, _margin_box(*box, m), "null-hyperplane"),
        box=box, reference=(0.1, 0.2, 0.3), classification="coisotropic", closed=True,
        rigging_fn=_const_rigging([-0.5, 0.5, 0.0, 0.0]),
        N_ext=_const_rigging([-0.5, 0.5, 0.0, 0.0]),
        expected={
            "rank_r": Expected(1, "TRIVIAL"),
            "pullback": Expected(lambda u: np.diag([0.0, 1.0, 1.0]), "DERIVED", "direct matrix product"),
            "N": Expected(lambda u: np.array([-0.5, 0.5, 0.0, 0.0]), "DERIVED", "unique null dual of xi"),
            "gt": Expected(lambda u: np.eye(3), "DERIVED", "g + du (x) du"),
            "index_gt": Expected(0, "DERIVED"),
            "hl": Expected(0.0, "TRIVIAL", "totally geodesic"),
            "A_N": Expected(0.0, "TRIVIAL"),
            "A_star": Expected(0.0, "TRIVIAL"),
            "tau_of_xi": Expected(0.0, "TRIVIAL"),
            "R": Expected(0.0, "TRIVIAL"),
            "Rt": Expected(0.0, "TRIVIAL"),
            "closed": Expected(True, "TRIVIAL"),
            "conformal_rigging": Expected(True, "TRIVIAL", "parallel N, lambda = 0"),
            "conformal_screen": Expected("both-zero", "TRIVIAL"),
        },
    ))

    cbox = ((0.2, 0.2, 0.0), (2.0, _PI - 0.2, _TWO_PI))
    cone_imm = Immersion(3, _cone, _margin_box(*cbox, m), "light-cone")
    entries.append(CatalogEntry(
        id="light-cone",
        description="future light cone of the origin in Minkowski 4-space",
        ambient_spec=_mink(4, 1),
        immersion_text="(s, theta, phi) -> (s, s n(theta, phi))",
        immersion=cone_imm,
        box=cbox, reference=(1.0, 1.0, 0.5), classification="coisotropic", closed=True,
        rigging_fn=_cone_rigging, N_ext=_cone_rigging_ext,
        expected={
            "rank_r": Expected(1, "TRIVIAL"),
            "pullback": Expected(lambda u: np.diag([0.0, u[0] ** 2, (u[0] * np.sin(u[1])) ** 2]),
                                 "DERIVED", "direct matrix product"),
            "N": Expected(_cone_N, "DERIVED", "solve the three rigging conditions fiberwise"),
            "omega": Expected(lambda u: np.array([[1.0, 0.0, 0.0]]), "DERIVED", "omega = ds"),
            "gt": Expected(_cone_gt, "DERIVED", "g + ds (x) ds"),
            "index_gt": Expected(0, "DERIVED"),
            "A_N": Expected(_cone_A_N, "DERIVED", "differentiate N = (-1, n)/2"),
            "A_star": Expected(_cone_A_star, "DERIVED", "nabla-bar_X d_s = PX / s"),
            "hl_thth": Expected(_cone_hl_thth, "DERIVED", "gbar(nabla-bar d_th d_th, xi)"),
            "tau_of_xi": Expected(0.0, "DERIVED"),
            "Rt": Expected(0.0, "DERIVED", "rigged metric is flat space in polar form"),
            "phi": Expected(0.5, "DERIVED", "ratio of the two shape operators"),
            "closed": Expected(True, "DERIVED", "omega = ds is exact"),
            "conformal_rigging": Expected(False, "DERIVED", "radial extension is not conformal"),
        },
    ))

    entries.append(CatalogEntry(
        id="light-cone-tilted",
        description="light cone with a rigging rotated towards e_theta (not closed)",
        ambient_spec=_mink(4, 1),
        immersion_text="(s, theta, phi) -> (s, s n(theta, phi))",
        immersion=cone_imm,
        box=cbox, reference=(1.0, 1.0, 0.5), classification="coisotropic", closed=False,
        rigging_fn=_tilted_rigging, N_ext=_tilted_rigging_ext,
        expected={
            "rank_r": Expected(1, "TRIVIAL"),
            "omega": Expected(lambda u: np.array([[1.0, TILT * u[0] * np.sin(u[1]), 0.0]]), "DERIVED",
                              "omega = ds + 0.3 s sin(theta) dtheta", True),
            "domega_s_theta": Expected(lambda u: TILT * np.sin(u[1]), "DERIVED", "d omega = 0.3 sin ds^dtheta", True),
            "closed": Expected(False, "DERIVED", "", True),
            "conformal_screen": Expected(False, "DERIVED", "", True),
            "conformal_rigging": Expected(False, "DERIVED", "", True),
        },
    ))

    entries.append(CatalogEntry(
        id="light-cone-exact-tilt",
        description="light cone with a closed rigging that is not radial",
        ambient_spec=_mink(4, 1),
        immersion_text="(s, theta, phi) -> (s, s n(theta, phi))",
        immersion=cone_imm,
        box=cbox, reference=(1.0, 1.0, 0.5), classification="coisotropic", closed=True,
        rigging_fn=_exact_tilt_rigging,
        expected={
            "rank_r": Expected(1, "TRIVIAL"),
            "omega": Expected(lambda u: np.array([[1.0, EXACT_TILT * np.sin(u[1]), 0.0]]), "DERIVED",
                              "omega = d(s - 0.3 cos theta)", True),
            "gt": Expected(_exact_tilt_gt, "DERIVED", "g + omega (x) omega", True),
            "index_gt": Expected(0, "DERIVED"),
            "closed": Expected(True, "DERIVED", "omega is exact", True),
            "domega_s_theta": Expected(0.0, "DERIVED", "", True),
        },
    ))

    fbox = ((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0))
    entries.append(CatalogEntry(
        id="flat-coisotropic-r2",
        description="3-plane orthogonal to two null vectors in flat 5-space of index 2",
        ambient_spec=_mink(5, 2),
        immersion_text="(a, b, c) -> (a, b, a, b, c)",
        immersion=Immersion(3, _flat_r2, _margin_box(*fbox, m), "flat-coisotropic-r2"),
        box=fbox, reference=(0.1, 0.2, 0.3), classification="coisotropic", closed=True,
        N_ext=_const_rigging([[-0.5, 0.0], [0.0, -0.5], [0.5, 0.0], [0.0, 0.5], [0.0, 0.0]]),
        expected={
            "rank_r": Expected(2, "DERIVED", "kernel of diag(0, 0, 1)"),
            "index_gt": Expected(0, "DERIVED", "q - r = 0"),
            "hl": Expected(0.0, "TRIVIAL"),
            "A_N": Expected(0.0, "TRIVIAL"),
            "A_star": Expected(0.0, "TRIVIAL"),
            "R": Expected(0.0, "TRIVIAL"),
            "Rt": Expected(0.0, "TRIVIAL"),
            "closed": Expected(True, "TRIVIAL"),
            "conformal_rigging": Expected(True, "TRIVIAL", "constant N"),
        },
    ))

    lbox = ((0.2, 0.2, 0.0, -1.0), (2.0, _PI - 0.2, _TWO_PI, 1.0))
    entries.append(CatalogEntry(
        id="cone-x-nullline",
        description="light cone times a null line in flat 6-space of index 2",
        ambient_spec={"family": "constant", "matrix": np.diag([-1.0, 1, 1, 1, -1, 1]).tolist(), "index": 2},
        immersion_text="(s, theta, phi, w) -> (s, s n(theta, phi), w, w)",
        immersion=Immersion(4, _cone_line, _margin_box(*lbox, m), "cone-x-nullline"),
        box=lbox, reference=(1.0, 1.0, 0.5, 0.2), classification="coisotropic", closed=True,
        rigging_fn=_cone_line_rigging, N_ext=_cone_line_rigging_ext,
        expected={
            "rank_r": Expected(2, "DERIVED"),
            "index_gt": Expected(0, "DERIVED", "q - r = 0"),
            "phi": Expected(0.5, "DERIVED", "cone factor dominates the screen"),
            "closed": Expected(True, "DERIVED"),
            "conformal_rigging": Expected(False, "DERIVED"),
        },
    ))

    rbox = ((-1.0, -1.5), (1.0, 1.5))

    def r1_avoid(u):
        # the chart excludes |v| < 0.1 around the degenerate line v = 0
        return abs(u[1]) - 0.1

    def r1_domain(u, _lo=np.array(rbox[0]), _hi=np.array(rbox[1])):
        u = np.asarray(u, dtype=float)
        return bool(np.all(u >= _lo + m) and np.all(u <= _hi - m) and r1_avoid(u) >= m)

    entries.append(CatalogEntry(
        id="r1-lightlike-surface",
        description="r = 1 lightlike surface in flat 4-space of index 2",
        ambient_spec=_mink(4, 2),
        immersion_text="(u, v) -> (u, v, u, sinh v), v != 0",
        immersion=Immersion(2, _r1_surface, r1_domain, "r1-lightlike-surface"),
        box=rbox, reference=(0.3, 0.7), classification="r-lightlike", closed=True, avoid=r1_avoid,
        expected={
            "rank_r": Expected(1, "DERIVED", "kernel of diag(0, cosh^2 v - 1)"),
            "pullback": Expected(_r1_g, "DERIVED", "direct matrix product"),
            "index_gt": Expected(0, "DERIVED", "screen and radical positive; the second negative direction lies in S(TM-perp)"),
            "closed": Expected(True, "DERIVED"),
        },
    ))

    sbox = ((-1.0, 0.3, 0.0), (1.0, _PI - 0.3, _TWO_PI))
    entries.append(CatalogEntry(
        id="nullline-x-sphere",
        description="null line times the round 2-sphere in a curved product of index 1",
        ambient_spec={"family": "warped", "base": np.diag([-1.0, 1.0, 1.0]).tolist(), "fiber": [[1.0]],
                      "warp": "sin", "coord": 2, "params": [1.0, 1.0, 0.0], "index": 1},
        immersion_text="(w, theta, phi) -> (w, w, theta, phi)",
        immersion=Immersion(3, _null_line_sphere, _margin_box(*sbox, m), "nullline-x-sphere"),
        box=sbox, reference=(0.2, 1.0, 0.5), classification="coisotropic", closed=True,
        rigging_fn=_const_rigging([-0.5, 0.5, 0.0, 0.0]),
        N_ext=_const_rigging([-0.5, 0.5, 0.0, 0.0]),
        expected={
            "rank_r": Expected(1, "TRIVIAL"),
            "gt": Expected(lambda u: np.diag([1.0, 1.0, np.sin(u[1]) ** 2]), "DERIVED", "g + dw (x) dw"),
            "index_gt": Expected(0, "DERIVED"),
            "hl": Expected(0.0, "DERIVED", "the null direction is parallel"),
            "A_N": Expected(0.0, "DERIVED"),
            "A_star": Expected(0.0, "DERIVED"),
            "sectional_Rt": Expected(_sphere_Rt_sec, "DERIVED", "unit sphere block"),
            "closed": Expected(True, "TRIVIAL"),
            "conformal_rigging": Expected(True, "DERIVED", "N is parallel, lambda = 0"),
            "conformal_screen": Expected("both-zero", "DERIVED"),
        },
    ))

    pbox = ((-1.0, -1.0), (1.0, 1.0))
    entries.append(CatalogEntry(
        id="totally-null-plane",
        description="totally null 2-plane in flat 4-space of index 2 (rejected)",
        ambient_spec=_mink(4, 2),
        immersion_text="(a, b) -> (a, b, a, b)",
        immersion=Immersion(2, _plane4, _margin_box(*pbox, m), "totally-null-plane"),
        box=pbox, reference=(0.1, 0.2), classification="totally-null", closed=True,
        rejection_only=True,
    ))
    entries.append(CatalogEntry(
        id="isotropic-plane",
        description="isotropic 2-plane in flat 6-space of index 2 (rejected)",
        ambient_spec=_mink(6, 2),
        immersion_text="(a, b) -> (a, b, a, b, 0, 0)",
        immersion=Immersion(2, _plane6, _margin_box(*pbox, m), "isotropic-plane"),
        box=pbox, reference=(0.1, 0.2), classification="isotropic", closed=True,
        rejection_only=True,
    ))
    return {e.id: e for e in entries}


_CATALOG = _build()


def catalog() -> list[CatalogEntry]:
    return list(_CATALOG.values())


def ids(include_rejections: bool = True) -> list[str]:
    return [e.id for e in _CATALOG.values() if include_rejections or not e.rejection_only]


def entry(entry_id: str) -> CatalogEntry:
    try:
        return _CATALOG[entry_id]
    except KeyError:
        raise ConfigurationError(f"unknown example {entry_id!r}; known: {', '.join(_CATALOG)}") from None


def expected_values(entry_id: str) -> dict[str, Expected]:
    return dict(entry(entry_id).expected)
