import numpy as np
import pytest

from nullrig.ambient import lower_first
from nullrig.errors import ConfigurationError, RechartError
from nullrig.induced import GeometryBundle
from nullrig.submanifold import Immersion
from nullrig.verifier import conformal_screen, prepare

U = np.array([1.2, 0.9, 0.4])


@pytest.fixture(scope="module")
def cone():
    return prepare("light-cone").bundle(U)


def test_light_cone_shape_operators(cone):
    s = U[0]
    P = np.diag([0.0, 1.0, 1.0])
    assert np.allclose(cone.val("A_N")[0], -P / (2 * s), atol=1e-13)
    assert np.allclose(cone.val("A_star")[0], -P / s, atol=1e-13)
    assert cone.val("hl")[0, 1, 1] == pytest.approx(-s, abs=1e-13)
    assert np.allclose(cone.val("P"), P, atol=1e-14)


def test_light_cone_rigged_christoffels_match_frozen_oracle(cone):
    # [DERIVED: central differences of diag(1, s^2, s^2 sin^2 th) at U]
    Gt = cone.val("Gt")
    assert Gt[0, 1, 1] == pytest.approx(-1.2, abs=1e-8)
    assert Gt[1, 0, 1] == pytest.approx(0.8333333333, abs=1e-8)
    assert Gt[2, 1, 2] == pytest.approx(0.7935511479, abs=1e-8)


def test_light_cone_rigged_curvature_vanishes_but_induced_does_not(cone):
    assert np.abs(cone.Rt).max() < 1e-12
    assert np.abs(cone.R).max() > 0.1


def test_light_cone_conformal_screen(cone):
    cs = conformal_screen(cone)
    assert cs.conformal and cs.phi == pytest.approx(0.5, abs=1e-12)


def test_exact_tilt_curvature_matches_frozen_oracle():
    # [DERIVED: nested central differences of the closed-form rigged metric]
    b = prepare("light-cone-exact-tilt").bundle(U)
    Rl = np.asarray(lower_first(b.val("gt"), b.Rt))
    assert Rl[1, 2, 2, 1] == pytest.approx(0.240737, abs=1e-5)
    assert abs(Rl[0, 1, 1, 0]) < 1e-5
    assert np.abs(b.val("tau")).max() > 0.1


def test_sphere_product_curvatures():
    b = prepare("nullline-x-sphere").bundle(np.array([0.2, 1.0, 0.5]))
    Rl = np.asarray(lower_first(b.val("gt"), b.Rt))
    assert Rl[1, 2, 2, 1] == pytest.approx(np.sin(1.0) ** 2, abs=1e-12)
    assert np.abs(b.Rbar).max() == pytest.approx(1.0, abs=1e-12)


def test_gauss_weingarten_recomposition(cone):
    assert np.allclose(cone.recompose(cone.val("Gamma"), cone.val("hl"), cone.val("hs")), cone.val("Vd"), atol=1e-13)
    eye = np.eye(4)
    assert np.allclose(cone.recompose(*cone.decompose(eye)), eye, atol=1e-14)


def test_r1_surface_has_screen_transversal_geometry():
    b = prepare("r1-lightlike-surface").bundle(np.array([0.3, 0.7]))
    assert b.W_signs.tolist() == [-1.0]
    assert np.abs(b.val("hs")).max() > 0.1
    assert np.abs(b.val("A_W")).max() > 0.01


def test_rank_change_forces_rechart():
    ctx = prepare("r1-lightlike-surface")
    e = ctx.entry
    unrestricted = Immersion(2, e.immersion.map_fn)
    b = GeometryBundle(e.ambient, unrestricted, np.array([0.3, 0.0]), ctx.pattern)
    with pytest.raises(RechartError):
        b.xi_tc


def test_point_outside_domain():
    with pytest.raises(ConfigurationError):
        prepare("light-cone").bundle(np.array([0.0, 1.0, 0.5]))


def test_lower_orders_agree_with_higher():
    ctx = prepare("cone-x-nullline")
    u = np.array([1.1, 0.8, 0.3, 0.2])
    lo, hi = ctx.bundle(u, order=2), ctx.bundle(u, order=3)
    for name in ("xi_tc", "N", "omega", "gt", "Gamma", "hl", "A_star"):
        assert np.allclose(lo.val(name), hi.val(name), atol=1e-14), name
