import numpy as np
import pytest

from nullrig import catalog as cat
from nullrig.errors import ContradictionError, UnsupportedError
from nullrig.rigging import is_closed, is_conformal_rigging, projection_P, rigged_metric
from nullrig.verifier import prepare


def auto_bundle(eid, u, order=2):
    return prepare(eid, rigging="auto").bundle(np.asarray(u, dtype=float), order=order)


def test_null_hyperplane_transversal_is_unique_null_dual():
    b = auto_bundle("null-hyperplane", [0.1, 0.2, 0.3])
    assert np.allclose(b.val("N")[:, 0], [-0.5, 0.5, 0.0, 0.0], atol=1e-15)


def test_light_cone_transversal():
    th, ph = 1.1, 0.4
    b = auto_bundle("light-cone", [0.9, th, ph])
    n = np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
    assert np.allclose(b.val("N")[:, 0], 0.5 * np.concatenate([[-1.0], n]), atol=1e-14)


def test_flat_coisotropic_transversal_pairs_dually():
    b = auto_bundle("flat-coisotropic-r2", [0.1, -0.2, 0.3])
    N, xi, g = b.val("N"), b.val("xi"), b.val("gbar")
    assert N.shape == (5, 2)
    assert np.allclose(N.T @ g @ xi, np.eye(2), atol=1e-14)
    assert np.allclose(N.T @ g @ N, 0.0, atol=1e-14)


def test_omega_on_frame_and_projection():
    b = auto_bundle("light-cone", [1.2, 0.9, 0.4])
    om, xi, E = b.val("omega"), b.val("xi_tc"), b.val("screen_tc")
    assert np.allclose(om @ xi, 1.0) and np.allclose(om @ E, 0.0, atol=1e-14)
    assert np.allclose(projection_P(xi, om, xi[:, 0]), 0.0, atol=1e-14)
    assert np.allclose(projection_P(xi, om, E[:, 1]), E[:, 1])
    assert np.allclose(projection_P(xi, om, xi[:, 0] + E[:, 0]), E[:, 0])


def test_rigged_metric_examples():
    b = auto_bundle("null-hyperplane", [0.1, 0.2, 0.3])
    assert np.allclose(rigged_metric(b.val("g"), b.val("omega")).matrix, np.eye(3))
    s, th = 1.2, 0.9
    b = auto_bundle("light-cone", [s, th, 0.4])
    assert np.allclose(rigged_metric(b.val("g"), b.val("omega")).matrix, np.diag([1.0, s * s, (s * np.sin(th)) ** 2]))


def test_rigged_metric_degenerate_and_index_contradictions():
    g = np.diag([0.0, 1.0, 1.0])
    with pytest.raises(ContradictionError):
        rigged_metric(g, np.array([[0.0, 1.0, 0.0]]))
    with pytest.raises(ContradictionError):
        rigged_metric(g, np.array([[1.0, 0.0, 0.0]]), expected_index=1)
    with pytest.raises(ValueError):
        rigged_metric(g, np.array([[1.0, 0.0, 0.0]]), sign=2.0)


def test_printed_sign_gives_negative_radical_norm():
    g = np.diag([0.0, 1.0, 1.0])
    rm = rigged_metric(g, np.array([[1.0, 0.0, 0.0]]), sign=-1.0)
    assert rm.matrix[0, 0] == -1.0


def test_closedness_of_catalog_riggings():
    u = np.array([1.2, 0.9, 0.4])
    assert is_closed(prepare("light-cone").bundle(u).domega) == (True,)
    assert is_closed(prepare("light-cone-exact-tilt").bundle(u).domega) == (True,)
    d = prepare("light-cone-tilted").bundle(u).domega
    assert is_closed(d) == (False,)
    # d omega = 0.3 sin(theta) ds ^ dtheta
    assert d[0, 0, 1] == pytest.approx(0.3 * np.sin(0.9), abs=1e-13)
    assert d[0, 1, 0] == pytest.approx(-d[0, 0, 1])


def test_conformal_rigging_predicate():
    hyper = cat.entry("null-hyperplane")
    fit = is_conformal_rigging(hyper.ambient, hyper.N_ext, np.array([0.1, 0.1, 0.2, 0.3]))
    assert fit.conformal == (True,) and fit.lam[0] == pytest.approx(0.0)
    cone = cat.entry("light-cone")
    x = np.array([1.0, 0.6, 0.0, 0.8])
    assert is_conformal_rigging(cone.ambient, cone.N_ext, x).conformal == (False,)
    tilted = cat.entry("light-cone-tilted")
    assert is_conformal_rigging(tilted.ambient, tilted.N_ext, x).conformal == (False,)


def test_conformal_rigging_needs_extension():
    e = cat.entry("r1-lightlike-surface")
    with pytest.raises(UnsupportedError):
        is_conformal_rigging(e.ambient, None, np.zeros(4))
