from types import SimpleNamespace

import numpy as np
import pytest

from nullrig import verifier as V
from nullrig.errors import ConfigurationError, UnsupportedError


def test_null_hyperplane_all_pass():
    rep = V.run_suite("null-hyperplane", "all", 1e-8, 50, 42)
    assert rep.status == "pass"
    assert all(c.status in ("pass", "skipped") for c in rep.checks)


def test_light_cone_curvature_pass():
    rep = V.run_suite("light-cone", "curvature", 1e-7, 25, 7)
    assert rep.status == "pass"
    assert rep.check("rigged-curvature-screen").samples == 25


def test_rejected_classes():
    with pytest.raises(UnsupportedError, match="totally-null"):
        V.run_suite("totally-null-plane")
    with pytest.raises(ConfigurationError, match="isotropic"):
        V.run_suite("isotropic-plane")
    with pytest.raises(ConfigurationError):
        V.run_suite("nowhere")


@pytest.mark.parametrize("kw", [dict(samples=0), dict(tolerance=-1.0), dict(suite="bogus"),
                                dict(sign=2), dict(rigging="magic"), dict(overrides={"no-such-check": 1.0}),
                                dict(overrides={"rigged-metric-derivative": 0.0})])
def test_bad_arguments(kw):
    with pytest.raises(ConfigurationError):
        V.run_suite("null-hyperplane", **{"samples": 2, **kw})


def test_skip_discipline_names_failed_precondition():
    rep = V.run_suite("light-cone-tilted", "connection", samples=5)
    c = rep.check("rigged-connection-jump")
    assert c.status == "skipped" and c.skip_reason == "normalization not closed"
    assert rep.diagnostics["jump_closed_formula_on_non_closed"] > 1.0
    rep = V.run_suite("r1-lightlike-surface", "curvature", samples=5)
    assert "coisotropic" in rep.check("rigged-curvature-screen").skip_reason


def test_reports_are_deterministic():
    a = V.run_suite("cone-x-nullline", "all", samples=6, seed=11).to_dict()
    b = V.run_suite("cone-x-nullline", "all", samples=6, seed=11).to_dict()
    c = V.run_suite("cone-x-nullline", "all", samples=6, seed=12).to_dict()
    assert a == b
    assert a != c


def test_override_can_make_a_check_fail():
    rep = V.run_suite("light-cone", "connection", samples=5, overrides={"rigged-metric-derivative": 1e-30})
    assert rep.check("rigged-metric-derivative").status == "fail"
    assert rep.status == "fail"


def test_global_tolerance_does_not_touch_above_checks():
    rep = V.run_suite("light-cone", "metric", samples=5, tolerance=1e-3)
    assert rep.check("rigged-metric-nondegenerate").tolerance == V.DET_FLOOR
    assert rep.check("rigging-form-duality").tolerance == 1e-3


def test_lemma_on_null_hyperplane_is_zero_equals_zero():
    ctx = V.prepare("null-hyperplane")
    b = ctx.bundle(np.array([0.1, 0.2, 0.3]))
    assert np.abs(V.lemma_prediction(b)).max() == 0.0
    assert V.r_lemma(b, ctx) < 1e-15


def test_lemma_on_light_cone_radical_triple():
    ctx = V.prepare("light-cone")
    b = ctx.bundle(np.array([1.2, 0.9, 0.4]))
    xi = b.val("xi_tc")[:, 0]
    pred = np.einsum("ajk,a,j,k->", V.lemma_prediction(b), xi, xi, xi)
    assert abs(pred) < 1e-14  # reduces to 2 tau(xi) = 0


def test_jump_correction_is_not_vacuous_on_light_cone():
    ctx = V.prepare("light-cone")
    b = ctx.bundle(np.array([1.0, 1.0, 0.5]))
    assert np.abs(V.jump_prediction(b) - b.val("Gamma")).max() > 0.1
    assert V.r_jump(b, ctx) < 1e-12


def test_frozen_sign_constants_win_adjudication():
    res = V.adjudicate_signs(samples=2)
    for key, (chosen, scores) in res.items():
        assert chosen == V.SIGN_CONSTANTS[key]
        others = [v for k, v in scores.items() if k != chosen]
        assert scores[chosen] < 1e-10 and min(others) > 1e-3


def test_conformal_screen_cases():
    ctx = V.prepare("null-hyperplane")
    assert V.conformal_screen(ctx.bundle(np.array([0.1, 0.2, 0.3]))).case == "both-zero"
    ctx = V.prepare("light-cone-tilted")
    assert not V.conformal_screen(ctx.bundle(np.array([1.0, 1.0, 0.5]))).conformal


def test_conformal_screen_without_screen_shape_operator():
    arrays = {"g": np.diag([0.0, 1.0]), "A_star": np.zeros((1, 2, 2)),
              "A_N": np.array([[[0.0, 0.0], [0.0, 1.0]]]), "P": np.diag([0.0, 1.0])}
    fake = SimpleNamespace(val=arrays.__getitem__, frame_tc=np.eye(2))
    cs = V.conformal_screen(fake)
    assert not cs.conformal and cs.case == "no-factor" and cs.phi is None


def test_environment_block():
    rep = V.run_suite("light-cone", "frames", samples=2)
    env = rep.environment
    assert env["sign_convention"] == 1 and env["rigging_mode"] == "catalog"
    assert env["sign_constants"]["rigged-connection-jump"] == 1.0
    assert "sum_placement" in env


def test_oracle_suite_passes_on_curved_entry():
    rep = V.run_suite("nullline-x-sphere", "oracle", samples=3)
    assert rep.status == "pass"
    assert {c.id for c in rep.checks} >= {"oracle:induced-connection", "oracle:rigged-connection"}
