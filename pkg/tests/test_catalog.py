import numpy as np
import pytest

from nullrig import catalog as cat
from nullrig.errors import ConfigurationError
from nullrig.submanifold import classify, numerical_rank, pullback
from nullrig.verifier import run_suite

REQUIRED = ["null-hyperplane", "light-cone", "flat-coisotropic-r2", "cone-x-nullline", "r1-lightlike-surface"]


def test_required_entries_present():
    assert set(REQUIRED) <= set(cat.ids())


@pytest.mark.parametrize("eid", cat.ids())
def test_classification_matches_computed(eid):
    e = cat.entry(eid)
    pm = pullback(e.ambient, e.immersion, e.reference)
    r = e.n - numerical_rank(pm.matrix)
    assert classify(e.n, e.k, r) == e.classification


def test_both_supported_classes_covered_and_rejections_only_unsupported():
    supported = {cat.entry(i).classification for i in cat.ids(include_rejections=False)}
    assert supported == {"coisotropic", "r-lightlike"}
    for e in cat.catalog():
        if e.rejection_only:
            assert e.classification in ("isotropic", "totally-null")


@pytest.mark.parametrize("eid", cat.ids())
def test_expected_values_are_tagged(eid):
    for key, exp in cat.expected_values(eid).items():
        assert exp.tag in ("TRIVIAL", "DERIVED"), key


def test_spec_example_values():
    assert cat.expected_values("r1-lightlike-surface")["rank_r"].value == 1
    assert cat.expected_values("light-cone")["tau_of_xi"].value == 0.0
    assert cat.expected_values("null-hyperplane")["A_N"].value == 0.0


def test_unknown_entry():
    with pytest.raises(ConfigurationError):
        cat.expected_values("no-such-entry")


def test_sampling_is_seeded_and_respects_margin():
    e = cat.entry("r1-lightlike-surface")
    a = e.sample(20, np.random.default_rng(3), margin=0.05)
    b = e.sample(20, np.random.default_rng(3), margin=0.05)
    assert np.array_equal(a, b)
    assert np.all(np.abs(a[:, 1]) >= 0.1 + 0.05)
    with pytest.raises(ConfigurationError):
        e.sample(1, np.random.default_rng(0), margin=5.0)


@pytest.mark.parametrize("eid", [i for i in cat.ids(False) if cat.entry(i).rigging_fn is not None])
def test_analytic_overrides_and_auto_frames_satisfy_same_invariants(eid):
    for mode in ("catalog", "auto"):
        rep = run_suite(eid, "frames", samples=10, seed=1, rigging=mode, tolerance=1e-10)
        assert rep.status == "pass", (mode, [c.id for c in rep.checks if c.status == "fail"])
