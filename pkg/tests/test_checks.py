import numpy as np

from ewlgame import checks


def test_run_all_passes():
    results = checks.run_all(seed=3, samples=100)
    assert all(r.passed for r in results)
    assert {r.name for r in results} >= {"classical_limit", "decomposition_equivalence",
                                         "pseudoclassical_mixture", "diagonal_identity",
                                         "correlation_vanishing", "pd_closed_form_vs_oracle"}


def test_fault_injection_is_detected():
    rng = np.random.default_rng(0)
    assert not checks.check_decomposition(rng, 20, corrupt=True).passed
    assert checks.check_decomposition(rng, 20).passed


def test_named_profiles_cover_both_variants():
    assert len(checks.NAMED_PROFILES) == 8
