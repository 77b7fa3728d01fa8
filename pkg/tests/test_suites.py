import pytest

from wceop.scenario import generate_instance
from wceop.suites import CHECKS, SuiteConfig, SuiteContext, check_neumann_inverse, run_instance


def test_running_example_passes_everything(running):
    out = run_instance(running, 0, 11, "free")
    assert {r.status for r in out.results.values()} <= {"pass", "skip"}
    assert list(out.results) == list(CHECKS)


def test_hilbert_only_checks_skip_off_p2(running):
    out = run_instance(running.replace(p=3.0), 0, 11, "free")
    for name in ("aluthge", "lemma_norm_check", "cesaro_positive_norm"):
        assert out.results[name].status == "skip"
    assert out.results["power_closed_form"].status == "pass"


def test_neumann_skips_when_not_contractive(projection):
    assert check_neumann_inverse(projection, SuiteContext(1, "free")).status == "skip"


def test_unimodular_discrepancy_is_not_a_failure(projection):
    out = run_instance(projection, 0, 1, "unimodular")
    assert out.results["power_bounded_analysis"].status == "pass"
    assert any(d["check"] == "power_bounded_analysis" for d in out.discrepancies)


def test_context_vectors_are_seeded():
    a, b = SuiteContext(3, "free"), SuiteContext(3, "free")
    assert (a.vector(5) == b.vector(5)).all()


@pytest.mark.parametrize("regime", ["free", "nilpotent", "expanding"])
def test_generated_instances_pass(regime):
    for i in range(5):
        T = generate_instance(8, i, regime)
        out = run_instance(T, i, 8, regime, SuiteConfig(horizon=64))
        assert all(r.status != "fail" for r in out.results.values()), out.results
