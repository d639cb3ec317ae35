import pytest

from periplay.suites import SUITE_NAMES, run_all, run_suite, stratified_defect_samples


def test_all_suites_pass():
    for suite in run_all(seed=0):
        failed = [c.name for c in suite.checks if not c.passed]
        assert suite.passed, f"{suite.suite} failed: {failed}"


def test_suite_results_serialize():
    (suite,) = run_suite("spatial", seed=3)
    doc = suite.to_dict()
    assert doc["suite"] == "spatial"
    assert doc["passed"] is True
    assert all("name" in c and "passed" in c for c in doc["checks"])


def test_unknown_suite_rejected():
    with pytest.raises(KeyError):
        run_suite("nonsense")


def test_suite_names_cover_modules():
    assert set(SUITE_NAMES) == {"curves", "hysteresis", "spatial", "dynamics", "periodic", "all"}


def test_stratified_sampler_is_seeded():
    a = stratified_defect_samples(seed=5)
    b = stratified_defect_samples(seed=5)
    assert (a[1] == b[1]).all() and (a[3] == b[3]).all()


def test_stratified_sampler_hits_every_case():
    from periplay.suites import _classify

    pair, lam_i, lam_j, u_i, v_i, u_j, v_j = stratified_defect_samples(seed=0)
    assert u_j.size >= 100_000
    cj = _classify(pair, u_j, v_j)
    ci = _classify(pair, u_i, v_i)
    for a in range(3):
        for b in range(3):
            assert ((cj == a) & (ci == b)).sum() >= 1000, (a, b)
