import math

import pytest

import konpsurv


def test_statistic_on_generated_data():
    times, events, groups = konpsurv.generate("D-k3", "equal_25", n=60, seed=3)
    assert len(times) == 60
    q = konpsurv.konp_statistic(times, events, groups)
    assert q["n_tables"] > 0
    assert q["q_pearson"] >= 0 and q["q_lr"] >= 0


def test_run_tests_is_reproducible():
    times, events, groups = konpsurv.generate("D-k2", n=50, seed=1)
    args = dict(methods=["konp_p", "logrank"], imputations=1, permutations=100, seed=5)
    first = konpsurv.run_tests(times, events, groups, **args)
    second = konpsurv.run_tests(times, events, groups, threads=2, **args)
    assert [r["method"] for r in first] == ["konp_p", "logrank"]
    assert first == second
    assert all(0.0 <= r["pvalue"] <= 1.0 for r in first)


def test_logrank_and_cauchy():
    times = [1, 2, 3, 4, 5, 6, 7, 8]
    events = [1, 1, 0, 1, 1, 1, 0, 1]
    groups = ["a", "b"] * 4
    r = konpsurv.weighted_logrank(times, events, groups)
    assert math.isclose(r["pvalue"], math.erfc(abs(r["z"]) / math.sqrt(2)), rel_tol=1e-12)
    assert math.isclose(konpsurv.cauchy_combination([0.3, 0.3, 0.3]), 0.3, abs_tol=1e-12)


def test_validation_errors_are_value_errors():
    with pytest.raises(ValueError):
        konpsurv.konp_statistic([1.0, -2.0], [1, 1], ["a", "b"])
    with pytest.raises(ValueError):
        konpsurv.run_tests([1.0, 2.0], [1, 1], ["a", "b"], methods=["nope"])
    assert "null-k3" in konpsurv.scenario_names()
