"""Batch analysis reports: determinism, shape, and validation."""

import pytest

import riccati_lab as rl
from riccati_lab.systems import random_system

EXPECTED_CHECKS = {
    "identity-one-step", "identity-difference", "identity-product",
    "duality", "floquet-factor", "floquet-product", "explicit-solution",
    "product-deviation", "ln-inv-excess", "bound-lower", "bound-upper",
}


def test_analysis_report_golden(golden):
    rep = rl.analysis_report(golden, name="golden", trials=3, seed=2)
    assert rep.ok
    assert rep.first_failure is None
    assert rep.dim == 1
    assert rep.trials == 3
    assert rep.elapsed > 0.0
    assert {c.name for c in rep.checks} == EXPECTED_CHECKS
    for c in rep.checks:
        assert c.ok
        # bound checks carry a signed margin; the rest carry a residual
        if not c.name.startswith("bound-"):
            assert c.worst <= c.budget


def test_analysis_report_json_excludes_timing(golden):
    rep = rl.analysis_report(golden, trials=2)
    d = rep.to_json_dict()
    assert "elapsed" not in d
    assert d["ok"] is True
    assert d["bounds"]["n_epsilon"] == 2
    assert d["bounds"]["persists"] is True


def test_analysis_report_serial_parallel_identical():
    sys = random_system(3, rng=13)
    serial = rl.analysis_report(sys, trials=4, seed=9, parallel=False)
    parallel = rl.analysis_report(sys, trials=4, seed=9, parallel=True)
    assert serial.to_json_dict() == parallel.to_json_dict()


def test_analysis_report_validation(golden):
    with pytest.raises(ValueError):
        rl.analysis_report(golden, n=0)
    with pytest.raises(ValueError):
        rl.analysis_report(golden, trials=0)
