"""The two kernel backends must agree to rounding on everything they expose."""

import numpy as np
import pytest

import riccati_lab as rl
from riccati_lab._backend import available_backends, get_backend
from riccati_lab.systems import random_psd, random_system

BACKENDS = available_backends()

pytestmark = pytest.mark.skipif(
    "compiled" not in BACKENDS,
    reason="compiled extension not built; nothing to compare",
)


def _cases():
    out = []
    for dim in range(1, 7):
        for j in range(4):
            seed = 300 * dim + j
            sys = random_system(dim, rng=seed)
            gen = np.random.default_rng(seed)
            P0 = random_psd(gen, dim, norm=float(10.0 ** gen.uniform(-1, 2)))
            out.append((sys, P0))
    return out


def test_backend_reports_compiled_by_default():
    assert get_backend() == "compiled"


def test_step_and_sweep_agree():
    py = BACKENDS["python"]
    cy = BACKENDS["compiled"]
    for sys, P0 in _cases():
        args = (sys.A, sys.R.values, sys.S.values)
        for a, b in zip(py.riccati_step(*args, P0), cy.riccati_step(*args, P0)):
            assert np.allclose(a, b, atol=1e-13, rtol=1e-13)
        for a, b in zip(
            py.riccati_sweep(*args, P0, 8), cy.riccati_sweep(*args, P0, 8)
        ):
            scale = max(1.0, float(np.max(np.abs(a))))
            assert np.max(np.abs(a - b)) <= 1e-11 * scale
        for a, b in zip(
            py.riccati_final(*args, P0, 8), cy.riccati_final(*args, P0, 8)
        ):
            scale = max(1.0, float(np.max(np.abs(a))))
            assert np.max(np.abs(a - b)) <= 1e-11 * scale


def test_fixed_point_agree():
    py = BACKENDS["python"]
    cy = BACKENDS["compiled"]
    for sys, P0 in _cases()[:12]:
        args = (sys.A, sys.R.values, sys.S.values)
        P_py, it_py, d_py = py.fixed_point(*args, P0, 1e-12, 100_000)
        P_cy, it_cy, d_cy = cy.fixed_point(*args, P0, 1e-12, 100_000)
        scale = max(1.0, float(np.max(np.abs(P_py))))
        assert np.max(np.abs(P_py - P_cy)) <= 1e-10 * scale
        assert abs(it_py - it_cy) <= 2


def test_lyapunov_series_agree():
    py = BACKENDS["python"]
    cy = BACKENDS["compiled"]
    for seed in range(6):
        sys = random_system(3, rng=500 + seed)
        fp = rl.solve_fixed_point(sys)
        H_py, t_py, s_py, _ = py.lyapunov_series(
            fp.E, fp.F.values, 1e-13, 100_000, 20)
        H_cy, t_cy, s_cy, _ = cy.lyapunov_series(
            fp.E, fp.F.values, 1e-13, 100_000, 20)
        assert s_py == s_cy == 0
        assert t_py == t_cy
        scale = max(1.0, float(np.max(np.abs(H_py))))
        assert np.max(np.abs(H_py - H_cy)) <= 1e-12 * scale


def test_read_only_inputs_accepted():
    # certified wrappers export read-only arrays; both backends must cope
    sys = random_system(2, rng=42)
    A = sys.A.copy()
    A.setflags(write=False)
    P = np.eye(2)
    P.setflags(write=False)
    for mod in BACKENDS.values():
        P1, E1, F1 = mod.riccati_step(A, sys.R.values, sys.S.values, P)
        assert np.all(np.isfinite(P1))


def test_backend_env_override():
    import os
    import subprocess
    import sys as _s

    code = "import riccati_lab as rl; print(rl.get_backend())"
    env = dict(os.environ, RICCATI_LAB_BACKEND="python")
    r = subprocess.run(
        [_s.executable, "-c", code],
        capture_output=True, text=True, timeout=120, env=env,
    )
    assert r.returncode == 0, r.stderr
    assert r.stdout.strip() == "python"
