"""Acceptance gate: one test per release criterion, one printed line each.

Each test prints ``ACCEPTANCE k: PASS/FAIL (detail)`` on the real stdout so
the gate is readable even under capture, then asserts.  The random-system
population below is the shared 210-system pool (dims 1..6, mixed spectral
radii) from conftest.
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import riccati_lab as rl
from riccati_lab.systems import dual, random_pd, random_psd

from conftest import PHI

PSD_TOL = rl.DEFAULT_TOLERANCES.psd


@pytest.fixture
def report(capsys):
    """One gate line per criterion, printed past the capture machinery."""

    def _report(k: int, ok: bool, detail: str) -> None:
        verdict = "PASS" if ok else "FAIL"
        with capsys.disabled():
            print(f"ACCEPTANCE {k}: {verdict} ({detail})", flush=True)

    return _report


def _lam_min(M: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


def test_criterion_1_golden_exactness(golden, report):
    t0 = time.perf_counter()
    fp = rl.solve_fixed_point(golden)
    neg = rl.negative_fixed_point(golden).values[0, 0]
    n_half = rl.compute_n_epsilon(fp, 0.5)
    elapsed = time.perf_counter() - t0
    errs = [
        abs(fp.Pinf.values[0, 0] - PHI),
        abs(fp.Phat_inf.values[0, 0] - PHI),
        abs(fp.E[0, 0] - 1.0 / PHI**2),
        abs(fp.F.values[0, 0] - 1.0 / PHI**2),
        abs(fp.H.values[0, 0] - 1.0 / np.sqrt(5.0)),
        abs(neg - (-1.0 / PHI)),
        abs(float(n_half - 2)),
    ]
    worst = max(errs)
    ok = worst <= 1e-10 and elapsed < 1.0
    report(1, ok, f"worst abs err {worst:.2e}, {elapsed * 1000:.0f} ms")
    assert ok


def test_criterion_2_duality_suite(system_pool, report):
    t0 = time.perf_counter()
    worst = 0.0
    checks = 0
    for i, sys_i in enumerate(system_pool):
        gen = np.random.default_rng(10_000 + i)
        r = sys_i.dim
        P = random_pd(gen, r, norm=float(10.0 ** gen.uniform(-1, 3)))
        Q = random_pd(gen, r, norm=float(10.0 ** gen.uniform(-1, 3)))
        n = int(gen.integers(1, 11))
        rep = rl.duality_report(sys_i, P, Q, n)
        ratio = rep.residual / max(1.0, rep.lhs_norm, rep.rhs_norm)
        worst = max(worst, ratio)
        checks += 1
    elapsed = time.perf_counter() - t0
    ok = checks >= 200 and worst <= 1e-9 and elapsed <= 60.0
    report(2, ok, f"{checks} systems, worst residual ratio {worst:.2e}, "
                   f"{elapsed:.1f} s")
    assert ok


def test_criterion_3_two_route_lyapunov(system_pool, pool_fps, report):
    worst_gap = 0.0
    worst_res = 0.0
    for fp in pool_fps:
        H_dual = fp.H.values
        H_series = rl.lyapunov_solve_series(fp.E, fp.F.values).values
        scale = rl.scale_of(H_dual, H_series)
        worst_gap = max(worst_gap, rl.spectral_norm(H_series - H_dual) / scale)
        res = rl.spectral_norm(fp.E.T @ H_dual @ fp.E + fp.F.values - H_dual)
        worst_res = max(worst_res, res / rl.scale_of(H_dual))
    ok = worst_gap <= 1e-8 and worst_res <= 1e-9
    report(3, ok, f"route gap {worst_gap:.2e}, Lyapunov residual {worst_res:.2e}")
    assert ok


def test_criterion_4_floquet_suite(system_pool, pool_fps, report):
    worst_factor = 0.0
    worst_excess = 0.0
    for i, (sys_i, fp) in enumerate(zip(system_pool, pool_fps)):
        gen = np.random.default_rng(20_000 + i)
        r = sys_i.dim
        P = random_psd(gen, r, norm=float(10.0 ** gen.uniform(0, 6)))
        for n in range(r, 21):
            cert = rl.floquet_factorize(fp, P, n)
            worst_factor = max(worst_factor, cert.factor_residual / cert.scale)
            worst_excess = max(worst_excess, cert.ln_inv_norm - cert.iota)
    ok = worst_factor <= 1e-9 and worst_excess <= 1e-9
    report(4, ok, f"factor residual {worst_factor:.2e}, "
                   f"inverse-norm excess {worst_excess:.2e}")
    assert ok


def test_criterion_5_gramian_order_chain(pool_fps, report):
    worst_floor = np.inf
    worst_order = np.inf
    worst_gap = 0.0
    for fp in pool_fps:
        r = fp.dim
        H = fp.H.values
        G_r = rl.limit_gramian(fp, r).values
        worst_floor = min(worst_floor, _lam_min(G_r))
        G_rec = np.zeros((r, r))
        for n in range(1, 31):
            G_rec = fp.E.T @ G_rec @ fp.E + fp.F.values
            G_rec = 0.5 * (G_rec + G_rec.T)
            G_n = rl.limit_gramian(fp, n).values
            scale = rl.scale_of(G_n, G_rec)
            worst_gap = max(worst_gap, rl.spectral_norm(G_rec - G_n) / scale)
            if n >= r:
                rel = rl.scale_of(G_n, G_r, H)
                worst_order = min(worst_order,
                                  _lam_min(G_n - G_r) / rel,
                                  _lam_min(H - G_n) / rel)
    ok = worst_floor > 0.0 and worst_order >= -PSD_TOL and worst_gap <= 1e-10
    report(5, ok, f"min lambda_min(G_r) {worst_floor:.2e}, order margin "
                   f"{worst_order:.2e}, recursion gap {worst_gap:.2e}")
    assert ok


def test_criterion_6_closed_forms(system_pool, pool_fps, report):
    worst_sol = 0.0
    worst_dev = 0.0
    for i, (sys_i, fp) in enumerate(zip(system_pool, pool_fps)):
        gen = np.random.default_rng(30_000 + i)
        r = sys_i.dim
        P = random_psd(gen, r, norm=float(10.0 ** gen.uniform(-1, 3)))
        traj = rl.phi_n(sys_i, P, 20)
        for n in range(r, 21):
            iterated = traj.iterate(n)
            closed = rl.explicit_solution(fp, P, n).values
            worst_sol = max(worst_sol, rl.spectral_norm(closed - iterated)
                            / rl.scale_of(iterated, closed))
            En_prod = traj.product(n)
            En_pow = np.linalg.matrix_power(fp.E, n)
            dev = rl.product_deviation(fp, P, n)
            direct = En_prod - En_pow
            worst_dev = max(worst_dev, rl.spectral_norm(dev - direct)
                            / rl.scale_of(En_prod, En_pow))
    ok = worst_sol <= 1e-9 and worst_dev <= 1e-9
    report(6, ok, f"explicit-solution gap {worst_sol:.2e}, "
                   f"deviation gap {worst_dev:.2e}")
    assert ok


def test_criterion_7_uniform_bounds(system_pool, pool_fps, report):
    violations = 0
    checks = 0
    worst_margin = np.inf
    for i, (sys_i, fp) in enumerate(zip(system_pool, pool_fps)):
        gen = np.random.default_rng(40_000 + i)
        r = sys_i.dim
        d = dual(sys_i)
        G_r = rl.limit_gramian(fp, r).values
        cap_base = fp.Phat_inf.values
        for eps in (0.1, 0.5, 0.9):
            n_eps = rl.compute_n_epsilon(fp, eps)
            n_up = max(r, n_eps)
            cap = cap_base / eps
            for _ in range(50):
                Q = random_psd(gen, r, norm=float(10.0 ** gen.uniform(-1, 3)))
                low = rl.phi_n(d, Q, r, keep_path=False).final_P
                lam_lo = _lam_min(low - G_r) / rl.scale_of(low, G_r)
                up = rl.phi_n(d, Q, n_up, keep_path=False).final_P
                lam_up = _lam_min(cap - up) / rl.scale_of(cap, up)
                worst_margin = min(worst_margin, lam_lo, lam_up)
                if lam_lo < -PSD_TOL or lam_up < -PSD_TOL:
                    violations += 1
                checks += 2
    ok = violations == 0 and checks >= 50 * 3 * 2 * len(system_pool)
    report(7, ok, f"{checks} bound checks, {violations} violations, "
                   f"worst margin {worst_margin:.2e}")
    assert ok


def test_criterion_8_structural_lemmas(system_pool, report):
    worst_sym = 0.0
    worst_mono = np.inf
    worst_sandwich = np.inf
    worst_reach = np.inf
    worst_frechet = 0.0
    for i, sys_i in enumerate(system_pool):
        gen = np.random.default_rng(50_000 + i)
        r = sys_i.dim
        P = random_psd(gen, r, norm=float(10.0 ** gen.uniform(-1, 3)))
        raw = rl.phi_raw(sys_i, P)
        worst_sym = max(worst_sym,
                        rl.spectral_norm(raw - raw.T) / rl.scale_of(raw))
        # monotonicity in the argument and along the flow from zero
        L = gen.standard_normal((r, r))
        Pbig = P + L @ L.T
        phi_big = rl.phi(sys_i, Pbig).values
        phi_small = rl.phi(sys_i, P).values
        worst_mono = min(worst_mono, _lam_min(phi_big - phi_small)
                         / rl.scale_of(phi_big, phi_small))
        traj = rl.phi_n(sys_i, np.zeros((r, r)), 6)
        for n in range(6):
            step = traj.iterate(n + 1) - traj.iterate(n)
            worst_mono = min(worst_mono,
                             _lam_min(step) / rl.scale_of(traj.iterate(n + 1)))
        ab = rl.alpha_bounds(sys_i, P)
        Fv = rl.map_F(sys_i, P).values
        S = sys_i.S.values
        rel = rl.scale_of(Fv, S)
        worst_sandwich = min(worst_sandwich,
                             _lam_min(Fv - ab.alpha_minus * S) / rel,
                             _lam_min(ab.alpha_plus * S - Fv) / rel)
        worst_reach = min(worst_reach, rl.check_reach_pd(sys_i))
        # Frechet derivative against a central difference
        Pd = random_pd(gen, r, norm=1.0) + 0.1 * np.eye(r)
        Hd = gen.standard_normal((r, r))
        Hd = (Hd + Hd.T) / max(1.0, rl.spectral_norm(Hd))
        h = 1e-6
        n_fd = 3
        plus = rl.phi_n(sys_i, Pd + h * Hd, n_fd, keep_path=False).final_P
        minus = rl.phi_n(sys_i, Pd - h * Hd, n_fd, keep_path=False).final_P
        fd = (plus - minus) / (2.0 * h)
        an = rl.frechet_apply(sys_i, Pd, Hd, n_fd).values
        worst_frechet = max(worst_frechet, rl.spectral_norm(fd - an))
    ok = (worst_sym <= 1e-12 and worst_mono >= -PSD_TOL
          and worst_sandwich >= -PSD_TOL and worst_reach > 0.0
          and worst_frechet <= 1e-4)
    report(8, ok, f"symmetry {worst_sym:.2e}, monotone margin {worst_mono:.2e}, "
                   f"sandwich margin {worst_sandwich:.2e}, reach floor "
                   f"{worst_reach:.2e}, frechet gap {worst_frechet:.2e}")
    assert ok


def test_criterion_9_cli_determinism(tmp_path, report):
    t0 = time.perf_counter()
    root = Path(__file__).resolve().parents[1]
    env_runs = []
    for tag in ("a", "b"):
        out = tmp_path / f"gen-{tag}.json"
        r = subprocess.run(
            [sys.executable, "-m", "riccati_lab.cli", "generate", str(out),
             "--dim", "4", "--seed", "11"],
            capture_output=True, text=True, timeout=120, cwd=root,
        )
        assert r.returncode == 0, r.stderr
        env_runs.append(out.read_bytes())
    gen_same = env_runs[0] == env_runs[1]

    verify_runs = []
    for _ in range(2):
        r = subprocess.run(
            [sys.executable, "-m", "riccati_lab.cli", "verify",
             str(tmp_path / "gen-a.json"), "--trials", "5", "--json"],
            capture_output=True, text=True, timeout=120, cwd=root,
        )
        assert r.returncode == 0, r.stderr
        verify_runs.append(r.stdout)
    verify_same = verify_runs[0] == verify_runs[1]

    suite = subprocess.run(
        [sys.executable, "-m", "pytest", "tests/test_sysfile_cli.py", "-q",
         "-p", "no:cacheprovider"],
        capture_output=True, text=True, timeout=300, cwd=root,
    )
    elapsed = time.perf_counter() - t0
    ok = gen_same and verify_same and suite.returncode == 0 and elapsed <= 120.0
    report(9, ok, f"generate identical {gen_same}, verify identical "
                   f"{verify_same}, CLI suite rc {suite.returncode}, "
                   f"{elapsed:.1f} s")
    assert ok, suite.stdout[-2000:]
