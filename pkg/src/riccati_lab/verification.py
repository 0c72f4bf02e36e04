"""Batch residual verification over random trial pairs.

One fixed-point solve per system, then ``trials`` independent draws of a
positive definite pair (P, Q); every algebraic identity, factorization
residual, and uniform bound is evaluated per trial and the worst case per
check is reported.  Trials are seeded from a single spawning seed sequence,
so reports are reproducible and independent of whether trials run serially
or on a thread pool.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import Tolerances, resolve
from .dare import solve_fixed_point
from .errors import BoundViolation, IdentityViolation
from .floquet import (
    compute_n_epsilon,
    duality_report,
    explicit_solution,
    floquet_factorize,
    iota_bound,
    n_epsilon_persists,
    product_deviation,
    uniform_bounds,
)
from .matrices import scale_of, spectral_norm
from .riccati import phi_n, verify_identities
from .systems import SystemTriple, certify, random_pd

__all__ = ["CheckResult", "AnalysisReport", "analysis_report"]


@dataclass(frozen=True)
class CheckResult:
    """Worst case of one named residual check over all trials."""

    name: str
    worst: float
    budget: float
    ok: bool


@dataclass(frozen=True)
class AnalysisReport:
    """Everything the verify command reports for one system.

    Residuals inside ``checks`` are scale-relative; ``elapsed`` is wall time
    and deliberately excluded from machine-readable serialization.
    """

    dim: int
    name: str
    n: int
    trials: int
    seed: int
    epsilon: float
    certificate: dict
    fixed_point: dict
    floquet: dict
    bounds: dict
    checks: tuple[CheckResult, ...]
    ok: bool
    first_failure: str | None
    elapsed: float

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "name": self.name,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "epsilon": self.epsilon,
            "certificate": self.certificate,
            "fixed_point": self.fixed_point,
            "floquet": self.floquet,
            "bounds": self.bounds,
            "checks": [
                {"name": c.name, "worst": c.worst, "budget": c.budget, "ok": c.ok}
                for c in self.checks
            ],
            "ok": self.ok,
            "first_failure": self.first_failure,
        }


def _draw_pd(rng: np.random.Generator, dim: int) -> np.ndarray:
    # norms log-uniform in [0.1, 1000]
    return random_pd(rng, dim, norm=10.0 ** rng.uniform(-1.0, 3.0))


def _run_trial(sys, fp, n, epsilon, seed_seq, tols):
    rng = np.random.default_rng(seed_seq)
    r = sys.dim
    P = _draw_pd(rng, r)
    Q = _draw_pd(rng, r)
    out = {}

    try:
        ident = verify_identities(sys, P, Q, n, tols)
        out["identity-one-step"] = ident.one_step / ident.one_step_scale
        out["identity-difference"] = ident.difference / ident.difference_scale
        out["identity-product"] = ident.product / ident.product_scale
    except IdentityViolation as exc:
        out["identity-one-step"] = float("inf")
        out["identity-difference"] = float("inf")
        out["identity-product"] = float("inf")
        out["identity-error"] = str(exc)

    dr = duality_report(sys, P, Q, n, tols)
    out["duality"] = dr.residual / dr.scale

    cert = floquet_factorize(fp, P, n, tols)
    out["floquet-factor"] = cert.factor_residual / cert.scale
    out["floquet-product"] = cert.product_residual / cert.scale
    out["ln-inv-excess"] = cert.ln_inv_norm - cert.iota

    closed = explicit_solution(fp, P, n, tols).values
    traj = phi_n(sys, P, n, keep_path=False, tols=tols)
    out["explicit-solution"] = spectral_norm(closed - traj.final_P) / scale_of(
        closed, traj.final_P
    )

    dev = product_deviation(fp, P, n, tols)
    direct = traj.final_Eprod - np.linalg.matrix_power(fp.E, n)
    out["product-deviation"] = spectral_norm(dev - direct) / scale_of(dev, direct)

    try:
        rep = uniform_bounds(sys, Q, epsilon, m=r, fp=fp, tols=tols)
    except BoundViolation as exc:
        rep = exc.report
    out["bound-lower-margin"] = rep.lower_margin
    out["bound-upper-margin"] = rep.upper_margin
    out["bound-lower-ok"] = rep.lower_ok
    out["bound-upper-ok"] = rep.upper_ok
    return out


def analysis_report(
    sys: SystemTriple,
    name: str = "",
    n: int | None = None,
    trials: int = 10,
    seed: int = 0,
    epsilon: float = 0.5,
    parallel: bool = False,
    tols: Tolerances | None = None,
) -> AnalysisReport:
    """Run the full residual battery; see AnalysisReport for the layout.

    The horizon defaults to the dimension (the smallest valid one for the
    factorization checks).  Fails soft: every check is evaluated and the
    report carries per-check pass/fail plus the first failing name.
    """
    tols = resolve(tols)
    t0 = time.perf_counter()
    r = sys.dim
    if n is None:
        n = r
    if n < r:
        raise ValueError(f"n must be >= r = {r}, got {n}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")

    cert = certify(sys, tols)
    fp = solve_fixed_point(sys, tols=tols)

    seqs = np.random.SeedSequence(seed).spawn(trials)
    if parallel and trials > 1:
        with ThreadPoolExecutor(max_workers=min(8, trials)) as pool:
            results = list(
                pool.map(lambda s: _run_trial(sys, fp, n, epsilon, s, tols), seqs)
            )
    else:
        results = [_run_trial(sys, fp, n, epsilon, s, tols) for s in seqs]

    budget = tols.identity
    checks = []
    for key, check_budget in (
        ("identity-one-step", budget),
        ("identity-difference", budget),
        ("identity-product", budget),
        ("duality", budget),
        ("floquet-factor", budget),
        ("floquet-product", budget),
        ("explicit-solution", budget),
        ("product-deviation", budget),
        ("ln-inv-excess", budget),
    ):
        worst = max(res[key] for res in results)
        checks.append(CheckResult(key, float(worst), check_budget, worst <= check_budget))
    lower_margin = min(res["bound-lower-margin"] for res in results)
    upper_margin = min(res["bound-upper-margin"] for res in results)
    checks.append(
        CheckResult(
            "bound-lower", float(lower_margin), 0.0,
            all(res["bound-lower-ok"] for res in results),
        )
    )
    checks.append(
        CheckResult(
            "bound-upper", float(upper_margin), 0.0,
            all(res["bound-upper-ok"] for res in results),
        )
    )
    checks = tuple(checks)
    first_failure = next((c.name for c in checks if not c.ok), None)

    n_eps = compute_n_epsilon(fp, epsilon, tols=tols)
    report = AnalysisReport(
        dim=r,
        name=name,
        n=n,
        trials=trials,
        seed=seed,
        epsilon=epsilon,
        certificate={
            "ctrl_rank": cert.ctrl_rank,
            "obs_rank": cert.obs_rank,
            "reach_pd_min_eig": cert.reach_pd_min_eig,
            "rho_E": fp.rho_E,
            "rho_Ehat": fp.rho_Ehat,
        },
        fixed_point={
            "Pinf": fp.Pinf.values.tolist(),
            "Phat_inf": fp.Phat_inf.values.tolist(),
            "H": fp.H.values.tolist(),
            "iterations": fp.iterations,
            "residual": fp.residual,
        },
        floquet={
            "n": n,
            "iota": iota_bound(fp, tols),
        },
        bounds={
            "epsilon": epsilon,
            "n_epsilon": n_eps,
            "persists": n_epsilon_persists(fp, epsilon, n_eps, tols=tols),
            "min_lower_margin": float(lower_margin),
            "min_upper_margin": float(upper_margin),
        },
        checks=checks,
        ok=first_failure is None,
        first_failure=first_failure,
        elapsed=time.perf_counter() - t0,
    )
    return report

