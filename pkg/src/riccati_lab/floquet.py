"""Factorization of directed products and the uniform bounds built on it.

For horizons n at or above the dimension, the directed product along any
trajectory factors as E^n L_n(P)^{-1} with the affine factor
L_n(P) = I + (P - Pinf)G_n.  The norm of L_n(P)^{-1} is bounded by
iota = ||Phat_inf|| * ||G_r^{-1}|| uniformly in P, which turns the
factorization into explicit solution formulas, Lipschitz constants, and
uniform two-sided bounds on the dual semigroup.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .config import Tolerances, resolve
from .dare import FixedPointPair, limit_gramian, solve_fixed_point
from .errors import (
    BoundViolation,
    InvalidHorizon,
    ScanExhausted,
    SingularFactor,
    SingularL,
)
from .matrices import (
    PsdMatrix,
    _as_pd,
    _as_psd,
    scale_of,
    solve_lu,
    spectral_norm,
    symmetrize,
)
from .riccati import parallel_add, phi_n
from .systems import SystemTriple, dual

__all__ = [
    "FloquetCertificate",
    "DualityReport",
    "LipschitzConstants",
    "UniformBoundReport",
    "iota_bound",
    "l_map",
    "floquet_factorize",
    "duality_report",
    "duality_check",
    "explicit_solution",
    "product_deviation",
    "lipschitz_constants",
    "omega_gramian",
    "compute_n_epsilon",
    "n_epsilon_persists",
    "uniform_bounds",
]

_SCAN_CAP = 1_000_000


def iota_bound(fp: FixedPointPair, tols: Tolerances | None = None) -> float:
    """||Phat_inf|| / lambda_min(G_r): the uniform bound on ||L_n(P)^{-1}||."""
    tols = resolve(tols)
    G_r = limit_gramian(fp, fp.dim, tols)
    lam = G_r.min_eig
    if lam <= tols.pd * scale_of(G_r.values):
        raise SingularFactor(
            f"limit Gramian at n = r has lambda_min = {lam:.3e}; "
            "the uniform bound needs it positive definite"
        )
    return fp.Phat_inf.norm() / lam


def l_map(fp: FixedPointPair, P, n: int, tols: Tolerances | None = None) -> np.ndarray:
    """The affine factor L_n(P) = I + (P - Pinf)G_n."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    P = _as_psd(P, tols)
    G_n = limit_gramian(fp, n, tols)
    return np.eye(fp.dim) + (P.values - fp.Pinf.values) @ G_n.values


@dataclass(frozen=True, eq=False)
class FloquetCertificate:
    """Factorization evidence at one (P, n).

    ``factor_residual`` is ||E_n(P) - E^n Ln^{-1}||, ``product_residual``
    is ||E_n(P) Ln - E^n||; both are absolute spectral norms with ``scale``
    the comparison scale max(1, ||E^n||, ||E_n(P)||*||Ln||).
    """

    n: int
    Ln: np.ndarray
    Ln_inv: np.ndarray
    factor_residual: float
    product_residual: float
    iota: float
    ln_inv_norm: float
    scale: float

    def __post_init__(self):
        self.Ln.setflags(write=False)
        self.Ln_inv.setflags(write=False)


def floquet_factorize(
    fp: FixedPointPair, P, n: int, tols: Tolerances | None = None
) -> FloquetCertificate:
    """Factor the directed product at P over horizon n >= r.

    Inverts L_n(P), compares E^n Ln^{-1} against the directly swept product,
    and attaches the uniform inverse-norm bound.  Horizons below the
    dimension are rejected; a singular L_n at a valid horizon is a defect
    and surfaces as SingularL.
    """
    tols = resolve(tols)
    r = fp.dim
    if n < r:
        raise InvalidHorizon(f"horizon n = {n} below dimension r = {r}")
    P = _as_psd(P, tols)
    Ln = l_map(fp, P, n, tols)
    try:
        Ln_inv = solve_lu(Ln, np.eye(r), context="L_n(P)", tols=tols)
    except SingularFactor as exc:
        raise SingularL(
            f"L_n(P) failed to invert at n = {n} >= r = {r}: {exc}"
        ) from exc

    En_pow = np.linalg.matrix_power(fp.E, n)
    En_direct = phi_n(fp.sys, P, n, keep_path=False, tols=tols).final_Eprod
    factor_residual = spectral_norm(En_direct - En_pow @ Ln_inv)
    product_residual = spectral_norm(En_direct @ Ln - En_pow)
    scale = max(scale_of(En_pow), spectral_norm(En_direct) * spectral_norm(Ln))
    return FloquetCertificate(
        n=n,
        Ln=Ln,
        Ln_inv=Ln_inv,
        factor_residual=factor_residual,
        product_residual=product_residual,
        iota=iota_bound(fp, tols),
        ln_inv_norm=spectral_norm(Ln_inv),
        scale=scale,
    )


@dataclass(frozen=True)
class DualityReport:
    """Residual of the semigroup duality identity at (P, Q, n)."""

    n: int
    residual: float
    scale: float
    lhs_norm: float
    rhs_norm: float


def duality_report(
    sys: SystemTriple, P, Q, n: int, tols: Tolerances | None = None
) -> DualityReport:
    """Evaluate both sides of the duality identity
    H(P, dual-iterate_n(Q)) = E_n(P)' H(iterate_n(P), Q) E_n(P) + G_n(P).

    Both inputs must be positive definite; each side is assembled from its
    own trajectory sweep.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    P = _as_pd(P, tols)
    Q = _as_pd(Q, tols)
    phat_n = phi_n(dual(sys), Q, n, keep_path=False, tols=tols).final_P
    lhs = parallel_add(P, phat_n, tols).values

    traj = phi_n(sys, P, n, keep_path=False, tols=tols)
    mid = parallel_add(traj.final_P, Q, tols).values
    En = traj.final_Eprod
    rhs = En.T @ mid @ En + traj.final_G

    return DualityReport(
        n=n,
        residual=spectral_norm(lhs - rhs),
        scale=scale_of(lhs, rhs),
        lhs_norm=spectral_norm(lhs),
        rhs_norm=spectral_norm(rhs),
    )


def duality_check(sys: SystemTriple, P, Q, n: int, tols: Tolerances | None = None) -> float:
    """Spectral-norm residual of the duality identity (see duality_report)."""
    return duality_report(sys, P, Q, n, tols).residual


def explicit_solution(
    fp: FixedPointPair, P, n: int, tols: Tolerances | None = None
) -> PsdMatrix:
    """Closed-form n-th iterate Pinf + E^n L_n(P)^{-1}(P - Pinf)E'^n."""
    tols = resolve(tols)
    r = fp.dim
    if n < r:
        raise InvalidHorizon(f"horizon n = {n} below dimension r = {r}")
    P = _as_psd(P, tols)
    Ln = l_map(fp, P, n, tols)
    try:
        Ln_inv = solve_lu(Ln, np.eye(r), context="L_n(P)", tols=tols)
    except SingularFactor as exc:
        raise SingularL(
            f"L_n(P) failed to invert at n = {n} >= r = {r}: {exc}"
        ) from exc
    En = np.linalg.matrix_power(fp.E, n)
    M = En @ Ln_inv @ (P.values - fp.Pinf.values) @ En.T
    return PsdMatrix.from_array(symmetrize(fp.Pinf.values + M), tols, clamp=True)


def product_deviation(
    fp: FixedPointPair, P, n: int, tols: Tolerances | None = None
) -> np.ndarray:
    """Deviation of the directed product from the stationary power:
    E_n(P) - E^n = E^n L_n(P)^{-1}(Pinf - P)G_n, evaluated in closed form."""
    tols = resolve(tols)
    r = fp.dim
    if n < r:
        raise InvalidHorizon(f"horizon n = {n} below dimension r = {r}")
    P = _as_psd(P, tols)
    Ln = l_map(fp, P, n, tols)
    try:
        Ln_inv = solve_lu(Ln, np.eye(r), context="L_n(P)", tols=tols)
    except SingularFactor as exc:
        raise SingularL(
            f"L_n(P) failed to invert at n = {n} >= r = {r}: {exc}"
        ) from exc
    En = np.linalg.matrix_power(fp.E, n)
    G_n = limit_gramian(fp, n, tols)
    return En @ Ln_inv @ (fp.Pinf.values - P.values) @ G_n.values


class LipschitzConstants(NamedTuple):
    phi_lip: float
    e_lip: float


def lipschitz_constants(
    fp: FixedPointPair, n: int, tols: Tolerances | None = None
) -> LipschitzConstants:
    """Uniform Lipschitz constants of the n-th iterate and product maps:
    phi_lip = (iota ||E^n||)^2 and e_lip = iota^2 ||E^n|| ||H||."""
    r = fp.dim
    if n < r:
        raise InvalidHorizon(f"horizon n = {n} below dimension r = {r}")
    iota = iota_bound(fp, tols)
    norm_En = spectral_norm(np.linalg.matrix_power(fp.E, n))
    return LipschitzConstants(
        phi_lip=(iota * norm_En) ** 2,
        e_lip=iota**2 * norm_En * fp.H.norm(),
    )


def omega_gramian(
    fp: FixedPointPair, sys: SystemTriple, n: int, tols: Tolerances | None = None
) -> PsdMatrix:
    """The S-weighted power Gramian sum_{k<n} E'^k S E^k (sys supplies S,
    fp supplies the closed-loop E)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    term = np.array(sys.S.values, copy=True)
    acc = term.copy()
    for _ in range(1, n):
        term = fp.E.T @ term @ fp.E
        acc += term
    return PsdMatrix.from_array(symmetrize(acc), tols, clamp=True)


def _dominance_gap(rhs: np.ndarray, En: np.ndarray, Pinf_inv: np.ndarray) -> tuple[float, float]:
    Mn = symmetrize(En.T @ Pinf_inv @ En)
    gap = float(np.linalg.eigvalsh(symmetrize(rhs - Mn))[0])
    return gap, scale_of(rhs, Mn)


def compute_n_epsilon(
    fp: FixedPointPair,
    epsilon: float,
    cap: int = _SCAN_CAP,
    tols: Tolerances | None = None,
) -> int:
    """First n with E'^n Pinf^{-1} E^n <= (1-epsilon) H Phat_inf^{-1} H.

    Linear scan from n = 1 (dominance need not be monotone in n, so no
    bisection); ScanExhausted past the cap.  Dominance is lambda_min of the
    difference >= -psd_tol * scale.
    """
    tols = resolve(tols)
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must be in [0, 1), got {epsilon}")
    r = fp.dim
    eye = np.eye(r)
    Pinf_inv = symmetrize(np.linalg.solve(fp.Pinf.values, eye))
    Phat_inv = symmetrize(np.linalg.solve(fp.Phat_inf.values, eye))
    rhs = (1.0 - epsilon) * symmetrize(fp.H.values @ Phat_inv @ fp.H.values)
    En = np.array(fp.E, copy=True)
    for n in range(1, cap + 1):
        gap, scale = _dominance_gap(rhs, En, Pinf_inv)
        if gap >= -tols.psd * scale:
            return n
        En = fp.E @ En
    raise ScanExhausted(
        f"no dominance horizon found up to n = {cap} for epsilon = {epsilon}"
    )


def n_epsilon_persists(
    fp: FixedPointPair,
    epsilon: float,
    n0: int,
    window: int = 10,
    tols: Tolerances | None = None,
) -> bool:
    """Whether the dominance at n0 also holds for the next ``window`` horizons
    (the scan returns the first hit; persistence is reported separately)."""
    tols = resolve(tols)
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must be in [0, 1), got {epsilon}")
    r = fp.dim
    eye = np.eye(r)
    Pinf_inv = symmetrize(np.linalg.solve(fp.Pinf.values, eye))
    Phat_inv = symmetrize(np.linalg.solve(fp.Phat_inf.values, eye))
    rhs = (1.0 - epsilon) * symmetrize(fp.H.values @ Phat_inv @ fp.H.values)
    En = np.linalg.matrix_power(fp.E, n0)
    for _ in range(n0, n0 + window + 1):
        gap, scale = _dominance_gap(rhs, En, Pinf_inv)
        if gap < -tols.psd * scale:
            return False
        En = fp.E @ En
    return True


@dataclass(frozen=True)
class UniformBoundReport:
    """Two-sided uniform bound check on the dual semigroup at one Q.

    ``lower_ok``: G_r <= dual-iterate_m(Q); ``upper_ok``: dual-iterate_n(Q)
    <= Phat_inf / epsilon at n = max(m, n_epsilon).  Margins are lambda_min
    of the respective differences (upper margin is +inf when epsilon = 0,
    where the bound is vacuous).
    """

    epsilon: float
    n_epsilon: int
    m: int
    n_upper: int
    lower_ok: bool
    upper_ok: bool
    lower_margin: float
    upper_margin: float
    persists: bool


def uniform_bounds(
    sys: SystemTriple,
    Q,
    epsilon: float,
    m: int,
    fp: FixedPointPair | None = None,
    tols: Tolerances | None = None,
) -> UniformBoundReport:
    """Check both uniform bounds at one PSD Q; raise BoundViolation on failure.

    The lower bound uses the primal limit Gramian G_r against the m-step
    dual iterate; the upper bound compares the max(m, n_epsilon)-step dual
    iterate against Phat_inf / epsilon.  PSD (non-PD) Q is evaluated
    directly; the bounds are closed so the comparison stays valid at the
    boundary, with strictness relaxed to the PSD tolerance.
    """
    tols = resolve(tols)
    if fp is None:
        fp = solve_fixed_point(sys, tols=tols)
    r = sys.dim
    if m < r:
        raise InvalidHorizon(f"m = {m} below dimension r = {r}")
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must be in [0, 1), got {epsilon}")
    Q = _as_psd(Q, tols)

    G_r = limit_gramian(fp, r, tols)
    dual_sys = dual(sys)
    phat_m = phi_n(dual_sys, Q, m, keep_path=False, tols=tols).final_P
    lower_diff = symmetrize(phat_m - G_r.values)
    lower_margin = float(np.linalg.eigvalsh(lower_diff)[0])
    lower_ok = lower_margin >= -tols.psd * scale_of(phat_m, G_r.values)

    n_eps = compute_n_epsilon(fp, epsilon, tols=tols)
    n_upper = max(m, n_eps)
    if epsilon == 0.0:
        upper_margin = float("inf")
        upper_ok = True
    else:
        phat_n = phi_n(dual_sys, Q, n_upper, keep_path=False, tols=tols).final_P
        bound = fp.Phat_inf.values / epsilon
        upper_diff = symmetrize(bound - phat_n)
        upper_margin = float(np.linalg.eigvalsh(upper_diff)[0])
        upper_ok = upper_margin >= -tols.psd * scale_of(bound, phat_n)

    report = UniformBoundReport(
        epsilon=epsilon,
        n_epsilon=n_eps,
        m=m,
        n_upper=n_upper,
        lower_ok=lower_ok,
        upper_ok=upper_ok,
        lower_margin=lower_margin,
        upper_margin=upper_margin,
        persists=n_epsilon_persists(fp, epsilon, n_eps, tols=tols),
    )
    if not (lower_ok and upper_ok):
        failing = []
        if not lower_ok:
            failing.append(f"lower (margin {lower_margin:.3e})")
        if not upper_ok:
            failing.append(f"upper (margin {upper_margin:.3e})")
        raise BoundViolation(
            f"uniform bound failed: {', '.join(failing)}", report
        )
    return report
