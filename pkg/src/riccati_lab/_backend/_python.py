"""Pure numpy kernels: the fallback backend.

Every function here has a compiled twin in ``_core``; the two must make the
same decisions (same norms, same gates) so that switching backends never
changes results beyond rounding.  Inputs are plain float64 arrays, already
validated by the caller; outputs are plain arrays.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "riccati_step",
    "riccati_sweep",
    "riccati_final",
    "fixed_point",
    "lyapunov_series",
]


def _spec_sym(M: np.ndarray) -> float:
    # spectral norm of a symmetric matrix
    w = np.linalg.eigvalsh(M)
    return float(max(-w[0], w[-1]))


def riccati_step(A, R, S, P):
    """One step of the map: returns (P_next, E_val, F_val) where
    E_val = A(I+PS)^{-1}, F_val = S(I+PS)^{-1}, P_next = E_val P A' + R."""
    r = A.shape[0]
    T = np.eye(r) + S @ P          # (I+PS)' = I+SP
    X = np.linalg.solve(T, np.hstack([A.T, S]))
    E_val = X[:, :r].T             # (T^{-1} A')' = A (I+PS)^{-1}
    F_val = X[:, r:]               # T^{-1} S = (S (I+PS)^{-1})'
    F_val = 0.5 * (F_val + F_val.T)
    P_next = E_val @ P @ A.T + R
    P_next = 0.5 * (P_next + P_next.T)
    return P_next, E_val, F_val


def riccati_sweep(A, R, S, P0, n):
    """Iterates, directed products and Gramians along a whole trajectory.

    Returns (P_arr, E_arr, G_arr), each of shape (n+1, r, r):
    P_arr[k] is the k-th iterate, E_arr[k] the product of step maps
    evaluated along the path (E_arr[0] = I), and G_arr[k] the k-step
    Gramian accumulated forward (G_arr[0] = 0).
    """
    r = A.shape[0]
    P_arr = np.empty((n + 1, r, r))
    E_arr = np.empty((n + 1, r, r))
    G_arr = np.empty((n + 1, r, r))
    P_arr[0] = P0
    E_arr[0] = np.eye(r)
    G_arr[0] = 0.0
    for k in range(n):
        P_next, E_val, F_val = riccati_step(A, R, S, P_arr[k])
        P_arr[k + 1] = P_next
        E_arr[k + 1] = E_val @ E_arr[k]
        Gk = G_arr[k] + E_arr[k].T @ F_val @ E_arr[k]
        G_arr[k + 1] = 0.5 * (Gk + Gk.T)
    return P_arr, E_arr, G_arr


def riccati_final(A, R, S, P0, n):
    """Same recursion as riccati_sweep but O(1) memory: returns the final
    triple (P_n, E_prod, G_n) only."""
    r = A.shape[0]
    P = np.array(P0, copy=True)
    E_prod = np.eye(r)
    G = np.zeros((r, r))
    for _ in range(n):
        P_next, E_val, F_val = riccati_step(A, R, S, P)
        G = G + E_prod.T @ F_val @ E_prod
        G = 0.5 * (G + G.T)
        E_prod = E_val @ E_prod
        P = P_next
    return P, E_prod, G


def fixed_point(A, R, S, P0, rel_tol, max_iter):
    """Iterate until the step shrinks below rel_tol in spectral norm.

    Stop rule: ||P_{k+1} - P_k|| <= rel_tol * max(1, ||P_{k+1}||), spectral
    norms.  Frobenius bounds gate the expensive eigen decisions: with
    ||M||_2 <= ||M||_F <= sqrt(r) ||M||_2 the rule is settled without any
    eigenvalue work unless the Frobenius test lands between the two bounds.

    Returns (P, iters, last_diff); iters == max_iter means no convergence
    and the caller decides what to do about it.
    """
    sqrt_r = float(np.sqrt(A.shape[0]))
    P = np.array(P0, copy=True)
    D = np.zeros_like(P)
    for it in range(1, max_iter + 1):
        P_next, _, _ = riccati_step(A, R, S, P)
        D = P_next - P
        fro_d = float(np.linalg.norm(D))
        fro_p = float(np.linalg.norm(P_next))
        if fro_d <= rel_tol * max(1.0, fro_p / sqrt_r):
            return P_next, it, _spec_sym(D)
        if fro_d <= sqrt_r * rel_tol * max(1.0, fro_p):
            d2 = _spec_sym(D)
            if d2 <= rel_tol * max(1.0, _spec_sym(P_next)):
                return P_next, it, d2
        P = P_next
    return P, max_iter, _spec_sym(D)


def lyapunov_series(E, F, abs_tol, max_terms, divergence_window):
    """Sum of E'^k F E^k until the term drops below abs_tol (Frobenius).

    Returns (H, terms, status, last_term_norm) with status 0 converged,
    1 term budget exhausted, 2 divergence detected (term norm grew
    divergence_window times in a row).
    """
    H = np.array(F, copy=True)
    term = np.array(F, copy=True)
    prev = float(np.linalg.norm(term))
    if prev <= abs_tol:
        return H, 1, 0, prev
    climbs = 0
    t = prev
    for k in range(1, max_terms):
        term = E.T @ term @ E
        term = 0.5 * (term + term.T)
        H = H + term
        t = float(np.linalg.norm(term))
        if t <= abs_tol:
            return 0.5 * (H + H.T), k + 1, 0, t
        if t > prev:
            climbs += 1
            if climbs >= divergence_window:
                return H, k + 1, 2, t
        else:
            climbs = 0
        prev = t
    return 0.5 * (H + H.T), max_terms, 1, t
