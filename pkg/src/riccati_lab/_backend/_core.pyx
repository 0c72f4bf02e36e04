# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: BLAS/LAPACK twins of the numpy backend.

Same functions, same gating decisions, same return shapes as ``_python``;
the win is the fixed-point loop, which runs with no per-iteration Python
overhead.  All work buffers are Fortran-order; results are returned
C-contiguous to match the numpy backend.
"""

from libc.math cimport sqrt
from libc.string cimport memcpy, memset

import numpy as np

from scipy.linalg.cython_blas cimport dgemm
from scipy.linalg.cython_lapack cimport dgesv, dsyev

cdef double ONE = 1.0
cdef double ZERO = 0.0
cdef char TRANS_N = b'N'
cdef char TRANS_T = b'T'
cdef char JOBZ_N = b'N'
cdef char UPLO_L = b'L'


cdef inline void _identity(double* T, int r) noexcept nogil:
    memset(T, 0, r * r * sizeof(double))
    cdef int i
    for i in range(r):
        T[i + i * r] = 1.0


cdef inline void _sym_inplace(double* M, int r) noexcept nogil:
    cdef int i, j
    cdef double v
    for j in range(r):
        for i in range(j):
            v = 0.5 * (M[i + j * r] + M[j + i * r])
            M[i + j * r] = v
            M[j + i * r] = v


cdef inline double _fro(double* M, int nn) noexcept nogil:
    cdef double s = 0.0
    cdef int i
    for i in range(nn):
        s += M[i] * M[i]
    return sqrt(s)


cdef double _spec_sym(double* M, int r, double* scratch, double* w,
                      double* work, int lwork) noexcept nogil:
    # spectral norm of a symmetric matrix; scratch is clobbered
    cdef int info = 0
    memcpy(scratch, M, r * r * sizeof(double))
    dsyev(&JOBZ_N, &UPLO_L, &r, scratch, &r, w, work, &lwork, &info)
    cdef double lo = -w[0]
    cdef double hi = w[r - 1]
    return lo if lo > hi else hi


cdef int _step(int r, double* Af, double* Rf, double* Sf, double* P,
               double* T, double* X, int* ipiv, double* E, double* F,
               double* W, double* P_next) noexcept nogil:
    """One map step; returns the dgesv info (0 on success)."""
    cdef int i, j, info = 0
    cdef int nrhs = 2 * r
    # T = I + S P   ((I+PS)' in Fortran storage)
    _identity(T, r)
    dgemm(&TRANS_N, &TRANS_N, &r, &r, &r, &ONE, Sf, &r, P, &r, &ONE, T, &r)
    # X = [A' | S], solved in place: X1 = T^{-1}A' = E', X2 = T^{-1}S = F'
    for j in range(r):
        for i in range(r):
            X[i + j * r] = Af[j + i * r]
            X[i + (r + j) * r] = Sf[i + j * r]
    dgesv(&r, &nrhs, T, &r, ipiv, X, &r, &info)
    if info != 0:
        return info
    for j in range(r):
        for i in range(r):
            E[i + j * r] = X[j + i * r]
            F[i + j * r] = 0.5 * (X[i + (r + j) * r] + X[j + (r + i) * r])
    # P_next = E P A' + R
    dgemm(&TRANS_N, &TRANS_N, &r, &r, &r, &ONE, E, &r, P, &r, &ZERO, W, &r)
    memcpy(P_next, Rf, r * r * sizeof(double))
    dgemm(&TRANS_N, &TRANS_T, &r, &r, &r, &ONE, W, &r, Af, &r, &ONE, P_next, &r)
    _sym_inplace(P_next, r)
    return 0


cdef class _Work:
    """Per-call workspace: Fortran-order buffers plus dsyev scratch."""

    cdef double[::1, :] Af, Rf, Sf, P_next, T, E, F, W, W2, scratch
    cdef double[::1, :] X
    cdef int[::1] ipiv
    cdef double[::1] w, lapack_work
    cdef int r, lwork

    def __cinit__(self, A, R, S, int r):
        self.r = r
        self.Af = np.array(A, dtype=np.float64, order='F', copy=True)
        self.Rf = np.array(R, dtype=np.float64, order='F', copy=True)
        self.Sf = np.array(S, dtype=np.float64, order='F', copy=True)
        self.P_next = np.zeros((r, r), order='F')
        self.T = np.zeros((r, r), order='F')
        self.E = np.zeros((r, r), order='F')
        self.F = np.zeros((r, r), order='F')
        self.W = np.zeros((r, r), order='F')
        self.W2 = np.zeros((r, r), order='F')
        self.scratch = np.zeros((r, r), order='F')
        self.X = np.zeros((r, 2 * r), order='F')
        self.ipiv = np.zeros(r, dtype=np.intc)
        self.w = np.zeros(r)
        # dsyev workspace query; floor is the documented max(1, 3r-1)
        cdef int info = 0, lm1 = -1
        cdef double wkopt = 0.0
        dsyev(&JOBZ_N, &UPLO_L, &r, &self.scratch[0, 0], &r, &self.w[0],
              &wkopt, &lm1, &info)
        self.lwork = max(int(wkopt), 3 * r - 1, 1)
        self.lapack_work = np.zeros(self.lwork)


cdef object _fail(int info):
    return np.linalg.LinAlgError(
        f"(I+PS) solve failed (dgesv info {info})")


def riccati_step(A, R, S, P):
    """One step of the map: returns (P_next, E_val, F_val) where
    E_val = A(I+PS)^{-1}, F_val = S(I+PS)^{-1}, P_next = E_val P A' + R."""
    cdef int r = A.shape[0]
    cdef _Work wk = _Work(A, R, S, r)
    cdef double[::1, :] Pv = np.array(P, dtype=np.float64, order='F', copy=True)
    cdef int info
    with nogil:
        info = _step(r, &wk.Af[0, 0], &wk.Rf[0, 0], &wk.Sf[0, 0], &Pv[0, 0],
                     &wk.T[0, 0], &wk.X[0, 0], &wk.ipiv[0], &wk.E[0, 0],
                     &wk.F[0, 0], &wk.W[0, 0], &wk.P_next[0, 0])
    if info != 0:
        raise _fail(info)
    return (
        np.ascontiguousarray(wk.P_next),
        np.ascontiguousarray(wk.E),
        np.ascontiguousarray(wk.F),
    )


def riccati_sweep(A, R, S, P0, int n):
    """Iterates, directed products and Gramians along a whole trajectory;
    returns (P_arr, E_arr, G_arr), each of shape (n+1, r, r)."""
    cdef int r = A.shape[0]
    cdef _Work wk = _Work(A, R, S, r)
    P_arr = np.empty((n + 1, r, r))
    E_arr = np.empty((n + 1, r, r))
    G_arr = np.empty((n + 1, r, r))
    Eprod = np.asfortranarray(np.eye(r))
    G = np.zeros((r, r), order='F')
    P_cur = np.array(P0, dtype=np.float64, order='F', copy=True)
    cdef double[::1, :] Ep = Eprod
    cdef double[::1, :] Gv = G
    cdef double[::1, :] Pv = P_cur
    P_arr[0] = P0
    E_arr[0] = Eprod
    G_arr[0] = 0.0
    cdef int k, info
    for k in range(n):
        with nogil:
            info = _step(r, &wk.Af[0, 0], &wk.Rf[0, 0], &wk.Sf[0, 0],
                         &Pv[0, 0], &wk.T[0, 0], &wk.X[0, 0], &wk.ipiv[0],
                         &wk.E[0, 0], &wk.F[0, 0], &wk.W[0, 0],
                         &wk.P_next[0, 0])
            if info == 0:
                # G += Eprod' F Eprod with the pre-step product
                dgemm(&TRANS_N, &TRANS_N, &r, &r, &r, &ONE, &wk.F[0, 0], &r,
                      &Ep[0, 0], &r, &ZERO, &wk.W2[0, 0], &r)
                dgemm(&TRANS_T, &TRANS_N, &r, &r, &r, &ONE, &Ep[0, 0], &r,
                      &wk.W2[0, 0], &r, &ONE, &Gv[0, 0], &r)
                _sym_inplace(&Gv[0, 0], r)
                # Eprod = E Eprod
                dgemm(&TRANS_N, &TRANS_N, &r, &r, &r, &ONE, &wk.E[0, 0], &r,
                      &Ep[0, 0], &r, &ZERO, &wk.W[0, 0], &r)
                memcpy(&Ep[0, 0], &wk.W[0, 0], r * r * sizeof(double))
                memcpy(&Pv[0, 0], &wk.P_next[0, 0], r * r * sizeof(double))
        if info != 0:
            raise _fail(info)
        P_arr[k + 1] = P_cur
        E_arr[k + 1] = Eprod
        G_arr[k + 1] = G
    return P_arr, E_arr, G_arr


def riccati_final(A, R, S, P0, int n):
    """Same recursion as riccati_sweep but O(1) memory: returns the final
    triple (P_n, E_prod, G_n) only."""
    cdef int r = A.shape[0]
    cdef _Work wk = _Work(A, R, S, r)
    Eprod = np.asfortranarray(np.eye(r))
    G = np.zeros((r, r), order='F')
    P_cur = np.array(P0, dtype=np.float64, order='F', copy=True)
    cdef double[::1, :] Ep = Eprod
    cdef double[::1, :] Gv = G
    cdef double[::1, :] Pv = P_cur
    cdef int k, info = 0
    with nogil:
        for k in range(n):
            info = _step(r, &wk.Af[0, 0], &wk.Rf[0, 0], &wk.Sf[0, 0],
                         &Pv[0, 0], &wk.T[0, 0], &wk.X[0, 0], &wk.ipiv[0],
                         &wk.E[0, 0], &wk.F[0, 0], &wk.W[0, 0],
                         &wk.P_next[0, 0])
            if info != 0:
                break
            dgemm(&TRANS_N, &TRANS_N, &r, &r, &r, &ONE, &wk.F[0, 0], &r,
                  &Ep[0, 0], &r, &ZERO, &wk.W2[0, 0], &r)
            dgemm(&TRANS_T, &TRANS_N, &r, &r, &r, &ONE, &Ep[0, 0], &r,
                  &wk.W2[0, 0], &r, &ONE, &Gv[0, 0], &r)
            _sym_inplace(&Gv[0, 0], r)
            dgemm(&TRANS_N, &TRANS_N, &r, &r, &r, &ONE, &wk.E[0, 0], &r,
                  &Ep[0, 0], &r, &ZERO, &wk.W[0, 0], &r)
            memcpy(&Ep[0, 0], &wk.W[0, 0], r * r * sizeof(double))
            memcpy(&Pv[0, 0], &wk.P_next[0, 0], r * r * sizeof(double))
    if info != 0:
        raise _fail(info)
    return (
        np.ascontiguousarray(P_cur),
        np.ascontiguousarray(Eprod),
        np.ascontiguousarray(G),
    )


def fixed_point(A, R, S, P0, double rel_tol, int max_iter):
    """Iterate until the step shrinks below rel_tol in spectral norm.

    Stop rule and Frobenius gating identical to the numpy twin: the
    eigenvalue decision only runs when the Frobenius bounds cannot settle
    the test.  Returns (P, iters, last_diff); iters == max_iter means no
    convergence and the caller decides what to do about it.
    """
    cdef int r = A.shape[0]
    cdef _Work wk = _Work(A, R, S, r)
    cdef int nn = r * r
    cdef double sqrt_r = sqrt(<double> r)
    P_buf = np.array(P0, dtype=np.float64, order='F', copy=True)
    D_buf = np.zeros((r, r), order='F')
    cdef double[::1, :] Pv = P_buf
    cdef double[::1, :] Dv = D_buf
    cdef double* pcur = &Pv[0, 0]
    cdef double* pnext = &wk.P_next[0, 0]
    cdef double* dptr = &Dv[0, 0]
    cdef double* tmp
    cdef double fro_d, fro_p, d2, last_diff = 0.0
    cdef int it = 0, i, j, info = 0, converged = 0
    with nogil:
        for it in range(1, max_iter + 1):
            info = _step(r, &wk.Af[0, 0], &wk.Rf[0, 0], &wk.Sf[0, 0], pcur,
                         &wk.T[0, 0], &wk.X[0, 0], &wk.ipiv[0], &wk.E[0, 0],
                         &wk.F[0, 0], &wk.W[0, 0], pnext)
            if info != 0:
                break
            for i in range(nn):
                dptr[i] = pnext[i] - pcur[i]
            fro_d = _fro(dptr, nn)
            fro_p = _fro(pnext, nn)
            if fro_d <= rel_tol * max(1.0, fro_p / sqrt_r):
                last_diff = _spec_sym(dptr, r, &wk.scratch[0, 0], &wk.w[0],
                                      &wk.lapack_work[0], wk.lwork)
                tmp = pcur; pcur = pnext; pnext = tmp
                converged = 1
                break
            if fro_d <= sqrt_r * rel_tol * max(1.0, fro_p):
                d2 = _spec_sym(dptr, r, &wk.scratch[0, 0], &wk.w[0],
                               &wk.lapack_work[0], wk.lwork)
                if d2 <= rel_tol * max(1.0, _spec_sym(
                        pnext, r, &wk.scratch[0, 0], &wk.w[0],
                        &wk.lapack_work[0], wk.lwork)):
                    last_diff = d2
                    tmp = pcur; pcur = pnext; pnext = tmp
                    converged = 1
                    break
            tmp = pcur; pcur = pnext; pnext = tmp
        if converged == 0 and info == 0:
            it = max_iter
            last_diff = _spec_sym(dptr, r, &wk.scratch[0, 0], &wk.w[0],
                                  &wk.lapack_work[0], wk.lwork)
    if info != 0:
        raise _fail(info)
    # pcur points at the iterate to return; it lives in one of two buffers
    out = np.empty((r, r))
    cdef double[:, ::1] ov = out
    for j in range(r):
        for i in range(r):
            ov[i, j] = pcur[i + j * r]
    return out, it, last_diff


def lyapunov_series(E, F, double abs_tol, int max_terms,
                    int divergence_window):
    """Sum of E'^k F E^k until the term drops below abs_tol (Frobenius).

    Returns (H, terms, status, last_term_norm) with status 0 converged,
    1 term budget exhausted, 2 divergence detected; identical counting
    and norms to the numpy twin.
    """
    cdef int r = E.shape[0]
    cdef int nn = r * r
    Ef = np.array(E, dtype=np.float64, order='F', copy=True)
    term_np = np.array(F, dtype=np.float64, order='F', copy=True)
    H_np = term_np.copy(order='F')
    W_np = np.zeros((r, r), order='F')
    cdef double[::1, :] Ev = Ef
    cdef double[::1, :] term = term_np
    cdef double[::1, :] H = H_np
    cdef double[::1, :] W = W_np
    cdef double* tp = &term[0, 0]
    cdef double* hp = &H[0, 0]
    cdef double* wp = &W[0, 0]
    cdef double* ep = &Ev[0, 0]
    cdef double prev = _fro(tp, nn)
    cdef double t = prev
    cdef int k, i, climbs = 0, status = 1, terms = max_terms
    if prev <= abs_tol:
        return np.ascontiguousarray(H_np), 1, 0, prev
    with nogil:
        for k in range(1, max_terms):
            dgemm(&TRANS_N, &TRANS_N, &r, &r, &r, &ONE, tp, &r, ep, &r,
                  &ZERO, wp, &r)
            dgemm(&TRANS_T, &TRANS_N, &r, &r, &r, &ONE, ep, &r, wp, &r,
                  &ZERO, tp, &r)
            _sym_inplace(tp, r)
            for i in range(nn):
                hp[i] += tp[i]
            t = _fro(tp, nn)
            if t <= abs_tol:
                _sym_inplace(hp, r)
                status = 0
                terms = k + 1
                break
            if t > prev:
                climbs += 1
                if climbs >= divergence_window:
                    status = 2
                    terms = k + 1
                    break
            else:
                climbs = 0
            prev = t
        if status == 1:
            _sym_inplace(hp, r)
    return np.ascontiguousarray(H_np), terms, status, t
