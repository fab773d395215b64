# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled eigen kernels: complex Schur (Hessenberg + shifted QR), Hermitian
Jacobi, and the rotated-Hermitian-part sweep used by the numerical radius.

Mirrors ``_pykernels`` one-for-one; both are checked against each other in
the test suite.
"""

import numpy as np

from libc.math cimport sqrt, hypot, fabs, cos, sin

from .errors import ConvergenceError

cdef double EPS = 2.220446049250313e-16
cdef double TINY = 2.2250738585072014e-308


cdef inline double cabs_(double complex z) noexcept nogil:
    return hypot(z.real, z.imag)


cdef inline double complex conj_(double complex z) noexcept nogil:
    return z.real - 1j * z.imag


cdef inline double complex csqrt_(double complex z) noexcept nogil:
    cdef double r = cabs_(z)
    cdef double re, im
    if r == 0.0:
        return 0.0
    re = sqrt(0.5 * (r + z.real))
    im = sqrt(0.5 * (r - z.real))
    if z.imag < 0:
        im = -im
    return re + 1j * im


cdef void _hessenberg(double complex[:, ::1] H, double complex[:, ::1] Q,
                      double complex[::1] v) noexcept nogil:
    cdef Py_ssize_t n = H.shape[0]
    cdef Py_ssize_t k, i, j, m
    cdef double alpha, tail, vn
    cdef double complex phase, acc
    for k in range(n - 2):
        m = n - k - 1
        tail = 0.0
        for i in range(k + 2, n):
            tail += H[i, k].real * H[i, k].real + H[i, k].imag * H[i, k].imag
        if tail == 0.0:
            continue
        alpha = sqrt(tail + H[k + 1, k].real * H[k + 1, k].real + H[k + 1, k].imag * H[k + 1, k].imag)
        if H[k + 1, k] != 0:
            phase = H[k + 1, k] / cabs_(H[k + 1, k])
        else:
            phase = 1.0
        for i in range(m):
            v[i] = H[k + 1 + i, k]
        v[0] = v[0] + phase * alpha
        vn = 0.0
        for i in range(m):
            vn += v[i].real * v[i].real + v[i].imag * v[i].imag
        vn = sqrt(vn)
        for i in range(m):
            v[i] = v[i] / vn
        # H[k+1:, :] -= 2 v (v^H H[k+1:, :])
        for j in range(n):
            acc = 0.0
            for i in range(m):
                acc = acc + conj_(v[i]) * H[k + 1 + i, j]
            for i in range(m):
                H[k + 1 + i, j] = H[k + 1 + i, j] - 2.0 * v[i] * acc
        # H[:, k+1:] -= 2 (H[:, k+1:] v) v^H ; same on Q
        for j in range(n):
            acc = 0.0
            for i in range(m):
                acc = acc + H[j, k + 1 + i] * v[i]
            for i in range(m):
                H[j, k + 1 + i] = H[j, k + 1 + i] - 2.0 * acc * conj_(v[i])
            acc = 0.0
            for i in range(m):
                acc = acc + Q[j, k + 1 + i] * v[i]
            for i in range(m):
                Q[j, k + 1 + i] = Q[j, k + 1 + i] - 2.0 * acc * conj_(v[i])
        for i in range(k + 2, n):
            H[i, k] = 0.0


cdef int _qr_iterate(double complex[:, ::1] H, double complex[:, ::1] Q,
                     double[::1] cs, double complex[::1] ss,
                     long cap, long* iters_out, double* resid_out) noexcept nogil:
    cdef Py_ssize_t n = H.shape[0]
    cdef Py_ssize_t hi = n - 1
    cdef Py_ssize_t l, k, j, i
    cdef long iters = 0, stale = 0
    cdef double s_abs, ref, scale = 0.0, aa, r, c
    cdef double complex mu, a, b, cc, d, half, disc, m1, m2, s, x0, x1
    for i in range(n):
        for j in range(n):
            if cabs_(H[i, j]) > scale:
                scale = cabs_(H[i, j])
    if scale == 0.0:
        scale = TINY
    while hi > 0:
        l = hi
        while l > 0:
            s_abs = cabs_(H[l, l - 1])
            ref = cabs_(H[l - 1, l - 1]) + cabs_(H[l, l])
            if s_abs <= EPS * ref or s_abs <= EPS * EPS * scale:
                H[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            hi -= 1
            stale = 0
            continue
        iters += 1
        stale += 1
        if iters > cap:
            iters_out[0] = iters
            resid_out[0] = cabs_(H[hi, hi - 1])
            return 1
        if stale % 10 == 0:
            mu = H[hi, hi] + 1.5 * cabs_(H[hi, hi - 1]) * (cos(<double>stale) + 1j * sin(<double>stale))
        else:
            a = H[hi - 1, hi - 1]
            b = H[hi - 1, hi]
            cc = H[hi, hi - 1]
            d = H[hi, hi]
            half = 0.5 * (a - d)
            disc = csqrt_(half * half + b * cc)
            m1 = 0.5 * (a + d) + disc
            m2 = 0.5 * (a + d) - disc
            mu = m1 if cabs_(m1 - d) <= cabs_(m2 - d) else m2
        for k in range(l, hi + 1):
            H[k, k] = H[k, k] - mu
        for k in range(l, hi):
            a = H[k, k]
            b = H[k + 1, k]
            aa = cabs_(a)
            if b == 0:
                c = 1.0
                s = 0.0
            elif aa == 0.0:
                c = 0.0
                s = 1.0
            else:
                r = hypot(aa, cabs_(b))
                c = aa / r
                s = (a / aa) * conj_(b) / r
            cs[k] = c
            ss[k] = s
            for j in range(k, n):
                x0 = H[k, j]
                x1 = H[k + 1, j]
                H[k, j] = c * x0 + s * x1
                H[k + 1, j] = -conj_(s) * x0 + c * x1
            H[k + 1, k] = 0.0
        for k in range(l, hi):
            c = cs[k]
            s = ss[k]
            for i in range(hi + 1):
                x0 = H[i, k]
                x1 = H[i, k + 1]
                H[i, k] = c * x0 + conj_(s) * x1
                H[i, k + 1] = -s * x0 + c * x1
            for i in range(n):
                x0 = Q[i, k]
                x1 = Q[i, k + 1]
                Q[i, k] = c * x0 + conj_(s) * x1
                Q[i, k + 1] = -s * x0 + c * x1
        for k in range(l, hi + 1):
            H[k, k] = H[k, k] + mu
    iters_out[0] = iters
    resid_out[0] = 0.0
    return 0


def hessenberg(A):
    H = np.array(A, dtype=np.complex128, order="C", copy=True)
    n = H.shape[0]
    Q = np.eye(n, dtype=np.complex128)
    v = np.empty(max(n, 1), dtype=np.complex128)
    cdef double complex[:, ::1] Hv = H
    cdef double complex[:, ::1] Qv = Q
    cdef double complex[::1] vv = v
    with nogil:
        _hessenberg(Hv, Qv, vv)
    return H, Q


def schur(A, int max_iter_factor=500):
    """Complex Schur form ``A = Q T Q^H``; returns ``(T, Q, iterations)``."""
    H = np.array(A, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t n = H.shape[0]
    if n == 0:
        return H, np.eye(0, dtype=np.complex128), 0
    Q = np.eye(n, dtype=np.complex128)
    v = np.empty(n, dtype=np.complex128)
    cs = np.empty(n, dtype=np.float64)
    ss = np.empty(n, dtype=np.complex128)
    cdef double complex[:, ::1] Hv = H
    cdef double complex[:, ::1] Qv = Q
    cdef double complex[::1] vv = v
    cdef double[::1] csv = cs
    cdef double complex[::1] ssv = ss
    cdef long cap = max_iter_factor * n
    cdef long iters = 0
    cdef double resid = 0.0
    cdef int status
    with nogil:
        _hessenberg(Hv, Qv, vv)
        status = _qr_iterate(Hv, Qv, csv, ssv, cap, &iters, &resid)
    if status != 0:
        raise ConvergenceError(
            f"shifted QR did not converge in {cap} iterations", residual=resid)
    return np.triu(H), Q, int(iters)


cdef int _jacobi(double complex[:, ::1] A, double complex[:, ::1] V,
                 int max_sweeps, double* off_out) noexcept nogil:
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double total = 0.0, off, g, app, aqq, tau, t, c, s
    cdef double complex e, x0, x1
    for p in range(n):
        for q in range(n):
            total += A[p, q].real * A[p, q].real + A[p, q].imag * A[p, q].imag
    total = sqrt(total)
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += A[p, q].real * A[p, q].real + A[p, q].imag * A[p, q].imag
        off = sqrt(off)
        if off <= EPS * total or off == 0.0:
            off_out[0] = off
            return 0
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = cabs_(A[p, q])
                if g == 0.0:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                tau = (aqq - app) / (2.0 * g)
                if tau >= 0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                e = A[p, q] / g
                for k in range(n):
                    x0 = A[k, p]
                    x1 = A[k, q]
                    A[k, p] = c * x0 - s * conj_(e) * x1
                    A[k, q] = s * e * x0 + c * x1
                for k in range(n):
                    x0 = A[p, k]
                    x1 = A[q, k]
                    A[p, k] = c * x0 - s * e * x1
                    A[q, k] = s * conj_(e) * x0 + c * x1
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                for k in range(n):
                    x0 = V[k, p]
                    x1 = V[k, q]
                    V[k, p] = c * x0 - s * conj_(e) * x1
                    V[k, q] = s * e * x0 + c * x1
    off_out[0] = off
    if off > 1e3 * EPS * total:
        return 1
    return 0


def eigh(A, int max_sweeps=100):
    """Cyclic complex Jacobi for Hermitian ``A``; eigenvalues ascending."""
    M = np.array(A, dtype=np.complex128, copy=True)
    M = np.ascontiguousarray(0.5 * (M + M.conj().T))
    cdef Py_ssize_t n = M.shape[0]
    V = np.eye(n, dtype=np.complex128)
    if n == 0:
        return np.zeros(0), V
    cdef double complex[:, ::1] Mv = M
    cdef double complex[:, ::1] Vv = V
    cdef double off = 0.0
    cdef int status
    with nogil:
        status = _jacobi(Mv, Vv, max_sweeps, &off)
    if status != 0:
        raise ConvergenceError("Jacobi sweeps did not converge", residual=off)
    w = np.diag(M).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def sweep_max(A, thetas):
    """Largest eigenvalue of ``(e^{it} A + e^{-it} A^H) / 2`` for each angle."""
    A = np.ascontiguousarray(A, dtype=np.complex128)
    th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t m = th.shape[0]
    out = np.empty(m, dtype=np.float64)
    if n == 0:
        out[:] = 0.0
        return out
    H = np.empty((n, n), dtype=np.complex128)
    V = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] Av = A
    cdef double complex[:, ::1] Hv = H
    cdef double complex[:, ::1] Vv = V
    cdef double[::1] thv = th
    cdef double[::1] ov = out
    cdef Py_ssize_t t, i, j
    cdef double complex rot
    cdef double best, off = 0.0
    cdef int status = 0
    with nogil:
        for t in range(m):
            rot = cos(thv[t]) + 1j * sin(thv[t])
            for i in range(n):
                for j in range(n):
                    Hv[i, j] = 0.5 * (rot * Av[i, j] + conj_(rot * Av[j, i]))
                    Vv[i, j] = 1.0 if i == j else 0.0
            status = _jacobi(Hv, Vv, 100, &off)
            if status != 0:
                break
            best = Hv[0, 0].real
            for i in range(1, n):
                if Hv[i, i].real > best:
                    best = Hv[i, i].real
            ov[t] = best
    if status != 0:
        raise ConvergenceError("Jacobi sweeps did not converge", residual=off)
    return out
