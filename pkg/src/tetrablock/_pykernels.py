"""Pure-Python eigen kernels.

Same algorithms and signatures as the compiled ``_kernels`` extension; used
when the extension is not built or when ``TETRABLOCK_PURE_PYTHON=1``.
"""

from __future__ import annotations

import math
import cmath

import numpy as np

from .errors import ConvergenceError

EPS = np.finfo(float).eps


def _givens(a: complex, b: complex) -> tuple[float, complex]:
    # G = [[c, s], [-conj(s), c]] maps (a, b) to (phase(a) r, 0)
    aa = abs(a)
    if b == 0:
        return 1.0, 0j
    if aa == 0.0:
        return 0.0, 1 + 0j
    r = math.hypot(aa, abs(b))
    return aa / r, (a / aa) * b.conjugate() / r


def hessenberg(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Householder reduction ``A = Q H Q^H`` with ``H`` upper Hessenberg."""
    H = np.array(A, dtype=complex, copy=True)
    n = H.shape[0]
    Q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = H[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0 or np.linalg.norm(x[1:]) == 0.0:
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0
        v = x
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        H[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ H[k + 1:, :])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v.conj())
        Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ v, v.conj())
        H[k + 2:, k] = 0.0
    return H, Q


def _wilkinson(a: complex, b: complex, c: complex, d: complex) -> complex:
    half = 0.5 * (a - d)
    disc = cmath.sqrt(half * half + b * c)
    m1 = 0.5 * (a + d) + disc
    m2 = 0.5 * (a + d) - disc
    return m1 if abs(m1 - d) <= abs(m2 - d) else m2


def schur(A: np.ndarray, max_iter_factor: int = 500) -> tuple[np.ndarray, np.ndarray, int]:
    """Complex Schur form by Hessenberg reduction and shifted QR.

    Returns ``(T, Q, iterations)`` with ``A = Q T Q^H``, ``T`` upper
    triangular. Raises :class:`ConvergenceError` after
    ``max_iter_factor * n`` QR sweeps.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if n == 0:
        return A.copy(), np.eye(0, dtype=complex), 0
    H, Q = hessenberg(A)
    scale = max(np.abs(H).max(), np.finfo(float).tiny)
    cap = max_iter_factor * n
    hi = n - 1
    iters = 0
    stale = 0
    while hi > 0:
        l = hi
        while l > 0:
            s = abs(H[l, l - 1])
            ref = abs(H[l - 1, l - 1]) + abs(H[l, l])
            if s <= EPS * ref or s <= EPS * EPS * scale:
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
            raise ConvergenceError(
                f"shifted QR did not converge in {cap} iterations",
                residual=float(abs(H[hi, hi - 1])),
            )
        if stale % 10 == 0:
            mu = H[hi, hi] + 1.5 * abs(H[hi, hi - 1]) * cmath.exp(1j * stale)
        else:
            mu = _wilkinson(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
        for k in range(l, hi + 1):
            H[k, k] -= mu
        rots = []
        for k in range(l, hi):
            c, s = _givens(H[k, k], H[k + 1, k])
            rows = H[k:k + 2, k:].copy()
            H[k, k:] = c * rows[0] + s * rows[1]
            H[k + 1, k:] = -s.conjugate() * rows[0] + c * rows[1]
            H[k + 1, k] = 0.0
            rots.append((c, s))
        for i, (c, s) in enumerate(rots):
            k = l + i
            cols = H[:hi + 1, k:k + 2].copy()
            H[:hi + 1, k] = c * cols[:, 0] + s.conjugate() * cols[:, 1]
            H[:hi + 1, k + 1] = -s * cols[:, 0] + c * cols[:, 1]
            qc = Q[:, k:k + 2].copy()
            Q[:, k] = c * qc[:, 0] + s.conjugate() * qc[:, 1]
            Q[:, k + 1] = -s * qc[:, 0] + c * qc[:, 1]
        for k in range(l, hi + 1):
            H[k, k] += mu
    return np.triu(H), Q, iters


def eigh(A: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic complex Jacobi for Hermitian ``A``; eigenvalues ascending."""
    A = np.array(A, dtype=complex, copy=True)
    A = 0.5 * (A + A.conj().T)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    if n == 0:
        return np.zeros(0), V
    total = np.linalg.norm(A)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= EPS * total or off == 0.0:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                g = abs(apq)
                if g == 0.0:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                tau = (aqq - app) / (2.0 * g)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                e = apq / g
                cp = A[:, p].copy()
                cq = A[:, q].copy()
                A[:, p] = c * cp - s * e.conjugate() * cq
                A[:, q] = s * e * cp + c * cq
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * e * rq
                A[q, :] = s * e.conjugate() * rp + c * rq
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * e.conjugate() * vq
                V[:, q] = s * e * vp + c * vq
    else:
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off > 1e3 * EPS * total:
            raise ConvergenceError("Jacobi sweeps did not converge", residual=float(off))
    w = np.diag(A).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def sweep_max(A: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of ``(e^{it} A + e^{-it} A^H) / 2`` for each angle."""
    A = np.asarray(A, dtype=complex)
    out = np.empty(len(thetas))
    for i, t in enumerate(thetas):
        rot = cmath.exp(1j * t) * A
        w, _ = eigh(0.5 * (rot + rot.conj().T))
        out[i] = w[-1]
    return out
