"""Dense complex linear algebra for small operators.

All matrices are ``numpy`` arrays of dtype ``complex128``. The eigen kernels
(complex Schur via Hessenberg + shifted QR, Hermitian Jacobi, and the
rotated-Hermitian sweep) come from the compiled ``_kernels`` extension when
it is importable and from ``_pykernels`` otherwise; set
``TETRABLOCK_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotPSDError, UnsolvableError

if os.environ.get("TETRABLOCK_PURE_PYTHON"):
    from . import _pykernels as _k
else:
    try:
        from . import _kernels as _k
    except ImportError:  # extension not built
        from . import _pykernels as _k

BACKEND = "compiled" if _k.__name__.endswith("._kernels") else "python"

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Tolerance:
    """Absolute plus norm-relative tolerance: ``abs + rel * norm``."""

    abs: float = 1e-10
    rel: float = 1e-12

    def __post_init__(self):
        if self.abs < 0 or self.rel < 0:
            raise ValueError("tolerances must be nonnegative")

    def bound(self, norm: float = 0.0) -> float:
        return self.abs + self.rel * norm


DEFAULT_TOL = Tolerance()


def as_matrix(A, square: bool = True) -> np.ndarray:
    M = np.asarray(A, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def adjoint(A: np.ndarray) -> np.ndarray:
    return np.asarray(A).conj().T


def commutator(A, B) -> np.ndarray:
    """Return ``AB - BA``."""
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape != B.shape:
        raise DimensionError(f"commutator of {A.shape} and {B.shape}")
    return A @ B - B @ A


def schur(A, max_iter_factor: int = 500) -> tuple[np.ndarray, np.ndarray]:
    """Complex Schur decomposition ``A = Q T Q^H``.

    The first column of ``Q`` is a unit eigenvector for ``T[0, 0]``.
    Raises :class:`~tetrablock.errors.ConvergenceError` (carrying the
    unconverged subdiagonal) after ``max_iter_factor * n`` QR sweeps.
    """
    T, Q, _ = _k.schur(as_matrix(A), max_iter_factor)
    return T, Q


def eigenvalues(A, max_iter_factor: int = 500) -> np.ndarray:
    """Eigenvalues with algebraic multiplicity (diagonal of the Schur form)."""
    T, _ = schur(A, max_iter_factor)
    return np.diag(T).copy()


def eigh(A) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending."""
    return _k.eigh(as_matrix(A))


def spectral_radius(A) -> float:
    ev = eigenvalues(A)
    return float(np.abs(ev).max()) if ev.size else 0.0


def operator_norm(A) -> float:
    """Largest singular value, ``sqrt(lambda_max(A^H A))``."""
    A = as_matrix(A, square=False)
    if A.size == 0:
        return 0.0
    G = A.conj().T @ A if A.shape[0] >= A.shape[1] else A @ A.conj().T
    w, _ = _k.eigh(G)
    return math.sqrt(max(float(w[-1]), 0.0))


def hermitian_sweep(A, thetas) -> np.ndarray:
    """``lambda_max((e^{it}A + e^{-it}A^H)/2)`` for every angle ``t``."""
    return _k.sweep_max(as_matrix(A), np.asarray(thetas, dtype=float))


def golden_max(f, a: float, b: float, iters: int = 48) -> tuple[float, float]:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def numerical_radius(A, grid: int = 512, refine: int = 3, with_bound: bool = False):
    """Numerical radius ``sup |<Ax, x>|`` over unit vectors.

    Uses ``w(A) = max_t lambda_max((e^{it}A + e^{-it}A^H)/2)``: the sweep is
    sampled on ``grid`` equispaced angles, then the ``refine`` best local
    maxima are polished by golden-section search. The returned value is at
    least the grid maximum and at most the true radius (up to roundoff).

    The sweep function is Lipschitz with constant ``||A||``, so the true
    radius exceeds the grid maximum by at most ``||A|| * pi / grid``; with
    ``with_bound=True`` the pair ``(value, value + that bound)`` is returned.
    """
    A = as_matrix(A)
    if A.shape[0] == 0:
        return (0.0, 0.0) if with_bound else 0.0
    thetas = 2.0 * np.pi * np.arange(grid) / grid
    vals = hermitian_sweep(A, thetas)
    best = float(vals.max())
    if refine:
        step = 2.0 * np.pi / grid
        is_peak = (vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1))
        peaks = np.flatnonzero(is_peak)
        peaks = peaks[np.argsort(vals[peaks])[::-1][:refine]]

        def f(t):
            return float(_k.sweep_max(A, np.array([t]))[0])

        for i in peaks:
            _, v = golden_max(f, thetas[i] - step, thetas[i] + step)
            best = max(best, v)
    if with_bound:
        return best, best + operator_norm(A) * np.pi / grid
    return best


def sqrt_psd(A, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Positive square root of a Hermitian positive semidefinite matrix.

    Eigenvalues within ``tol`` of zero (either sign) are set to zero, so the
    rank of the result reflects the tolerance, not roundoff.
    """
    A = as_matrix(A)
    if A.shape[0] == 0:
        return A.copy()
    scale = operator_norm(A)
    bound = tol.bound(scale)
    herm_err = operator_norm(A - A.conj().T)
    if herm_err > bound:
        raise NotPSDError(f"matrix is not Hermitian (defect {herm_err:.3e})", float("nan"))
    w, V = eigh(A)
    if w[0] < -bound:
        raise NotPSDError(f"not PSD: eigenvalue {w[0]:.3e} < -{bound:.1e}", float(w[0]))
    root = np.where(w > bound, np.sqrt(np.clip(w, 0.0, None)), 0.0)
    S = (V * root) @ V.conj().T
    return 0.5 * (S + S.conj().T)


def range_projector_parts(D, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of Hermitian PSD ``D`` above the pseudo-inverse cutoff.

    Returns ``(values, vectors)`` ordered by decreasing value; the cutoff is
    ``tol.abs + tol.rel * sigma_max``.
    """
    D = as_matrix(D)
    if D.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    w, V = eigh(D)
    w = w[::-1]
    V = V[:, ::-1]
    smax = max(float(w[0]), 0.0)
    keep = w > tol.bound(smax)
    return w[keep], V[:, keep]


def range_restricted_solve(D, R, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Solve ``D X D = R`` with ``X`` supported on ``ran(D)``.

    Returns ``(X, residual)`` where ``X = D^+ R D^+`` and ``residual =
    ||D X D - R||``. Raises :class:`UnsolvableError` when the residual exceeds
    ``tol`` (relative to ``||R||``).
    """
    D = as_matrix(D)
    R = as_matrix(R)
    if D.shape != R.shape:
        raise DimensionError(f"D is {D.shape} but R is {R.shape}")
    w, V = range_projector_parts(D, tol)
    Dp = (V / w) @ V.conj().T if w.size else np.zeros_like(D)
    X = Dp @ R @ Dp
    residual = operator_norm(D @ X @ D - R)
    if residual > tol.bound(operator_norm(R)):
        raise UnsolvableError(
            f"equation unsolvable on range: residual {residual:.3e}", residual)
    return X, residual


def match_distance(a, b) -> float:
    """Largest distance after greedy minimal-distance matching of multisets.

    ``a`` and ``b`` hold ``n`` points each, either complex scalars (shape
    ``(n,)``) or complex tuples (shape ``(n, k)``); tuple distance is
    Euclidean.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.shape != b.shape:
        raise DimensionError(f"multisets of shapes {a.shape} and {b.shape}")
    if a.shape[0] == 0:
        return 0.0
    dist = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    worst = 0.0
    for _ in range(a.shape[0]):
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        worst = max(worst, float(dist[i, j]))
        dist[i, :] = np.inf
        dist[:, j] = np.inf
    return worst


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))
