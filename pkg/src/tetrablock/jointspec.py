"""Joint spectrum of a commuting pair of matrices.

For commuting matrices every notion of joint spectrum reduces to the joint
eigenvalues, which are the diagonal pairs of any simultaneous unitary
triangularization. The triangularization is built by deflation: find a
common eigenvector, rotate it to the first coordinate with a Householder
reflector, and recurse on the trailing block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import DeflationError, DimensionError, NotCommutingError
from .linalg import DEFAULT_TOL, Tolerance


@dataclass(frozen=True)
class CommutingPair:
    A: np.ndarray
    B: np.ndarray
    residual: float

    @property
    def order(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class JointSpectrum:
    """``pairs[k] = (lambda_k, mu_k)``; ``residuals[k]`` is the smallest
    singular value of ``[A - lambda_k I; B - mu_k I]``."""

    pairs: np.ndarray
    residuals: np.ndarray

    def __len__(self) -> int:
        return self.pairs.shape[0]

    def distinct(self, tol: float = 1e-8) -> np.ndarray:
        """Collapse the multiset to a set (greedy, first representative kept)."""
        out: list[np.ndarray] = []
        for p in self.pairs:
            if not any(np.linalg.norm(p - q) <= tol for q in out):
                out.append(p)
        return np.array(out).reshape(-1, 2)


def verify_commuting(A, B, tol: Tolerance = DEFAULT_TOL) -> CommutingPair:
    A = la.as_matrix(A)
    B = la.as_matrix(B)
    if A.shape != B.shape:
        raise DimensionError(f"pair of shapes {A.shape} and {B.shape}")
    res = la.operator_norm(A @ B - B @ A)
    # Frobenius norms bound the operator norms and are much cheaper
    scale = np.linalg.norm(A) * np.linalg.norm(B) + 1.0
    if res > tol.abs * scale:
        raise NotCommutingError(f"pair does not commute: ||AB - BA|| = {res:.3e}", res)
    return CommutingPair(A, B, res)


def joint_residual(A, B, lam: complex, mu: complex) -> float:
    """``sigma_min([A - lam I; B - mu I])`` (joint-eigenvalue certificate)."""
    n = A.shape[0]
    I = np.eye(n)
    stacked = np.vstack([A - lam * I, B - mu * I])
    return float(np.linalg.svd(stacked, compute_uv=False)[-1])


def joint_residuals(A, B, pairs: np.ndarray) -> np.ndarray:
    """Vectorized :func:`joint_residual` over the rows of ``pairs``."""
    pairs = np.asarray(pairs, dtype=complex).reshape(-1, 2)
    if pairs.shape[0] == 0:
        return np.zeros(0)
    I = np.eye(A.shape[0])
    stacked = np.concatenate(
        [A[None] - pairs[:, 0, None, None] * I, B[None] - pairs[:, 1, None, None] * I], axis=1
    )
    return np.linalg.svd(stacked, compute_uv=False)[:, -1]


def _householder_to_e1(v: np.ndarray) -> np.ndarray:
    """Unitary ``H`` (Hermitian reflector up to phase) with ``H[:, 0] = v``."""
    n = v.shape[0]
    v = v / math.sqrt(np.vdot(v, v).real)
    phase = v[0] / abs(v[0]) if v[0] != 0 else 1.0
    u = v.copy()
    u[0] += phase
    H = np.eye(n, dtype=complex) - (2.0 / np.vdot(u, u).real) * np.outer(u, u.conj())
    # H e1 = -conj(phase) v, so rescaling column 0 by -phase makes it v
    H[:, 0] *= -phase
    return H


def _eig_residual(M: np.ndarray, v: np.ndarray) -> tuple[complex, float]:
    Mv = M @ v
    val = complex(np.vdot(v, Mv))
    r = Mv - val * v
    return val, math.sqrt(np.vdot(r, r).real)


def _kernel_basis(M: np.ndarray, cutoff: float) -> np.ndarray:
    _, s, Vh = np.linalg.svd(M)
    return Vh[s <= cutoff].conj().T


def _find_joint_vector(A, B, rng, jtol: float) -> np.ndarray:
    n = A.shape[0]
    gamma = complex(rng.normal(), rng.normal())
    _, Q = la.schur(A + gamma * B)
    v = Q[:, 0]
    _, ra = _eig_residual(A, v)
    _, rb = _eig_residual(B, v)
    if max(ra, rb) <= jtol:
        return v
    # intersect eigenspaces: ker(A - lam I) is B-invariant, take an
    # eigenvector of B restricted to it
    lam = complex(np.vdot(v, A @ v))
    scale = np.linalg.norm(A) + 1.0
    for cutoff in (jtol, math.sqrt(jtol * scale), 1e-6 * scale):
        E = _kernel_basis(A - lam * np.eye(n), cutoff)
        if E.shape[1] == 0:
            continue
        Br = E.conj().T @ B @ E
        _, Qr = la.schur(Br)
        w = E @ Qr[:, 0]
        w /= np.linalg.norm(w)
        _, ra = _eig_residual(A, w)
        _, rb = _eig_residual(B, w)
        if max(ra, rb) <= jtol:
            return w
    raise DeflationError(
        f"deflation failed on a {n}x{n} block (best residual {max(ra, rb):.3e})",
        block_a=A, block_b=B, residual=max(ra, rb),
    )


def joint_eigenvalues(
    pair: CommutingPair,
    rng: np.random.Generator | None = None,
    tol: Tolerance = DEFAULT_TOL,
    vector_tol: float | None = None,
) -> JointSpectrum:
    """Joint eigenvalues of a commuting pair, with multiplicity.

    ``vector_tol`` bounds ``||Av - (v^H A v) v||`` for an accepted common
    eigenvector. Defective eigenvalues are resolved only to about
    ``sqrt(eps)``, so the default is ``1e-7 * (||A|| + ||B|| + 1)``.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    A0, B0 = pair.A, pair.B
    n = A0.shape[0]
    scale = np.linalg.norm(A0) + np.linalg.norm(B0) + 1.0
    jtol = vector_tol if vector_tol is not None else max(1e-7 * scale, tol.bound(scale))
    A = A0.copy()
    B = B0.copy()
    pairs = np.empty((n, 2), dtype=complex)
    for k in range(n):
        if A.shape[0] == 1:
            pairs[k] = (A[0, 0], B[0, 0])
            break
        v = _find_joint_vector(A, B, rng, jtol)
        H = _householder_to_e1(v)
        A = H.conj().T @ A @ H
        B = H.conj().T @ B @ H
        pairs[k] = (A[0, 0], B[0, 0])
        A = A[1:, 1:]
        B = B[1:, 1:]
    residuals = joint_residuals(A0, B0, pairs)
    return JointSpectrum(pairs, residuals)


def joint_spectrum(A, B, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> JointSpectrum:
    """Convenience wrapper: verify commutation, then triangularize."""
    return joint_eigenvalues(verify_commuting(A, B, tol), np.random.default_rng(seed), tol)
