"""Truncated Hardy-space models for pure tetrablock isometries and the
co-invariant compressions used as test contractions.

Layout
------
Vectors of the truncated space ``C^N (x) C^n`` are stored mode-major: the
block of indices ``k*n .. k*n + n - 1`` holds the coefficient of ``z^k``.
With ``S`` the truncated shift (``S e_k = e_{k+1}``, ``S e_{N-1} = 0``) the
model triple is

    Q1 = I (x) A1^* + S (x) A2,   Q2 = I (x) A2^* + S (x) A1,   V = S (x) I.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import DimensionError, HypothesisError, PurityError, ResolventError, TailError
from .fundops import OperatorTriple, check_pure, defect, extract_fundamental, make_triple
from .linalg import DEFAULT_TOL, Tolerance

LAYOUT = "mode-major"
DEFAULT_MODES = 64
DEFAULT_BUFFER = 8


@dataclass(frozen=True)
class TruncatedHardy:
    fiber_dim: int
    modes: int

    def __post_init__(self):
        if self.modes < 2:
            raise ValueError("need at least 2 modes")
        if self.fiber_dim < 0:
            raise ValueError("fiber dimension must be nonnegative")

    @property
    def dim(self) -> int:
        return self.fiber_dim * self.modes

    @property
    def layout(self) -> str:
        return LAYOUT

    def block(self, k: int) -> slice:
        """Index range of mode ``k``."""
        return slice(k * self.fiber_dim, (k + 1) * self.fiber_dim)


def shift_matrix(N: int, periodic: bool = False) -> np.ndarray:
    S = np.eye(N, k=-1, dtype=complex)
    if periodic:
        S[0, N - 1] = 1.0
    return S


def hypothesis_residuals(A1, A2) -> dict[str, float]:
    """Norms of ``[A1, A2]`` and ``[A1^*, A1] - [A2^*, A2]``."""
    A1 = la.as_matrix(A1)
    A2 = la.as_matrix(A2)
    if A1.shape != A2.shape:
        raise DimensionError(f"parameters of shapes {A1.shape} and {A2.shape}")
    if A1.size == 0:
        return {"commutator": 0.0, "self_commutator_gap": 0.0}
    gap = la.commutator(A1.conj().T, A1) - la.commutator(A2.conj().T, A2)
    return {
        "commutator": la.operator_norm(la.commutator(A1, A2)),
        "self_commutator_gap": la.operator_norm(gap),
    }


def symbol_sup_norm(A1, A2, grid: int = 256) -> float:
    """``max_{|z|=1} ||A1^* + A2 z||`` on ``grid`` equispaced points."""
    A1 = la.as_matrix(A1)
    A2 = la.as_matrix(A2)
    if A1.size == 0:
        return 0.0
    zs = np.exp(2j * np.pi * np.arange(grid) / grid)
    return max(la.operator_norm(A1.conj().T + z * A2) for z in zs)


def check_hypotheses(A1, A2, tol: Tolerance = DEFAULT_TOL) -> dict[str, float]:
    """Return the hypothesis residuals, raising if either exceeds ``tol``."""
    res = hypothesis_residuals(A1, A2)
    scale = 1.0 + max(la.operator_norm(A1), la.operator_norm(A2)) ** 2
    bad = {k: v for k, v in res.items() if v > tol.bound(scale)}
    if bad:
        desc = ", ".join(f"{k} = {v:.3e}" for k, v in bad.items())
        raise HypothesisError(f"parameters violate the commutation hypotheses: {desc}", res)
    return res


@dataclass(frozen=True)
class ModelTriple:
    Q1: np.ndarray
    Q2: np.ndarray
    V: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    space: TruncatedHardy
    hypothesis: dict[str, float]
    commutators: tuple[float, float, float]
    periodic: bool = False

    def triple(self) -> OperatorTriple:
        return OperatorTriple(self.Q1, self.Q2, self.V, self.commutators)


def build_model(
    A1, A2, N: int = DEFAULT_MODES, periodic: bool = False, tol: Tolerance = DEFAULT_TOL
) -> ModelTriple:
    """Assemble ``(Q1, Q2, V)`` on ``N`` modes.

    The commutators reduce to ``I (x) [A1^*, A2^*]``, ``S (x) ([A1^*, A1] -
    [A2^*, A2])`` and ``S^2 (x) [A2, A1]``, so they vanish exactly when the
    hypotheses hold; they are still measured and reported.
    With ``periodic=True`` the shift is replaced by the cyclic one, which
    makes ``V`` unitary.
    """
    A1 = la.as_matrix(A1)
    A2 = la.as_matrix(A2)
    space = TruncatedHardy(A1.shape[0], N)
    hyp = check_hypotheses(A1, A2, tol)
    n = A1.shape[0]
    S = shift_matrix(N, periodic)
    I_N = np.eye(N)
    Q1 = np.kron(I_N, A1.conj().T) + np.kron(S, A2)
    Q2 = np.kron(I_N, A2.conj().T) + np.kron(S, A1)
    V = np.kron(S, np.eye(n))
    comms = (
        la.operator_norm(la.commutator(Q1, Q2)),
        la.operator_norm(la.commutator(Q1, V)),
        la.operator_norm(la.commutator(Q2, V)),
    )
    return ModelTriple(Q1, Q2, V, A1, A2, space, hyp, comms, periodic)


def compress_to_comodel(mt: ModelTriple, m: int) -> OperatorTriple:
    """Compress the model to its first ``m`` modes.

    That subspace is invariant under every ``Qi^*`` (adjoint shifts lower
    the mode index), so the compression is again a tetrablock contraction;
    its ``T3`` is nilpotent of index ``m``.
    """
    if not 2 <= m <= mt.space.modes:
        raise ValueError(f"m must lie in [2, {mt.space.modes}], got {m}")
    k = m * mt.space.fiber_dim
    return make_triple(mt.Q1[:k, :k], mt.Q2[:k, :k], mt.V[:k, :k])


def tail_norm(T3, N: int) -> float:
    """``||T3^{*N}|| = ||T3^N||``."""
    T3 = la.as_matrix(T3)
    return la.operator_norm(np.linalg.matrix_power(T3, N))


@dataclass(frozen=True)
class Embedding:
    """``W`` together with the defect basis of ``T3^*`` it is written in
    and the truncation tail ``||T3^{*N}||``."""

    W: np.ndarray
    basis: np.ndarray
    D: np.ndarray
    modes: int
    tail: float

    @property
    def isometry_bound(self) -> float:
        return self.tail**2


def _T3(tr_or_T3) -> np.ndarray:
    if isinstance(tr_or_T3, OperatorTriple):
        return tr_or_T3.T3
    return la.as_matrix(tr_or_T3)


def embed_W(
    tr, N: int = DEFAULT_MODES, tail_tol: float = 1e-6, tol: Tolerance = DEFAULT_TOL
) -> Embedding:
    """Embedding ``h -> sum_k z^k (x) D_{T3^*} T3^{*k} h`` truncated at ``N``.

    ``tr`` is an :class:`OperatorTriple` or just ``T3``. Block ``k`` of ``W``
    is ``B^* D T3^{*k}`` with ``B`` the defect basis of ``T3^*``. The
    telescoping sum gives ``W^*W = I - T3^N T3^{*N}``, so the isometry defect
    is at most ``tail**2``.
    """
    T3 = _T3(tr)
    if N < 1:
        raise ValueError("N must be positive")
    if not check_pure(T3, tol=tol):
        raise PurityError("T3 is not pure: T3^{*k} does not tend to 0")
    tail = tail_norm(T3, N)
    if tail > tail_tol:
        raise TailError(f"||T3^*N|| = {tail:.3e} exceeds {tail_tol:.1e} at N = {N}", tail)
    d = defect(T3.conj().T, tol)
    B = d.basis
    block = B.conj().T @ d.D
    Ts = T3.conj().T
    blocks = []
    for _ in range(N):
        blocks.append(block)
        block = block @ Ts
    W = np.vstack(blocks) if B.shape[1] else np.zeros((0, T3.shape[0]), dtype=complex)
    return Embedding(W, B, d.D, N, tail)


def dilate(
    tr: OperatorTriple, N: int = DEFAULT_MODES, tail_tol: float = 1e-6, tol: Tolerance = DEFAULT_TOL
) -> tuple[ModelTriple, Embedding]:
    """Model triple built from the fundamental operators of the adjoint triple,
    and the matching embedding, both in the defect basis of ``T3^*``."""
    emb = embed_W(tr, N, tail_tol, tol)
    fp = extract_fundamental(tr.adjoint(), tol)
    return build_model(fp.A1, fp.A2, N, tol=tol), emb


@dataclass(frozen=True)
class DilationReport:
    intertwining: tuple[float, float, float]
    monomial_max: float
    worst_monomial: tuple[int, int, int]
    isometry_defect: float
    tail: float
    bound: float
    monomials: dict[tuple[int, int, int], float] = field(repr=False, default_factory=dict)

    @property
    def passed(self) -> bool:
        return max(max(self.intertwining), self.monomial_max) <= self.bound


def verify_dilation(
    tr: OperatorTriple,
    mt: ModelTriple,
    W,
    max_degree: int = 4,
    tol: float = 1e-9,
) -> DilationReport:
    """Measure how well ``(mt, W)`` dilates ``tr``.

    Reports ``||W^*Q1 - T1 W^*||`` (and likewise for ``Q2``, ``V``) and the
    largest ``||W^* Q1^a Q2^b V^c W - T1^a T2^b T3^c||`` over
    ``a + b + c <= max_degree``. Truncation perturbs these by at most a
    multiple of the tail ``||T3^{*N}||``; the pass bound is ``tol`` plus that
    inflation.
    """
    tail = 0.0
    if isinstance(W, Embedding):
        tail = W.tail
        W = W.W
    W = la.as_matrix(W, square=False)
    Wh = W.conj().T
    T1, T2, T3 = tr
    if W.shape != (mt.Q1.shape[0], T1.shape[0]):
        raise DimensionError(f"W has shape {W.shape}, expected {(mt.Q1.shape[0], T1.shape[0])}")
    inter = (
        la.operator_norm(Wh @ mt.Q1 - T1 @ Wh),
        la.operator_norm(Wh @ mt.Q2 - T2 @ Wh),
        la.operator_norm(Wh @ mt.V - T3 @ Wh),
    )
    n = T1.shape[0]
    I = np.eye(n, dtype=complex)
    monos: dict[tuple[int, int, int], float] = {}
    Vc, Tc = W, I
    for c in range(max_degree + 1):
        Q2b, T2b = Vc, Tc
        for b in range(max_degree - c + 1):
            Q1a, T1a = Q2b, T2b
            for a in range(max_degree - c - b + 1):
                monos[(a, b, c)] = la.operator_norm(Wh @ Q1a - T1a)
                Q1a, T1a = mt.Q1 @ Q1a, T1 @ T1a
            Q2b, T2b = mt.Q2 @ Q2b, T2 @ T2b
        Vc, Tc = mt.V @ Vc, T3 @ Tc
    worst = max(monos, key=monos.get)
    speed = max(1.0, la.operator_norm(mt.Q1), la.operator_norm(mt.Q2))
    bound = tol + (max_degree + 1) * speed**max_degree * tail
    return DilationReport(
        inter, monos[worst], worst, monos[(0, 0, 0)], tail, bound, monos
    )


def characteristic_function(T, z: complex, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``Theta_T(z) = -T + z D_{T^*} (I - z T^*)^{-1} D_T`` on the defect space.

    The result maps defect-basis coordinates of ``T`` to those of ``T^*``
    (bases from :func:`~tetrablock.fundops.defect`).
    """
    T = la.as_matrix(T)
    dT = defect(T, tol)
    dTs = defect(T.conj().T, tol)
    return (
        dTs.basis.conj().T
        @ _theta_full(T, complex(z), dT.D, dTs.D, tol)
        @ dT.basis
    )


def _resolvent(T: np.ndarray, z: complex, tol: Tolerance) -> np.ndarray:
    n = T.shape[0]
    R = np.eye(n) - z * T
    smin = float(np.linalg.svd(R, compute_uv=False)[-1]) if n else 1.0
    if smin <= tol.bound(1.0):
        raise ResolventError(f"I - zT is singular at z = {z} (sigma_min {smin:.3e})")
    return np.linalg.inv(R)


def _theta_full(T, z, DT, DTs, tol) -> np.ndarray:
    return -T + z * DTs @ _resolvent(T.conj().T, z, tol) @ DT


def kernel_identity_residual(T, z: complex, w: complex, tol: Tolerance = DEFAULT_TOL) -> float:
    """``|| I - Theta(w) Theta(z)^* - (1 - w conj(z)) D_* (I - wT^*)^{-1}
    (I - conj(z) T)^{-1} D_* ||`` on the defect space of ``T^*``."""
    T = la.as_matrix(T)
    dT = defect(T, tol)
    dTs = defect(T.conj().T, tol)
    B, Bs = dT.basis, dTs.basis
    if Bs.shape[1] == 0:
        return 0.0
    Tw = Bs.conj().T @ _theta_full(T, complex(w), dT.D, dTs.D, tol) @ B
    Tz = Bs.conj().T @ _theta_full(T, complex(z), dT.D, dTs.D, tol) @ B
    lhs = np.eye(Bs.shape[1]) - Tw @ Tz.conj().T
    zc = complex(z).conjugate()
    rhs = (1 - complex(w) * zc) * (
        Bs.conj().T
        @ dTs.D
        @ _resolvent(T.conj().T, complex(w), tol)
        @ _resolvent(T, zc, tol)
        @ dTs.D
        @ Bs
    )
    return la.operator_norm(lhs - rhs)


def theta_coefficients(T, K: int, tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """Taylor coefficients of ``Theta_T`` up to degree ``K - 1``:
    ``-T`` at degree 0 and ``D_{T^*} T^{*(k-1)} D_T`` at degree ``k``."""
    T = la.as_matrix(T)
    dT = defect(T, tol)
    dTs = defect(T.conj().T, tol)
    L = dTs.basis.conj().T
    R = dT.basis
    coeffs = [L @ (-T) @ R]
    P = dTs.D.copy()
    Ts = T.conj().T
    for _ in range(1, K):
        coeffs.append(L @ P @ dT.D @ R)
        P = P @ Ts
    return coeffs


def toeplitz_multiplier(coeffs: list[np.ndarray], N: int) -> np.ndarray:
    """Lower-triangular block Toeplitz section with ``(j, k)`` block
    ``coeffs[j - k]``."""
    r_out, r_in = coeffs[0].shape
    M = np.zeros((N * r_out, N * r_in), dtype=complex)
    for j in range(N):
        for k in range(j + 1):
            if j - k < len(coeffs):
                M[j * r_out:(j + 1) * r_out, k * r_in:(k + 1) * r_in] = coeffs[j - k]
    return M


@dataclass(frozen=True)
class ModelIdentityReport:
    residual: float
    tail: float
    modes: int
    buffer: int
    bound: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.bound


def verify_model_identity(
    tr,
    N: int = DEFAULT_MODES,
    buffer: int = DEFAULT_BUFFER,
    tail_tol: float = 1e-6,
    tol: float = 1e-8,
) -> ModelIdentityReport:
    """Check ``W W^* + M M^* = I`` on the leading ``N - buffer`` modes.

    ``M`` is the truncated block-Toeplitz matrix of the characteristic
    function of ``T3`` and ``W`` the embedding of :func:`embed_W`.
    """
    T3 = _T3(tr)
    if not 0 <= buffer < N:
        raise ValueError("buffer must satisfy 0 <= buffer < N")
    emb = embed_W(T3, N, tail_tol)
    M = toeplitz_multiplier(theta_coefficients(T3, N), N)
    r = emb.basis.shape[1]
    L = (N - buffer) * r
    G = emb.W @ emb.W.conj().T + M @ M.conj().T
    res = la.operator_norm(G[:L, :L] - np.eye(L)) if L else 0.0
    return ModelIdentityReport(res, emb.tail, N, buffer, tol + 2.0 * emb.tail)


def random_model_params(
    n: int, rng: np.random.Generator, sup_norm: float = 0.9, grid: int = 512
) -> tuple[np.ndarray, np.ndarray]:
    """Seeded ``(A1, A2)`` satisfying both commutation hypotheses.

    The pair is a direct sum of a normal commuting block ``(U D1 U^*,
    U D2 U^*)`` and a non-normal block ``(X, e^{i phi} X + c I)``,
    conjugated by a random unitary and scaled so that
    ``max_{|z|=1} ||A1^* + A2 z|| = sup_norm`` on the grid.
    """
    if n < 1:
        raise ValueError("n must be positive")
    k = int(rng.integers(0, n + 1))
    blocks1, blocks2 = [], []
    if k:
        U = la.random_unitary(k, rng)
        d1 = rng.normal(size=k) + 1j * rng.normal(size=k)
        d2 = rng.normal(size=k) + 1j * rng.normal(size=k)
        blocks1.append(U @ np.diag(d1) @ U.conj().T)
        blocks2.append(U @ np.diag(d2) @ U.conj().T)
    if n - k:
        m = n - k
        X = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        phi = rng.uniform(0, 2 * np.pi)
        c = complex(rng.normal(), rng.normal())
        blocks1.append(X)
        blocks2.append(np.exp(1j * phi) * X + c * np.eye(m))
    A1 = _block_diag(blocks1)
    A2 = _block_diag(blocks2)
    U = la.random_unitary(n, rng)
    A1 = U @ A1 @ U.conj().T
    A2 = U @ A2 @ U.conj().T
    s = symbol_sup_norm(A1, A2, grid)
    return A1 * (sup_norm / s), A2 * (sup_norm / s)


def _block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out
