"""Defect operators, fundamental operators, and class predicates for
commuting operator triples.

Fundamental operators are the unique ``A1, A2`` on the defect space of
``T3`` with

    T1 - T2^* T3 = D A1 D,    T2 - T1^* T3 = D A2 D,    D = (I - T3^* T3)^{1/2}.

They are reported in coordinates of an orthonormal basis of ``ran(D)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import DimensionError, NotCommutingError, NotContractionError
from .linalg import DEFAULT_TOL, Tolerance


@dataclass(frozen=True)
class OperatorTriple:
    T1: np.ndarray
    T2: np.ndarray
    T3: np.ndarray
    residuals: tuple[float, float, float]

    @property
    def order(self) -> int:
        return self.T1.shape[0]

    def adjoint(self) -> "OperatorTriple":
        return OperatorTriple(self.T1.conj().T, self.T2.conj().T, self.T3.conj().T, self.residuals)

    def __iter__(self):
        return iter((self.T1, self.T2, self.T3))


def make_triple(T1, T2, T3, tol: Tolerance = DEFAULT_TOL, check: bool = True) -> OperatorTriple:
    """Build an :class:`OperatorTriple`, recording pairwise commutators.

    With ``check=True`` a commutator above ``tol`` (scaled by the operator
    norms) raises :class:`NotCommutingError`.
    """
    T1, T2, T3 = (la.as_matrix(T) for T in (T1, T2, T3))
    if not (T1.shape == T2.shape == T3.shape):
        raise DimensionError(f"triple of shapes {T1.shape}, {T2.shape}, {T3.shape}")
    mats = (T1, T2, T3)
    norms = [la.operator_norm(T) for T in mats]
    res = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        r = la.operator_norm(la.commutator(mats[i], mats[j]))
        if check and r > tol.bound(norms[i] * norms[j] + 1.0):
            raise NotCommutingError(f"T{i + 1} and T{j + 1} do not commute ({r:.3e})", r)
        res.append(r)
    return OperatorTriple(T1, T2, T3, tuple(res))


@dataclass(frozen=True)
class Defect:
    """``D = (I - T^*T)^{1/2}`` and an orthonormal basis of its range.

    Basis columns are ordered by decreasing eigenvalue of ``D``; inside a
    cluster of equal eigenvalues they are the pivoted Gram-Schmidt
    orthonormalization of the cluster projector's columns, so the basis is
    reproducible (and is the standard basis when the range is spanned by
    coordinate vectors).
    """

    D: np.ndarray
    basis: np.ndarray
    values: np.ndarray

    @property
    def rank(self) -> int:
        return self.basis.shape[1]


def _canonical_columns(V: np.ndarray) -> np.ndarray:
    P = V @ V.conj().T
    cols = []
    work = P.copy()
    for _ in range(V.shape[1]):
        norms = np.linalg.norm(work, axis=0)
        j = int(np.argmax(norms))
        q = work[:, j] / norms[j]
        k = int(np.argmax(np.abs(q) > np.abs(q).max() * (1 - 1e-12)))
        q = q * (abs(q[k]) / q[k])
        cols.append(q)
        work = work - np.outer(q, q.conj() @ work)
    return np.array(cols).T


def _canonical_basis(values: np.ndarray, vectors: np.ndarray, gap: float = 1e-8) -> np.ndarray:
    if values.size == 0:
        return vectors
    out = []
    start = 0
    for i in range(1, values.size + 1):
        if i == values.size or abs(values[i] - values[start]) > gap * max(values[start], 1.0):
            out.append(_canonical_columns(vectors[:, start:i]))
            start = i
    return np.hstack(out)


def defect(T, tol: Tolerance = DEFAULT_TOL) -> Defect:
    T = la.as_matrix(T)
    n = T.shape[0]
    norm = la.operator_norm(T)
    if norm > 1.0 + tol.bound(norm):
        raise NotContractionError(f"not a contraction: ||T|| = {norm:.12g}", norm)
    D = la.sqrt_psd(np.eye(n) - T.conj().T @ T, tol)
    values, vectors = la.range_projector_parts(D, tol)
    return Defect(D, _canonical_basis(values, vectors), values)


@dataclass(frozen=True)
class FundamentalPair:
    A1: np.ndarray
    A2: np.ndarray
    defect_basis: np.ndarray
    residual1: float
    residual2: float

    @property
    def order(self) -> int:
        return self.A1.shape[0]


def extract_fundamental(tr: OperatorTriple, tol: Tolerance = DEFAULT_TOL) -> FundamentalPair:
    """Solve the fundamental equations on the defect space of ``T3``.

    Raises :class:`~tetrablock.errors.UnsolvableError` when either equation
    has no solution supported on the defect space, which means the triple is
    not a tetrablock contraction.
    """
    T1, T2, T3 = tr.T1, tr.T2, tr.T3
    d = defect(T3, tol)
    X1, r1 = la.range_restricted_solve(d.D, T1 - T2.conj().T @ T3, tol)
    X2, r2 = la.range_restricted_solve(d.D, T2 - T1.conj().T @ T3, tol)
    E = d.basis
    return FundamentalPair(E.conj().T @ X1 @ E, E.conj().T @ X2 @ E, E, r1, r2)


def fundamental_radius(
    A1, A2, grid: int = 64, nr_grid: int = 128, refine: int = 3, rounds: int = 50
) -> float:
    """``max_{|z|=1} w(A1 + z A2)``.

    With ``z = e^{i(w - u)}`` the target is the maximum over the torus of
    ``g(u, w) = lambda_max(Re(e^{iu} A1 + e^{iw} A2))``. ``g`` is sampled on
    a ``nr_grid`` by ``grid`` grid and the ``refine`` best local maxima are
    polished by alternating golden-section searches in ``u`` and ``w`` (the
    two directions decouple exactly for scalars).
    """
    A1 = la.as_matrix(A1)
    A2 = la.as_matrix(A2)
    if A1.shape[0] == 0:
        return 0.0
    phis = 2.0 * np.pi * np.arange(grid) / grid
    thetas = 2.0 * np.pi * np.arange(nr_grid) / nr_grid
    # row i: z = e^{i phi_i}, column j: u = theta_j, so w = u + phi
    vals = np.array([la.hermitian_sweep(A1 + np.exp(1j * p) * A2, thetas) for p in phis])
    best = float(vals.max())
    if not refine:
        return best
    peak = np.ones(vals.shape, dtype=bool)
    for axis in (0, 1):
        for shift in (1, -1):
            peak &= vals >= np.roll(vals, shift, axis=axis)
    idx = np.argwhere(peak)
    idx = idx[np.argsort(vals[peak])[::-1][:refine]]
    h = 2.0 * np.pi / min(grid, nr_grid)

    def g(u, w):
        M = A1 + np.exp(1j * (w - u)) * A2
        return float(la.hermitian_sweep(M, np.array([u]))[0])

    for i, j in idx:
        u, w = thetas[j], thetas[j] + phis[i]
        v = vals[i, j]
        for _ in range(rounds):
            prev = v
            u, v = la.golden_max(lambda x: g(x, w), u - h, u + h, iters=40)
            w, v = la.golden_max(lambda y: g(u, y), w - h, w + h, iters=40)
            if v - prev <= 1e-15:
                break
        best = max(best, v)
    return best


def verify_fundamental_radius(
    fp: FundamentalPair, grid: int = 64, tol: Tolerance = DEFAULT_TOL
) -> tuple[bool, float]:
    """Check ``w(A1 + z A2) <= 1`` on the closed disc.

    ``z -> max_t lambda_max(Re e^{it}(A1 + z A2))`` is a supremum of
    harmonic functions of ``z``, hence subharmonic, so its maximum over the
    closed disc is attained on the unit circle; only the circle is sampled.
    """
    if grid < 16:
        raise ValueError("grid must be >= 16")
    r = fundamental_radius(fp.A1, fp.A2, grid)
    return r <= 1.0 + tol.bound(1.0), r


class Sufficiency(str, enum.Enum):
    CERTIFIED = "certified"
    INCONCLUSIVE = "inconclusive"
    NOT_CONTRACTION = "not-a-contraction"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SufficiencyReport:
    verdict: Sufficiency
    commutator: float
    self_commutator_gap: float
    radius: float
    norms: tuple[float, float, float]
    notes: list[str] = field(default_factory=list)


def check_sufficiency(
    tr: OperatorTriple, fp: FundamentalPair, grid: int = 64, tol: Tolerance = DEFAULT_TOL
) -> SufficiencyReport:
    """Certificate that ``tr`` is a tetrablock contraction.

    Only a sufficient condition: failing it yields ``inconclusive``, never a
    disproof. ``not-a-contraction`` is reported when some ``||Ti|| > 1``,
    which alone rules out the closed tetrablock as a spectral set since every
    coordinate is bounded by 1 there.
    """
    norms = tuple(la.operator_norm(T) for T in tr)
    A1, A2 = fp.A1, fp.A2
    comm = la.operator_norm(la.commutator(A1, A2)) if A1.size else 0.0
    gap = (
        la.operator_norm(la.commutator(A1.conj().T, A1) - la.commutator(A2.conj().T, A2))
        if A1.size
        else 0.0
    )
    ok_radius, radius = verify_fundamental_radius(fp, grid, tol)
    notes = []
    if any(nm > 1.0 + tol.bound(1.0) for nm in norms):
        notes.append("not contraction: some ||Ti|| > 1")
        verdict = Sufficiency.NOT_CONTRACTION
    elif comm <= tol.bound(1.0) and gap <= tol.bound(1.0) and ok_radius:
        verdict = Sufficiency.CERTIFIED
    else:
        if comm > tol.bound(1.0):
            notes.append(f"[A1, A2] != 0 ({comm:.3e})")
        if gap > tol.bound(1.0):
            notes.append(f"[A1*, A1] != [A2*, A2] ({gap:.3e})")
        if not ok_radius:
            notes.append(f"numerical radius sweep {radius:.12g} > 1")
        verdict = Sufficiency.INCONCLUSIVE
    return SufficiencyReport(verdict, comm, gap, radius, norms, notes)


def check_E_isometry(tr: OperatorTriple, tol: Tolerance = DEFAULT_TOL) -> bool:
    T1, T2, T3 = tr
    n = T3.shape[0]
    b = tol.bound(1.0)
    return (
        la.operator_norm(T3.conj().T @ T3 - np.eye(n)) <= b
        and la.operator_norm(T2) <= 1.0 + b
        and la.operator_norm(T1 - T2.conj().T @ T3) <= b
    )


def is_normal(T, tol: Tolerance = DEFAULT_TOL) -> bool:
    T = la.as_matrix(T)
    return la.operator_norm(la.commutator(T.conj().T, T)) <= tol.bound(la.operator_norm(T) ** 2)


def check_E_unitary(tr: OperatorTriple, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``T3`` unitary, ``||T2|| <= 1`` and ``T1 = T2^* T3``.

    On success the normality of ``T1`` and ``T2`` is asserted as an internal
    consistency check.
    """
    T1, T2, T3 = tr
    n = T3.shape[0]
    b = tol.bound(1.0)
    ok = (
        la.operator_norm(T3.conj().T @ T3 - np.eye(n)) <= b
        and la.operator_norm(T3 @ T3.conj().T - np.eye(n)) <= b
        and la.operator_norm(T2) <= 1.0 + b
        and la.operator_norm(T1 - T2.conj().T @ T3) <= b
    )
    if ok:
        assert is_normal(T1, Tolerance(1e-8, 1e-8)) and is_normal(T2, Tolerance(1e-8, 1e-8)), (
            "tetrablock unitary with non-normal T1 or T2"
        )
    return ok


def check_pure(T3, powers: int = 256, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``T3^{*k} -> 0``: spectral radius below 1, or a power vanishes."""
    T3 = la.as_matrix(T3)
    if T3.shape[0] == 0:
        return True
    if la.spectral_radius(T3) < 1.0 - tol.bound(1.0):
        return True
    P = np.eye(T3.shape[0], dtype=complex)
    Ts = T3.conj().T
    for _ in range(powers):
        P = P @ Ts
        if la.operator_norm(P) <= tol.bound(1.0):
            return True
    return False
