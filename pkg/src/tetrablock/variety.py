"""Varieties cut out by a commuting matrix pencil.

For parameters ``(A1, A2)`` with ``[A1, A2] = 0`` and
``[A1^*, A1] = [A2^*, A2]`` the set

    Omega = {(x1, x2, x3) : (x1, x2) is a joint eigenvalue of
             (A1^* + x3 A2, A2^* + x3 A1)}

is sampled by fixing ``x3`` and computing joint eigenvalues. When
``max_{|z|=1} ||A1^* + A2 z|| < 1`` the variety is distinguished in the
tetrablock; at norm exactly 1 either outcome is possible and the verdict is
decided empirically from the samples.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import TetrablockError
from .geometry import BAND, GammaPoint, RegionTag, TetraPoint, classify_tetra, in_bDE
from .jointspec import CommutingPair, JointSpectrum, joint_eigenvalues, verify_commuting
from .linalg import DEFAULT_TOL, Tolerance
from .model import check_hypotheses, symbol_sup_norm

DEFAULT_RADII = (0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0)
DEFAULT_ANGLES = 256
DEFAULT_DELTA = 0.01
SUP_TOL = 1e-8


@dataclass(frozen=True)
class VarietyParams:
    A1: np.ndarray
    A2: np.ndarray
    hypothesis: dict[str, float]
    sup_norm: float
    grid: int

    @property
    def order(self) -> int:
        return self.A1.shape[0]

    def pencil(self, x3: complex) -> tuple[np.ndarray, np.ndarray]:
        """``(A1^* + x3 A2, A2^* + x3 A1)``."""
        return (
            self.A1.conj().T + x3 * self.A2,
            self.A2.conj().T + x3 * self.A1,
        )


def variety_params(A1, A2, grid: int = DEFAULT_ANGLES, tol: Tolerance = DEFAULT_TOL) -> VarietyParams:
    """Validate ``(A1, A2)`` and record the sup norm of ``A1^* + A2 z`` on
    ``grid`` points of the circle."""
    A1 = la.as_matrix(A1)
    A2 = la.as_matrix(A2)
    hyp = check_hypotheses(A1, A2, tol)
    return VarietyParams(A1, A2, hyp, symbol_sup_norm(A1, A2, grid), grid)


@dataclass(frozen=True)
class VarietyRecord:
    """Joint eigenvalues over one ``x3`` sample, or the error that stopped
    the computation."""

    x3: complex
    spectrum: JointSpectrum | None
    tags: tuple[RegionTag, ...]
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.spectrum is not None

    def points(self) -> list[TetraPoint]:
        if self.spectrum is None:
            return []
        return [TetraPoint(complex(a), complex(b), self.x3) for a, b in self.spectrum.pairs]


@dataclass(frozen=True)
class VarietyPointCloud:
    records: list[VarietyRecord]
    order: int

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def failures(self) -> list[VarietyRecord]:
        return [r for r in self.records if not r.ok]

    def rows(self):
        """Yield ``(point, residual, tag)`` for every sampled point."""
        for rec in self.records:
            if rec.spectrum is None:
                continue
            for pt, res, tag in zip(rec.points(), rec.spectrum.residuals, rec.tags):
                yield pt, float(res), tag

    def points(self) -> np.ndarray:
        return np.array([list(p) for p, _, _ in self.rows()], dtype=complex).reshape(-1, 3)


def circle_samples(radius: float, angles: int) -> np.ndarray:
    if radius == 0.0:
        return np.zeros(1, dtype=complex)
    return radius * np.exp(2j * np.pi * np.arange(angles) / angles)


def default_x3_samples(
    radii=DEFAULT_RADII, angles: int = DEFAULT_ANGLES
) -> np.ndarray:
    """Concentric circles of ``x3`` samples; radius 0 contributes one point."""
    return np.concatenate([circle_samples(float(r), angles) for r in radii])


def _sample_one(vp: VarietyParams, x3: complex, seed: int, index: int, tol: Tolerance) -> VarietyRecord:
    P, Q = vp.pencil(x3)
    try:
        pair = verify_commuting(P, Q, tol)
        spec = joint_eigenvalues(pair, np.random.default_rng([seed, index]), tol)
    except TetrablockError as exc:
        return VarietyRecord(x3, None, (), f"{type(exc).__name__}: {exc}")
    tags = tuple(classify_tetra((a, b, x3)) for a, b in spec.pairs)
    return VarietyRecord(x3, spec, tags)


def sample_variety(
    vp: VarietyParams,
    x3_samples,
    seed: int = 0,
    threads: int = 1,
    tol: Tolerance = DEFAULT_TOL,
) -> VarietyPointCloud:
    """Joint eigenvalues of the pencil at each ``x3``.

    Samples are independent; each uses its own generator seeded from
    ``(seed, index)``, so results do not depend on ``threads``. Failed
    samples are kept as records carrying the error message.
    """
    xs = [complex(x) for x in np.asarray(x3_samples, dtype=complex).ravel()]
    for x in xs:
        if abs(x) > 1.0 + BAND:
            raise ValueError(f"x3 sample {x} lies outside the closed disc")

    def job(i):
        return _sample_one(vp, xs[i], seed, i, tol)

    if threads > 1 and len(xs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            records = list(ex.map(job, range(len(xs))))
    else:
        records = [job(i) for i in range(len(xs))]
    return VarietyPointCloud(records, vp.order)


def pencil_det(vp: VarietyParams, x, z1: complex, z2: complex) -> complex:
    """``det(z1 (A1^* + x3 A2 - x1 I) + z2 (A2^* + x3 A1 - x2 I))``."""
    x1, x2, x3 = (complex(v) for v in x)
    P, Q = vp.pencil(x3)
    n = vp.order
    I = np.eye(n)
    return complex(np.linalg.det(z1 * (P - x1 * I) + z2 * (Q - x2 * I)))


def pencil_det_max(vp: VarietyParams, x, grid: int = 8) -> float:
    """Largest ``|pencil_det|`` over a ``grid x grid`` sample of the torus.

    The determinant is a homogeneous polynomial in ``(z1, z2)``, so it
    vanishes on the closed bidisc iff it vanishes on this sample once
    ``grid`` exceeds the order.
    """
    zs = np.exp(2j * np.pi * (np.arange(grid) + 0.5) / grid)
    return max(abs(pencil_det(vp, x, a, b)) for a in zs for b in zs)


class Verdict(str, enum.Enum):
    DISTINGUISHED = "Distinguished"
    DISTINGUISHED_EMPIRICAL = "Distinguished-Empirical"
    NOT_DISTINGUISHED = "NotDistinguished"
    INCONCLUSIVE = "Inconclusive"
    HYPOTHESIS_VIOLATED = "HypothesisViolated"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class DistinguishedReport:
    verdict: Verdict
    sup_norm: float
    witness: TetraPoint | None = None
    witness_tag: RegionTag | None = None
    cloud: VarietyPointCloud | None = field(default=None, repr=False)
    notes: list[str] = field(default_factory=list)


def _witness_key(pt: TetraPoint):
    return (abs(pt.x3), -pt.x1.real, -pt.x2.real)


def classify_distinguished(
    vp: VarietyParams,
    boundary_grid: int = DEFAULT_ANGLES,
    interior_grid: int = DEFAULT_ANGLES,
    radii=DEFAULT_RADII,
    delta: float = DEFAULT_DELTA,
    sup_tol: float = SUP_TOL,
    seed: int = 0,
    threads: int = 1,
) -> DistinguishedReport:
    """Decide whether the variety of ``vp`` is distinguished.

    With ``s = max ||A1^* + A2 z||`` on a ``boundary_grid`` sample of the
    circle: ``s < 1`` proves it distinguished and ``s > 1`` violates the
    construction's hypotheses. For ``s = 1`` (within ``sup_tol``) the
    variety is sampled: points over ``|x3| <= 1 - delta`` must be interior
    and points over ``|x3| = 1`` must be on the distinguished boundary. A
    point over the interior radii that lands on the topological boundary is
    returned as witness of a non-distinguished exit; among several, the one
    with smallest ``|x3|`` and then largest real parts is chosen.
    """
    s = symbol_sup_norm(vp.A1, vp.A2, boundary_grid)
    if s < 1.0 - sup_tol:
        return DistinguishedReport(Verdict.DISTINGUISHED, s)
    if s > 1.0 + sup_tol:
        return DistinguishedReport(
            Verdict.HYPOTHESIS_VIOLATED, s, notes=[f"sup norm {s:.17g} exceeds 1"]
        )
    inner = [float(r) for r in radii if float(r) <= 1.0 - delta]
    xs = np.concatenate(
        [circle_samples(r, interior_grid) for r in inner] + [circle_samples(1.0, boundary_grid)]
    )
    cloud = sample_variety(vp, xs, seed=seed, threads=threads)
    witnesses = []
    notes = []
    for rec in cloud:
        if not rec.ok:
            notes.append(f"x3 = {rec.x3}: {rec.error}")
            continue
        on_circle = abs(abs(rec.x3) - 1.0) <= BAND
        for pt, tag in zip(rec.points(), rec.tags):
            if on_circle:
                if tag is not RegionTag.DISTINGUISHED_BOUNDARY:
                    notes.append(f"boundary sample {tuple(pt)} tagged {tag}")
            elif tag is RegionTag.OTHER_TOP_BOUNDARY:
                witnesses.append(pt)
            elif tag is not RegionTag.INTERIOR:
                notes.append(f"interior sample {tuple(pt)} tagged {tag}")
    if witnesses:
        w = min(witnesses, key=_witness_key)
        return DistinguishedReport(
            Verdict.NOT_DISTINGUISHED, s, w, classify_tetra(w), cloud, notes
        )
    if notes:
        return DistinguishedReport(Verdict.INCONCLUSIVE, s, cloud=cloud, notes=notes)
    return DistinguishedReport(Verdict.DISTINGUISHED_EMPIRICAL, s, cloud=cloud)


@dataclass(frozen=True)
class BDECriterion:
    disjoint_from_bDE: bool
    sup_norm_lt_1: bool
    sup_norm: float
    hits: list[TetraPoint] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return self.disjoint_from_bDE == self.sup_norm_lt_1


def check_bDE_criterion(
    vp: VarietyParams,
    boundary_grid: int = DEFAULT_ANGLES,
    sup_tol: float = SUP_TOL,
    seed: int = 0,
) -> BDECriterion:
    """Compare "the boundary avoids ``{(z1, z2, z1 z2) : |z1| = |z2| = 1}``"
    with ``max ||A1^* + A2 z|| < 1``.

    Both flags are computed from samples; disagreement is reported through
    :attr:`BDECriterion.agree`, never raised.
    """
    cloud = sample_variety(vp, circle_samples(1.0, boundary_grid), seed=seed)
    hits = [pt for pt, _, _ in cloud.rows() if in_bDE(pt)]
    s = symbol_sup_norm(vp.A1, vp.A2, boundary_grid)
    return BDECriterion(not hits, s < 1.0 - sup_tol, s, hits)


def project_to_gamma(vp: VarietyParams, cloud: VarietyPointCloud) -> list[tuple[GammaPoint, float]]:
    """Map ``(x1, x2, x3) -> (x1 + x2, x3)`` with residual
    ``|det((A1 + A2)^* + p (A1 + A2) - s I)|``."""
    A = vp.A1 + vp.A2
    Ah = A.conj().T
    I = np.eye(vp.order)
    out = []
    for pt, _, _ in cloud.rows():
        g = GammaPoint(pt.x1 + pt.x2, pt.x3)
        out.append((g, abs(complex(np.linalg.det(Ah + g.p * A - g.s * I)))))
    return out


def boundary_consistency(cloud: VarietyPointCloud) -> float:
    """Largest ``|x1 - conj(x2) x3|`` over points with ``|x3| = 1``."""
    worst = 0.0
    for pt, _, _ in cloud.rows():
        if abs(abs(pt.x3) - 1.0) <= BAND:
            worst = max(worst, abs(pt.x1 - pt.x2.conjugate() * pt.x3))
    return worst


def scalar_points(a: complex, b: complex, x3: complex) -> TetraPoint:
    """Closed form for ``1 x 1`` parameters: ``(conj(a) + x3 b, conj(b) + x3 a, x3)``."""
    a, b, x3 = complex(a), complex(b), complex(x3)
    return TetraPoint(a.conjugate() + x3 * b, b.conjugate() + x3 * a, x3)


def to_pair(vp: VarietyParams, x3: complex) -> CommutingPair:
    P, Q = vp.pencil(x3)
    return verify_commuting(P, Q)

