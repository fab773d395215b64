from __future__ import annotations

import numpy as np
import pytest

from tetrablock import jointspec as js
from tetrablock import linalg as la
from tetrablock.errors import DimensionError, NotCommutingError

from conftest import E, planted_pair


def test_verify_commuting_examples():
    assert js.verify_commuting(np.diag([1, 2]), np.diag([3, 4])).residual == 0
    assert js.verify_commuting(E(0, 1), E(0, 1)).residual == 0
    with pytest.raises(NotCommutingError) as info:
        js.verify_commuting(E(0, 1), E(1, 0))
    assert info.value.residual == pytest.approx(1)
    with pytest.raises(DimensionError):
        js.verify_commuting(np.eye(2), np.eye(3))


def test_joint_eigenvalue_examples():
    sp = js.joint_spectrum(np.diag([1, 2]), np.diag([3, 4]))
    assert la.match_distance(sp.pairs, [[1, 3], [2, 4]]) < 1e-12
    A = np.array([[1, 1], [0, 1]])
    B = np.array([[2, 3], [0, 2]])
    sp = js.joint_spectrum(A, B)
    assert la.match_distance(sp.pairs, [[1, 2], [1, 2]]) < 1e-7
    assert len(sp.distinct(1e-6)) == 1


def test_example_pencil_at_quarter(ex47):
    A1, _ = ex47
    M = A1.conj().T + 0.25 * A1
    sp = js.joint_spectrum(M, M)
    # roots of x (1/4 - x^2)
    want = [[0, 0], [0.5, 0.5], [-0.5, -0.5]]
    assert la.match_distance(sp.pairs, want) < 1e-12


@pytest.mark.parametrize("seed", range(20))
def test_planted_pairs(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    A, B, planted = planted_pair(rng, n)
    sp = js.joint_spectrum(A, B, seed=seed)
    assert la.match_distance(sp.pairs, planted) <= 1e-7
    assert sp.residuals.max() <= 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_defective_planted_pairs(seed):
    # a size-k defective cluster is only determined to about eps**(1/k)
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(2, 7))
    A, B, planted = planted_pair(rng, n, repeated=True)
    sp = js.joint_spectrum(A, B, seed=seed)
    k = max(np.sum(np.abs(planted[:, 0] - p) < 1e-12) for p in planted[:, 0])
    scale = np.linalg.norm(A) + np.linalg.norm(B)
    assert la.match_distance(sp.pairs, planted) <= 10 * scale * (2.2e-16 * scale) ** (1 / k)


def test_derogatory_but_diagonalizable(rng):
    U = la.random_unitary(4, rng)
    A = U @ np.diag([1, 1, 2, 2]) @ U.conj().T
    B = U @ np.diag([5, 6, 7, 7]) @ U.conj().T
    sp = js.joint_spectrum(A, B)
    assert la.match_distance(sp.pairs, [[1, 5], [1, 6], [2, 7], [2, 7]]) < 1e-10


def test_pairs_are_joint_eigenvalues(rng):
    A, B, _ = planted_pair(rng, 6)
    sp = js.joint_spectrum(A, B)
    for (lam, mu), r in zip(sp.pairs, sp.residuals):
        assert js.joint_residual(A, B, lam, mu) == pytest.approx(r, abs=1e-14)
    # traces are preserved by the unitary triangularization
    assert sp.pairs[:, 0].sum() == pytest.approx(np.trace(A), abs=1e-10)
    assert sp.pairs[:, 1].sum() == pytest.approx(np.trace(B), abs=1e-10)


def test_seed_independence(rng):
    A, B, _ = planted_pair(rng, 5)
    s1 = js.joint_spectrum(A, B, seed=1).pairs
    s2 = js.joint_spectrum(A, B, seed=2).pairs
    assert la.match_distance(s1, s2) < 1e-9
