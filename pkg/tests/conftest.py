from __future__ import annotations

import numpy as np
import pytest

from tetrablock.cli import _preset


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def ex46():
    return _preset("ex46")


@pytest.fixture(scope="session")
def ex47():
    return _preset("ex47")


def E(i: int, j: int, n: int = 2) -> np.ndarray:
    M = np.zeros((n, n), dtype=complex)
    M[i, j] = 1.0
    return M


def crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def nr_oracle(A, samples: int = 200_000, seed: int = 7) -> float:
    """Brute-force numerical radius from random unit vectors (a lower bound)."""
    r = np.random.default_rng(seed)
    n = A.shape[0]
    X = r.normal(size=(samples, n)) + 1j * r.normal(size=(samples, n))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    return float(np.abs(np.einsum("ki,ij,kj->k", X.conj(), A, X)).max())


def nr_eigvalsh(A, grid: int = 4096) -> float:
    """Numerical radius via numpy's Hermitian solver on a dense angle grid."""
    ts = 2 * np.pi * np.arange(grid) / grid
    H = [(np.exp(1j * t) * A + np.exp(-1j * t) * A.conj().T) / 2 for t in ts]
    return float(np.linalg.eigvalsh(np.array(H))[:, -1].max())


def planted_pair(rng, n: int, repeated: bool = False):
    """Commuting ``(U T1 U*, U T2 U*)`` with known diagonal pairs.

    ``T1`` is upper triangular (with repeated diagonal entries when
    ``repeated``, which makes blocks defective) and
    ``T2 = c0 + c1 T1 + c2 T1^2``, so both are triangular and commute; the
    planted joint eigenvalues are the diagonal pairs.
    """
    from tetrablock.linalg import random_unitary

    d = rng.normal(size=n) + 1j * rng.normal(size=n)
    if repeated and n > 1:
        d[rng.integers(0, n, size=n // 2)] = d[0]
    T1 = np.triu(crandn(rng, n, n), 1) * rng.uniform(0, 1) + np.diag(d)
    c = crandn(rng, 3) * 0.5
    T2 = c[0] * np.eye(n) + c[1] * T1 + c[2] * T1 @ T1
    U = random_unitary(n, rng)
    planted = np.stack([np.diag(T1), np.diag(T2)], axis=1)
    return U @ T1 @ U.conj().T, U @ T2 @ U.conj().T, planted


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
