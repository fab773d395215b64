from __future__ import annotations

import numpy as np
import pytest

from tetrablock import fundops as fo
from tetrablock import linalg as la
from tetrablock import model
from tetrablock.errors import DimensionError, NotCommutingError, NotContractionError

from conftest import E, crandn


def scalar_triple(x1, x2, x3):
    return fo.make_triple([[x1]], [[x2]], [[x3]])


def e_unitary_triple(rng, n=3):
    U = la.random_unitary(n, rng)
    d3 = np.exp(2j * np.pi * rng.random(n))
    d2 = rng.uniform(0, 1, n) * np.exp(2j * np.pi * rng.random(n))
    N3 = U @ np.diag(d3) @ U.conj().T
    N2 = U @ np.diag(d2) @ U.conj().T
    return fo.make_triple(N2.conj().T @ N3, N2, N3)


def assert_fundamental_equations(tr, fp, atol=1e-10):
    T1, T2, T3 = tr
    D = fo.defect(T3).D
    B = fp.defect_basis
    X1 = B @ fp.A1 @ B.conj().T
    X2 = B @ fp.A2 @ B.conj().T
    assert np.allclose(T1 - T2.conj().T @ T3, D @ X1 @ D, atol=atol)
    assert np.allclose(T2 - T1.conj().T @ T3, D @ X2 @ D, atol=atol)


def test_make_triple_checks():
    with pytest.raises(NotCommutingError):
        fo.make_triple(E(0, 1), E(1, 0), np.zeros((2, 2)))
    with pytest.raises(DimensionError):
        fo.make_triple(np.eye(2), np.eye(2), np.eye(3))
    tr = fo.make_triple(E(0, 1), E(1, 0), np.zeros((2, 2)), check=False)
    assert tr.residuals[0] == pytest.approx(1)
    assert [T.shape for T in tr.adjoint()] == [(2, 2)] * 3


def test_defect_examples(rng):
    d = fo.defect(la.random_unitary(3, rng))
    assert np.allclose(d.D, 0, atol=1e-7) and d.rank == 0
    d = fo.defect(np.zeros((3, 3)))
    assert np.allclose(d.D, np.eye(3)) and d.rank == 3
    S = model.shift_matrix(5)
    d = fo.defect(S)
    P = np.zeros((5, 5))
    P[4, 4] = 1
    assert np.allclose(d.D, P)
    assert np.allclose(d.basis, P[:, [4]])
    with pytest.raises(NotContractionError):
        fo.defect(2 * np.eye(2))


def test_defect_basis_orders_by_value():
    d = fo.defect(np.diag([0.9, 0.0, 0.5]))
    assert np.all(np.diff(d.values) <= 0)
    assert np.allclose(np.abs(d.basis[:, 0]), [0, 1, 0])


def test_e_unitary_has_trivial_defect(rng):
    tr = e_unitary_triple(rng)
    fp = fo.extract_fundamental(tr)
    assert fp.order == 0
    assert np.allclose(tr.T1 - tr.T2.conj().T @ tr.T3, 0, atol=1e-12)


@pytest.mark.parametrize("x", [(0.3, 0.2, 0.1), (0.1 + 0.2j, -0.3j, 0.5 - 0.1j), (0, 1, 0)])
def test_scalar_fundamentals_are_betas(x):
    x1, x2, x3 = x
    fp = fo.extract_fundamental(scalar_triple(*x))
    den = 1 - abs(x3) ** 2
    assert fp.A1[0, 0] == pytest.approx((x1 - np.conj(x2) * x3) / den, abs=1e-14)
    assert fp.A2[0, 0] == pytest.approx((x2 - np.conj(x1) * x3) / den, abs=1e-14)


def test_model_compression_recovers_adjoint_parameters(rng):
    A1, A2 = model.random_model_params(3, rng)
    mt = model.build_model(A1, A2, 6)
    for m in (2, 4, 6):
        tr = model.compress_to_comodel(mt, m)
        fp = fo.extract_fundamental(tr)
        assert np.allclose(fp.A1, A1.conj().T, atol=1e-12)
        assert np.allclose(fp.A2, A2.conj().T, atol=1e-12)
        assert_fundamental_equations(tr, fp)
        fpa = fo.extract_fundamental(tr.adjoint())
        assert fpa.order == 3


def test_fundamental_equations_random_compressions(rng):
    for _ in range(5):
        n = int(rng.integers(1, 4))
        A1, A2 = model.random_model_params(n, rng)
        tr = model.compress_to_comodel(model.build_model(A1, A2, 5), 5)
        # a random unitary change of basis moves the defect space
        U = la.random_unitary(tr.order, rng)
        tr = fo.make_triple(*(U @ T @ U.conj().T for T in tr))
        fp = fo.extract_fundamental(tr)
        assert_fundamental_equations(tr, fp)
        assert la.match_distance(la.eigenvalues(fp.A1), la.eigenvalues(A1.conj().T)) < 1e-7


def test_fundamental_radius_examples():
    z = np.zeros((2, 2))
    fp = fo.FundamentalPair(z, z, np.eye(2), 0, 0)
    assert fo.verify_fundamental_radius(fp) == (True, 0.0)
    fp = fo.FundamentalPair(np.diag([0.3]), np.diag([0.6j]), np.eye(1), 0, 0)
    ok, r = fo.verify_fundamental_radius(fp)
    assert ok and r == pytest.approx(0.9, abs=1e-12)
    J = E(0, 1)
    ok, r = fo.verify_fundamental_radius(fo.FundamentalPair(J, J, np.eye(2), 0, 0))
    assert ok and r == pytest.approx(1, abs=1e-9)
    assert la.numerical_radius(2 * J) == pytest.approx(1)
    with pytest.raises(ValueError):
        fo.verify_fundamental_radius(fp, grid=8)


def test_fundamental_radius_against_dense_grid(rng):
    A1, A2 = crandn(rng, 3, 3), crandn(rng, 3, 3)
    zs = np.exp(2j * np.pi * np.arange(720) / 720)
    dense = max(la.numerical_radius(A1 + z * A2, grid=256) for z in zs)
    r = fo.fundamental_radius(A1, A2)
    assert -1e-12 <= r - dense <= 1e-4


def test_sufficiency_scalar_certified():
    b1, b2, x3 = 0.3, 0.4j, 0.5
    tr = scalar_triple(b1 + np.conj(b2) * x3, b2 + np.conj(b1) * x3, x3)
    rep = fo.check_sufficiency(tr, fo.extract_fundamental(tr))
    assert rep.verdict is fo.Sufficiency.CERTIFIED
    assert rep.radius == pytest.approx(0.7, abs=1e-12)


def test_sufficiency_model_certified(rng):
    A1, A2 = model.random_model_params(2, rng)
    tr = model.compress_to_comodel(model.build_model(A1, A2, 4), 4)
    rep = fo.check_sufficiency(tr, fo.extract_fundamental(tr))
    assert rep.verdict is fo.Sufficiency.CERTIFIED, rep.notes


def test_sufficiency_inconclusive_and_noncontraction():
    J = E(0, 1)
    tr = fo.make_triple(J, J, np.zeros((2, 2)))
    fp = fo.FundamentalPair(J, J.T, np.eye(2), 0, 0)
    rep = fo.check_sufficiency(tr, fp)
    assert rep.verdict is fo.Sufficiency.INCONCLUSIVE and rep.notes
    big = scalar_triple(0, 0, 1.5)
    rep = fo.check_sufficiency(big, fo.FundamentalPair(np.zeros((1, 1)), np.zeros((1, 1)), np.eye(1), 0, 0))
    assert rep.verdict is fo.Sufficiency.NOT_CONTRACTION
    assert any("not contraction" in n for n in rep.notes)


def test_isometry_and_unitary_checks(rng):
    A1, A2 = model.random_model_params(2, rng)
    mt = model.build_model(A1, A2, 5)
    assert not fo.check_E_isometry(mt.triple())
    per = model.build_model(A1, A2, 5, periodic=True)
    assert fo.check_E_isometry(per.triple())
    assert fo.check_E_unitary(per.triple())
    tr = e_unitary_triple(rng)
    assert fo.check_E_isometry(tr) and fo.check_E_unitary(tr)
    assert fo.check_E_unitary(scalar_triple(0, 0, 1))
    x2, x3 = 0.4 + 0.3j, np.exp(0.7j)
    assert fo.check_E_unitary(scalar_triple(np.conj(x2) * x3, x2, x3))
    assert not fo.check_E_unitary(scalar_triple(0, 0, 0.5))


def test_check_pure(rng):
    assert fo.check_pure(np.zeros((3, 3)))
    assert not fo.check_pure(la.random_unitary(3, rng))
    assert fo.check_pure(model.shift_matrix(6))
    assert fo.check_pure(0.99 * np.eye(2))
