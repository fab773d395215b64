from __future__ import annotations

import numpy as np
import pytest

from tetrablock import fundops as fo
from tetrablock import linalg as la
from tetrablock import model as md
from tetrablock.errors import HypothesisError, PurityError, ResolventError, TailError

from conftest import E, crandn


def inclusion(mt, m):
    k = m * mt.space.fiber_dim
    return np.eye(mt.space.dim, k, dtype=complex)


def nilpotent_triple(rng, n=2, m=3):
    A1, A2 = md.random_model_params(n, rng)
    return md.compress_to_comodel(md.build_model(A1, A2, m), m)


def test_space_and_layout():
    sp = md.TruncatedHardy(3, 4)
    assert sp.dim == 12 and sp.layout == "mode-major"
    assert sp.block(2) == slice(6, 9)
    with pytest.raises(ValueError):
        md.TruncatedHardy(2, 1)


def test_build_model_examples(ex47):
    mt = md.build_model(np.zeros((2, 2)), np.zeros((2, 2)), 3)
    assert np.allclose(mt.Q1, 0) and np.allclose(mt.Q2, 0)
    assert np.allclose(mt.V, np.kron(md.shift_matrix(3), np.eye(2)))
    mt = md.build_model([[0.5]], [[0.5]], 2)
    assert np.allclose(mt.Q1, [[0.5, 0], [0.5, 0.5]])
    assert np.allclose(mt.Q2, [[0.5, 0], [0.5, 0.5]])
    A1, A2 = ex47
    for N in (2, 5, 9):
        mt = md.build_model(A1, A2, N)
        assert mt.commutators == (0.0, 0.0, 0.0)
        assert mt.hypothesis == {"commutator": 0.0, "self_commutator_gap": 0.0}


def test_model_block_structure(rng):
    A1, A2 = md.random_model_params(2, rng)
    mt = md.build_model(A1, A2, 4)
    sp = mt.space
    # Q1 acts as A1* on the diagonal and A2 one mode down
    assert np.allclose(mt.Q1[sp.block(1), sp.block(1)], A1.conj().T)
    assert np.allclose(mt.Q1[sp.block(2), sp.block(1)], A2)
    assert np.allclose(mt.Q2[sp.block(3), sp.block(2)], A1)
    assert np.allclose(mt.Q1[sp.block(1), sp.block(2)], 0)
    assert max(mt.commutators) < 1e-12


def test_build_model_rejects_hypothesis_violations():
    with pytest.raises(HypothesisError) as info:
        md.build_model(E(0, 1), E(1, 0), 3)
    assert info.value.residuals["commutator"] > 0


def test_random_params_satisfy_hypotheses(rng):
    for n in (1, 2, 4):
        A1, A2 = md.random_model_params(n, rng)
        res = md.hypothesis_residuals(A1, A2)
        assert max(res.values()) < 1e-12
        assert md.symbol_sup_norm(A1, A2, 512) == pytest.approx(0.9)


def test_compression_examples(rng):
    A1, A2 = md.random_model_params(2, rng)
    mt = md.build_model(A1, A2, 4)
    tr = md.compress_to_comodel(mt, 4)
    assert np.array_equal(tr.T1, mt.Q1) and np.array_equal(tr.T3, mt.V)
    z = np.zeros((2, 2))
    tr = md.compress_to_comodel(md.build_model(z, z, 6), 3)
    assert np.allclose(tr.T3, np.kron(md.shift_matrix(3), np.eye(2)))
    tr = md.compress_to_comodel(md.build_model([[0.5]], [[0.5]], 5), 2)
    assert np.allclose(tr.T3, [[0, 0], [1, 0]])
    assert np.allclose(tr.T1, [[0.5, 0], [0.5, 0.5]]) and np.allclose(tr.T2, tr.T1)
    with pytest.raises(ValueError):
        md.compress_to_comodel(mt, 1)


def test_compression_is_contractive_triple(rng):
    tr = nilpotent_triple(rng, 3, 4)
    assert max(tr.residuals) < 1e-12
    assert all(la.operator_norm(T) <= 1 + 1e-12 for T in tr)
    assert np.allclose(np.linalg.matrix_power(tr.T3, 4), 0)


def test_embed_W_examples(rng):
    tr = fo.make_triple(np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 2)))
    emb = md.embed_W(tr, 4)
    assert np.allclose(emb.W[:2], np.eye(2)) and np.allclose(emb.W[2:], 0)
    emb = md.embed_W([[0.5]], 30)
    want = np.sqrt(3) / 2 * 0.5 ** np.arange(30)
    assert np.allclose(emb.W[:, 0], want)
    assert la.operator_norm(emb.W) ** 2 == pytest.approx(0.75 * sum(0.25**k for k in range(30)))
    tr = nilpotent_triple(rng, 2, 3)
    emb = md.embed_W(tr, 5)
    assert emb.tail == 0
    assert np.allclose(emb.W.conj().T @ emb.W, np.eye(tr.order), atol=1e-12)


def test_embed_W_errors(rng):
    with pytest.raises(PurityError):
        md.embed_W(la.random_unitary(2, rng), 8)
    with pytest.raises(TailError) as info:
        md.embed_W([[0.9]], 8)
    assert info.value.tail == pytest.approx(0.9**8)


@pytest.mark.parametrize("seed", range(5))
def test_dilation_with_inclusion_is_exact(seed):
    rng = np.random.default_rng(seed)
    A1, A2 = md.random_model_params(int(rng.integers(1, 4)), rng)
    mt = md.build_model(A1, A2, 8)
    tr = md.compress_to_comodel(mt, 4)
    rep = md.verify_dilation(tr, mt, inclusion(mt, 4))
    assert rep.passed
    assert max(rep.intertwining) < 1e-12 and rep.monomial_max < 1e-12
    assert rep.isometry_defect < 1e-15


@pytest.mark.parametrize("seed", range(5))
def test_dilate_compressions(seed):
    rng = np.random.default_rng(seed)
    tr = nilpotent_triple(rng, int(rng.integers(1, 4)), 4)
    mt, emb = md.dilate(tr, 8)
    rep = md.verify_dilation(tr, mt, emb, max_degree=4)
    assert rep.passed, rep
    assert rep.tail == 0 and rep.monomial_max < 1e-9


def test_dilation_scalar_and_degree_zero():
    b1, b2 = 0.3, 0.2j
    tr = fo.make_triple([[b1]], [[b2]], [[0.0]])
    mt, emb = md.dilate(tr, 4)
    assert np.allclose(mt.A1, [[np.conj(b1)]]) and np.allclose(mt.A2, [[np.conj(b2)]])
    rep = md.verify_dilation(tr, mt, emb)
    assert rep.monomial_max < 1e-15
    rep0 = md.verify_dilation(tr, mt, emb, max_degree=0)
    assert list(rep0.monomials) == [(0, 0, 0)]
    assert rep0.monomial_max == rep0.isometry_defect


def test_dilation_with_tail():
    t = 0.5
    tr = fo.make_triple([[0.2]], [[0.1]], [[t]])
    mt, emb = md.dilate(tr, 60)
    rep = md.verify_dilation(tr, mt, emb, max_degree=3)
    assert rep.passed and 0 < rep.tail < 1e-15


def test_characteristic_function_examples(rng):
    theta = md.characteristic_function(np.zeros((2, 2)), 0.3 + 0.1j)
    assert np.allclose(theta, (0.3 + 0.1j) * np.eye(2))
    t = 0.4 - 0.2j
    for z in (0, 0.5, 0.3j - 0.6):
        th = md.characteristic_function([[t]], z)
        assert th[0, 0] == pytest.approx((z - t) / (1 - np.conj(t) * z), abs=1e-14)
    th = md.characteristic_function(la.random_unitary(3, rng), 0.5)
    assert th.shape == (0, 0)


def test_characteristic_function_is_contractive(rng):
    for _ in range(5):
        T = crandn(rng, 3, 3)
        T /= la.operator_norm(T) * 1.01
        for z in 0.95 * np.exp(2j * np.pi * rng.random(4)):
            assert la.operator_norm(md.characteristic_function(T, z)) <= 1 + 1e-12


def test_kernel_identity(rng):
    T = crandn(rng, 4, 4)
    T /= la.operator_norm(T) * 1.2
    for z in (0, 0.5j, -0.8):
        for w in (0.3, 0.9j):
            assert md.kernel_identity_residual(T, z, w) < 1e-12


def test_resolvent_error():
    with pytest.raises(ResolventError):
        md.characteristic_function(np.diag([0.5, 1.0]), 1.0)


def test_theta_coefficients_match_taylor(rng):
    T = crandn(rng, 3, 3)
    T /= la.operator_norm(T) * 1.5
    coeffs = md.theta_coefficients(T, 40)
    z = 0.3 + 0.2j
    series = sum(c * z**k for k, c in enumerate(coeffs))
    assert np.allclose(series, md.characteristic_function(T, z), atol=1e-12)


def test_toeplitz_multiplier_structure():
    c = [np.array([[1.0]]), np.array([[2.0]])]
    M = md.toeplitz_multiplier(c, 3)
    assert np.allclose(M, [[1, 0, 0], [2, 1, 0], [0, 2, 1]])


def test_model_identity_examples(rng):
    rep = md.verify_model_identity(np.zeros((2, 2)), 6, 0)
    assert rep.residual < 1e-15 and rep.passed
    tr = nilpotent_triple(rng, 2, 3)
    rep = md.verify_model_identity(tr, 6, 2)
    assert rep.residual <= 1e-10
    rep = md.verify_model_identity([[0.5]], 64, 8)
    assert rep.residual <= 1e-9 and rep.passed
    with pytest.raises(ValueError):
        md.verify_model_identity([[0.5]], 8, 8)


def test_tail_norm():
    assert md.tail_norm([[0.5]], 3) == pytest.approx(0.125)
    assert md.tail_norm(md.shift_matrix(4), 4) == 0
