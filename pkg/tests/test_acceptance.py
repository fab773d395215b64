"""Acceptance criteria, each at its stated tolerance.

Every test records one ``PASS``/``FAIL`` line, printed in the terminal
summary (and to stdout when run with ``-s``).
"""

from __future__ import annotations

import io
import json
import time
from contextlib import redirect_stdout

import numpy as np
import pytest

from tetrablock import cli, fundops, geometry, jointspec, linalg, model, variety, vn

from conftest import ACCEPTANCE_LINES, crandn, planted_pair

pytestmark = pytest.mark.acceptance


def record(num: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {num:>2}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def factory_pairs(count: int, seed: int, max_n: int = 4):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        out.append(model.random_model_params(n, rng, sup_norm=0.9))
    return out


@pytest.fixture(scope="module")
def compressions():
    """50 seeded parameter pairs with their ``N = 16`` models compressed to 8 modes."""
    out = []
    for A1, A2 in factory_pairs(50, 4):
        mt = model.build_model(A1, A2, 16)
        out.append((A1, A2, mt, model.compress_to_comodel(mt, 8)))
    return out


def test_criterion_01_example_46(ex46):
    A, B = ex46
    zs = np.exp(2j * np.pi * np.arange(512) / 512)
    radius_err = max(abs(linalg.numerical_radius(A + B * z) - 1) for z in zs)
    buf = io.StringIO()
    t0 = time.perf_counter()
    with redirect_stdout(buf):
        code = cli.main(["variety", "--preset", "ex46"])
    elapsed = time.perf_counter() - t0
    rep = json.loads(buf.getvalue())
    witness = np.array([complex(*v) for v in rep["witness"]])
    werr = float(np.abs(witness - [1, 0, 0]).max())
    tag = geometry.classify_tetra(witness)
    ok = (
        radius_err <= 1e-8
        and code == 3
        and rep["verdict"] == "NotDistinguished"
        and rep["witness_tag"] == "OtherTopBoundary"
        and tag is geometry.RegionTag.OTHER_TOP_BOUNDARY
        and werr <= 1e-8
        and elapsed < 1.0
    )
    record(1, "ex46 preset: not distinguished, witness (1,0,0)", ok,
           f"radius err {radius_err:.1e}, exit {code}, witness err {werr:.1e}, {elapsed:.2f} s")


def test_criterion_02_example_47(ex47):
    t0 = time.perf_counter()
    vp = variety.variety_params(*ex47, grid=256)
    rep = variety.classify_distinguished(vp, boundary_grid=256)
    elapsed = time.perf_counter() - t0
    worst = 0.0
    boundary_ok = True
    nb = 0
    for pt, _, tag in rep.cloud.rows():
        x, x3 = pt.x1, pt.x3
        worst = max(worst, abs(x * (x3 - x * x)))
        if abs(abs(x3) - 1) <= geometry.BAND:
            nb += 1
            boundary_ok &= tag is geometry.RegionTag.DISTINGUISHED_BOUNDARY
    ok = (
        worst <= 1e-8
        and boundary_ok
        and nb == 3 * 256
        and rep.verdict is variety.Verdict.DISTINGUISHED_EMPIRICAL
        and elapsed < 5.0
    )
    record(2, "ex47 preset: distinguished", ok,
           f"max |x(x3-x^2)| {worst:.1e}, {nb} boundary points, {rep.verdict.value}, {elapsed:.2f} s")


def test_criterion_03_joint_spectrum_oracle():
    worst = 0.0
    passed = 0
    for seed in range(100):
        rng = np.random.default_rng(1000 + seed)
        n = int(rng.integers(1, 9))
        A, B, planted = planted_pair(rng, n)
        sp = jointspec.joint_spectrum(A, B, seed=seed)
        d = linalg.match_distance(sp.pairs, planted)
        worst = max(worst, d)
        passed += d <= 1e-7
    record(3, "joint-spectrum oracle suite", passed == 100, f"{passed}/100, worst {worst:.1e}")


def test_criterion_04_fundamental_round_trip(compressions):
    worst = 0.0
    passed = 0
    for A1, A2, _, tr in compressions:
        fp = fundops.extract_fundamental(tr)
        # the basis is canonical, so the direct distance bounds the
        # unitary-invariant one
        d = max(linalg.operator_norm(fp.A1 - A1.conj().T), linalg.operator_norm(fp.A2 - A2.conj().T))
        worst = max(worst, d)
        passed += d <= 1e-9
    record(4, "fundamental-operator round trip", passed == 50, f"{passed}/50, worst {worst:.1e}")


def test_criterion_05_dilation_residuals(compressions):
    t0 = time.perf_counter()
    worst = 0.0
    passed = 0
    for _, _, mt, tr in compressions:
        mt2, emb = model.dilate(tr, 16)
        rep = model.verify_dilation(tr, mt2, emb, max_degree=4)
        # the compression is also dilated by its own model through the inclusion
        k = tr.order
        rep2 = model.verify_dilation(tr, mt, np.eye(mt.space.dim, k), max_degree=4)
        m = max(rep.monomial_max, max(rep.intertwining), rep2.monomial_max, max(rep2.intertwining))
        worst = max(worst, m)
        passed += m <= 1e-9 and rep.tail == 0
    elapsed = time.perf_counter() - t0
    record(5, "dilation residuals", passed == 50 and elapsed < 30,
           f"{passed}/50, worst {worst:.1e}, {elapsed:.1f} s")


def test_criterion_06_model_identity():
    worst_nil = 0.0
    rng = np.random.default_rng(66)
    for A1, A2 in factory_pairs(10, 6, max_n=3):
        for m in (2, 4, 6):
            tr = model.compress_to_comodel(model.build_model(A1, A2, m), m)
            # a unitary change of basis keeps T3 nilpotent of index m
            U = linalg.random_unitary(tr.order, rng)
            for T3 in (tr.T3, U @ tr.T3 @ U.conj().T):
                rep = model.verify_model_identity(T3, N=2 * m, buffer=min(8, m))
                worst_nil = max(worst_nil, rep.residual)
    scal = model.verify_model_identity([[0.9]], N=256, buffer=16)
    ok = worst_nil <= 1e-8 and scal.residual <= 1e-6
    record(6, "model identity", ok,
           f"nilpotent worst {worst_nil:.1e}, scalar 0.9 at N=256 {scal.residual:.1e}")


def test_criterion_07_kernel_identity():
    pts = 0.9 * np.exp(2j * np.pi * np.arange(5) / 5)
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(700 + seed)
        n = int(rng.integers(1, 5))
        T = crandn(rng, n, n)
        T *= rng.uniform(0.2, 1.0) / linalg.operator_norm(T)
        for z in pts:
            for w in pts:
                worst = max(worst, model.kernel_identity_residual(T, z, w))
    record(7, "characteristic-function kernel identity", worst <= 1e-8, f"worst {worst:.1e}")


def test_criterion_08_von_neumann():
    t0 = time.perf_counter()
    polys = vn.random_polys(200, 42, max_degree=3)
    violations = 0
    worst = np.inf
    met = 0
    for A1, A2 in factory_pairs(20, 8, max_n=3):
        tr = model.compress_to_comodel(model.build_model(A1, A2, 16), 8)
        rep = vn.verify_vn(tr, polys, boundary_grid=2048)
        met += rep.hypotheses_met
        violations += len(rep.items) - rep.passed
        worst = min(worst, min(it.slack for it in rep.items))
    elapsed = time.perf_counter() - t0
    ok = met == 20 and violations == 0 and elapsed < 120
    record(8, "von Neumann property suite", ok,
           f"{violations} violations in 4000, min slack {worst:.2e}, {elapsed:.1f} s")


def test_criterion_09_geometry_cross_validation():
    rng = np.random.default_rng(9)
    R = geometry.RegionTag
    disagree = 0

    def point(s):
        frac = rng.random()
        b1 = s * frac * np.exp(2j * np.pi * rng.random())
        b2 = s * (1 - frac) * np.exp(2j * np.pi * rng.random())
        x3 = rng.uniform(0, 0.999) * np.exp(2j * np.pi * rng.random())
        return geometry.beta_compose(b1, b2, x3)

    for _ in range(1000):
        pt = point(rng.uniform(0, 0.999))
        disagree += not (
            geometry.classify_tetra(pt) is R.INTERIOR
            and geometry.kernel_check(pt, 128)[0]
            and geometry.gamma_lift_check(pt, 64)
        )
    for _ in range(1000):
        # a margin of 1% keeps the violation arc wider than the 64-sample spacing
        pt = point(rng.uniform(1.01, 3.0))
        disagree += not (
            geometry.classify_tetra(pt) is R.OUTSIDE
            and not geometry.kernel_check(pt, 128)[0]
            and not geometry.gamma_lift_check(pt, 64)
        )
    sandwich = 0
    for _ in range(500):
        n = int(rng.integers(1, 7))
        A = crandn(rng, n, n)
        w = linalg.numerical_radius(A)
        nrm = linalg.operator_norm(A)
        sandwich += not (nrm / 2 - 1e-9 <= w <= nrm + 1e-9)
    record(9, "geometry cross-validation", disagree == 0 and sandwich == 0,
           f"{disagree} disagreements in 2000, {sandwich} sandwich failures in 500")


def test_criterion_10_radius_closure():
    rng = np.random.default_rng(10)
    worst = 0.0
    used = 0
    while used < 100:
        n = int(rng.integers(1, 5))
        A1, A2 = crandn(rng, n, n), crandn(rng, n, n)
        r = fundops.fundamental_radius(A1, A2)
        # half the pairs sit on the boundary of the hypothesis
        f = 1.0 if used % 2 == 0 else rng.uniform(0.3, 1.0)
        A1, A2 = A1 * f / r, A2 * f / r
        fp = fundops.FundamentalPair(A1, A2, np.eye(n), 0.0, 0.0)
        ok, _ = fundops.verify_fundamental_radius(fp)
        if not ok:
            continue
        used += 1
        s1 = fundops.fundamental_radius(A1.conj().T, A2)
        s2 = fundops.fundamental_radius(A1, A2.conj().T)
        worst = max(worst, s1, s2)
    record(10, "radius closure under adjoints", worst <= 1 + 1e-8, f"max sweep {worst:.17g}")
