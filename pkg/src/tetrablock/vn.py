"""Polynomials in three commuting variables, their evaluation on matrices
and points, and a sampled von Neumann inequality check.

For a triple whose fundamental operators ``(A1, A2)`` commute and satisfy
``[A1^*, A1] = [A2^*, A2]``, and whose adjoint has a pure last entry, every
polynomial obeys

    ||p(T1, T2, T3)|| <= max |p(conj x)| over points x of the variety of
                          (A1, A2) lying over |x3| = 1.

The conjugation comes from realizing ``T`` as a compression of adjoint
Toeplitz operators: ``p(T_phi^*, ...)`` has the norm of ``p_*(T_phi, ...)``
with ``p_*(x) = conj(p(conj x))``. Conjugation maps the distinguished
boundary to itself, so the conjugated points are again boundary points.
:func:`verify_vn` samples that boundary curve and compares.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import EmptyBoundaryError, PolynomialSyntaxError, TetrablockError
from .fundops import OperatorTriple, check_pure, extract_fundamental
from .geometry import RegionTag, TetraPoint
from .linalg import DEFAULT_TOL, Tolerance
from .variety import VarietyParams, VarietyPointCloud, circle_samples, sample_variety
from .model import hypothesis_residuals, symbol_sup_norm

DEFAULT_BOUNDARY_GRID = 2048
Exponent = tuple[int, int, int]


@dataclass(frozen=True)
class Poly3:
    """``sum c[i, j, k] x1^i x2^j x3^k``.

    Coefficients are complex scalars or, for matrix-valued polynomials,
    square arrays of one common size.
    """

    terms: dict[Exponent, object]

    def __post_init__(self):
        clean = {}
        for e, c in self.terms.items():
            e = tuple(int(v) for v in e)
            if len(e) != 3 or min(e) < 0:
                raise ValueError(f"bad exponent {e}")
            c = np.asarray(c, dtype=complex) if np.ndim(c) else complex(c)
            if not np.all(np.isfinite(c)):
                raise ValueError("non-finite coefficient")
            clean[e] = c
        object.__setattr__(self, "terms", clean)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    @property
    def coeff_shape(self) -> tuple[int, ...]:
        for c in self.terms.values():
            return np.shape(c)
        return ()

    @property
    def is_matrix(self) -> bool:
        return self.coeff_shape != ()

    def coeff_norm(self) -> float:
        """Sum of coefficient (operator) norms."""
        return sum(
            la.operator_norm(c) if np.ndim(c) else abs(c) for c in self.terms.values()
        )

    def lipschitz(self) -> float:
        """Bound on ``|p(x) - p(y)| / max_i |x_i - y_i|`` over the closed
        unit polydisc: ``sum |c| * (i + j + k)``."""
        return sum(
            (la.operator_norm(c) if np.ndim(c) else abs(c)) * sum(e)
            for e, c in self.terms.items()
        )

    def __mul__(self, other: "Poly3") -> "Poly3":
        out: dict[Exponent, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                c = c1 @ c2 if np.ndim(c1) and np.ndim(c2) else c1 * c2
                out[e] = out[e] + c if e in out else c
        return Poly3(out)

    def __str__(self) -> str:
        return format_poly(self)


def _monomial_powers(mats, exps) -> dict[tuple[int, int], np.ndarray]:
    """``M^e`` for each needed exponent, by repeated squaring."""
    cache: dict[tuple[int, int], np.ndarray] = {}
    for v, e in exps:
        if (v, e) in cache:
            continue
        M = mats[v]
        result = np.eye(M.shape[0], dtype=complex)
        base = M
        k = e
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        cache[(v, e)] = result
    return cache


def eval_poly_triple(p: Poly3, tr) -> np.ndarray:
    """``p(T1, T2, T3)``; matrix coefficients ``C`` enter as ``T^a (x) C``."""
    mats = [la.as_matrix(T) for T in tr]
    d = mats[0].shape[0]
    need = {(v, e[v]) for e in p.terms for v in range(3)}
    pw = _monomial_powers(mats, need)
    shape = p.coeff_shape
    k = shape[0] if shape else 1
    out = np.zeros((d * k, d * k), dtype=complex)
    for e, c in p.terms.items():
        mono = pw[(0, e[0])] @ pw[(1, e[1])] @ pw[(2, e[2])]
        out += np.kron(mono, c) if shape else c * mono
    return out


def eval_poly_point(p: Poly3, pt):
    """Scalar value, or a matrix for matrix coefficients."""
    x = [complex(v) for v in pt]
    val = 0.0
    for e, c in p.terms.items():
        val = val + c * (x[0] ** e[0] * x[1] ** e[1] * x[2] ** e[2])
    if p.is_matrix and np.ndim(val) == 0:
        return np.zeros(p.coeff_shape, dtype=complex)
    return val if p.is_matrix else complex(val)


def _value_norm(v) -> float:
    return la.operator_norm(v) if np.ndim(v) else abs(v)


def eval_poly_points(p: Poly3, X: np.ndarray) -> np.ndarray:
    """Vectorized scalar evaluation at the rows of an ``(m, 3)`` array."""
    X = np.asarray(X, dtype=complex).reshape(-1, 3)
    out = np.zeros(X.shape[0], dtype=complex)
    for e, c in p.terms.items():
        out += c * X[:, 0] ** e[0] * X[:, 1] ** e[1] * X[:, 2] ** e[2]
    return out


def _filtered_points(cloud: VarietyPointCloud, boundary_only: bool) -> np.ndarray:
    return np.array(
        [
            list(pt)
            for pt, _, tag in cloud.rows()
            if not boundary_only or tag is RegionTag.DISTINGUISHED_BOUNDARY
        ],
        dtype=complex,
    ).reshape(-1, 3)


def variety_sup(
    p: Poly3, cloud: VarietyPointCloud | np.ndarray, boundary_only: bool = True
) -> tuple[float, TetraPoint]:
    """Largest ``|p|`` (operator norm for matrix coefficients) over the
    cloud, optionally restricted to distinguished-boundary points.

    ``cloud`` may also be an ``(m, 3)`` array of already filtered points.
    """
    X = cloud if isinstance(cloud, np.ndarray) else _filtered_points(cloud, boundary_only)
    if X.shape[0] == 0:
        raise EmptyBoundaryError("no distinguished-boundary points; sample the boundary more densely")
    if p.is_matrix:
        vals = np.array([_value_norm(eval_poly_point(p, x)) for x in X])
    else:
        vals = np.abs(eval_poly_points(p, X))
    i = int(np.argmax(vals))
    return float(vals[i]), TetraPoint(*(complex(v) for v in X[i]))


# ---------------------------------------------------------------- parsing

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TOKEN = re.compile(
    rf"\s*(?:(?P<num>{_NUM})(?P<imag>[ij](?![a-z0-9]))?|(?P<var>x[123])|(?P<i>[ij](?![a-z0-9]))"
    r"|(?P<op>\*\*|[-+*^()]))"
)
# conj(x1), bar, ~x1, x1' and a trailing star as in x1* all denote conjugates
_FORBIDDEN = re.compile(r"conj|bar|~|'|x[123]\s*\*(?!\*)\s*(?:$|[-+)])")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolynomialSyntaxError(f"unexpected input at position {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group("num") is not None:
            val = float(m.group("num"))
            out.append(("num", complex(0, val) if m.group("imag") else complex(val)))
        elif m.group("var"):
            out.append(("var", int(m.group("var")[1]) - 1))
        elif m.group("i"):
            out.append(("num", 1j))
        else:
            out.append(("op", "^" if m.group("op") == "**" else m.group("op")))
    return out


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, kind, val=None):
        k, v = self.take()
        if k != kind or (val is not None and v != val):
            raise PolynomialSyntaxError(f"expected {val or kind}, got {v!r}")
        return v

    def poly(self) -> dict[Exponent, complex]:
        terms: dict[Exponent, complex] = {}
        sign = 1.0
        k, v = self.peek()
        if k == "op" and v in "+-":
            self.take()
            sign = -1.0 if v == "-" else 1.0
        while True:
            e, c = self.term()
            terms[e] = terms.get(e, 0j) + sign * c
            k, v = self.peek()
            if k is None:
                return terms
            if k == "op" and v in "+-":
                self.take()
                sign = -1.0 if v == "-" else 1.0
            else:
                raise PolynomialSyntaxError(f"unexpected token {v!r}")

    def term(self) -> tuple[Exponent, complex]:
        coef = 1 + 0j
        exps = [0, 0, 0]
        got = False
        while True:
            k, v = self.peek()
            if k == "num":
                self.take()
                coef *= v
            elif k == "op" and v == "(":
                self.take()
                coef *= self.paren_complex()
            elif k == "var":
                self.take()
                power = 1
                if self.peek() == ("op", "^"):
                    self.take()
                    nk, nv = self.take()
                    if nk != "num" or nv.imag or nv.real != int(nv.real) or nv.real < 0:
                        raise PolynomialSyntaxError(f"exponent must be a nonnegative integer, got {nv!r}")
                    power = int(nv.real)
                exps[v] += power
            else:
                break
            got = True
            if self.peek() == ("op", "*"):
                self.take()
                if self.peek()[0] is None:
                    raise PolynomialSyntaxError("dangling '*'")
        if not got:
            raise PolynomialSyntaxError(f"empty term near token {self.peek()[1]!r}")
        return tuple(exps), coef

    def paren_complex(self) -> complex:
        total = 0j
        sign = 1.0
        first = True
        while True:
            k, v = self.take()
            if k == "op" and v in "+-":
                sign = -1.0 if v == "-" else 1.0
                k, v = self.take()
            elif not first:
                raise PolynomialSyntaxError("expected '+' or '-' inside parentheses")
            if k != "num":
                raise PolynomialSyntaxError(f"expected a number inside parentheses, got {v!r}")
            if self.peek() == ("num", 1j):
                self.take()
                v = v * 1j
            elif self.peek() == ("op", "*") and self.toks[self.i + 1:self.i + 2] == [("num", 1j)]:
                self.i += 2
                v = v * 1j
            total += sign * v
            sign, first = 1.0, False
            if self.peek() == ("op", ")"):
                self.take()
                return total


def parse_poly(text: str) -> Poly3:
    """Parse a holomorphic polynomial in ``x1, x2, x3``.

    Terms are separated by ``+``/``-``; a term is a product of numeric
    factors and powers ``x1^i`` (or ``x1**i``) joined by ``*`` or
    juxtaposition. Numbers may carry an ``i``/``j`` suffix, and a full
    complex coefficient is written in parentheses, e.g. ``(0.5-2i)*x1 x3^2``.
    Conjugated variables are rejected.
    """
    if not text or not text.strip():
        raise PolynomialSyntaxError("empty polynomial")
    if _FORBIDDEN.search(text):
        raise PolynomialSyntaxError("conjugates are not allowed: polynomials must be holomorphic")
    terms = _Parser(_tokenize(text)).poly()
    return Poly3({e: c for e, c in terms.items() if c != 0} or {(0, 0, 0): 0j})


def _fmt_complex(c: complex) -> str:
    return f"({c.real:.17g}{c.imag:+.17g}i)"


def format_poly(p: Poly3) -> str:
    """Round-trippable text form (scalar coefficients only)."""
    if p.is_matrix:
        return f"<matrix polynomial of degree {p.degree}>"
    parts = []
    for e in sorted(p.terms):
        mono = " ".join(f"x{v + 1}^{e[v]}" for v in range(3) if e[v])
        parts.append(_fmt_complex(p.terms[e]) + (f" {mono}" if mono else ""))
    return " + ".join(parts)


def monomials(max_degree: int) -> list[Exponent]:
    return [
        (i, j, k)
        for d in range(max_degree + 1)
        for i in range(d + 1)
        for j in range(d - i + 1)
        for k in [d - i - j]
    ]


def random_polys(count: int, seed: int = 42, max_degree: int = 3) -> list[Poly3]:
    """Seeded polynomials: each monomial of degree ``<= max_degree`` is kept
    with probability 1/2 (at least one kept), coefficients uniform in the
    unit disc."""
    rng = np.random.default_rng(seed)
    monos = monomials(max_degree)
    out = []
    for _ in range(count):
        keep = rng.random(len(monos)) < 0.5
        if not keep.any():
            keep[rng.integers(len(monos))] = True
        r = np.sqrt(rng.random(len(monos)))
        t = rng.uniform(0, 2 * np.pi, len(monos))
        out.append(Poly3({m: r[i] * np.exp(1j * t[i]) for i, m in enumerate(monos) if keep[i]}))
    return out


# ---------------------------------------------------------------- verifier


@dataclass(frozen=True)
class VNItem:
    poly: Poly3
    lhs: float
    rhs: float
    margin: float
    argmax: TetraPoint

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs + self.margin

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + self.margin


@dataclass(frozen=True)
class VNReport:
    hypotheses_met: bool
    hypotheses: dict[str, float]
    items: list[VNItem] = field(default_factory=list)
    boundary_grid: int = DEFAULT_BOUNDARY_GRID
    speed: float = 1.0
    conjugate: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(it.passed for it in self.items)

    @property
    def all_passed(self) -> bool:
        return self.hypotheses_met and all(it.passed for it in self.items)


def boundary_cloud(
    vp: VarietyParams, grid: int = DEFAULT_BOUNDARY_GRID, seed: int = 0, threads: int = 1
) -> VarietyPointCloud:
    return sample_variety(vp, circle_samples(1.0, grid), seed=seed, threads=threads)


def verify_vn(
    tr: OperatorTriple,
    polys: list[Poly3],
    boundary_grid: int = DEFAULT_BOUNDARY_GRID,
    tol: Tolerance = DEFAULT_TOL,
    margin_tol: float = 1e-9,
    seed: int = 0,
    threads: int = 1,
    conjugate: bool = True,
) -> VNReport:
    """Compare ``||p(T)||`` with the sampled boundary maximum of ``|p|``.

    The boundary curve is parametrized by ``x3 = e^{it}``; its points move
    with speed at most ``max(1, ||A1||, ||A2||)``, so the true maximum exceeds
    the sampled one by at most ``lipschitz(p) * speed * 2 pi / grid``. Each
    polynomial passes iff ``lhs <= rhs + margin`` with that bound plus
    ``margin_tol``. When the hypotheses fail the report carries no items.

    With ``conjugate=False`` ``|p|`` is maximized over the sampled points
    themselves instead of their conjugates. That reading is not a valid
    bound in general and is kept only for comparison.
    """
    hyp: dict[str, float] = {}
    notes: list[str] = []
    try:
        fp = extract_fundamental(tr, tol)
    except TetrablockError as exc:
        return VNReport(False, hyp, boundary_grid=boundary_grid, notes=[f"fundamental operators: {exc}"])
    hyp.update(hypothesis_residuals(fp.A1, fp.A2))
    hyp["fundamental_residual"] = max(fp.residual1, fp.residual2)
    scale = 1.0 + max(la.operator_norm(fp.A1), la.operator_norm(fp.A2)) ** 2 if fp.order else 1.0
    ok = all(hyp[k] <= tol.bound(scale) for k in ("commutator", "self_commutator_gap"))
    if not ok:
        notes.append("fundamental operators violate the commutation hypotheses")
    if not check_pure(tr.T3.conj().T, tol=tol):
        ok = False
        notes.append("T3^* is not pure")
    if not ok:
        return VNReport(False, hyp, boundary_grid=boundary_grid, notes=notes)
    vp = VarietyParams(fp.A1, fp.A2, hyp, symbol_sup_norm(fp.A1, fp.A2), 256)
    cloud = boundary_cloud(vp, boundary_grid, seed, threads)
    if cloud.failures:
        notes.append(f"{len(cloud.failures)} boundary samples failed")
    speed = max(1.0, la.operator_norm(fp.A1), la.operator_norm(fp.A2)) if fp.order else 1.0
    spacing = 2.0 * math.pi / boundary_grid
    X = _filtered_points(cloud, boundary_only=True)
    if conjugate:
        X = X.conj()
    items = []
    for p in polys:
        lhs = la.operator_norm(eval_poly_triple(p, tr))
        rhs, arg = variety_sup(p, X)
        margin = p.lipschitz() * speed * spacing + margin_tol
        items.append(VNItem(p, lhs, rhs, margin, arg))
    return VNReport(True, hyp, items, boundary_grid, speed, conjugate, notes)

