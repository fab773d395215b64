"""Command-line interface: ``tetra <subcommand> [options]``.

Exit codes: 0 success, 2 parse error, 3 negative verdict, 4 inconclusive,
5 failed precondition. ``TETRA_SEED`` overrides ``--seed``.
"""

from __future__ import annotations

import argparse
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import fundops, geometry, jointspec, model, variety, vn
from .errors import (
    DimensionError,
    HypothesisError,
    NotCommutingError,
    NotContractionError,
    PolynomialSyntaxError,
    PurityError,
    TailError,
    TetrablockError,
    UnsolvableError,
)
from .linalg import Tolerance
from .serialize import (
    cloud_to_csv,
    decode_matrix,
    dumps,
    encode_complex,
    load_json,
    load_matrix,
    parse_point,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NEGATIVE = 3
EXIT_INCONCLUSIVE = 4
EXIT_PRECONDITION = 5
DEFAULT_SEED = 42
PRESETS = ("ex46", "ex47")


class ParseFailure(Exception):
    pass


class PreconditionFailure(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_PARSE)


# ---------------------------------------------------------------- helpers


def _seed(args) -> int:
    env = os.environ.get("TETRA_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ParseFailure(f"TETRA_SEED must be an integer, got {env!r}") from None
    return args.seed


def _tol(args) -> Tolerance:
    return Tolerance(args.tol_abs, args.tol_rel)


def _point(text: str, size: int = 3):
    try:
        return parse_point(text, size)
    except ValueError as exc:
        raise ParseFailure(str(exc)) from None


def _matrix(path: str) -> np.ndarray:
    try:
        return load_matrix(path)
    except (OSError, ValueError, KeyError) as exc:
        raise ParseFailure(f"{path}: {exc}") from None


def _preset(name: str) -> tuple[np.ndarray, np.ndarray]:
    text = resources.files("tetrablock").joinpath("data", f"{name}.json").read_text("utf-8")
    import json

    obj = json.loads(text)
    return decode_matrix(obj["A1"]), decode_matrix(obj["A2"])


def _params(args) -> tuple[np.ndarray, np.ndarray]:
    """``(A1, A2)`` from --preset, --a1/--a2 files, or scalar --a/--b."""
    if getattr(args, "preset", None):
        return _preset(args.preset)
    if getattr(args, "a1", None) or getattr(args, "a2", None):
        if not (args.a1 and args.a2):
            raise ParseFailure("--a1 and --a2 must be given together")
        return _matrix(args.a1), _matrix(args.a2)
    if getattr(args, "a", None) is not None or getattr(args, "b", None) is not None:
        from .serialize import parse_complex

        try:
            a = parse_complex(args.a or "0")
            b = parse_complex(args.b or "0")
        except ValueError as exc:
            raise ParseFailure(str(exc)) from None
        n = args.n or 1
        return a * np.eye(n, dtype=complex), b * np.eye(n, dtype=complex)
    raise ParseFailure("parameters required: --preset, --a1/--a2, or --a/--b")


def _triple_from_args(args, tol: Tolerance) -> fundops.OperatorTriple:
    if getattr(args, "triple", None):
        try:
            obj = load_json(args.triple)
            mats = [decode_matrix(obj[k]) for k in ("T1", "T2", "T3")]
        except (OSError, ValueError, KeyError) as exc:
            raise ParseFailure(f"{args.triple}: {exc}") from None
    elif getattr(args, "t1", None):
        if not (args.t2 and args.t3):
            raise ParseFailure("--t1, --t2 and --t3 must be given together")
        mats = [_matrix(p) for p in (args.t1, args.t2, args.t3)]
    else:
        A1, A2 = _params(args)
        mt = model.build_model(A1, A2, args.model_modes, tol=tol)
        return model.compress_to_comodel(mt, args.m)
    return fundops.make_triple(*mats, tol=tol)


def _write(args, payload) -> None:
    text = dumps(payload) + "\n"
    if getattr(args, "output", None):
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands


def cmd_classify(args) -> int:
    pts = [_point(p) for p in args.point]
    out = []
    for pt in pts:
        tag = geometry.classify_tetra(pt, closed=args.closed)
        entry = {"point": list(pt), "tag": tag}
        if abs(pt[2]) < 1.0 - geometry.BAND:
            entry["beta"] = list(geometry.beta_decompose(pt))
        ok, m = geometry.kernel_check(pt, args.grid)
        entry["kernel_check"] = {"zero_free": ok, "min_modulus": m}
        out.append(entry)
    _write(args, out[0] if len(out) == 1 else out)
    return EXIT_OK


def cmd_kernel_check(args) -> int:
    pt = _point(args.point)
    if args.grid < 8:
        raise ParseFailure("--grid must be >= 8")
    ok, m = geometry.kernel_check(pt, args.grid)
    _write(args, {"point": list(pt), "grid": args.grid, "zero_free": ok, "min_modulus": m})
    return EXIT_OK


def cmd_gamma(args) -> int:
    if args.lift:
        pt = _point(args.lift)
        if args.samples < 8:
            raise ParseFailure("--samples must be >= 8")
        ok = geometry.gamma_lift_check(pt, args.samples)
        _write(args, {
            "point": list(pt),
            "samples": args.samples,
            "lift_in_closure": ok,
            "tetrablock_tag": geometry.classify_tetra(pt),
        })
        return EXIT_OK
    if not args.point:
        raise ParseFailure("gamma needs --point s,p or --lift x1,x2,x3")
    gp = geometry.GammaPoint(*_point(args.point, 2))
    _write(args, {
        "s": gp.s,
        "p": gp.p,
        "roots": list(geometry.gamma_roots(gp)),
        "tag": geometry.gamma_classify(gp),
    })
    return EXIT_OK


def cmd_joint_eigs(args) -> int:
    A, B = _matrix(args.a), _matrix(args.b)
    tol = _tol(args)
    try:
        pair = jointspec.verify_commuting(A, B, tol)
    except NotCommutingError as exc:
        raise PreconditionFailure(str(exc)) from None
    spec = jointspec.joint_eigenvalues(pair, np.random.default_rng(_seed(args)), tol)
    _write(args, {
        "order": pair.order,
        "commutator": pair.residual,
        "pairs": [[a, b] for a, b in spec.pairs],
        "residuals": list(spec.residuals),
    })
    return EXIT_OK


def cmd_fundops(args) -> int:
    tol = _tol(args)
    tr = _triple_from_args(args, tol)
    try:
        fp = fundops.extract_fundamental(tr, tol)
    except (NotContractionError, UnsolvableError) as exc:
        raise PreconditionFailure(str(exc)) from None
    suff = fundops.check_sufficiency(tr, fp, args.grid, tol)
    _write(args, {
        "order": tr.order,
        "defect_rank": fp.order,
        "A1": fp.A1,
        "A2": fp.A2,
        "defect_basis": fp.defect_basis,
        "residuals": [fp.residual1, fp.residual2],
        "commutation_residuals": list(tr.residuals),
        "sufficiency": {
            "verdict": suff.verdict,
            "commutator": suff.commutator,
            "self_commutator_gap": suff.self_commutator_gap,
            "radius": suff.radius,
            "norms": list(suff.norms),
            "notes": suff.notes,
        },
        "pure": fundops.check_pure(tr.T3, tol=tol),
        "e_isometry": fundops.check_E_isometry(tr, tol),
        "e_unitary": fundops.check_E_unitary(tr, tol),
    })
    return EXIT_OK


_VERDICT_EXIT = {
    variety.Verdict.DISTINGUISHED: EXIT_OK,
    variety.Verdict.DISTINGUISHED_EMPIRICAL: EXIT_OK,
    variety.Verdict.NOT_DISTINGUISHED: EXIT_NEGATIVE,
    variety.Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
    variety.Verdict.HYPOTHESIS_VIOLATED: EXIT_PRECONDITION,
}


def cmd_variety(args) -> int:
    A1, A2 = _params(args)
    tol = _tol(args)
    try:
        vp = variety.variety_params(A1, A2, args.boundary_grid, tol)
    except HypothesisError as exc:
        raise PreconditionFailure(str(exc)) from None
    seed = _seed(args)
    radii = tuple(float(r) for r in args.radii.split(",")) if args.radii else variety.DEFAULT_RADII
    rep = variety.classify_distinguished(
        vp, args.boundary_grid, args.interior_grid, radii, args.delta,
        seed=seed, threads=args.threads,
    )
    cloud = rep.cloud
    if cloud is None:
        xs = np.concatenate(
            [variety.circle_samples(r, args.interior_grid) for r in radii if r < 1.0]
            + [variety.circle_samples(1.0, args.boundary_grid)]
        )
        cloud = variety.sample_variety(vp, xs, seed=seed, threads=args.threads, tol=tol)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            cloud_to_csv(cloud, fh)
    crit = variety.check_bDE_criterion(vp, args.boundary_grid, seed=seed)
    _write(args, {
        "verdict": rep.verdict,
        "sup_norm": rep.sup_norm,
        "witness": list(rep.witness) if rep.witness else None,
        "witness_tag": rep.witness_tag,
        "hypothesis": vp.hypothesis,
        "samples": len(cloud),
        "points": sum(1 for _ in cloud.rows()),
        "failures": len(cloud.failures),
        "bDE_criterion": {
            "disjoint_from_bDE": crit.disjoint_from_bDE,
            "sup_norm_lt_1": crit.sup_norm_lt_1,
            "agree": crit.agree,
        },
        "boundary_consistency": variety.boundary_consistency(cloud),
        "notes": rep.notes[:20],
    })
    return _VERDICT_EXIT[rep.verdict]


def cmd_model(args) -> int:
    A1, A2 = _params(args)
    tol = _tol(args)
    try:
        mt = model.build_model(A1, A2, args.N, periodic=args.periodic, tol=tol)
    except HypothesisError as exc:
        raise PreconditionFailure(str(exc)) from None
    payload = {
        "n": mt.space.fiber_dim,
        "N": mt.space.modes,
        "layout": mt.space.layout,
        "periodic": mt.periodic,
        "hypothesis": mt.hypothesis,
        "commutators": list(mt.commutators),
        "symbol_sup_norm": model.symbol_sup_norm(A1, A2),
        "A1": mt.A1,
        "A2": mt.A2,
    }
    if args.matrices:
        payload.update({"Q1": mt.Q1, "Q2": mt.Q2, "V": mt.V})
    if args.m:
        tr = model.compress_to_comodel(mt, args.m)
        payload["compression"] = {"m": args.m, "T1": tr.T1, "T2": tr.T2, "T3": tr.T3}
    _write(args, payload)
    return EXIT_OK


def cmd_dilation_check(args) -> int:
    tol = _tol(args)
    tr = _triple_from_args(args, tol)
    try:
        mt, emb = model.dilate(tr, args.N, args.tail_tol, tol)
        ident = model.verify_model_identity(tr, args.N, args.buffer, args.tail_tol)
    except (PurityError, TailError, NotContractionError, UnsolvableError, HypothesisError) as exc:
        raise PreconditionFailure(str(exc)) from None
    rep = model.verify_dilation(tr, mt, emb, args.max_degree)
    ok = rep.passed and ident.passed
    _write(args, {
        "order": tr.order,
        "N": args.N,
        "tail": rep.tail,
        "intertwining": list(rep.intertwining),
        "monomial_max": rep.monomial_max,
        "worst_monomial": list(rep.worst_monomial),
        "isometry_defect": rep.isometry_defect,
        "dilation_bound": rep.bound,
        "model_identity": {
            "residual": ident.residual,
            "buffer": ident.buffer,
            "bound": ident.bound,
        },
        "passed": ok,
    })
    return EXIT_OK if ok else EXIT_NEGATIVE


def _read_polys(args) -> list[vn.Poly3]:
    texts = list(args.poly or [])
    if args.polys:
        try:
            lines = Path(args.polys).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise ParseFailure(str(exc)) from None
        texts += [ln for ln in (s.strip() for s in lines) if ln and not ln.startswith("#")]
    polys = []
    for t in texts:
        try:
            polys.append(vn.parse_poly(t))
        except PolynomialSyntaxError as exc:
            raise ParseFailure(f"polynomial {t!r}: {exc}") from None
    if args.random:
        polys += vn.random_polys(args.random, _seed(args), args.max_degree)
    if not polys:
        raise ParseFailure("no polynomials: use --poly, --polys or --random")
    return polys


def cmd_vn(args) -> int:
    tol = _tol(args)
    polys = _read_polys(args)
    if not (args.triple or args.t1 or args.a1 or args.a is not None or args.preset):
        args.preset = "ex47"
    tr = _triple_from_args(args, tol)
    rep = vn.verify_vn(
        tr, polys, args.grid, tol, seed=_seed(args), threads=args.threads,
        conjugate=not args.literal,
    )
    payload = {
        "hypotheses_met": rep.hypotheses_met,
        "hypotheses": rep.hypotheses,
        "boundary_grid": rep.boundary_grid,
        "conjugate": rep.conjugate,
        "notes": rep.notes,
    }
    if not rep.hypotheses_met:
        _write(args, payload)
        print("hypotheses of the inequality not met", file=sys.stderr)
        return EXIT_PRECONDITION
    payload["passed"] = rep.passed
    payload["total"] = len(rep.items)
    payload["results"] = [
        {
            "poly": str(it.poly),
            "lhs": it.lhs,
            "rhs": it.rhs,
            "margin": it.margin,
            "slack": it.slack,
            "verdict": "PASS" if it.passed else "FAIL",
            "argmax": list(it.argmax),
        }
        for it in rep.items
    ]
    _write(args, payload)
    return EXIT_OK if rep.all_passed else EXIT_NEGATIVE


# ---------------------------------------------------------------- parser


def _add_params(p, scalar: bool = False) -> None:
    p.add_argument("--preset", choices=PRESETS, help="packaged parameter pair")
    p.add_argument("--a1", help="JSON matrix file for A1")
    p.add_argument("--a2", help="JSON matrix file for A2")
    if scalar:
        p.add_argument("--n", type=int, default=None, help="order for scalar parameters")
        p.add_argument("--a", help="A1 = a I")
        p.add_argument("--b", help="A2 = b I")


def _add_triple(p) -> None:
    p.add_argument("--triple", help="JSON file with T1, T2, T3 matrices")
    p.add_argument("--t1")
    p.add_argument("--t2")
    p.add_argument("--t3")
    _add_params(p, scalar=True)
    p.add_argument("--model-modes", type=int, default=4, help="modes of the model to compress")
    p.add_argument("--m", type=int, default=4, help="modes kept by the compression")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--tol-abs", type=float, default=1e-10)
    common.add_argument("--tol-rel", type=float, default=1e-12)
    common.add_argument("-o", "--output", help="write JSON here instead of stdout")

    parser = _ArgParser(prog="tetra", description="Tetrablock operator-theory toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgParser)

    p = sub.add_parser("classify", parents=[common], help="region of a point")
    p.add_argument("--point", action="append", required=True, help='"x1,x2,x3" (repeatable)')
    p.add_argument("--closed", action="store_true", help="closure semantics")
    p.add_argument("--grid", type=int, default=128)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("kernel-check", parents=[common], help="zero-freeness on the bidisc")
    p.add_argument("--point", required=True)
    p.add_argument("--grid", type=int, default=128)
    p.set_defaults(func=cmd_kernel_check)

    p = sub.add_parser("gamma", parents=[common], help="symmetrized bidisc classification")
    p.add_argument("--point", help='"s,p"')
    p.add_argument("--lift", help='"x1,x2,x3": check (x1 + z x2, z x3) over the circle')
    p.add_argument("--samples", type=int, default=64)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("joint-eigs", parents=[common], help="joint eigenvalues of a commuting pair")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_joint_eigs)

    p = sub.add_parser("fundops", parents=[common], help="fundamental operators of a triple")
    _add_triple(p)
    p.add_argument("--grid", type=int, default=64)
    p.set_defaults(func=cmd_fundops)

    p = sub.add_parser("variety", parents=[common], help="sample and classify a variety")
    _add_params(p)
    p.add_argument("--boundary-grid", type=int, default=variety.DEFAULT_ANGLES)
    p.add_argument("--interior-grid", type=int, default=variety.DEFAULT_ANGLES)
    p.add_argument("--radii", help="comma-separated radii of the x3 circles")
    p.add_argument("--delta", type=float, default=variety.DEFAULT_DELTA)
    p.add_argument("--csv", help="write the point cloud here")
    p.set_defaults(func=cmd_variety)

    p = sub.add_parser("model", parents=[common], help="build the truncated model triple")
    _add_params(p, scalar=True)
    p.add_argument("--N", type=int, default=model.DEFAULT_MODES)
    p.add_argument("--m", type=int, help="also emit the compression to m modes")
    p.add_argument("--periodic", action="store_true", help="cyclic shift instead of truncated")
    p.add_argument("--matrices", action="store_true", help="include Q1, Q2, V")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("dilation-check", parents=[common], help="dilation and model identity")
    _add_triple(p)
    p.add_argument("--N", type=int, default=model.DEFAULT_MODES)
    p.add_argument("--buffer", type=int, default=model.DEFAULT_BUFFER)
    p.add_argument("--max-degree", type=int, default=4)
    p.add_argument("--tail-tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_dilation_check)

    p = sub.add_parser("vn", parents=[common], help="von Neumann inequality check")
    _add_triple(p)
    p.add_argument("--poly", action="append", help="polynomial (repeatable)")
    p.add_argument("--polys", help="file with one polynomial per line")
    p.add_argument("--random", type=int, default=0, help="add k seeded random polynomials")
    p.add_argument("--max-degree", type=int, default=3)
    p.add_argument("--grid", type=int, default=vn.DEFAULT_BOUNDARY_GRID)
    p.add_argument("--literal", action="store_true",
                   help="maximize |p| at the variety points instead of their conjugates")
    p.set_defaults(func=cmd_vn)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseFailure, DimensionError) as exc:
        print(f"tetra: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionFailure as exc:
        print(f"tetra: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (HypothesisError, NotCommutingError, NotContractionError, UnsolvableError,
            PurityError, TailError) as exc:
        print(f"tetra: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except TetrablockError as exc:
        print(f"tetra: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
