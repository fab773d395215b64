"""Numerical toolkit for the tetrablock and its operator theory.

Region classification of points, joint spectra of commuting pairs,
fundamental operators of commuting triples, distinguished varieties,
truncated Hardy-space models with their dilation checks, and an empirical
von Neumann inequality verifier.
"""

from __future__ import annotations

from .errors import (
    ConvergenceError,
    DeflationError,
    DimensionError,
    EmptyBoundaryError,
    HypothesisError,
    NotCommutingError,
    NotContractionError,
    NotPSDError,
    PolynomialSyntaxError,
    PurityError,
    ResolventError,
    TailError,
    TetrablockError,
    UnsolvableError,
)
from .fundops import (
    FundamentalPair,
    OperatorTriple,
    Sufficiency,
    check_sufficiency,
    extract_fundamental,
    make_triple,
)
from .geometry import (
    GammaPoint,
    RegionTag,
    TetraPoint,
    beta_compose,
    beta_decompose,
    classify_tetra,
    gamma_classify,
    gamma_lift_check,
    kernel_check,
)
from .jointspec import joint_eigenvalues, joint_spectrum, verify_commuting
from .linalg import BACKEND, DEFAULT_TOL, Tolerance
from .model import (
    build_model,
    compress_to_comodel,
    dilate,
    verify_dilation,
    verify_model_identity,
)
from .variety import Verdict, classify_distinguished, sample_variety, variety_params
from .vn import Poly3, parse_poly, random_polys, verify_vn

__version__ = "0.1.0"
