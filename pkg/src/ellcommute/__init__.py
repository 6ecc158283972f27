"""Commuting differential operators with elliptic coefficients.

Formal Baker-Akhiezer expansions, commutant construction from principal
parts, spectral curves, modular weight checks and numerical monodromy.
"""
from .baker_akhiezer import BAExpansion, SpectralSeries, compute_xi, eigen_series
from .commutant import PrincipalPart, build_commutant, dim_DK
from .curve import PlaneCurve, char_poly, genus, rep_matrix
from .elliptic import elliptic_constants, eisenstein, wp_eval, zeta_eval
from .lame import lame_operator
from .operators import DifferentialOperator, commutator, compose, eval_poly
from .series import TruncatedSeries

__version__ = "0.1.0"

__all__ = [
    "BAExpansion", "SpectralSeries", "compute_xi", "eigen_series", "PrincipalPart", "build_commutant", "dim_DK",
    "PlaneCurve", "char_poly", "genus", "rep_matrix", "elliptic_constants", "eisenstein", "wp_eval", "zeta_eval",
    "lame_operator", "DifferentialOperator", "commutator", "compose", "eval_poly", "TruncatedSeries",
]
