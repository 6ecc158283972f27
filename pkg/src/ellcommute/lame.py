"""Lamé operators ∂² − B℘(Ω, z) expanded at a chosen center.

These are the built-in examples: B = ρ(ρ+1) with ρ = 1 gives the classical
genus-one case, ρ = 2 the genus-two case, and ρ = 1/2 a non-integral
example with nontrivial local monodromy.
"""
from __future__ import annotations

from .config import DEFAULT_WINDOW
from .elliptic import check_omega, elliptic_constants, g_qexp, lattice_distance, wp_eval, wp_half_series_q, wp_series
from .errors import UsageError
from .operators import DifferentialOperator, PoleSet
from .series import QRing, TruncatedSeries


def lame_operator(B: float, omega, center: complex = 0.5, z_order: int | None = None) -> DifferentialOperator:
    """P = ∂² − B℘(Ω, z) as series at ``center`` with pointwise evaluators attached."""
    omega = check_omega(omega)
    center = complex(center)
    z_order = DEFAULT_WINDOW.z_max if z_order is None else z_order
    wp = wp_series(omega, center, z_order)
    one = TruncatedSeries.constant(1.0, z_order, "z", center)
    zero = one * 0.0
    a2 = wp * (-B)
    evals = (lambda z: 1.0, lambda z: 0.0, lambda z: -B * wp_eval(omega, z))
    return DifferentialOperator(
        (one, zero, a2), weight=2, evaluators=evals,
        pole_set=PoleSet("lattice", omega),
        family={"name": "lame", "B": B, "omega": [omega.real, omega.imag]},
    )


def lame_operator_q(B: float, k_max: int, z_order: int | None = None) -> DifferentialOperator:
    """P = ∂² − B℘ at z = 1/2 with q-expansion coefficients (level 1)."""
    z_order = DEFAULT_WINDOW.z_max if z_order is None else z_order
    ring = QRing(k_max)
    wp = wp_half_series_q(k_max, z_order)
    one = TruncatedSeries.constant(1.0, z_order, "z", 0.5, ring)
    return DifferentialOperator((one, one * 0.0, wp * (-B)), weight=2)


def lame_q_genus_one(omega, center: complex = 0.5, z_order: int | None = None) -> DifferentialOperator:
    """The classical third-order partner ∂³ − 3℘∂ − (3/2)℘' of ∂² − 2℘."""
    omega = check_omega(omega)
    z_order = DEFAULT_WINDOW.z_max if z_order is None else z_order
    wp = wp_series(omega, center, z_order + 1)
    one = TruncatedSeries.constant(1.0, z_order, "z", complex(center))
    return DifferentialOperator((one, one * 0.0, wp * -3.0, wp.derivative() * -1.5), weight=3,
                                pole_set=PoleSet("lattice", omega))


def operator_from_family(family: dict, center: complex, z_order: int | None = None) -> DifferentialOperator:
    if family.get("name") != "lame":
        raise UsageError(f"unknown operator family {family.get('name')!r}")
    omega = complex(*family["omega"]) if isinstance(family["omega"], (list, tuple)) else complex(family["omega"])
    return lame_operator(float(family["B"]), omega, center, z_order)


def is_regular_center(omega, center) -> bool:
    return lattice_distance(check_omega(omega), center) > 1e-8


__all__ = ["lame_operator", "lame_operator_q", "lame_q_genus_one", "operator_from_family",
           "elliptic_constants", "g_qexp", "is_regular_center"]
