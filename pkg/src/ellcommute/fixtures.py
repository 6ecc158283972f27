"""Small operator fixtures with known closed-form solutions.

``sqrt_pair`` is a regular-singular test case: P = ∂² + (3/16) z⁻² has the
solutions z^{1/4}, z^{3/4}, and Q = 2(√z − z√z)∂ + (3/2)√z − 1/(2√z) swaps
them on ker P.  One turn around z = 0 therefore exchanges the two
eigenlines of Q, which is a transposition.
"""
from __future__ import annotations

import numpy as np

from .operators import DifferentialOperator, PoleSet
from .series import TruncatedSeries


def power_series_at_one(alpha: float, order_max: int) -> TruncatedSeries:
    """z^α = (1 + t)^α expanded at z = 1 (principal branch)."""
    c = np.ones(order_max + 1, dtype=complex)
    for k in range(1, order_max + 1):
        c[k] = c[k - 1] * (alpha - k + 1) / k
    return TruncatedSeries.from_coeffs(c, 0, "z", 1.0 + 0j)


def constant_coefficient_operator(coeffs, order_max: int = 24, center: complex = 0j) -> DifferentialOperator:
    """Σ c_i ∂^{N-i} with constant c_i (leading first)."""
    cs = tuple(TruncatedSeries.constant(complex(c), order_max, "z", complex(center)) for c in coeffs)
    evals = tuple((lambda z, c=complex(c): c) for c in coeffs)
    return DifferentialOperator(cs, evaluators=evals)


def sqrt_pair(order_max: int = 24) -> tuple[DifferentialOperator, DifferentialOperator]:
    one = TruncatedSeries.constant(1.0, order_max, "z", 1.0 + 0j)
    a2 = power_series_at_one(-2.0, order_max) * (3.0 / 16.0)
    p = DifferentialOperator((one, one * 0.0, a2), evaluators=(lambda z: 1.0, lambda z: 0.0,
                                                               lambda z: 3.0 / 16.0 / z ** 2),
                             pole_set=PoleSet("points", points=(0j,)), family={"name": "sqrt_test"})
    s_half = power_series_at_one(0.5, order_max)
    s_3half = power_series_at_one(1.5, order_max)
    s_mhalf = power_series_at_one(-0.5, order_max)
    q = DifferentialOperator(((s_half - s_3half) * 2.0, s_half * 1.5 - s_mhalf * 0.5),
                             pole_set=PoleSet("points", points=(0j,)))
    return p, q
