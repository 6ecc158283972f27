"""Formal Baker-Akhiezer expansions Ψ = (Σ ξ_s λ^{-s}) e^{λ(z-w)} and eigen-series.

For P = ∂^N + a_2 ∂^{N-2} + ... + a_N, substituting Ψ into P u = λ^N u and
comparing powers of λ gives, for each t >= 1,

    N ∂ξ_t = −[ Σ_{l<=N-2} C(N,l) ∂^{N-l} ξ_{l+s0} + Σ_{m<=N-2} a_{N-m} Σ_l C(m,l) ∂^{m-l} ξ_{l+s0} ],

with s0 = t − N + 1.  Integrating from the basepoint with ξ_t(w) = 0 fixes
every ξ_t uniquely.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np

from .config import DEFAULT_TOL
from .errors import NotCommutingError, PrecisionError, UsageError
from .operators import DifferentialOperator, apply_symbol, commutator, residual_scale
from .series import TruncatedSeries


@dataclass(frozen=True)
class BAExpansion:
    basepoint: complex
    s_max: int
    xi: tuple

    def __getitem__(self, s: int) -> TruncatedSeries:
        return self.xi[s]

    @property
    def ring(self):
        return self.xi[0].ring


@dataclass(frozen=True)
class SpectralSeries:
    """A(λ) = Σ_{s >= -m} A_s λ^{-s}, stored as a λ^{-1}-series starting at -m."""

    m: int
    weight: Optional[int]
    series: TruncatedSeries

    def A(self, s: int):
        return self.series.coeff(s)

    @property
    def s_max(self) -> int:
        return self.series.order_max

    def principal_part(self) -> list:
        return [self.series.coeff(s) for s in range(-self.m, 1)]

    def tail(self) -> list:
        return [self.series.coeff(s) for s in range(1, self.s_max + 1)]

    def evaluate(self, lam: complex) -> complex:
        """Truncated sum at finite λ (used only for large-|λ| consistency checks)."""
        return self.series.evaluate(1.0 / complex(lam))

    def __mul__(self, other: "SpectralSeries") -> "SpectralSeries":
        w = None if self.weight is None or other.weight is None else self.weight + other.weight
        return SpectralSeries(self.m + other.m, w, self.series * other.series)

    def __add__(self, other: "SpectralSeries") -> "SpectralSeries":
        w = self.weight if self.weight == other.weight else None
        return SpectralSeries(max(self.m, other.m), w, self.series + other.series)

    def to_json(self) -> dict:
        return {"m": self.m, "weight": self.weight, "series": self.series.to_json()}


def _has_pole(s: TruncatedSeries) -> bool:
    if s.order_min >= 0:
        return False
    neg = s.coeffs[: min(-s.order_min, s.coeffs.shape[0])]
    return bool(np.any(np.abs(neg) > 0))


def compute_xi(p: DifferentialOperator, w: complex | None = None, s_max: int = 8,
               z_order: int | None = None, allow_pole_center: bool = False) -> BAExpansion:
    """ξ_0..ξ_{s_max} of the Baker-Akhiezer expansion at the operator's center.

    P must be in normal form (monic, zero subleading coefficient) and
    expanded at w.  With ``allow_pole_center`` the center may be a pole of
    the coefficients; ξ_s is then normalized by a vanishing z^0 coefficient
    and residues must vanish (no logarithms).
    """
    if w is not None and abs(complex(w) - p.center) > 1e-12 * max(1.0, abs(p.center)):
        raise UsageError("operator must be expanded at the basepoint (re-expand before calling)")
    if not p.leading_normal_form():
        raise UsageError("compute_xi needs a monic operator with vanishing subleading coefficient")
    n = p.order
    if n < 1:
        raise UsageError("operator order must be >= 1")
    coeffs = list(p.coeffs)
    if z_order is not None:
        coeffs = [c.truncate(min(z_order, c.order_max)) for c in coeffs]
    if not allow_pole_center and any(_has_pole(c) for c in coeffs):
        raise UsageError("basepoint lies on the pole set of the coefficients")
    integrate = (lambda s: s.antiderivative()) if allow_pole_center else (lambda s: s.integrate_from_center())

    top = max(c.order_max for c in coeffs)
    xi = [TruncatedSeries.constant(1.0, top, "z", p.center, p.ring)]
    derivs: dict[tuple[int, int], TruncatedSeries] = {}

    def deriv(s, r):
        if (s, r) not in derivs:
            derivs[(s, r)] = xi[s] if r == 0 else deriv(s, r - 1).derivative()
        return derivs[(s, r)]

    for t in range(1, s_max + 1):
        s0 = t - n + 1
        rhs = None
        try:
            for l in range(n - 1):
                idx = l + s0
                if idx < 0:
                    continue
                term = deriv(idx, n - l) * comb(n, l)
                rhs = term if rhs is None else rhs + term
            for m in range(n - 1):
                a = coeffs[n - m]
                for l in range(m + 1):
                    idx = l + s0
                    if idx < 0:
                        continue
                    term = a * deriv(idx, m - l) * comb(m, l)
                    rhs = term if rhs is None else rhs + term
            if rhs is None:
                rhs = xi[0] * 0.0
            xi.append(integrate(rhs * (-1.0 / n)))
        except PrecisionError as exc:
            raise PrecisionError(f"compute_xi: window exhausted at s = {t} ({exc})") from exc
    return BAExpansion(p.center, s_max, tuple(xi))


def _disk_norm(s: TruncatedSeries, rho: float, skip_constant: bool = False) -> float:
    """Σ |c_k| ρ^k: a bound for the sup of the series on |z - w| = ρ."""
    total = 0.0
    for k in range(s.order_min, s.order_max + 1):
        if skip_constant and k == 0:
            continue
        total += s.ring.norm(s.coeff(k)) * rho ** k
    return total


def _quotient(r_terms, xi, m: int, n_terms: int, tol: float, rho: float):
    """Solve R_{λ^{M-t}} = Σ_i A_{i-M} ξ_{t-i} for constant A, checking z-constancy.

    The z-dependence is measured on a small disk around the basepoint, so
    that high-order Taylor coefficients (which grow like the inverse
    distance to the nearest pole) do not dominate the rounding estimate.
    """
    a_list = []
    worst = 0.0
    for t in range(n_terms):
        acc = r_terms[t]
        for i in range(t):
            acc = acc - xi[t - i] * a_list[i]
        const = acc.coeff(0)
        scale = max(1.0, _disk_norm(r_terms[t], rho),
                    max((_disk_norm(xi[t - i], rho) * xi[0].ring.norm(a_list[i]) for i in range(t)), default=0.0))
        rel = _disk_norm(acc, rho, skip_constant=True) / scale
        worst = max(worst, rel)
        if rel > tol:
            raise NotCommutingError(
                f"QΨ/Ψ depends on z at λ^{m - t} (relative size {rel:.2e}); the operators do not commute")
        a_list.append(np.array(const))
    return a_list, worst


def quotient_defect(q: DifferentialOperator, ba: BAExpansion, n_terms: int | None = None,
                    rho: float = 0.1) -> np.ndarray:
    """Non-constant z-coefficients (scaled by ρ^k) of the successive quotients QΨ/Ψ.

    Zero exactly when Q commutes with the operator that produced ``ba``; the
    vector is affine in the coefficients of Q, which makes it usable for
    linear fitting of free principal-part entries.
    """
    n_terms = ba.s_max + 1 if n_terms is None else n_terms
    sym = apply_symbol(q, ba.xi, n_terms)
    a_list, out = [], []
    for t in range(n_terms):
        acc = sym.terms[t]
        for i in range(t):
            acc = acc - ba.xi[t - i] * a_list[i]
        a_list.append(np.array(acc.coeff(0)))
        for k in range(acc.order_min, acc.order_max + 1):
            if k != 0:
                out.append(np.ravel(acc.coeff(k)) * rho ** k)
    return np.concatenate(out) if out else np.zeros(0, dtype=complex)


def eigen_series(p: DifferentialOperator, q: DifferentialOperator, ba: BAExpansion,
                 n_terms: int | None = None, tol: float | None = None, rho: float = 0.1) -> SpectralSeries:
    """The z-independent A(λ) with QΨ = A(λ)Ψ; raises NotCommutingError otherwise."""
    tol = DEFAULT_TOL.constancy if tol is None else tol
    m = q.order
    n_terms = ba.s_max + 1 if n_terms is None else n_terms
    sym = apply_symbol(q, ba.xi, n_terms)
    a_list, _ = _quotient(sym.terms, ba.xi, m, n_terms, tol, rho)
    ser = TruncatedSeries(np.stack(a_list), -m, "lambda_inv", 0j, ba.ring)
    return SpectralSeries(m, q.weight, ser)


def xi_weight_check(operator_at, omegas, alpha, s_values, w: complex = 0.5,
                    deltas=(0.05 + 0.02j, -0.03 + 0.04j), s_max: int | None = None, z_order: int = 16) -> dict:
    """Check ξ_s(α(Ω), z/j, w/j) = j^s ξ_s(Ω, z, w) at z = w + δ.

    ``operator_at(Ω, center)`` must return the operator expanded at ``center``.
    Returns {s: WeightCheck}.
    """
    from .elliptic import WeightCheck

    s_values = list(s_values)
    s_max = max(s_values) if s_max is None else s_max
    worst = {s: 0.0 for s in s_values}
    count = 0
    for om in omegas:
        om = complex(om)
        j = alpha.jay(om)
        om2 = alpha.act(om)
        ba1 = compute_xi(operator_at(om, w, z_order), s_max=s_max)
        ba2 = compute_xi(operator_at(om2, w / j, z_order), s_max=s_max)
        for d in deltas:
            z = w + d
            for s in s_values:
                lhs = complex(ba2[s].evaluate(z / j))
                rhs = j ** s * complex(ba1[s].evaluate(z))
                worst[s] = max(worst[s], abs(lhs - rhs) / max(abs(rhs), 1e-300))
            count += 1
    return {s: WeightCheck(worst[s], count) for s in s_values}


def check_pairwise_commute(p: DifferentialOperator, q1: DifferentialOperator, q2: DifferentialOperator,
                           tol: float | None = None) -> bool:
    """[Q1, Q2] = 0 to tolerance."""
    tol = DEFAULT_TOL.operator_zero if tol is None else tol
    res = commutator(q1, q2).max_abs() / residual_scale(q1, q2)
    return bool(res < tol)
