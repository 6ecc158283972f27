"""Operators commuting with P, built from the principal part of their eigen-series.

Given A(λ) = A_{-M}λ^M + ... + A_0 + (tail), the coefficients of
Q = Σ b_t ∂^{M-t} follow from QΨ = A(λ)Ψ order by order in λ:

    b_t = Σ_{i<=t} A_{i-M} ξ_{t-i} − Σ_{k<t} Σ_{j-s=M-t} b_k C(M-k, j) ∂^{M-k-j} ξ_s .

The system is unitriangular (ξ_0 = 1), so no pivoting is needed.  The tail
A_s (s >= 1) is then read off as the z-constant quotient QΨ/Ψ; a z-dependent
quotient means the prescribed principal part is not realizable for this P.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Sequence, Union

import numpy as np

from .baker_akhiezer import BAExpansion, SpectralSeries, eigen_series, quotient_defect
from .config import DEFAULT_TOL
from .elliptic import S, T, ModularElement, QExpansion, cusp_holomorphic, modular_form_dim, sample_grid, verify_weight
from .errors import NotCommutingError, PrecisionError, UsageError
from .operators import DifferentialOperator, is_commuting
from .series import QRing, TruncatedSeries

Entry = Union[complex, QExpansion]

DEFAULT_OMEGA_GRID = (1j, 0.1 + 1.2j, 0.3 + 1.1j, -0.2 + 0.9j)


@dataclass(frozen=True)
class PrincipalPart:
    """A_{-M}, ..., A_0 (highest power first)."""

    m: int
    weight: int | None
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.m + 1:
            raise UsageError(f"principal part of rank {self.m} needs {self.m + 1} entries, got {len(self.entries)}")
        lead = self.entries[0]
        lead_zero = (isinstance(lead, QExpansion) and not np.any(lead.coeffs)) or (
            not isinstance(lead, QExpansion) and complex(lead) == 0)
        if lead_zero:
            raise UsageError("leading entry A_{-M} must be nonzero")

    @classmethod
    def from_list(cls, values: Sequence, weight: int | None = None) -> "PrincipalPart":
        vals = tuple(v if isinstance(v, QExpansion) else complex(v) for v in values)
        return cls(len(vals) - 1, weight, vals)

    @classmethod
    def monomial(cls, m: int, weight: int | None = None) -> "PrincipalPart":
        return cls(m, m if weight is None else weight, (1.0 + 0j,) + (0j,) * m)

    def ring_entries(self, ring) -> list:
        out = []
        for e in self.entries:
            out.append(e.to_ring_element(ring) if isinstance(e, QExpansion) else ring.element(e))
        return out

    def to_json(self) -> dict:
        ent = [e.to_json() if isinstance(e, QExpansion) else [complex(e).real, complex(e).imag] for e in self.entries]
        return {"m": self.m, "weight": self.weight, "entries": ent}


def commutant_operator(p: DifferentialOperator, prin: PrincipalPart, ba: BAExpansion) -> DifferentialOperator:
    """Q solved from the principal part alone; it commutes with P only if prin is realizable."""
    m = prin.m
    if ba.s_max < m:
        raise UsageError(f"BA expansion has s_max = {ba.s_max} < M = {m}")
    ring = ba.ring
    a_prin = prin.ring_entries(ring)
    xi = ba.xi
    derivs: dict[tuple[int, int], TruncatedSeries] = {}

    def deriv(s, r):
        if (s, r) not in derivs:
            derivs[(s, r)] = xi[s] if r == 0 else deriv(s, r - 1).derivative()
        return derivs[(s, r)]

    b: list[TruncatedSeries] = []
    for t in range(m + 1):
        try:
            acc = None
            for i in range(t + 1):
                term = xi[t - i] * a_prin[i]
                acc = term if acc is None else acc + term
            for k in range(t):
                order_k = m - k
                for s in range(1, t - k + 1):
                    j = s + m - t
                    term = b[k] * deriv(s, order_k - j) * comb(order_k, j)
                    acc = acc - term
        except PrecisionError as exc:
            raise PrecisionError(f"build_commutant: window exhausted at b_{t} ({exc})") from exc
        b.append(acc)
    # trim every coefficient to the narrowest window so the operator is homogeneous
    hi = min(c.order_max for c in b)
    b = [c.truncate(hi) for c in b]
    return DifferentialOperator(tuple(b), weight=prin.weight, pole_set=p.pole_set)


def build_commutant(p: DifferentialOperator, prin: PrincipalPart, ba: BAExpansion,
                    tol: float | None = None, check: bool = True) -> tuple[DifferentialOperator, SpectralSeries]:
    """The unique Q with Prin(A) = prin, together with its full eigen-series A.

    Raises NotCommutingError when prin is not realizable for P.
    """
    q = commutant_operator(p, prin, ba)
    ring = ba.ring
    try:
        a = eigen_series(p, q, ba, tol=tol)
    except NotCommutingError as exc:
        raise NotCommutingError(f"principal part is not realizable for this operator: {exc}") from exc
    if check and ring.__class__ is not QRing:
        ok, res = is_commuting(p, q, DEFAULT_TOL.operator_zero if tol is None else max(tol, DEFAULT_TOL.operator_zero))
        if not ok:
            raise NotCommutingError(f"[P, Q] residual {res:.2e} above tolerance")
    return q, a


def fit_principal_part(p: DifferentialOperator, prin: PrincipalPart, ba: BAExpansion,
                       free: dict[int, complex]) -> tuple[PrincipalPart, float]:
    """Solve for the multipliers c_i in A_{i-M} = prin_i + c_i·basis_i that make prin realizable.

    ``free`` maps an entry index i (0 = leading) to a scalar basis value
    (for level one, typically g2 for weight 4, g3 for weight 6).  The
    quotient defect is affine in the c_i, so one least-squares solve
    suffices.  Returns the completed principal part and the relative
    defect left after the fit.
    """
    idx = sorted(free)
    base = list(prin.entries)

    def defect(vals):
        e = list(base)
        for i, v in zip(idx, vals):
            e[i] = complex(e[i]) + v * complex(free[i])
        return quotient_defect(commutant_operator(p, PrincipalPart(prin.m, prin.weight, tuple(e)), ba), ba)

    d0 = defect([0.0] * len(idx))
    cols = [defect([1.0 if j == k else 0.0 for j in range(len(idx))]) - d0 for k in range(len(idx))]
    mat = np.stack(cols, axis=1)
    sol, *_ = np.linalg.lstsq(mat, -d0, rcond=None)
    left = d0 + mat @ sol
    rel = float(np.max(np.abs(left)) / max(np.max(np.abs(d0)), 1e-300))
    e = list(base)
    for i, v in zip(idx, sol):
        e[i] = complex(e[i]) + v * complex(free[i])
    return PrincipalPart(prin.m, prin.weight, tuple(e)), rel


# ---- weights of the tail --------------------------------------------------------


@dataclass
class TailWeightReport:
    weight_K: int
    entries: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e["passed"] for e in self.entries)

    def to_json(self) -> dict:
        return {"K": self.weight_K, "passed": self.passed, "entries": self.entries}


def tail_weights(a_of_omega: Callable[[complex], SpectralSeries], weight_K: int, s_values: Sequence[int],
                 samples: Sequence[complex] | None = None, alphas: Sequence[ModularElement] = (S, T),
                 tol: float = 1e-7, q_series: SpectralSeries | None = None) -> TailWeightReport:
    """Check A_s(α(Ω)) = j_α(Ω)^{K+s} A_s(Ω) for the given s, plus cusp holomorphy if a q-ring run is given."""
    samples = sample_grid(samples if samples is not None else DEFAULT_OMEGA_GRID)
    cache: dict[complex, SpectralSeries] = {}

    def a_at(om):
        key = complex(round(om.real, 14), round(om.imag, 14))
        if key not in cache:
            cache[key] = a_of_omega(om)
        return cache[key]

    report = TailWeightReport(weight_K)
    for s in s_values:
        w = weight_K + s
        for alpha in alphas:
            chk = verify_weight(lambda om, s=s: complex(a_at(om).A(s)), w, alpha, samples)
            entry = {"s": s, "weight": w, "alpha": alpha.to_list(), "max_rel_error": chk.max_rel_error,
                     "skipped": chk.skipped, "passed": chk.passed(tol)}
            report.entries.append(entry)
        if q_series is not None:
            qe = QExpansion.from_ring_element(q_series.A(s), q_series.series.ring, weight=w)
            report.entries.append({"s": s, "weight": w, "cusp_holomorphic": cusp_holomorphic(qe),
                                   "passed": cusp_holomorphic(qe)})
    return report


def proportionality(values: Sequence[complex], refs: Sequence[complex]) -> tuple[complex, float]:
    """Mean ratio values/refs and its relative spread max|r_i − r̄|/|r̄|."""
    r = np.asarray(values, dtype=complex) / np.asarray(refs, dtype=complex)
    mean = r.mean()
    spread = float(np.max(np.abs(r - mean)) / max(abs(mean), 1e-300))
    return complex(mean), spread


# ---- graded dimensions ----------------------------------------------------------


@dataclass(frozen=True)
class GradedRingView:
    """Level-one view: M_k spanned by E4^a E6^b with 4a + 6b = k."""

    weight_K: int
    m_cap: int | None = None

    def basis(self, k: int) -> list[tuple[int, int]]:
        if k < 0:
            return []
        return [(a, (k - 4 * a) // 6) for a in range(k // 4 + 1) if (k - 4 * a) % 6 == 0]

    def dims(self) -> dict[int, int]:
        top = self.weight_K if self.m_cap is None else min(self.m_cap, self.weight_K)
        return {s: modular_form_dim(self.weight_K - s) for s in range(top + 1)}

    def dim(self) -> int:
        return sum(self.dims().values())

    def to_json(self) -> dict:
        return {"K": self.weight_K, "M_cap": self.m_cap,
                "per_s": {str(s): {"weight": self.weight_K - s, "dim": d,
                                   "basis_E4_E6": self.basis(self.weight_K - s)} for s, d in self.dims().items()},
                "dim": self.dim()}


def dim_DK(K: int, M_cap: int | None = None) -> int:
    """Σ_{s=0}^{min(M_cap, K)} dim M_{K-s}(SL(2, Z)); an upper bound when not every form is realizable."""
    if K < 0:
        return 0
    return GradedRingView(K, M_cap).dim()
