"""Ordinary differential operators with series coefficients.

``DifferentialOperator(coeffs)`` is ``Σ_k coeffs[k] ∂^{order-k}``: the leading
coefficient comes first, matching the a_0, a_1, ..., a_N / b_0, ..., b_M
indexing used throughout the package.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Optional, Sequence

import numpy as np

from .config import DEFAULT_TOL
from .errors import PrecisionError, UsageError
from .series import SCALAR, Ring, TruncatedSeries


@dataclass(frozen=True)
class PoleSet:
    """Description of the singular set 𝒩 of the coefficients.

    kind "lattice": Z + ZΩ; kind "points": a finite list; kind "none".
    """

    kind: str = "none"
    omega: complex | None = None
    points: tuple = ()

    def distance(self, z: complex) -> float:
        if self.kind == "none":
            return float("inf")
        if self.kind == "lattice":
            from .elliptic import lattice_distance

            return lattice_distance(self.omega, z)
        if self.kind == "points":
            return min(abs(complex(z) - complex(p)) for p in self.points) if self.points else float("inf")
        raise UsageError(f"unknown pole-set kind {self.kind!r}")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.omega is not None:
            out["omega"] = [self.omega.real, self.omega.imag]
        if self.points:
            out["points"] = [[complex(p).real, complex(p).imag] for p in self.points]
        return out

    @classmethod
    def from_json(cls, data: dict | None) -> "PoleSet":
        if not data:
            return cls()
        omega = complex(*data["omega"]) if data.get("omega") is not None else None
        pts = tuple(complex(*p) for p in data.get("points", []))
        return cls(data.get("kind", "none"), omega, pts)


@dataclass(frozen=True, eq=False)
class DifferentialOperator:
    coeffs: tuple
    weight: Optional[int] = None
    evaluators: Optional[tuple] = None
    pole_set: PoleSet = field(default_factory=PoleSet)
    family: Optional[dict] = None

    def __post_init__(self):
        cs = tuple(self.coeffs)
        if not cs:
            raise UsageError("operator needs at least one coefficient")
        first = cs[0]
        for c in cs[1:]:
            first._check_compatible(c)
        object.__setattr__(self, "coeffs", cs)
        if self.evaluators is not None:
            ev = tuple(self.evaluators)
            if len(ev) != len(cs):
                raise UsageError("one evaluator per coefficient required")
            object.__setattr__(self, "evaluators", ev)

    # ---- basic data -----------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def center(self) -> complex:
        return self.coeffs[0].center

    @property
    def ring(self) -> Ring:
        return self.coeffs[0].ring

    def coeff_of_derivative(self, p: int) -> TruncatedSeries:
        """Coefficient multiplying ∂^p."""
        return self.coeffs[self.order - p]

    @classmethod
    def from_terms(cls, terms: dict, **kw) -> "DifferentialOperator":
        """Build from {derivative power: series}; missing powers become zero."""
        top = max(terms)
        ref = terms[top]
        zero = _zero_like(ref, min(t.order_max for t in terms.values()))
        coeffs = [terms.get(p, zero) for p in range(top, -1, -1)]
        return cls(tuple(coeffs), **kw)

    @classmethod
    def multiplication(cls, f: TruncatedSeries, **kw) -> "DifferentialOperator":
        return cls((f,), **kw)

    @classmethod
    def d(cls, power: int, order_max: int, center=0j, ring: Ring = SCALAR) -> "DifferentialOperator":
        """Pure derivative ∂^power with exact (constant) coefficients."""
        one = TruncatedSeries.constant(1.0, order_max, "z", center, ring)
        zero = _zero_like(one, order_max)
        return cls(tuple([one] + [zero] * power))

    def leading_normal_form(self, tol: float | None = None) -> bool:
        """Leading coefficient ≡ 1 and subleading ≡ 0."""
        tol = DEFAULT_TOL.operator_zero if tol is None else tol
        lead = self.coeffs[0] - 1.0
        ok = lead.max_abs() <= tol
        if self.order >= 1:
            ok = ok and self.coeffs[1].max_abs() <= tol * max(1.0, self.scale())
        return bool(ok)

    def scale(self) -> float:
        return max(c.max_abs() for c in self.coeffs)

    def with_meta(self, **kw) -> "DifferentialOperator":
        data = dict(weight=self.weight, evaluators=self.evaluators, pole_set=self.pole_set, family=self.family)
        data.update(kw)
        return DifferentialOperator(self.coeffs, **data)

    # ---- arithmetic -------------------------------------------------------------

    def __add__(self, other: "DifferentialOperator") -> "DifferentialOperator":
        top = max(self.order, other.order)
        terms = {}
        for p in range(top + 1):
            parts = [op.coeff_of_derivative(p) for op in (self, other) if p <= op.order]
            terms[p] = parts[0] if len(parts) == 1 else parts[0] + parts[1]
        return DifferentialOperator.from_terms(terms, pole_set=self.pole_set)

    def __neg__(self):
        return DifferentialOperator(tuple(-c for c in self.coeffs), self.weight, pole_set=self.pole_set)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c) -> "DifferentialOperator":
        return DifferentialOperator(tuple(x * c for x in self.coeffs), self.weight, pole_set=self.pole_set)

    def __matmul__(self, other):
        return compose(self, other)

    def max_abs(self) -> float:
        return self.scale()

    def disk_norm(self, rho: float) -> float:
        return max(c.disk_norm(rho) for c in self.coeffs)

    def norm(self, rho: float | None = None) -> float:
        """Largest coefficient magnitude, or the sup-bound on |z - center| = ρ when ρ is given."""
        return self.max_abs() if rho is None else self.disk_norm(rho)

    def is_zero(self, tol: float | None = None, scale: float = 1.0) -> bool:
        tol = DEFAULT_TOL.operator_zero if tol is None else tol
        return self.max_abs() <= tol * scale

    # ---- pointwise --------------------------------------------------------------

    def evaluate_coeffs(self, z: complex) -> np.ndarray:
        if self.evaluators is None:
            raise UsageError("operator has no pointwise evaluators")
        return np.array([complex(f(z)) for f in self.evaluators])

    # ---- JSON ---------------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "weight": self.weight,
            "center": [self.center.real, self.center.imag],
            "coeffs": [c.to_json() for c in self.coeffs],
            "pole_set": self.pole_set.to_json(),
            **({"family": self.family} if self.family else {}),
        }

    @classmethod
    def from_json(cls, data: dict) -> "DifferentialOperator":
        coeffs = tuple(TruncatedSeries.from_json(c) for c in data["coeffs"])
        if len(coeffs) != int(data["order"]) + 1:
            raise UsageError("order does not match the number of coefficients")
        return cls(coeffs, data.get("weight"), None, PoleSet.from_json(data.get("pole_set")), data.get("family"))


def _zero_like(ref: TruncatedSeries, order_max: int) -> TruncatedSeries:
    hi = max(order_max, ref.order_min)
    return TruncatedSeries(ref.ring.zeros(hi - ref.order_min + 1), ref.order_min, "z", ref.center, ref.ring)


def compose(a: DifferentialOperator, b: DifferentialOperator) -> DifferentialOperator:
    """A ∘ B by the Leibniz rule ∂^p f = Σ_r C(p,r) f^{(r)} ∂^{p-r}."""
    if abs(a.center - b.center) > 1e-14 * max(1.0, abs(a.center)):
        raise UsageError("operators are expanded at different centers")
    terms: dict[int, TruncatedSeries] = {}
    derivs: dict[tuple[int, int], TruncatedSeries] = {}

    def deriv(k, r):
        if (k, r) not in derivs:
            derivs[(k, r)] = b.coeffs[k] if r == 0 else deriv(k, r - 1).derivative()
        return derivs[(k, r)]

    for i, ai in enumerate(a.coeffs):
        p = a.order - i
        for k in range(len(b.coeffs)):
            q = b.order - k
            for r in range(p + 1):
                try:
                    term = ai * deriv(k, r) * comb(p, r)
                except PrecisionError as exc:
                    raise PrecisionError(
                        f"compose: coefficient of ∂^{q} in B needs {r} derivatives; window exhausted ({exc})") from exc
                power = p - r + q
                terms[power] = term if power not in terms else terms[power] + term
    return DifferentialOperator.from_terms(terms, pole_set=a.pole_set)


def commutator(a: DifferentialOperator, b: DifferentialOperator) -> DifferentialOperator:
    return compose(a, b) - compose(b, a)


def residual_scale(*ops: DifferentialOperator, rho: float | None = None) -> float:
    return max(1.0, max(op.norm(rho) for op in ops))


def is_commuting(a, b, tol: float | None = None, rho: float | None = None) -> tuple[bool, float]:
    """(zero?, normalized residual) for [A, B].

    The residual is normalized by the largest input coefficient; with ``rho``
    both sides use the sup-bound on a circle of that radius instead.
    """
    tol = DEFAULT_TOL.operator_zero if tol is None else tol
    res = commutator(a, b).norm(rho) / residual_scale(a, b, rho=rho)
    return res < tol, res


def power(op: DifferentialOperator, n: int) -> DifferentialOperator:
    if n < 0:
        raise UsageError("negative operator power")
    if n == 0:
        one = TruncatedSeries.constant(1.0, max(op.coeffs[0].order_max, 0), "z", op.center, op.ring)
        return DifferentialOperator((one,), pole_set=op.pole_set)
    out = op
    for _ in range(n - 1):
        out = compose(out, op)
    return out


def gauge_normalize(p0: DifferentialOperator) -> tuple[DifferentialOperator, TruncatedSeries]:
    """Conjugate a monic operator by v so that the subleading coefficient vanishes.

    v = exp(∫_center a1/N) and the result is v P0 v^{-1}.
    """
    n = p0.order
    lead = p0.coeffs[0]
    if (lead - 1.0).max_abs() > DEFAULT_TOL.operator_zero:
        raise UsageError("gauge_normalize expects a monic operator")
    if n < 1:
        return p0, TruncatedSeries.constant(1.0, lead.order_max, "z", p0.center, p0.ring)
    a1 = p0.coeffs[1]
    if a1.order_min < 0 and any(abs(complex(np.max(np.abs(c)))) > 0 for c in a1.coeffs[: -a1.order_min]):
        raise UsageError("subleading coefficient has a pole at the center; choose another center")
    log_v = (a1 * (1.0 / n)).integrate_from_center()
    v = log_v.exp()
    v_inv = (-log_v).exp()
    mv = DifferentialOperator.multiplication(v)
    mvi = DifferentialOperator.multiplication(v_inv)
    out = compose(compose(mv, p0), mvi)
    # the leading coefficient is v·v^{-1} = 1 exactly up to rounding; reset it
    one = TruncatedSeries.constant(1.0, out.coeffs[0].order_max, "z", p0.center, p0.ring)
    zero = out.coeffs[1] * 0.0
    return DifferentialOperator((one, zero) + out.coeffs[2:], p0.weight, pole_set=p0.pole_set), v


# ---- action on exponential symbols -------------------------------------------------


@dataclass(frozen=True)
class SymbolSeries:
    """Σ_i terms[i] λ^{top - i}: a λ-Laurent series with z-series coefficients."""

    top: int
    terms: tuple

    def coeff(self, power: int) -> TruncatedSeries:
        i = self.top - power
        if i < 0:
            raise UsageError(f"λ^{power} is above the top power {self.top}")
        if i >= len(self.terms):
            raise PrecisionError(f"λ^{power} beyond the computed λ-window")
        return self.terms[i]


def apply_symbol(op: DifferentialOperator, family: Sequence[TruncatedSeries], n_terms: int | None = None) -> SymbolSeries:
    """e^{-λ(z-w)} · op(Σ_s η_s λ^{-s} e^{λ(z-w)}) as a Laurent series in λ.

    The coefficient of λ^{M-t} is Σ_{k, j, s: j - s = M - t} b_k C(M-k, j) ∂^{M-k-j} η_s.
    """
    m = op.order
    s_avail = len(family)
    n_terms = s_avail if n_terms is None else n_terms
    if n_terms > s_avail:
        raise PrecisionError("apply_symbol: not enough λ-terms in the family")
    derivs: dict[tuple[int, int], TruncatedSeries] = {}

    def deriv(s, r):
        if (s, r) not in derivs:
            derivs[(s, r)] = family[s] if r == 0 else deriv(s, r - 1).derivative()
        return derivs[(s, r)]

    terms = []
    for t in range(n_terms):
        acc = None
        for k, bk in enumerate(op.coeffs):
            order_k = m - k
            for j in range(order_k + 1):
                s = j - m + t
                if s < 0 or s >= s_avail:
                    continue
                term = bk * deriv(s, order_k - j) * comb(order_k, j)
                acc = term if acc is None else acc + term
        if acc is None:
            acc = family[0] * 0.0
        terms.append(acc)
    return SymbolSeries(m, tuple(terms))


# ---- polynomial evaluation F(P, Q) ----------------------------------------------


def eval_poly(curve, p: DifferentialOperator, q: DifferentialOperator, with_scale: bool = False,
              rho: float | None = None):
    """Σ f_{j,k} P^j ∘ Q^k for a plane curve's coefficient grid.

    ``curve`` is anything with a ``coeff_grid`` (deg_X+1, deg_Y+1) array of
    scalars, or such an array itself.
    """
    grid = np.asarray(getattr(curve, "coeff_grid", curve))
    if grid.ndim != 2:
        raise UsageError("eval_poly is implemented for scalar coefficient grids")
    degx, degy = grid.shape[0] - 1, grid.shape[1] - 1
    p_pows = [power(p, 0)]
    for _ in range(degx):
        p_pows.append(compose(p_pows[-1], p))
    q_pows = [power(q, 0)]
    for _ in range(degy):
        q_pows.append(compose(q_pows[-1], q))
    total = None
    scale = 1.0
    for j in range(degx + 1):
        for k in range(degy + 1):
            f = complex(grid[j, k])
            if f == 0:
                continue
            term = compose(p_pows[j], q_pows[k]).scaled(f)
            scale = max(scale, term.norm(rho))
            total = term if total is None else total + term
    if total is None:
        raise UsageError("zero polynomial")
    return (total, scale) if with_scale else total


def bc_residual(curve, p: DifferentialOperator, q: DifferentialOperator, rho: float | None = None) -> float:
    """max |coefficient of F(P, Q)| relative to the largest term f_jk P^j Q^k."""
    total, scale = eval_poly(curve, p, q, with_scale=True, rho=rho)
    return total.norm(rho) / scale
