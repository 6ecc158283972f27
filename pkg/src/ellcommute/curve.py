"""Spectral curve of a commuting pair via the jet basis at a regular point w.

Solutions of P u = X u are identified with their jets (u, u', ..., u^{(N-1)})
at w.  Every higher derivative is reduced with u^{(N)} = X u − Σ a_i u^{(N-i)},
so u^{(r)} = Σ_m p_{r,m}(z, X) u^{(m)} with p polynomial in X.  The matrix
of Q on this space has polynomial entries and its characteristic polynomial
is the curve F(X, Y).

Polynomials in X (and in X, Y) are stored as arrays whose leading axes are
degrees and whose trailing axes hold one coefficient-ring element.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, gcd, isqrt
from typing import Optional

import numpy as np

from .baker_akhiezer import SpectralSeries
from .config import DEFAULT_TOL
from .elliptic import QExpansion
from .errors import BranchPointError, OffCurveError, UsageError
from .operators import DifferentialOperator
from .series import SCALAR, QRing, Ring, ScalarRing

# ---- polynomial helpers (coefficient ring aware) -------------------------------


def _pmul(a: np.ndarray, b: np.ndarray, ring: Ring, nvars: int) -> np.ndarray:
    """Product of two polynomials in ``nvars`` variables with ring coefficients."""
    shape = tuple(a.shape[i] + b.shape[i] - 1 for i in range(nvars)) + tuple(ring.shape)
    out = np.zeros(shape, dtype=complex)
    a_idx = [i for i in np.ndindex(*a.shape[:nvars]) if np.any(a[i])]
    b_idx = [j for j in np.ndindex(*b.shape[:nvars]) if np.any(b[j])]
    for i in a_idx:
        for j in b_idx:
            k = tuple(x + y for x, y in zip(i, j))
            out[k] += ring.mul(a[i], b[j])
    return out


def _padd(a: np.ndarray, b: np.ndarray, nvars: int) -> np.ndarray:
    shape = tuple(max(a.shape[i], b.shape[i]) for i in range(nvars)) + a.shape[nvars:]
    out = np.zeros(shape, dtype=complex)
    out[tuple(slice(0, n) for n in a.shape[:nvars])] += a
    out[tuple(slice(0, n) for n in b.shape[:nvars])] += b
    return out


def _pdiv_monic_y(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Exact quotient num/den of scalar bivariate polynomials, den monic in Y."""
    num = num.copy()
    dy = den.shape[1] - 1
    while dy > 0 and not np.any(den[:, dy]):
        dy -= 1
    if not np.allclose(den[1:, dy], 0) or abs(den[0, dy] - 1) > 1e-12:
        raise UsageError("Bareiss pivot must be monic in Y")
    ny = num.shape[1] - 1
    qx = num.shape[0]
    quo = np.zeros((qx, max(ny - dy + 1, 1)), dtype=complex)
    for k in range(ny, dy - 1, -1):
        lead = num[:, k].copy()
        if not np.any(lead):
            continue
        quo[:, k - dy] = lead
        for j in range(dy + 1):
            col = np.convolve(lead, den[:, j])[: num.shape[0]]
            num[: len(col), k - dy + j] -= col
    return quo


# ---- data types -------------------------------------------------------------------


@dataclass(frozen=True)
class JetBasisMatrix:
    """Entries c_{l,m}(X) = (∂^m Q C_l)(w), stored as (N, N, D+1, *ring)."""

    n: int
    basepoint: complex
    entries: np.ndarray
    ring: Ring = SCALAR
    m: int = 0
    weight: Optional[int] = None

    def at(self, x: complex, omega=None) -> np.ndarray:
        """The numeric matrix Cmat with Cmat[m, l] = c_{l,m}(X), i.e. Q in the jet basis."""
        coeffs = self.entries
        if isinstance(self.ring, QRing):
            coeffs = np.apply_along_axis(lambda e: self.ring.evaluate(e, omega), -1, coeffs)
        deg = coeffs.shape[2]
        powers = np.asarray(x, dtype=complex) ** np.arange(deg)
        c = np.tensordot(coeffs, powers, axes=([2], [0]))
        return c.T

    def degree_bounds(self) -> np.ndarray:
        n = self.n
        return np.array([[-(-(self.m + mm - l) // n) for mm in range(n)] for l in range(n)])


@dataclass(frozen=True)
class PlaneCurve:
    """F(X, Y) = Σ f_{j,k} X^j Y^k with coeff_grid[j, k] a ring element."""

    coeff_grid: np.ndarray
    n: int
    m: int
    weight_K: Optional[int]
    ring: Ring = SCALAR

    def f(self, j: int, k: int, omega=None) -> complex:
        if j >= self.coeff_grid.shape[0] or k >= self.coeff_grid.shape[1]:
            return 0j
        e = self.coeff_grid[j, k]
        return self.ring.evaluate(e, omega) if isinstance(self.ring, QRing) else complex(e)

    def scalar_grid(self, omega=None) -> np.ndarray:
        if isinstance(self.ring, ScalarRing):
            return np.asarray(self.coeff_grid, dtype=complex)
        return np.array([[self.f(j, k, omega) for k in range(self.coeff_grid.shape[1])]
                         for j in range(self.coeff_grid.shape[0])])

    def support(self, tol: float | None = None, omega=None) -> list[tuple[int, int]]:
        g = self.scalar_grid(omega)
        tol = DEFAULT_TOL.operator_zero if tol is None else tol
        scale = max(1.0, float(np.max(np.abs(g))))
        return [(j, k) for j in range(g.shape[0]) for k in range(g.shape[1]) if abs(g[j, k]) > tol * scale]

    def deg_X(self, tol: float | None = None, omega=None) -> int:
        return max((j for j, _ in self.support(tol, omega)), default=0)

    def deg_Y(self, tol: float | None = None, omega=None) -> int:
        return max((k for _, k in self.support(tol, omega)), default=0)

    def evaluate(self, x: complex, y: complex, omega=None) -> complex:
        g = self.scalar_grid(omega)
        return complex(np.polynomial.polynomial.polyval2d(x, y, g))

    def trimmed(self, tol: float | None = None) -> "PlaneCurve":
        sup = self.support(tol)
        dx = max((j for j, _ in sup), default=0)
        dy = max((k for _, k in sup), default=0)
        return PlaneCurve(self.coeff_grid[: dx + 1, : dy + 1], self.n, self.m, self.weight_K, self.ring)

    def to_json(self) -> dict:
        rows = []
        for j in range(self.coeff_grid.shape[0]):
            for k in range(self.coeff_grid.shape[1]):
                e = self.coeff_grid[j, k]
                if not np.any(e):
                    continue
                if isinstance(self.ring, QRing):
                    val = QExpansion.from_ring_element(e, self.ring).to_json()
                else:
                    val = [complex(e).real, complex(e).imag]
                rows.append([j, k, val])
        return {"N": self.n, "M": self.m, "K": self.weight_K, "coeffs": rows}

    @classmethod
    def from_json(cls, data: dict) -> "PlaneCurve":
        rows = data["coeffs"]
        dx = max((r[0] for r in rows), default=0)
        dy = max((r[1] for r in rows), default=0)
        grid = np.zeros((dx + 1, dy + 1), dtype=complex)
        for j, k, val in rows:
            if isinstance(val, dict):
                raise UsageError("q-expansion curves cannot be loaded as scalar curves")
            grid[j, k] = complex(*val) if isinstance(val, (list, tuple)) else complex(val)
        return cls(grid, int(data["N"]), int(data.get("M", dy)), data.get("K"))


# ---- jet basis ---------------------------------------------------------------------


def jet_transfer(p: DifferentialOperator, w: complex | None = None, r_max: int | None = None) -> np.ndarray:
    """Rows p_{r,·}(w, X) for r = 0..r_max as an array (r_max+1, N, D+1, *ring).

    Entry [r, m, d] is the X^d coefficient of p_{r,m} at the basepoint.
    """
    if w is not None and abs(complex(w) - p.center) > 1e-12 * max(1.0, abs(p.center)):
        raise UsageError("operator must be expanded at the basepoint")
    if not p.leading_normal_form():
        raise UsageError("jet_transfer needs a monic operator with vanishing subleading coefficient")
    if any(c.order_min < 0 and np.any(c.coeffs[: -c.order_min]) for c in p.coeffs):
        raise UsageError("basepoint lies on the pole set of the coefficients")
    n = p.order
    r_max = n if r_max is None else r_max
    ring = p.ring
    dmax = r_max // n + 1
    # state[m][d]: z-series coefficient of X^d in p_{r,m}; None = zero
    state = [[None] * (dmax + 1) for _ in range(n)]
    one = p.coeffs[0]
    rows = []
    for r in range(r_max + 1):
        if r < n:
            row = np.zeros((n, dmax + 1) + tuple(ring.shape), dtype=complex)
            row[(r, 0) + (0,) * len(ring.shape)] = 1.0
            rows.append(row)
            if r == n - 1:
                state = [[None] * (dmax + 1) for _ in range(n)]
                state[n - 1][0] = one
            continue
        if r > n:
            new = [[None] * (dmax + 1) for _ in range(n)]

            def add(m, d, s):
                new[m][d] = s if new[m][d] is None else new[m][d] + s

            for m in range(n):
                for d in range(dmax + 1):
                    s = state[m][d]
                    if s is None:
                        continue
                    add(m, d, s.derivative())
                    if m < n - 1:
                        add(m + 1, d, s)
                    else:
                        # u^{(N)} = X u − Σ_{i>=2} a_i u^{(N-i)}
                        add(0, d + 1, s)
                        for i in range(2, n + 1):
                            add(n - i, d, -(s * p.coeffs[i]))
            state = new
        else:
            state = [[None] * (dmax + 1) for _ in range(n)]
            state[0][1] = one
            for i in range(2, n + 1):
                state[n - i][0] = -p.coeffs[i]
        row = np.zeros((n, dmax + 1) + tuple(ring.shape), dtype=complex)
        for m in range(n):
            for d in range(dmax + 1):
                if state[m][d] is not None:
                    row[m, d] = state[m][d].coeff(0)
        rows.append(row)
    return np.stack(rows)


def rep_matrix(p: DifferentialOperator, q: DifferentialOperator, w: complex | None = None) -> JetBasisMatrix:
    """c_{l,m}(X) = Σ_k Σ_r C(m,r) b_k^{(r)}(w) p_{M-k+m-r, l}(w, X)."""
    if abs(p.center - q.center) > 1e-12 * max(1.0, abs(p.center)):
        raise UsageError("P and Q must be expanded at the same basepoint")
    n, mq = p.order, q.order
    ring = p.ring
    jets = jet_transfer(p, w, mq + n - 1)
    dmax = jets.shape[2] - 1
    ent = np.zeros((n, n, dmax + 1) + tuple(ring.shape), dtype=complex)
    for k, bk in enumerate(q.coeffs):
        ders = [bk]
        for _ in range(n - 1):
            ders.append(ders[-1].derivative())
        for m in range(n):
            for r in range(m + 1):
                bval = ders[r].coeff(0)
                if not np.any(bval):
                    continue
                big_r = mq - k + m - r
                for l in range(n):
                    for d in range(dmax + 1):
                        ent[l, m, d] += comb(m, r) * ring.mul(bval, jets[big_r, l, d])
    # drop unused top X-degrees
    top = dmax
    while top > 0 and not np.any(ent[:, :, top]):
        top -= 1
    return JetBasisMatrix(n, p.center, ent[:, :, : top + 1], ring, mq, q.weight)


# ---- characteristic polynomial -----------------------------------------------------


def _yc_matrix(c: JetBasisMatrix) -> list[list[np.ndarray]]:
    """Entries of Y·I − Cmat as bivariate arrays (X-degree, Y-degree, *ring)."""
    n, ring = c.n, c.ring
    dx = c.entries.shape[2]
    out = []
    for row in range(n):
        line = []
        for col in range(n):
            e = np.zeros((dx, 2) + tuple(ring.shape), dtype=complex)
            e[:, 0] = -c.entries[col, row]  # Cmat[row, col] = c_{col,row}
            if row == col:
                e[0, 1] = ring.one()
            line.append(e)
        out.append(line)
    return out


def _det_cofactor(mat, ring) -> np.ndarray:
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = _pmul(mat[0][j], _det_cofactor(minor, ring), ring, 2)
        if j % 2:
            term = -term
        total = term if total is None else _padd(total, term, 2)
    return total


def _det_bareiss(mat) -> np.ndarray:
    """Fraction-free elimination; every pivot is a leading principal minor of Y − C, monic in Y."""
    n = len(mat)
    a = [[mat[i][j].copy() for j in range(n)] for i in range(n)]
    prev = np.ones((1, 1), dtype=complex)
    for k in range(n - 1):
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _padd(_pmul(a[i][j], a[k][k], SCALAR, 2), -_pmul(a[i][k], a[k][j], SCALAR, 2), 2)
                a[i][j] = _pdiv_monic_y(num, prev)
        prev = a[k][k]
    return a[n - 1][n - 1]


def char_poly(c: JetBasisMatrix, method: str | None = None) -> PlaneCurve:
    """det(Y·I − C(X)): cofactor expansion for N <= 3 or non-scalar rings, Bareiss otherwise."""
    mat = _yc_matrix(c)
    if method is None:
        method = "cofactor" if c.n <= 3 or not isinstance(c.ring, ScalarRing) else "bareiss"
    if method == "bareiss":
        if not isinstance(c.ring, ScalarRing):
            raise UsageError("Bareiss path is implemented for scalar coefficients")
        det = _det_bareiss(mat)
    else:
        det = _det_cofactor(mat, c.ring)
    det = det[:, : c.n + 1]
    weight_k = c.weight
    curve = PlaneCurve(det, c.n, c.m, weight_k, c.ring)
    return curve.trimmed(DEFAULT_TOL.atol) if isinstance(c.ring, ScalarRing) else curve


def eigenvector_h(c: JetBasisMatrix, x: complex, y: complex, tol: float | None = None, omega=None) -> np.ndarray:
    """h with h_0 = 1 and Cmat h = Y h: the jet (ψ, ψ', ...)/ψ of the common eigenfunction at w."""
    tol = DEFAULT_TOL.rtol if tol is None else tol
    cm = c.at(x, omega)
    scale = max(1.0, float(np.max(np.abs(cm))), abs(y))
    eig = np.linalg.eigvals(cm)
    dist = np.abs(eig - y)
    i0 = int(np.argmin(dist))
    if dist[i0] > np.sqrt(tol) * scale:
        raise OffCurveError(f"Y = {y} is not an eigenvalue at X = {x} (nearest at distance {dist[i0]:.2e})")
    others = np.delete(eig, i0)
    if others.size and np.min(np.abs(others - eig[i0])) < DEFAULT_TOL.branch_gap * scale:
        raise BranchPointError(f"X = {x} is at (or numerically near) a branch point")
    a = cm - y * np.eye(c.n)
    h_rest, *_ = np.linalg.lstsq(a[:, 1:], -a[:, 0], rcond=None)
    h = np.concatenate([[1.0 + 0j], h_rest])
    res = float(np.max(np.abs(cm @ h - y * h)))
    if res > tol * scale * max(1.0, float(np.max(np.abs(h)))) * 1e2:
        raise OffCurveError(f"eigenvector residual {res:.2e} too large (is Y on the curve?)")
    return h


# ---- genus ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GenusReport:
    newton_interior: int
    hyperelliptic_genus: Optional[int]
    smooth: Optional[bool]
    varpi: Optional[int]
    degenerate: bool = False
    note: str = ""

    def to_json(self) -> dict:
        return {"newton_interior": self.newton_interior, "hyperelliptic_genus": self.hyperelliptic_genus,
                "smooth": self.smooth, "varpi": self.varpi, "degenerate": self.degenerate, "note": self.note}


def _hull(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for pt in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], pt) <= 0:
            lower.pop()
        lower.append(pt)
    for pt in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], pt) <= 0:
            upper.pop()
        upper.append(pt)
    return lower[:-1] + upper[:-1]


def newton_interior_points(support) -> int:
    """Lattice points strictly inside the Newton polygon (Pick's theorem)."""
    hull = _hull(support)
    if len(hull) < 3:
        return 0
    area2 = abs(sum(hull[i][0] * hull[(i + 1) % len(hull)][1] - hull[(i + 1) % len(hull)][0] * hull[i][1]
                    for i in range(len(hull))))
    boundary = sum(gcd(abs(hull[(i + 1) % len(hull)][0] - hull[i][0]), abs(hull[(i + 1) % len(hull)][1] - hull[i][1]))
                   for i in range(len(hull)))
    return (area2 - boundary + 2) // 2


def _root_multiplicities(coeffs_low_first: np.ndarray, tol: float) -> list[int]:
    c = np.trim_zeros(coeffs_low_first, "b")
    if len(c) <= 1:
        return []
    roots = np.roots(c[::-1])
    scale = max(1.0, float(np.max(np.abs(roots))))
    clusters: list[list[complex]] = []
    for r in roots:
        for cl in clusters:
            if abs(r - np.mean(cl)) < tol * scale:
                cl.append(r)
                break
        else:
            clusters.append([r])
    return [len(cl) for cl in clusters]


def genus(curve: PlaneCurve, tol: float | None = None, omega=None) -> GenusReport:
    """Arithmetic genus: hyperelliptic formula when deg_Y = 2, Newton-polygon count otherwise."""
    tol = DEFAULT_TOL.operator_zero if tol is None else tol
    sup = curve.support(tol, omega)
    if not sup:
        raise UsageError("zero polynomial has no genus")
    interior = newton_interior_points(sup)
    grid = curve.scalar_grid(omega)
    dy = max(k for _, k in sup)
    if dy != 2:
        return GenusReport(interior, None, None, interior)
    f2 = grid[:, 2]
    if np.max(np.abs(f2[1:])) > tol * max(1.0, abs(f2[0])) or abs(f2[0]) == 0:
        return GenusReport(interior, None, None, interior, note="leading Y-coefficient depends on X")
    f1, f0 = grid[:, 1] / f2[0], grid[:, 0] / f2[0]
    # (Y + f1/2)^2 = f1^2/4 − f0 =: D(X)
    disc = np.convolve(f1, f1) / 4
    disc[: len(f0)] -= f0
    scale = max(1.0, float(np.max(np.abs(grid))))
    disc[np.abs(disc) < tol * scale] = 0
    if not np.any(disc):
        return GenusReport(interior, None, False, None, degenerate=True, note="F is a perfect square in Y")
    mult = _root_multiplicities(disc, 1e-6)
    d_sqfree = sum(1 for mm in mult if mm % 2)
    smooth = all(mm == 1 for mm in mult)
    g = max((d_sqfree - 1) // 2, 0)
    return GenusReport(interior, g, smooth, g)


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % k for k in range(2, isqrt(n) + 1))


def coprimality_holds(a: SpectralSeries, n: int, tol: float = 1e-12) -> bool:
    """Some s with gcd(s, N) = 1 and A_s ≠ 0 among the computed coefficients."""
    for s in range(-a.m, a.s_max + 1):
        if gcd(abs(s), n) == 1 and a.series.ring.norm(a.A(s)) > tol:
            return True
    return False


def single_valued_criterion(n: int, report: GenusReport, a: SpectralSeries | None = None,
                            coprime: bool | None = None) -> bool:
    """Sufficient test: N prime and ϖ < N.  False means inconclusive.

    The coprimality hypothesis must be established, either from the
    eigen-series ``a`` or asserted by the caller through ``coprime``.
    """
    if coprime is None:
        if a is None:
            raise UsageError("coprimality hypothesis unchecked: pass the eigen-series or coprime=True")
        coprime = coprimality_holds(a, n)
    if not coprime:
        raise UsageError("no A_s with s coprime to N is nonzero; the criterion does not apply")
    if report.varpi is None:
        return False
    return _is_prime(n) and report.varpi < n


__all__ = ["JetBasisMatrix", "PlaneCurve", "GenusReport", "jet_transfer", "rep_matrix", "char_poly",
           "eigenvector_h", "genus", "newton_interior_points", "coprimality_holds", "single_valued_criterion"]
