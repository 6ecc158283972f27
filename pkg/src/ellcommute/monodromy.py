"""Analytic continuation of solutions of P u = X u along polygonal paths.

Solutions are carried as jets (u, u', ..., u^{(N-1)}); the transfer matrix of
a path maps the jet at its start to the jet at its end.  Integration is done
with scipy's embedded Runge-Kutta 5(4) pair on each straight segment.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .config import DEFAULT_TOL
from .errors import BranchPointError, ClearanceError, NumericalBreakdown, StepCollapseError, UsageError
from .operators import DifferentialOperator, PoleSet


@dataclass(frozen=True)
class PathSpec:
    vertices: tuple
    pole_set: PoleSet = field(default_factory=PoleSet)
    min_clearance: float = DEFAULT_TOL.min_clearance
    label: str = ""

    @property
    def basepoint(self) -> complex:
        return complex(self.vertices[0])

    @property
    def closed(self) -> bool:
        return abs(complex(self.vertices[0]) - complex(self.vertices[-1])) < 1e-12

    def reversed(self) -> "PathSpec":
        return PathSpec(tuple(reversed(self.vertices)), self.pole_set, self.min_clearance, self.label + "^-1")

    def then(self, other: "PathSpec") -> "PathSpec":
        """This path followed by ``other`` (which must start where this one ends)."""
        if abs(complex(self.vertices[-1]) - complex(other.vertices[0])) > 1e-12:
            raise UsageError("paths do not connect")
        return PathSpec(tuple(self.vertices) + tuple(other.vertices[1:]), self.pole_set, self.min_clearance,
                        f"{self.label}*{other.label}")

    def clearance(self, samples_per_unit: int = 200) -> float:
        """Smallest distance from the (densely sampled) path to the pole set."""
        best = float("inf")
        vs = [complex(v) for v in self.vertices]
        for a, b in zip(vs[:-1], vs[1:]) if len(vs) > 1 else [(vs[0], vs[0])]:
            n = max(2, int(abs(b - a) * samples_per_unit) + 1)
            for t in np.linspace(0.0, 1.0, n):
                best = min(best, self.pole_set.distance(a + t * (b - a)))
        return best

    def validate(self) -> None:
        c = self.clearance()
        if c < self.min_clearance:
            raise ClearanceError(f"path '{self.label}' passes within {c:.3g} of the pole set "
                                 f"(minimum clearance {self.min_clearance})")

    def to_json(self) -> dict:
        return {"label": self.label, "vertices": [[complex(v).real, complex(v).imag] for v in self.vertices],
                "min_clearance": self.min_clearance, "pole_set": self.pole_set.to_json()}

    @classmethod
    def from_json(cls, data: dict, pole_set: PoleSet | None = None) -> "PathSpec":
        verts = tuple(complex(*v) if isinstance(v, (list, tuple)) else complex(v) for v in data["vertices"])
        ps = pole_set if pole_set is not None else PoleSet.from_json(data.get("pole_set"))
        return cls(verts, ps, float(data.get("min_clearance", DEFAULT_TOL.min_clearance)), data.get("label", ""))


def circle_loop(center: complex, radius: float, basepoint: complex, n_vertices: int = 64,
                pole_set: PoleSet | None = None, turns: int = 1, label: str = "") -> PathSpec:
    """Lasso: straight out from the basepoint, ``turns`` counter-clockwise circles, straight back."""
    center, basepoint = complex(center), complex(basepoint)
    theta0 = np.angle(basepoint - center) if basepoint != center else 0.0
    ring = [center + radius * np.exp(1j * (theta0 + 2 * np.pi * k / n_vertices))
            for k in range(n_vertices * turns + 1)]
    verts = [basepoint] + ring + [basepoint] if abs(basepoint - ring[0]) > 1e-14 else ring
    return PathSpec(tuple(verts), pole_set or PoleSet(), label=label or f"circle({center:.3g},{radius})")


def lame_loops(omega: complex, basepoint: complex = 0.5, radius: float = 0.25, n_vertices: int = 64) -> list[PathSpec]:
    """The fixture loops around 0, Ω and 1 + Ω."""
    ps = PoleSet("lattice", complex(omega))
    return [circle_loop(c, radius, basepoint, n_vertices, ps, label=name)
            for c, name in ((0j, "around0"), (complex(omega), "aroundOmega"), (1 + complex(omega), "around1+Omega"))]


# ---- integration ----------------------------------------------------------------


def _companion_rhs(p: DifferentialOperator, x: complex, a: complex, b: complex, pole_set: PoleSet, clearance: float):
    n = p.order
    d = b - a

    def rhs(t, y):
        z = a + t * d
        if pole_set.kind != "none" and pole_set.distance(z) < 0.5 * clearance:
            raise ClearanceError(f"integration reached z = {z:.4g}, within {0.5 * clearance} of a pole")
        coef = p.evaluate_coeffs(z)
        ym = y.reshape(n, n)
        out = np.empty_like(ym)
        out[:-1] = ym[1:]
        # a_0 u^{(N)} + a_1 u^{(N-1)} + ... + a_N u = X u
        top = x * ym[0]
        for i in range(1, n + 1):
            top = top - coef[i] * ym[n - i]
        out[-1] = top / coef[0]
        return (d * out).ravel()

    return rhs


def continue_solution(p: DifferentialOperator, x: complex, path: PathSpec, tol: float | None = None,
                      atol: float | None = None) -> np.ndarray:
    """Transfer matrix T with jet(end) = T · jet(start) along the path."""
    if p.evaluators is None:
        raise UsageError("continue_solution needs pointwise coefficient evaluators")
    tol = DEFAULT_TOL.ode_rtol if tol is None else tol
    atol = DEFAULT_TOL.ode_atol if atol is None else atol
    path.validate()
    n = p.order
    y = np.eye(n, dtype=complex)
    vs = [complex(v) for v in path.vertices]
    for a, b in zip(vs[:-1], vs[1:]):
        if abs(b - a) == 0:
            continue
        rhs = _companion_rhs(p, complex(x), a, b, path.pole_set, path.min_clearance)
        sol = solve_ivp(rhs, (0.0, 1.0), y.ravel(), method="RK45", rtol=tol, atol=atol)
        if sol.status != 0:
            raise StepCollapseError(f"integrator failed on segment {a:.4g} -> {b:.4g}: {sol.message}")
        y = sol.y[:, -1].reshape(n, n)
    return y


@dataclass(frozen=True)
class MonodromyMatrix:
    matrix: np.ndarray
    path: PathSpec
    spectral_X: complex
    det_error: float = 0.0

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.matrix)

    def distance_to_identity(self) -> float:
        return float(np.max(np.abs(self.matrix - np.eye(self.matrix.shape[0]))))

    def to_json(self) -> dict:
        ev = self.eigenvalues()
        return {"X": [self.spectral_X.real, self.spectral_X.imag], "loop": self.path.label,
                "matrix": [[[v.real, v.imag] for v in row] for row in self.matrix],
                "eigenvalues": [[v.real, v.imag] for v in ev], "det_error": self.det_error,
                "distance_to_identity": self.distance_to_identity()}


def monodromy_matrix(p: DifferentialOperator, x: complex, loop: PathSpec, tol: float | None = None) -> MonodromyMatrix:
    """Transfer matrix of a closed loop.  With a vanishing subleading coefficient det M = 1."""
    if not loop.closed:
        raise UsageError("monodromy needs a closed loop")
    t = continue_solution(p, x, loop, tol)
    det_err = abs(np.linalg.det(t) - 1.0) if p.leading_normal_form() else float("nan")
    return MonodromyMatrix(t, loop, complex(x), float(det_err))


@dataclass(frozen=True)
class BranchPermutation:
    perm: tuple
    degenerate: bool = False
    eigenvalues: tuple = ()
    mismatch: float = 0.0

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise UsageError(f"{self.perm} is not a permutation")

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.perm))

    def compose(self, other: "BranchPermutation") -> "BranchPermutation":
        return BranchPermutation(tuple(self.perm[other.perm[i]] for i in range(len(self.perm))))

    def power(self, k: int) -> "BranchPermutation":
        out = BranchPermutation(tuple(range(len(self.perm))))
        for _ in range(k):
            out = out.compose(self)
        return out

    def to_json(self) -> dict:
        return {"perm": list(self.perm), "identity": self.is_identity(), "degenerate": self.degenerate,
                "eigenvalues": [[complex(v).real, complex(v).imag] for v in self.eigenvalues],
                "mismatch": self.mismatch}


def permutation_from_matrices(cmat: np.ndarray, t: np.ndarray, gap_tol: float | None = None,
                              line_tol: float = 1e-5) -> BranchPermutation:
    """perm[j] = k when T maps the j-th eigenline of cmat onto the k-th one.

    Eigenvalues closer than the branch gap make the eigenlines ill defined;
    if they all coincide the identity is returned and flagged as degenerate,
    otherwise a BranchPointError is raised.
    """
    gap_tol = DEFAULT_TOL.branch_gap if gap_tol is None else gap_tol
    n = cmat.shape[0]
    ev, vecs = np.linalg.eig(cmat)
    scale = max(1.0, float(np.max(np.abs(ev))))
    gaps = [abs(ev[i] - ev[j]) for i in range(n) for j in range(i + 1, n)]
    if gaps and max(gaps) < gap_tol * scale:
        return BranchPermutation(tuple(range(n)), degenerate=True, eigenvalues=tuple(ev))
    if gaps and min(gaps) < gap_tol * scale:
        raise BranchPointError("eigenvalues of the jet matrix nearly coincide; X is too close to a branch point")
    coords = np.linalg.solve(vecs, t @ vecs)  # column j: T v_j in the eigenbasis
    mags = np.abs(coords)
    best, best_err = None, np.inf
    for perm in permutations(range(n)):
        err = max(float(np.sum(np.delete(mags[:, j], perm[j])) / mags[perm[j], j])
                  if mags[perm[j], j] > 0 else np.inf for j in range(n))
        if err < best_err:
            best, best_err = perm, err
    if best_err > line_tol:
        raise NumericalBreakdown(f"monodromy does not permute the eigenlines (mismatch {best_err:.2e})")
    return BranchPermutation(tuple(best), eigenvalues=tuple(ev), mismatch=best_err)


def sigma_permutation(p: DifferentialOperator, q: DifferentialOperator, x: complex, loop: PathSpec,
                      tol: float | None = None, omega=None) -> BranchPermutation:
    """How continuation along ``loop`` permutes the common eigenlines of Q on ker(P − X)."""
    from .curve import rep_matrix

    if abs(loop.basepoint - p.center) > 1e-12 * max(1.0, abs(p.center)):
        raise UsageError("loop must start at the basepoint where P and Q are expanded")
    cmat = rep_matrix(p, q).at(x, omega)
    t = monodromy_matrix(p, x, loop, tol).matrix
    return permutation_from_matrices(cmat, t)


def run_loop_suite(p: DifferentialOperator, q: DifferentialOperator | None, xs: Sequence[complex],
                   loops: Sequence[PathSpec], workers: int = 1, tol: float | None = None) -> list[dict]:
    """Monodromy (and permutation when Q is given) for every (X, loop) pair, in key order."""
    jobs = [(complex(x), lp) for x in xs for lp in loops]

    def one(job):
        x, lp = job
        m = monodromy_matrix(p, x, lp, tol)
        rec = {"X": [x.real, x.imag], "loop": lp.label, "monodromy": m.to_json()}
        if q is not None:
            from .curve import rep_matrix

            cmat = rep_matrix(p, q).at(x)
            rec["permutation"] = permutation_from_matrices(cmat, m.matrix).to_json()
        return rec

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(one, jobs))
    return [one(j) for j in jobs]


__all__ = ["PathSpec", "circle_loop", "lame_loops", "continue_solution", "MonodromyMatrix", "monodromy_matrix",
           "BranchPermutation", "permutation_from_matrices", "sigma_permutation", "run_loop_suite"]
