import numpy as np
import pytest

from ellcommute.baker_akhiezer import compute_xi
from ellcommute.commutant import PrincipalPart, build_commutant
from ellcommute.curve import (
    PlaneCurve, char_poly, eigenvector_h, genus, jet_transfer, newton_interior_points, rep_matrix,
    single_valued_criterion,
)
from ellcommute.elliptic import wp_eval, wp_prime_eval
from ellcommute.errors import BranchPointError, OffCurveError, UsageError
from ellcommute.fixtures import constant_coefficient_operator
from ellcommute.operators import DifferentialOperator, compose
from ellcommute.series import TruncatedSeries


def curve_from(rows):
    dx = max(j for j, _, _ in rows)
    dy = max(k for _, k, _ in rows)
    g = np.zeros((dx + 1, dy + 1), dtype=complex)
    for j, k, v in rows:
        g[j, k] = v
    return PlaneCurve(g, 2, dy, None)


def test_jet_rows_pure_second_derivative():
    p = constant_coefficient_operator([1, 0, 0], 8)
    rows = jet_transfer(p, r_max=3)
    assert np.array_equal(rows[0][:, 0], [1, 0]) and np.array_equal(rows[1][:, 0], [0, 1])
    # u'' = X u, u''' = X u'
    assert rows[2][0, 1] == 1 and not np.any(rows[2][1]) and rows[2][0, 0] == 0
    assert rows[3][1, 1] == 1 and not np.any(rows[3][0])


def test_jet_rows_lame(lame_i):
    p, _, _ = lame_i
    rows = jet_transfer(p, r_max=3)
    wp1, dwp1 = wp_eval(1j, 0.5), wp_prime_eval(1j, 0.5)
    assert abs(rows[2][0, 0] - 2 * wp1) < 1e-12 * abs(wp1) and rows[2][0, 1] == 1
    assert abs(rows[2][1, 0]) == 0
    # u''' = 2℘' u + (X + 2℘) u'
    assert abs(rows[3][0, 0] - 2 * dwp1) < 1e-9 and abs(rows[3][1, 0] - 2 * wp1) < 1e-12 * abs(wp1)


def test_jet_rows_against_ode_solution(lame_i):
    # jets of an integrated solution, differentiated by finite differences
    from scipy.integrate import solve_ivp

    p, _, _ = lame_i
    x, w, h = 1 + 1j, 0.5, 1e-3
    y0 = np.array([1.0 + 0j, 0.3 - 0.2j])

    def rhs(t, y):
        return [y[1], (x + 2 * wp_eval(1j, t)) * y[0]]

    ts = [w - 2 * h, w - h, w, w + h, w + 2 * h]
    vals = []
    for t in ts:
        sol = solve_ivp(rhs, (w, t), y0, rtol=1e-12, atol=1e-14) if t != w else None
        vals.append(y0 if sol is None else sol.y[:, -1])
    vals = np.array(vals)
    # third derivative from the ODE, checked against a five-point difference of u''
    upp = [(x + 2 * wp_eval(1j, t)) * v[0] for t, v in zip(ts, vals)]
    u3_fd = (-upp[4] + 8 * upp[3] - 8 * upp[1] + upp[0]) / (12 * h)
    rows = jet_transfer(p, r_max=3)
    u3 = sum(np.polynomial.polynomial.polyval(x, rows[3][m]) * y0[m] for m in range(2))
    assert abs(u3 - u3_fd) / abs(u3) < 1e-6


def test_rep_matrix_trivial_cases(lame_i):
    p, _, _ = lame_i
    c = rep_matrix(p, p)
    x = 1.7 - 0.4j
    assert np.allclose(c.at(x), x * np.eye(2))
    one = DifferentialOperator((TruncatedSeries.constant(1.0, 20, "z", 0.5),))
    assert np.allclose(rep_matrix(p, one).at(x), np.eye(2))


def test_char_poly_lame(lame_i):
    p, q, c = lame_i
    curve = char_poly(rep_matrix(p, q))
    assert abs(curve.f(0, 2) - 1) < 1e-12 and abs(curve.f(3, 0) + 1) < 1e-12
    assert abs(curve.f(1, 0) - c.g2 / 4) < 1e-9 * abs(c.g2)
    assert abs(curve.f(0, 0) - c.g3 / 4) < 1e-9 * abs(c.g2)
    assert abs(curve.f(0, 1)) < 1e-9 and abs(curve.f(2, 0)) < 1e-9


def test_char_poly_trivial_commutant(lame_i):
    p, _, _ = lame_i
    curve = char_poly(rep_matrix(p, p))
    # (Y − X)² = Y² − 2XY + X²
    assert abs(curve.f(0, 2) - 1) < 1e-12 and abs(curve.f(1, 1) + 2) < 1e-12 and abs(curve.f(2, 0) - 1) < 1e-12
    rep = genus(curve)
    assert rep.degenerate and rep.varpi is None


def test_bareiss_matches_cofactor():
    p = constant_coefficient_operator([1, 0, 0.3, 0.7], 14)
    q = compose(DifferentialOperator.d(2, 14), DifferentialOperator.d(0, 14)) + \
        DifferentialOperator.multiplication(TruncatedSeries.constant(0.2, 14)).with_meta()
    c = rep_matrix(p, q)
    a = char_poly(c, "cofactor").scalar_grid()
    b = char_poly(c, "bareiss").scalar_grid()
    assert a.shape == b.shape and np.allclose(a, b, atol=1e-12)


def test_third_order_curve():
    # P = ∂³ + 0.7 and Q = ∂: Y³ = X − 0.7
    p = constant_coefficient_operator([1, 0, 0, 0.7], 12)
    curve = char_poly(rep_matrix(p, DifferentialOperator.d(1, 12)))
    assert abs(curve.f(0, 3) - 1) < 1e-14 and abs(curve.f(1, 0) + 1) < 1e-14 and abs(curve.f(0, 0) - 0.7) < 1e-14


def test_curve_basepoint_independence():
    from ellcommute.lame import lame_operator

    grids = []
    for w in (0.5, 0.31 + 0.17j):
        p = lame_operator(2.0, 0.5 + 1j, w, 20)
        q, _ = build_commutant(p, PrincipalPart.monomial(3), compute_xi(p, w, 6))
        grids.append(char_poly(rep_matrix(p, q)).scalar_grid())
    assert grids[0].shape == grids[1].shape
    assert np.max(np.abs(grids[0] - grids[1])) < 1e-9 * np.max(np.abs(grids[0]))


def test_eigenvector_h(lame_i):
    p, q, c = lame_i
    cm = rep_matrix(p, q)
    x = 2.0
    y = np.sqrt(x ** 3 - c.g2 / 4 * x - c.g3 / 4)
    h = eigenvector_h(cm, x, y)
    mat = cm.at(x)
    assert h[0] == 1 and np.max(np.abs(mat @ h - y * h)) < 1e-10 * np.max(np.abs(mat))
    with pytest.raises(OffCurveError):
        eigenvector_h(cm, x, y + 1.0)


def test_eigenvector_h_near_branch_point(lame_i):
    p, q, c = lame_i
    # g3(i) = 0, so X = 0 is a branch point with Y = 0
    with pytest.raises(BranchPointError):
        eigenvector_h(rep_matrix(p, q), 0.0, 0.0)


def test_eigenvector_trivial_split():
    cm = rep_matrix(constant_coefficient_operator([1, 0, 0], 8), DifferentialOperator.d(1, 8))
    # Q = ∂ on ker(∂² − X): eigenvalues ±√X, jets (1, ±√X)
    h = eigenvector_h(cm, 4.0, 2.0)
    assert np.allclose(h, [1, 2])


def test_genus_cubic():
    rep = genus(curve_from([(0, 2, 1), (3, 0, -1), (1, 0, -0.5), (0, 0, -0.2)]))
    assert rep.varpi == 1 and rep.newton_interior == 1 and rep.smooth


def test_genus_quintic():
    rep = genus(curve_from([(0, 2, 1), (5, 0, -1), (1, 0, -1), (0, 0, -1)]))
    assert rep.varpi == 2 and rep.newton_interior == 2


def test_genus_singular_cubic_drops():
    # Y² = X²(X − 1): a node, geometric genus 0
    rep = genus(curve_from([(0, 2, 1), (3, 0, -1), (2, 0, 1)]))
    assert rep.varpi == 0 and rep.smooth is False


def test_newton_interior_triangle():
    assert newton_interior_points([(0, 0), (3, 0), (0, 2)]) == 1


def test_single_valued_criterion():
    cubic = genus(curve_from([(0, 2, 1), (3, 0, -1), (1, 0, -0.5), (0, 0, -0.2)]))
    quintic = genus(curve_from([(0, 2, 1), (5, 0, -1), (1, 0, -1), (0, 0, -1)]))
    assert single_valued_criterion(2, cubic, coprime=True)
    assert not single_valued_criterion(2, quintic, coprime=True)
    assert not single_valued_criterion(4, cubic, coprime=True)
    with pytest.raises(UsageError):
        single_valued_criterion(2, cubic)


def test_curve_json_roundtrip(lame_i):
    p, q, _ = lame_i
    curve = char_poly(rep_matrix(p, q))
    back = PlaneCurve.from_json(curve.to_json())
    assert np.allclose(back.scalar_grid(), curve.scalar_grid())
