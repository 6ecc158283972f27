import numpy as np
import pytest

from ellcommute.baker_akhiezer import compute_xi
from ellcommute.commutant import (
    GradedRingView, PrincipalPart, build_commutant, dim_DK, fit_principal_part, proportionality, tail_weights,
)
from ellcommute.elliptic import S, T, elliptic_constants
from ellcommute.errors import NotCommutingError, UsageError
from ellcommute.lame import lame_operator
from ellcommute.operators import compose, is_commuting


def max_diff(a, b, hi=12):
    return max(x.truncate(hi).max_abs_diff(y.truncate(hi)) for x, y in zip(a.coeffs, b.coeffs))


@pytest.fixture(scope="module")
def ba_i(lame_i):
    return compute_xi(lame_i[0], 0.5, 8)


def test_prin_lambda_n_gives_p(lame_i, ba_i):
    p = lame_i[0]
    q, a = build_commutant(p, PrincipalPart.monomial(2), ba_i)
    assert max_diff(q, p) < 1e-12 * max(c.truncate(12).max_abs() for c in p.coeffs)
    assert max(abs(complex(a.A(s))) for s in range(1, a.s_max + 1)) < 1e-9


def test_prin_constant_gives_scalar(lame_i, ba_i):
    q, _ = build_commutant(lame_i[0], PrincipalPart.from_list([3.0]), ba_i)
    assert q.order == 0
    assert abs(complex(q.coeffs[0].coeff(0)) - 3) < 1e-14 and q.coeffs[0].truncate(10).max_abs() == 3


def test_prin_lambda3_gives_lame_q(lame_i, ba_i):
    p, qref, _ = lame_i
    q, _ = build_commutant(p, PrincipalPart.monomial(3), ba_i)
    assert max_diff(q, qref) < 1e-9 * max(c.truncate(12).max_abs() for c in qref.coeffs)


def test_leading_zero_rejected():
    with pytest.raises(UsageError):
        PrincipalPart.from_list([0.0, 1.0])


def test_unrealizable_prin_detected():
    p = lame_operator(6.0, 1j, 0.5, 24)
    with pytest.raises(NotCommutingError):
        build_commutant(p, PrincipalPart.monomial(5), compute_xi(p, 0.5, 12))


def test_fit_recovers_commuting_rank5():
    p = lame_operator(6.0, 1j, 0.5, 24)
    ba = compute_xi(p, 0.5, 12)
    g2 = elliptic_constants(1j).g2
    prin, left = fit_principal_part(p, PrincipalPart.monomial(5), ba, {4: g2})
    assert left < 1e-8
    q, _ = build_commutant(p, prin, ba)
    assert is_commuting(p, q, 1e-8)[0]


def test_uniqueness_across_basepoints():
    # the operator built at two basepoints agrees at a common point
    om = 0.2 + 1.1j
    q1, _ = build_commutant(lame_operator(2.0, om, 0.5, 20), PrincipalPart.monomial(3),
                            compute_xi(lame_operator(2.0, om, 0.5, 20), 0.5, 6))
    q2, _ = build_commutant(lame_operator(2.0, om, 0.45, 20), PrincipalPart.monomial(3),
                            compute_xi(lame_operator(2.0, om, 0.45, 20), 0.45, 6))
    z = 0.47
    assert np.allclose([complex(c.evaluate(z)) for c in q1.coeffs],
                       [complex(c.evaluate(z)) for c in q2.coeffs], rtol=1e-9, atol=1e-9)


def test_product_stays_in_commutant(lame_i, ba_i):
    p = lame_i[0]
    q, a = build_commutant(p, PrincipalPart.monomial(3), ba_i)
    qq = compose(q, q)
    assert is_commuting(p, qq, 1e-8)[0]


@pytest.mark.parametrize("k,cap,d", [(3, 3, 1), (0, None, 1), (5, 5, 2), (4, 4, 2), (-1, None, 0)])
def test_dim_DK(k, cap, d):
    assert dim_DK(k, cap) == d


def test_graded_view_bases():
    v = GradedRingView(12)
    assert v.basis(12) == [(0, 2), (3, 0)]
    assert v.to_json()["dim"] == v.dim()


def test_tail_A1_is_multiple_of_g2():
    grid = [1j, 0.1 + 1.2j, 0.3 + 1.1j, -0.2 + 0.9j]
    vals, refs = [], []
    for om in grid:
        p = lame_operator(2.0, om, 0.5, 16)
        _, a = build_commutant(p, PrincipalPart.monomial(3), compute_xi(p, 0.5, 6))
        vals.append(complex(a.A(1)))
        refs.append(elliptic_constants(om).g2)
    mean, spread = proportionality(vals, refs)
    assert spread < 1e-7
    assert abs(mean + 1 / 8) < 1e-9


def test_tail_weights_report():
    def a_of(om):
        p = lame_operator(2.0, om, 0.5, 16)
        return build_commutant(p, PrincipalPart.monomial(3), compute_xi(p, 0.5, 6))[1]

    rep = tail_weights(a_of, 3, [1], samples=[0.1 + 1.2j, 0.3 + 1.1j], alphas=(S, T))
    assert rep.passed, rep.to_json()
