import numpy as np
import pytest

from ellcommute.baker_akhiezer import check_pairwise_commute, compute_xi, eigen_series
from ellcommute.errors import NotCommutingError, UsageError
from ellcommute.lame import lame_operator
from ellcommute.operators import DifferentialOperator, apply_symbol, compose
from ellcommute.pipeline import lame_xi_oracle, series_coeff_error
from ellcommute.series import TruncatedSeries


@pytest.fixture(scope="module")
def ba_i(lame_i):
    p, _, _ = lame_i
    return compute_xi(p, 0.5, 8)


def test_xi0_is_one_and_xi_vanish_at_basepoint(ba_i):
    assert ba_i[0].max_abs_diff(TruncatedSeries.constant(1.0, ba_i[0].order_max, "z", 0.5)) == 0
    for s in range(1, ba_i.s_max + 1):
        assert abs(complex(ba_i[s].coeff(0))) == 0


def test_xi1_xi2_against_zeta_wp(ba_i):
    xi1, xi2 = lame_xi_oracle(1j, 0.5, 12)
    assert series_coeff_error(ba_i[1], xi1, 10) < 1e-10
    assert series_coeff_error(ba_i[2], xi2, 10) < 1e-9


def test_symbol_identity(lame_i, ba_i):
    # e^{-λ(z-w)} P Ψ = λ² Σ ξ_s λ^{-s}
    p, _, _ = lame_i
    sym = apply_symbol(p, ba_i.xi, 7)
    for t in range(7):
        want = ba_i[t]
        got = sym.terms[t]
        hi = min(got.order_max, want.order_max, 10)
        assert got.truncate(hi).max_abs_diff(want.truncate(hi)) < 1e-8 * max(1.0, want.max_abs())


def test_pole_basepoint_rejected():
    p = lame_operator(2.0, 1j, 0.0, 12)
    with pytest.raises(UsageError):
        compute_xi(p, 0.0, 3)


def test_non_normal_operator_rejected():
    one = TruncatedSeries.constant(1.0, 6)
    with pytest.raises(UsageError):
        compute_xi(DifferentialOperator((one, one, one)), s_max=2)


def test_eigen_series_of_p_is_lambda_n(lame_i, ba_i):
    p, _, _ = lame_i
    a = eigen_series(p, p, ba_i)
    assert abs(complex(a.A(-2)) - 1) < 1e-12
    assert max(abs(complex(a.A(s))) for s in range(-1, a.s_max + 1)) < 1e-9


def test_eigen_series_of_constant(lame_i, ba_i):
    p, _, _ = lame_i
    c = DifferentialOperator((TruncatedSeries.constant(2.5 - 1j, 20, "z", 0.5),))
    a = eigen_series(p, c, ba_i)
    assert abs(complex(a.A(0)) - (2.5 - 1j)) < 1e-14
    assert max(abs(complex(a.A(s))) for s in range(1, a.s_max + 1)) < 1e-12


def test_eigen_series_of_lame_q(lame_i, ba_i):
    p, q, c = lame_i
    a = eigen_series(p, q, ba_i)
    prin = [complex(a.A(s)) for s in range(-3, 1)]
    assert np.allclose(prin, [1, 0, 0, 0], atol=1e-10)
    assert abs(complex(a.A(1)) + c.g2 / 8) < 1e-9 * abs(c.g2)


def test_eigen_series_rejects_non_commuting(lame_i, ba_i):
    p, _, _ = lame_i
    with pytest.raises(NotCommutingError):
        eigen_series(p, DifferentialOperator.d(1, 20, 0.5), ba_i)


def test_pairwise_commute(lame_i):
    p, q, _ = lame_i
    assert check_pairwise_commute(p, p, q)
    assert check_pairwise_commute(p, q, compose(q, q))
    assert not check_pairwise_commute(p, q, DifferentialOperator.d(1, 20, 0.5))
