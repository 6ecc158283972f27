import cmath

import numpy as np
import pytest

from ellcommute.elliptic import (
    IDENTITY, QExpansion, S, T, curve_coeff_weight, cusp_holomorphic, eisenstein, elliptic_constants,
    g_value, lattice_eisenstein, modular_form_dim, parse_word, verify_weight, wp_eval, wp_laurent,
    zeta_eval, zeta_laurent,
)
from ellcommute.errors import NumericalBreakdown, PoleError, UsageError

RHO = cmath.exp(2j * cmath.pi / 6)


def test_g3_vanishes_at_i():
    assert abs(g_value(1j, 6)) < 1e-10 * abs(g_value(1j, 4))


def test_g2_vanishes_at_rho():
    assert abs(g_value(RHO, 4)) < 1e-10 * abs(g_value(RHO, 6))


def test_g2_against_lattice_sum():
    direct = lattice_eisenstein(1j, 4, 200)
    assert abs(direct - g_value(1j, 4)) / abs(direct) < 1e-8


def test_eisenstein_truncation_diagnostics():
    val, qexp = eisenstein(2j, 4, k_max=12)
    assert abs(qexp.evaluate(2j) - val) < 1e-10 * abs(val)
    with pytest.raises(NumericalBreakdown):
        eisenstein(0.3 + 0.2j, 4, k_max=3)


def test_wp_laurent_structure():
    c = elliptic_constants(0.1 + 1.2j)
    wp = wp_laurent(c, 10)
    assert wp.coeff(-2) == 1
    assert wp.coeff(0) == 0
    assert abs(complex(wp.coeff(2)) - c.g2 / 20) < 1e-12 * abs(c.g2)


def test_wp_laurent_degenerate_invariants():
    wp = wp_laurent(elliptic_constants(1j), 10, g2=0.0, g3=0.0)
    assert wp.coeff(-2) == 1 and wp.max_abs() == 1


def test_zeta_laurent_structure():
    c = elliptic_constants(0.1 + 1.2j)
    z = zeta_laurent(c, 9)
    assert z.coeff(-1) == 1
    assert z.coeff(1) == 0
    assert abs(complex(z.coeff(3)) + c.g2 / 60) < 1e-12 * abs(c.g2)


def test_wp_eval_matches_laurent():
    c = elliptic_constants(1j)
    wp = wp_laurent(c, 40)
    assert abs(wp_eval(1j, 0.3) - complex(wp.evaluate(0.3))) < 1e-9


@pytest.mark.parametrize("omega", [1j, 0.3 + 0.9j, -0.4 + 1.7j])
def test_wp_symmetries(omega):
    z = 0.21 + 0.13j
    assert abs(wp_eval(omega, -z) - wp_eval(omega, z)) < 1e-10 * abs(wp_eval(omega, z))
    assert abs(wp_eval(omega, z + 1) - wp_eval(omega, z)) < 1e-10 * abs(wp_eval(omega, z))
    assert abs(wp_eval(omega, z + omega) - wp_eval(omega, z)) < 1e-9 * abs(wp_eval(omega, z))


def test_zeta_derivative_is_minus_wp():
    om, z, h = 0.2 + 1.1j, 0.3 + 0.2j, 1e-5
    d = (zeta_eval(om, z + h) - zeta_eval(om, z - h)) / (2 * h)
    assert abs(d + wp_eval(om, z)) < 1e-6 * abs(wp_eval(om, z))


def test_wp_pole_raises():
    with pytest.raises(PoleError):
        wp_eval(1j, 1 + 1j)


def test_wp_weight_under_S():
    samples = [(om, z) for om in (0.3 + 1j, 2j) for z in (0.21, 0.37 + 0.11j)]
    chk = verify_weight(wp_eval, 2, S, samples)
    assert chk.passed(1e-8)


def test_identity_gives_zero_error():
    chk = verify_weight(lambda om: g_value(om, 4), 4, IDENTITY, [1j, 0.2 + 1.3j])
    assert chk.max_rel_error == 0


def test_g3_weight_under_T():
    chk = verify_weight(lambda om: g_value(om, 6), 6, T, [0.2 + 1.1j, 1.5j])
    assert chk.passed(1e-10)


def test_parse_word():
    assert parse_word("ST").to_list() == (S @ T).to_list()
    with pytest.raises(UsageError):
        parse_word("SX")


@pytest.mark.parametrize("args,expected", [((2, 3, 1, 0), 4), ((2, 3, 0, 0), 6), ((2, 3, 3, 0), 0)])
def test_curve_coeff_weight(args, expected):
    assert curve_coeff_weight(*args) == expected


@pytest.mark.parametrize("k,d", [(0, 1), (2, 0), (4, 1), (6, 1), (8, 1), (12, 2), (3, 0), (-2, 0)])
def test_modular_form_dim(k, d):
    assert modular_form_dim(k) == d


def test_cusp_holomorphic():
    assert cusp_holomorphic(QExpansion(np.array([1.0, 2.0]), valuation=0))
    assert not cusp_holomorphic(QExpansion(np.array([1.0, 2.0]), valuation=-1))
