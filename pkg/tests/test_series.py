import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ellcommute.elliptic import elliptic_constants, wp_laurent, zeta_laurent
from ellcommute.errors import PrecisionError, SingularSeriesError, UsageError
from ellcommute.series import QRing, TruncatedSeries


def poly(cs, lo=0):
    return TruncatedSeries.from_coeffs(np.asarray(cs, dtype=complex), lo)


def test_mul_polynomial_identity():
    out = poly([1, 1, 0, 0]) * poly([1, -1, 0, 0])
    assert np.allclose([out.coeff(k) for k in range(4)], [1, 0, -1, 0])


def test_mul_shifts_window():
    out = TruncatedSeries.monomial(-2, 4) * TruncatedSeries.monomial(3, 6)
    assert out.order_min == 1
    assert out.coeff(1) == 1
    # error terms O(z^5)·z^3 and z^-2·O(z^7): the product is known through z^4
    assert out.order_max == 4


def test_wp_square_against_direct_convolution():
    # exact rational invariants g2 = 4, g3 = 0
    consts = elliptic_constants(1j)
    wp = wp_laurent(consts, 14, g2=4.0, g3=0.0)
    sq = wp * wp
    c = {k: complex(wp.coeff(k)) for k in range(-2, 15)}
    for n in range(-4, sq.order_max + 1):
        direct = sum(c[k] * c[n - k] for k in range(-2, 15) if -2 <= n - k <= 14)
        assert abs(complex(sq.coeff(n)) - direct) < 1e-12


def test_integrate_constant():
    out = TruncatedSeries.constant(1.0, 5, center=0.3).integrate_from_center()
    assert out.coeff(0) == 0 and out.coeff(1) == 1


def test_integrate_zero():
    out = TruncatedSeries.constant(0.0, 5).integrate_from_center()
    assert out.max_abs() == 0


def test_integrate_wp_regular_part_gives_zeta():
    consts = elliptic_constants(0.2 + 1.3j)
    wp = wp_laurent(consts, 9)
    regular = (wp - TruncatedSeries.monomial(-2, wp.order_max)).truncate(8)
    got = -regular.integrate_from_center()
    zeta = zeta_laurent(consts, 9)
    ref = zeta - TruncatedSeries.monomial(-1, zeta.order_max)
    assert all(abs(complex(got.coeff(k)) - complex(ref.coeff(k))) < 1e-12 for k in range(0, 10))


def test_integrate_rejects_residue():
    with pytest.raises((UsageError, SingularSeriesError)):
        TruncatedSeries.monomial(-1, 4).integrate_from_center()


def test_invert_geometric():
    inv = poly([1, 1, 0, 0, 0, 0]).invert()
    assert np.allclose([inv.coeff(k) for k in range(6)], [(-1) ** k for k in range(6)])


def test_invert_wp_multiplies_back():
    wp = wp_laurent(elliptic_constants(1j), 16)
    inv = wp.invert()
    assert inv.order_min == 2
    prod = wp * inv
    assert abs(complex(prod.coeff(0)) - 1) < 1e-13
    assert max(abs(complex(prod.coeff(k))) for k in range(1, prod.order_max + 1)) < 1e-10


def test_invert_zero_raises():
    with pytest.raises((SingularSeriesError, PrecisionError)):
        TruncatedSeries.constant(0.0, 4).invert()


def test_rescale_monomial_and_identity():
    a = TruncatedSeries.monomial(2, 6)
    assert abs(complex(a.rescale(3.0).coeff(2)) - 9) < 1e-14
    b = poly([1, 2, 3])
    assert b.rescale(1).max_abs_diff(b) == 0


def test_rescale_wp_homogeneity():
    # ℘(Λ; c z') = c^-2 ℘(Λ/c; z'); lattice Z + ZΩ scaled by 1/c with c = 1/2 is Z·2 + Z·2Ω
    consts = elliptic_constants(1j)
    c = 0.5
    wp = wp_laurent(consts, 16)
    scaled = wp.rescale(c) * (c ** 2)
    g2s, g3s = consts.g2 * c ** 4, consts.g3 * c ** 6
    ref = wp_laurent(consts, 16, g2=g2s, g3=g3s)
    assert all(abs(complex(scaled.coeff(k)) - complex(ref.coeff(k))) < 1e-10 for k in range(-2, 7))


def test_window_exhaustion_is_reported():
    s = poly([1, 2, 3])
    with pytest.raises(PrecisionError):
        s.coeff(7)


def test_json_roundtrip_q_ring():
    ring = QRing(4)
    s = TruncatedSeries.constant(2.0, 3, ring=ring)
    back = TruncatedSeries.from_json(s.to_json())
    assert back.max_abs_diff(s) == 0


coeff = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
series = st.lists(coeff, min_size=6, max_size=6).map(lambda cs: poly(cs, 0))


@settings(max_examples=40, deadline=None)
@given(series, series, series)
def test_ring_axioms(a, b, c):
    assert (a * b).max_abs_diff(b * a) < 1e-9
    assert ((a * b) * c).max_abs_diff(a * (b * c)) < 1e-7
    assert (a * (b + c)).max_abs_diff(a * b + a * c) < 1e-7


@settings(max_examples=40, deadline=None)
@given(series, series)
def test_leibniz_rule(a, b):
    lhs = (a * b).derivative()
    rhs = a.derivative() * b + a * b.derivative()
    assert lhs.max_abs_diff(rhs) < 1e-7


@settings(max_examples=30, deadline=None)
@given(st.lists(coeff, min_size=5, max_size=5), coeff)
def test_invert_roundtrip(cs, c0):
    cs = [c0 + 1.0 + 0j if abs(c0 + 1.0) > 0.5 else 2.0] + list(cs)
    a = poly(cs)
    prod = a * a.invert()
    assert abs(complex(prod.coeff(0)) - 1) < 1e-9
    scale = max(1.0, a.max_abs()) ** 6
    assert max(abs(complex(prod.coeff(k))) for k in range(1, prod.order_max + 1)) < 1e-9 * scale
