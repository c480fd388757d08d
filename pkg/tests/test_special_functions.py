from fractions import Fraction
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ising_tau.errors import NonPositiveArgument, UnsupportedOrder
from ising_tau.special_functions import HalfIndex, bessel_i, bessel_k

# 30-digit mpmath values
I_HALF_1 = 0.937674888245487646717262884391
I_MHALF_1 = 1.23120021459296744650589174245
K_HALF_1 = 0.461068504447894558439575873876
K0_6 = 0.00124399432801312308523246926009
I_5HALF_73 = 141.053659706777184254252987165
K_7HALF_02 = 5233.73018408032016444009236083
I_M3HALF_04 = -2.89141979918959346460810669648


def test_half_index_parsing():
    assert HalfIndex.of(0.5) == HalfIndex(1)
    assert HalfIndex.of(Fraction(-3, 2)).value == -1.5
    assert HalfIndex.of(2).is_half is False
    assert HalfIndex(3).shift(-2) == HalfIndex(-1)
    with pytest.raises(UnsupportedOrder):
        HalfIndex.of(0.3)
    with pytest.raises(UnsupportedOrder):
        HalfIndex(40)


def test_closed_forms_at_one():
    assert bessel_i(0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1.0), rel=1e-14)
    assert bessel_i(-0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.cosh(1.0), rel=1e-14)
    assert bessel_k(0.5, 1.0) == pytest.approx(math.sqrt(math.pi / 2) * math.exp(-1.0), rel=1e-14)


@pytest.mark.parametrize("fn, nu, x, expected", [
    (bessel_i, 0.5, 1.0, I_HALF_1),
    (bessel_i, -0.5, 1.0, I_MHALF_1),
    (bessel_k, 0.5, 1.0, K_HALF_1),
    (bessel_k, 0, 6.0, K0_6),
    (bessel_i, 2.5, 7.3, I_5HALF_73),
    (bessel_k, 3.5, 0.2, K_7HALF_02),
    (bessel_i, -1.5, 0.4, I_M3HALF_04),
])
def test_frozen_mpmath_values(fn, nu, x, expected):
    assert fn(nu, x) == pytest.approx(expected, rel=1e-13)


def test_k_is_even_in_order():
    x = np.linspace(0.1, 5, 7)
    np.testing.assert_allclose(bessel_k(-1.5, x), bessel_k(1.5, x), rtol=0)


def test_vectorised_shape():
    out = bessel_i(1, np.array([[0.5, 1.0], [2.0, 3.0]]))
    assert out.shape == (2, 2)


@pytest.mark.parametrize("x", [0.0, -1.0, np.nan])
def test_non_positive_argument(x):
    with pytest.raises(NonPositiveArgument):
        bessel_i(0.5, x)
    with pytest.raises(NonPositiveArgument):
        bessel_k(0.5, x)


@settings(max_examples=60, deadline=None)
@given(st.integers(-7, 7), st.floats(0.05, 30.0))
def test_against_mpmath(twice_nu, x):
    nu = twice_nu / 2
    ref_i = float(mpmath.besseli(nu, x))
    ref_k = float(mpmath.besselk(nu, x))
    assert bessel_k(nu, x) == pytest.approx(ref_k, rel=1e-12)
    # I_{-n-1/2} changes sign; compare on the scale of the larger term
    scale = max(abs(ref_i), float(mpmath.besseli(abs(nu), x)))
    assert abs(bessel_i(nu, x) - ref_i) <= 1e-12 * scale
