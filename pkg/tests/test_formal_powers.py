import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from ising_tau.errors import GammaPole, InvalidInput, UnsupportedOrder, ZeroArgument
from ising_tau.formal_powers import (KernelBasis, Mass, bullet, derivative_terms, w, x_kernel,
                                     y_kernel, z_power)
from ising_tau.special_functions import HalfIndex

ONE, I = KernelBasis.ONE, KernelBasis.I


def dbar_defect(f, z, m, step=1e-5):
    """|dbar f - m conj f| by central differences, relative to |f|."""
    fx = (f(z + step) - f(z - step)) / (2 * step)
    fy = (f(z + 1j * step) - f(z - 1j * step)) / (2 * step)
    return np.max(np.abs(0.5 * (fx + 1j * fy) - m * np.conj(f(z))) / np.abs(f(z)))


def sample_points(n=20, seed=1):
    rng = np.random.default_rng(seed)
    return (0.3 + rng.random(n)) * np.exp(1j * rng.uniform(-2.8, 2.8, n))


def test_w_on_positive_axis():
    assert w(0.5, 0.7, -1.0) == pytest.approx(special.iv(0.5, 1.4))


def test_w_other_sheet_flips_sign():
    r = 0.7
    assert w(0.5, r, -1.0, theta=2 * np.pi) == pytest.approx(-w(0.5, r, -1.0), abs=1e-15)


def test_x_kernel_uses_absolute_order():
    z = 0.4 * np.exp(0.3j)
    assert x_kernel(-1.5, z, -2.0) == pytest.approx(np.exp(-0.45j) * special.kv(1.5, 1.6))


def test_pure_kernel_closed_form():
    m = -1.3
    z = sample_points()
    r, th = np.abs(z), np.angle(z)
    expected = 2 * math.gamma(0.5) * abs(m) ** 0.5 / np.pi * np.exp(-0.5j * th) * special.kv(0.5, 2 * abs(m) * r)
    np.testing.assert_allclose(z_power(ONE, -0.5, z, m), expected, rtol=1e-13)


def test_small_z_asymptotics():
    z = np.array([1e-6, 1e-5, 1e-4])
    np.testing.assert_allclose(np.asarray(z_power(ONE, 0.5, z, -1.0)) / np.sqrt(z), 1.0, atol=1e-4)
    zc = 1e-3 * np.exp(1j * np.linspace(-3, 3, 9))
    got = np.asarray(z_power(I, 1.5, zc, -0.7))
    expected = 1j * zc**1.5
    assert np.max(np.abs(got / expected - 1)) < 5 * 0.7 * 1e-3


@pytest.mark.parametrize("twice_nu", [-5, -3, -1, 1, 2, 3, 5])
@pytest.mark.parametrize("basis", [ONE, I])
@pytest.mark.parametrize("m", [-1.0, -0.4, 0.8])
def test_z_power_is_massive_holomorphic(twice_nu, basis, m):
    def f(u):
        return np.asarray(z_power(basis, HalfIndex(twice_nu), u, m))

    assert dbar_defect(f, sample_points(), m) < 1e-7


@pytest.mark.parametrize("twice_nu", [1, 2, 3, 4])
@pytest.mark.parametrize("basis", [ONE, I])
def test_y_kernel_is_massive_holomorphic(twice_nu, basis):
    m = -0.9

    def f(u):
        return np.asarray(y_kernel(basis, HalfIndex(twice_nu), u, m))

    if basis is I and twice_nu == 1:
        # X_{-1/2} = conj X_{1/2}, so this combination cancels for m < 0
        assert np.abs(f(sample_points())).max() < 1e-15
        return
    assert dbar_defect(f, sample_points(), m) < 1e-7


def test_y_kernel_singularity_and_decay():
    z = np.logspace(-6, -2, 9) * np.exp(0.7j)
    bounded = np.abs(z * np.asarray(y_kernel(ONE, 1, z, -1.0)))
    assert bounded.max() < 2 and bounded.min() > 0.5
    far = np.abs(np.asarray(y_kernel(ONE, 0.5, np.array([5.0, 10.0]), -1.0)))
    assert far[1] / far[0] < np.exp(-9)


def test_half_integer_monodromy():
    z = sample_points()
    th = np.angle(z)
    for fn in (lambda t: z_power(I, 1.5, z, -1, theta=t), lambda t: y_kernel(ONE, 0.5, z, -1, theta=t)):
        np.testing.assert_allclose(fn(th + 2 * np.pi), -np.asarray(fn(th)), atol=1e-13)


def test_bullet_definitions():
    z = sample_points(5)
    np.testing.assert_allclose(bullet(1, -0.5, z, -1), z_power(ONE, -0.5, z, -1))
    np.testing.assert_allclose(bullet(1j, -0.5, z, -1), z_power(I, -0.5, z, -1))
    small = 1e-5 * np.exp(0.4j)
    assert abs(bullet(1 + 1j, 0.5, small, -1) / ((1 + 1j) * np.sqrt(small)) - 1) < 1e-4


@settings(max_examples=40, deadline=None)
@given(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.floats(-3, 3))
def test_bullet_is_real_linear(c1, c2, lam):
    z = sample_points(6)
    lhs = np.asarray(bullet(c1 + lam * c2, 1.5, z, -0.6))
    rhs = np.asarray(bullet(c1, 1.5, z, -0.6)) + lam * np.asarray(bullet(c2, 1.5, z, -0.6))
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * (1 + np.abs(rhs).max()))


def test_derivative_terms_of_pure_kernel():
    # minus d_x of Z1_{-1/2} is 1/2 Z1_{-3/2} - 2 m^2 Z1_{1/2}
    m = -1.1
    terms = derivative_terms(1, -0.5, "x", m)
    assert [(-c, nu.value) for c, nu in terms] == [(0.5, -1.5), (pytest.approx(-2 * m * m), 0.5)]


@pytest.mark.parametrize("axis", ["x", "y"])
@pytest.mark.parametrize("c", [1.0, 1j, 0.3 - 2j])
@pytest.mark.parametrize("twice_nu", [-3, -1, 1, 2, 3])
def test_derivative_terms_against_differences(axis, c, twice_nu):
    m, h = -0.8, 1e-5
    z = sample_points()
    dz = h if axis == "x" else 1j * h
    nu = HalfIndex(twice_nu)
    fd = (np.asarray(bullet(c, nu, z + dz, m)) - np.asarray(bullet(c, nu, z - dz, m))) / (2 * h)
    pred = sum(np.asarray(bullet(k, o, z, m)) for k, o in derivative_terms(c, nu, axis, m))
    assert np.max(np.abs(fd - pred) / np.abs(pred)) < 1e-7


def test_errors():
    with pytest.raises(ZeroArgument):
        z_power(ONE, 0.5, 0.0, -1)
    with pytest.raises(GammaPole):
        z_power(ONE, -1, 0.5, -1)
    with pytest.raises(UnsupportedOrder):
        y_kernel(ONE, -0.5, 0.5, -1)
    with pytest.raises(UnsupportedOrder):
        derivative_terms(1, 0, "x", -1)
    with pytest.raises(InvalidInput):
        derivative_terms(1, 0.5, "z", -1)
    with pytest.raises(InvalidInput):
        Mass(0.0)
    assert Mass(-2).sign == -1 and Mass(-2).abs == 2
