import numpy as np
import pytest

from ising_tau.contour import Circle, extract_coefficient, extract_series, pairing
from ising_tau.errors import IllConditioned, InvalidInput, SampleMismatch
from ising_tau.formal_powers import KernelBasis, bullet, z_power
from ising_tau.validation import pairing_table

ONE, I = KernelBasis.ONE, KernelBasis.I
A = 0.4 - 0.2j
M = -1.0


def sampler(*terms):
    """f(z, theta) = sum of c•Z_nu(z - A)."""
    def f(z, th):
        return sum(np.asarray(bullet(c, nu, z - A, M, theta=th)) for c, nu in terms)
    return f


def test_circle_validation():
    with pytest.raises(InvalidInput):
        Circle(0, 0.0)
    with pytest.raises(InvalidInput):
        Circle(0, 1.0, 63)
    c = Circle(1j, 0.5, 64, theta0=0.25)
    assert c.nodes.shape == (64,) and abs(c.nodes[0] - (1j + 0.5 * np.exp(0.25j))) < 1e-15


def test_pairing_dual_constant_is_one_and_loop_independent():
    vals = []
    for r in (0.25, 0.5, 1.0):
        circ = Circle(0, r, 4096)
        f = z_power(ONE, 0.5, circ.nodes, M, theta=circ.theta)
        g = z_power(I, -1.5, circ.nodes, M, theta=circ.theta)
        vals.append(pairing(f, g, circ))
    np.testing.assert_allclose(vals, 1.0, atol=1e-12)


def test_pairing_same_basis_vanishes():
    circ = Circle(0, 0.5, 1024)
    f = z_power(ONE, 0.5, circ.nodes, M, theta=circ.theta)
    g = z_power(ONE, -1.5, circ.nodes, M, theta=circ.theta)
    assert abs(pairing(f, g, circ)) < 1e-10


def test_pairing_table_pattern():
    table, expected, labels = pairing_table(-0.6, samples=1024)
    assert len(labels) == 10
    assert np.abs(table - expected).max() < 1e-8


def test_pairing_shape_check():
    with pytest.raises(SampleMismatch):
        pairing(np.ones(64), np.ones(128), Circle(0, 1.0, 128))


def test_extract_seed():
    circ = Circle(A, 0.3, 256)
    assert extract_coefficient(sampler((1, -0.5)), A, -0.5, circ, M) == pytest.approx(1, abs=1e-12)


def test_extract_single_term():
    f = sampler((2.5j, 1.5))
    circ = Circle(A, 0.3, 256)
    got = [extract_coefficient(f, A, nu, circ, M) for nu in (-0.5, 0.5, 1.5)]
    np.testing.assert_allclose(got, [0, 0, 2.5j], atol=1e-12)


def test_extract_is_radius_independent():
    f = sampler((1, -0.5), (0.3j, 0.5))
    out = [extract_series(f, A, Circle(A, r, 256), M) for r in (0.1, 0.4)]
    for name in ("B", "A", "D"):
        assert abs(getattr(out[0], name) - getattr(out[1], name)) < 1e-9


def test_series_round_trip():
    f = sampler((-1j, -0.5), (1 + 2j, 0.5), (0.1, 1.5))
    ser = extract_series(f, A, Circle(A, 0.3, 256), M)
    assert ser.iB == pytest.approx(-1j, abs=1e-9)
    assert ser.A == pytest.approx(1 + 2j, abs=1e-9)
    assert ser.D == pytest.approx(0.1, abs=1e-9)
    assert ser.residual < 1e-12


def test_pure_kernel_has_no_higher_content():
    ser = extract_series(sampler((1, -0.5)), A, Circle(A, 0.3, 256), M)
    assert abs(ser.D) < 1e-12 and abs(ser.A) < 1e-12 and ser.B == pytest.approx(-1j)


def test_residual_flags_missing_terms():
    f = sampler((1, -0.5), (3.0, 2.5))
    with pytest.raises(IllConditioned):
        extract_series(f, A, Circle(A, 0.8, 256), M, tol=1e-6)


def test_vector_valued_sampler():
    def f(z, th):
        return np.stack([sampler((1, -0.5))(z, th), sampler((2j, 0.5))(z, th)])

    got = extract_coefficient(f, A, 0.5, Circle(A, 0.3, 256), M)
    np.testing.assert_allclose(got, [0, 2j], atol=1e-12)
