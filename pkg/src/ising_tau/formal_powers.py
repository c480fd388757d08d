"""Massive holomorphic formal powers and decaying kernels.

For ``dbar f = m conj(f)`` the formal powers ``Z1_nu``, ``Zi_nu`` play the
role of ``z**nu`` and ``i z**nu``:

    Z1_nu = Gamma(nu+1) |m|^-nu (W_nu + sgn(m) conj W_{nu+1})
    Zi_nu = i Gamma(nu+1) |m|^-nu (W_nu - sgn(m) conj W_{nu+1})

with ``W_nu(r e^{i theta}) = e^{i nu theta} I_nu(2|m| r)``.  The kernels
``Y1_{-nu}``, ``Yi_{-nu}`` are the exponentially decaying analogues of
``z**-nu`` built from ``X_mu = e^{i mu theta} K_|mu|(2|m| r)``.

Half-integer orders live on the double cover, so every function takes an
optional continuous angle ``theta``; when omitted the principal argument of
``z`` is used.
"""

import enum
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import GammaPole, InvalidInput, UnsupportedOrder, ZeroArgument
from .special_functions import HalfIndex


@dataclass(frozen=True)
class Mass:
    """Mass parameter m of the massive Cauchy-Riemann equation (m != 0)."""

    m: float

    def __post_init__(self):
        m = float(self.m)
        if m == 0.0 or not np.isfinite(m):
            raise InvalidInput("mass must be finite and non-zero")
        object.__setattr__(self, "m", m)

    @classmethod
    def of(cls, m):
        return m if isinstance(m, Mass) else cls(m)

    @property
    def abs(self):
        return abs(self.m)

    @property
    def sign(self):
        return 1.0 if self.m > 0 else -1.0

    def __float__(self):
        return self.m


class KernelBasis(enum.Enum):
    """Which of the two real-independent functions of a given order."""

    ONE = "1"
    I = "i"


def _polar(z, theta):
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    if np.any(r == 0.0):
        raise ZeroArgument("formal powers are singular or branched at z = 0")
    th = np.angle(z) if theta is None else np.broadcast_to(np.asarray(theta, dtype=float), z.shape)
    return r, th


def _out(v):
    return complex(v) if np.ndim(v) == 0 else v


def w(nu, z, m, theta=None):
    """W_nu(z) = e^{i nu theta} I_nu(2|m| r)."""
    nu = HalfIndex.of(nu).value
    m = Mass.of(m)
    r, th = _polar(z, theta)
    return _out(np.exp(1j * nu * th) * special.iv(nu, 2.0 * m.abs * r))


def x_kernel(mu, z, m, theta=None):
    """X_mu(z) = e^{i mu theta} K_|mu|(2|m| r)."""
    mu = HalfIndex.of(mu).value
    m = Mass.of(m)
    r, th = _polar(z, theta)
    return _out(np.exp(1j * mu * th) * special.kv(abs(mu), 2.0 * m.abs * r))


def _gamma_prefactor(nu, m):
    if nu <= -1 and float(nu).is_integer():
        raise GammaPole(f"Gamma(nu+1) has a pole at nu = {nu:g}")
    return special.gamma(nu + 1.0) / m.abs**nu


def z_power(basis, nu, z, m, theta=None):
    """Formal power Z1_nu or Zi_nu; asymptotic to z**nu, i z**nu at 0."""
    basis = KernelBasis(basis)
    nu = HalfIndex.of(nu)
    m = Mass.of(m)
    c = _gamma_prefactor(nu.value, m)
    lo = w(nu, z, m, theta)
    hi = np.conj(w(nu.shift(1), z, m, theta))
    if basis is KernelBasis.ONE:
        return _out(c * (lo + m.sign * hi))
    return _out(1j * c * (lo - m.sign * hi))


def y_kernel(basis, nu, z, m, theta=None):
    """Decaying kernel Y1_{-nu} or Yi_{-nu} (nu >= 1/2).

    Y1_{-nu} = C (X_{-nu} - sgn(m) conj X_{1-nu}),
    Yi_{-nu} = i C (X_{-nu} + sgn(m) conj X_{1-nu}),  C = 2|m|^nu / Gamma(nu).

    Both are massive holomorphic, behave like z**-nu and i z**-nu at 0 for
    nu >= 1 and decay like |z|^{-1/2} e^{-2|m||z|}.
    """
    basis = KernelBasis(basis)
    nu = HalfIndex.of(nu)
    if nu.twice_nu < 1:
        raise UnsupportedOrder("Y kernels need nu >= 1/2")
    m = Mass.of(m)
    c = 2.0 * m.abs**nu.value / special.gamma(nu.value)
    lo = x_kernel(HalfIndex(-nu.twice_nu), z, m, theta)
    hi = np.conj(x_kernel(HalfIndex(2 - nu.twice_nu), z, m, theta))
    if basis is KernelBasis.ONE:
        return _out(c * (lo - m.sign * hi))
    return _out(1j * c * (lo + m.sign * hi))


def bullet(c, nu, z, m, theta=None):
    """c • Z_nu := Re(c) Z1_nu + Im(c) Zi_nu."""
    c = complex(c)
    return _out(c.real * np.asarray(z_power(KernelBasis.ONE, nu, z, m, theta))
                + c.imag * np.asarray(z_power(KernelBasis.I, nu, z, m, theta)))


def derivative_terms(c, nu, axis, m):
    """Expansion of d/dx or d/dy of c • Z_nu as [(coefficient, order), ...].

    d_x (c•Z_nu) = nu c•Z_{nu-1} + m^2/(nu+1) c•Z_{nu+1}
    d_y (c•Z_nu) = nu (ic)•Z_{nu-1} - m^2/(nu+1) (ic)•Z_{nu+1}
    At nu = 0 the lower term is a finite limit that is not a formal power,
    so that order is rejected.
    """
    nu = HalfIndex.of(nu)
    m = Mass.of(m)
    c = complex(c)
    if axis not in ("x", "y"):
        raise InvalidInput("axis must be 'x' or 'y'")
    rot = 1.0 if axis == "x" else 1j
    hi = m.m**2 / (nu.value + 1.0)
    if nu.twice_nu == 0:
        raise UnsupportedOrder("derivative expansion is not defined at nu = 0")
    terms = [(nu.value * rot * c, nu.shift(-1))]
    sign = 1.0 if axis == "x" else -1.0
    terms.append((sign * hi * rot * c, nu.shift(1)))
    return terms
