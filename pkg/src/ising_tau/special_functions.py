"""Modified Bessel functions at integer and half-integer orders.

Thin validating wrappers over :func:`scipy.special.iv` and
:func:`scipy.special.kv`, restricted to the orders used by the kernels.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import special

from .errors import NonPositiveArgument, UnsupportedOrder

MAX_TWICE_NU = 16


@dataclass(frozen=True, order=True)
class HalfIndex:
    """Order nu = twice_nu / 2 (integer or half-integer)."""

    twice_nu: int

    def __post_init__(self):
        if int(self.twice_nu) != self.twice_nu:
            raise UnsupportedOrder(f"twice_nu must be an integer, got {self.twice_nu!r}")
        object.__setattr__(self, "twice_nu", int(self.twice_nu))
        if abs(self.twice_nu) > MAX_TWICE_NU:
            raise UnsupportedOrder(f"order {self.twice_nu}/2 outside |nu| <= {MAX_TWICE_NU // 2}")

    @classmethod
    def of(cls, nu):
        """Build from a float, Fraction, int or an existing HalfIndex."""
        if isinstance(nu, HalfIndex):
            return nu
        twice = 2 * Fraction(nu).limit_denominator(4)
        if twice.denominator != 1 or abs(float(twice) - 2 * float(nu)) > 1e-12:
            raise UnsupportedOrder(f"{nu!r} is not an integer or half-integer")
        return cls(int(twice))

    @property
    def value(self):
        return self.twice_nu / 2.0

    @property
    def is_half(self):
        return self.twice_nu % 2 != 0

    def __float__(self):
        return self.value

    def shift(self, k):
        """nu + k for integer k."""
        return HalfIndex(self.twice_nu + 2 * k)

    def __repr__(self):
        return f"HalfIndex({self.twice_nu}/2)"


def _check(nu, x):
    nu = HalfIndex.of(nu)
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise NonPositiveArgument("Bessel argument must be positive")
    return nu, x


def bessel_i(nu, x):
    """I_nu(x) for x > 0; relative accuracy ~1e-13 away from zeros of I_{-n-1/2}."""
    nu, x = _check(nu, x)
    out = special.iv(nu.value, x)
    return float(out) if out.ndim == 0 else out


def bessel_k(nu, x):
    """K_nu(x) for x > 0."""
    nu, x = _check(nu, x)
    out = special.kv(abs(nu.value), x)
    return float(out) if out.ndim == 0 else out
