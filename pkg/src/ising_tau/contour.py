"""Circle quadrature for the Green-Riemann pairing and residue extraction.

The pairing of two spinors with the same monodromy around ``a`` is

    <f, g>_a = -(1/2pi) Re \\oint f g dz,

which does not depend on the loop.  Against formal powers it picks out
expansion coefficients: ``A1_nu(a, f) = <f, Zi_{-nu-1}>`` and
``Ai_nu(a, f) = <f, Z1_{-nu-1}>``.

Sampled spinors are passed as callables ``f(z, theta)`` where ``theta`` is a
continuous angle of ``z - a`` selecting the sheet.
"""

from dataclasses import dataclass

import numpy as np

from .errors import IllConditioned, InvalidInput, NoConvergence, SampleMismatch
from .formal_powers import KernelBasis, Mass, bullet, z_power
from .special_functions import HalfIndex

DEFAULT_SAMPLES = 512
MAX_SAMPLES = 1 << 15


@dataclass(frozen=True)
class Circle:
    """Uniform trapezoid nodes on |z - center| = radius.

    ``theta0`` is the angle of the first node; continuing it by 2*pi moves
    every node to the other sheet.
    """

    center: complex
    radius: float
    samples: int = DEFAULT_SAMPLES
    theta0: float = 0.0

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidInput("circle radius must be positive")
        if self.samples < 64 or self.samples % 2:
            raise InvalidInput("circle needs an even number of at least 64 samples")
        object.__setattr__(self, "center", complex(self.center))

    @property
    def theta(self):
        return self.theta0 + 2.0 * np.pi * np.arange(self.samples) / self.samples

    @property
    def nodes(self):
        return self.center + self.radius * np.exp(1j * self.theta)

    def with_samples(self, samples):
        return Circle(self.center, self.radius, samples, self.theta0)

    def with_radius(self, radius):
        return Circle(self.center, radius, self.samples, self.theta0)


@dataclass(frozen=True)
class SeriesCoefficients:
    """Leading expansion data at a point.

    ``B`` is the coefficient 𝓑 with A_{-1/2} = i𝓑 (so 𝓑 = -i at the
    spinor's own point), ``A`` = A_{1/2}, ``D`` = A_{3/2}.
    """

    B: complex
    A: complex
    D: complex
    residual: float

    @property
    def iB(self):
        return 1j * self.B


def pairing(f, g, circle):
    """-(1/2pi) Re of the trapezoid rule for \\oint f g dz over ``circle``.

    The last axis indexes the nodes; leading axes of f and g broadcast.
    """
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape[-1:] != (circle.samples,) or g.shape[-1:] != (circle.samples,):
        raise SampleMismatch(
            f"samples of shape {f.shape} and {g.shape} do not match {circle.samples} nodes")
    dz = 1j * (circle.nodes - circle.center)
    return np.real(np.sum(f * g * dz, axis=-1)) * (-1.0 / circle.samples)


def _kernel_samples(basis, order, circle, m):
    return np.asarray(z_power(basis, order, circle.nodes - circle.center, m, theta=circle.theta))


def _coefficient_once(values, nu, circle, m):
    dual = HalfIndex(-nu.twice_nu - 2)
    a1 = pairing(values, _kernel_samples(KernelBasis.I, dual, circle, m), circle)
    ai = pairing(values, _kernel_samples(KernelBasis.ONE, dual, circle, m), circle)
    return a1 + 1j * ai


def extract_coefficient(f, a, nu, circle, m, tol=1e-10):
    """A_nu(a, f) = A1_nu + i Ai_nu via pairings on ``circle`` (centred at a).

    The node count starts at ``circle.samples`` and is doubled until two
    successive values agree to ``tol`` (relative to the largest coefficient
    scale seen).
    """
    nu = HalfIndex.of(nu)
    m = Mass.of(m)
    if abs(circle.center - complex(a)) > 1e-14 * max(1.0, abs(complex(a))):
        circle = Circle(a, circle.radius, circle.samples, circle.theta0)
    prev = None
    c = circle
    while True:
        vals = np.asarray(f(c.nodes, c.theta))
        cur = _coefficient_once(vals, nu, c, m)
        if prev is not None:
            scale = np.maximum(1.0, np.abs(cur))
            if np.all(np.abs(cur - prev) <= tol * scale):
                return complex(cur) if np.ndim(cur) == 0 else cur
        if c.samples >= MAX_SAMPLES:
            raise NoConvergence("contour quadrature did not settle")
        prev = cur
        c = c.with_samples(2 * c.samples)


def extract_series(f, a, circle, m, tol=None):
    """(i𝓑, 𝓐, 𝓓) = (A_{-1/2}, A_{1/2}, A_{3/2}) of f at a.

    ``residual`` is max |f - three-term expansion| / max |f| on the circle of
    half the radius.  With ``tol`` given, a larger residual raises
    IllConditioned.
    """
    m = Mass.of(m)
    orders = [HalfIndex(-1), HalfIndex(1), HalfIndex(3)]
    coeffs = [extract_coefficient(f, a, nu, circle, m) for nu in orders]
    test = Circle(a, 0.5 * circle.radius, circle.samples, circle.theta0)
    vals = np.asarray(f(test.nodes, test.theta))
    fit = sum(bullet(c, nu, test.nodes - test.center, m, theta=test.theta)
              for c, nu in zip(coeffs, orders))
    residual = float(np.max(np.abs(vals - fit)) / np.max(np.abs(vals)))
    if tol is not None and residual > tol:
        raise IllConditioned(f"three-term expansion residual {residual:.2e} exceeds {tol:.1e}")
    return SeriesCoefficients(B=-1j * coeffs[0], A=coeffs[1], D=coeffs[2], residual=residual)
