"""Coefficient extraction and derived spinors built from a solution."""

from dataclasses import dataclass

import numpy as np

from ..contour import Circle, extract_coefficient
from ..errors import InvalidInput, SingularMatrix
from ..formal_powers import bullet
from ..special_functions import HalfIndex
from .coefficients import CoefficientSet

_ORDERS = (HalfIndex(-1), HalfIndex(1), HalfIndex(3))


def default_circle_radius(sol):
    near = sol.configuration.nearest_distances().min()
    return 0.25 * min(near, 1.0 / abs(sol.mass))


def _check_radius(sol, radius):
    near = sol.configuration.nearest_distances().min()
    if not (0 < radius < 0.5 * near and radius < 1.0 / abs(sol.mass)):
        raise InvalidInput("circle radius must be below half the point spacing and 1/|m|")


class LinearSpinors:
    """Real combinations of f_k, d_x f_k, d_y f_k of one solution.

    Column ``c`` of the result is ``f @ cf[:, c] + f_x @ cx[:, c] + f_y @ cy[:, c]``.
    """

    def __init__(self, sol, cf, cx=None, cy=None):
        self.sol = sol
        n = sol.n
        self.cf = np.asarray(cf, dtype=float).reshape(n, -1)
        width = self.cf.shape[1]
        self.cx = np.zeros((n, width)) if cx is None else np.asarray(cx, dtype=float)
        self.cy = np.zeros((n, width)) if cy is None else np.asarray(cy, dtype=float)

    @property
    def count(self):
        return self.cf.shape[1]

    def local_values(self, j, z, theta):
        out = self.sol.local_values(j, z, theta) @ self.cf
        if np.any(self.cx):
            out = out + self.sol.local_values(j, z, theta, deriv="x") @ self.cx
        if np.any(self.cy):
            out = out + self.sol.local_values(j, z, theta, deriv="y") @ self.cy
        return out

    def sampler(self, j):
        """Callable (z, theta) -> array (count, len(z)) for contour routines."""
        return lambda z, th: self.local_values(j, z, th).T


def _series(family, sol, radius, samples):
    """A_{-1/2}, A_{1/2}, A_{3/2} of every member at every point: (3, n, count)."""
    out = np.empty((3, sol.n, family.count), dtype=complex)
    for j, a in enumerate(sol.configuration.points):
        circ = Circle(a, radius, samples)
        for o, nu in enumerate(_ORDERS):
            out[o, j] = extract_coefficient(family.sampler(j), a, nu, circ, sol.mass)
    return out


def coefficients(sol, circle_radius=None, samples=512, validate=True):
    """[𝓐], [𝓑], [𝓓] by contour pairings around each point."""
    radius = default_circle_radius(sol) if circle_radius is None else float(circle_radius)
    _check_radius(sol, radius)
    fam = LinearSpinors(sol, np.eye(sol.n))
    ser = _series(fam, sol, radius, samples)
    coeffs = CoefficientSet(A=ser[1], B=-1j * ser[0], points=sol.configuration.points,
                            mass=sol.mass, D=ser[2], residual=sol.residual_norm,
                            meta={"circle_radius": radius})
    if validate:
        coeffs.validate()
    return coeffs


def direct_coefficients(sol):
    """The same matrices read straight off the puncture expansions."""
    n = sol.n
    mats = np.empty((3, n, n), dtype=complex)
    for j in range(n):
        c1, ci = sol.patch_coefficients(j)
        mats[:, j] = (c1[:3] + 1j * ci[:3])
    return CoefficientSet(A=mats[1], B=-1j * mats[0], points=sol.configuration.points,
                          mass=sol.mass, D=mats[2], residual=sol.residual_norm)


def pure_basis_weights(coeffs):
    """Weights of g1_k, gi_k on (f, d_x f, d_y f); columns [g1_1..g1_n, gi_1..gi_n]."""
    try:
        inv = np.linalg.inv(-0.5j * coeffs.B)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("[i𝓑] is singular") from exc
    half_a = 0.5 * coeffs.A
    cx = np.hstack([inv.real, -inv.imag])
    cy = np.hstack([inv.imag, inv.real])
    cf = np.hstack([-(half_a @ inv).real, -(1j * half_a @ inv).real])
    return cf, cx, cy


def build_pure_basis(sol, coeffs):
    """Spinors g1_k, gi_k with A_{-3/2}(a_j) = delta_jk (resp. i delta_jk)
    and no Z1_{-1/2} component at any point."""
    cf, cx, cy = pure_basis_weights(coeffs)
    return LinearSpinors(sol, cf, cx, cy)


def pure_basis_series(sol, coeffs, circle_radius=None, samples=512):
    """A_{-3/2}, A_{-1/2}, A_{1/2} of the 2n pure-basis spinors: (3, n, 2n)."""
    radius = default_circle_radius(sol) if circle_radius is None else float(circle_radius)
    fam = build_pure_basis(sol, coeffs)
    out = np.empty((3, sol.n, fam.count), dtype=complex)
    for j, a in enumerate(sol.configuration.points):
        circ = Circle(a, radius, samples)
        for o, nu in enumerate((HalfIndex(-3), HalfIndex(-1), HalfIndex(1))):
            out[o, j] = extract_coefficient(fam.sampler(j), a, nu, circ, sol.mass)
    return out


@dataclass(frozen=True)
class ExpansionReport:
    """Largest deviation from the predicted expansions of d_x f, d_y f."""

    max_deviation: float
    deviations: dict


def predicted_derivative_series(coeffs):
    """Predicted (A_{-3/2}, A_{-1/2}, A_{1/2}) of d_x f_k and d_y f_k at a_j."""
    A, B, m2 = coeffs.A, coeffs.B, coeffs.mass**2
    D = coeffs.D if coeffs.D is not None else np.zeros_like(A)
    dx = (-0.5j * B, 0.5 * A, 1.5 * D + 2j * m2 * B)
    dy = (0.5 * B, 0.5j * A, 1.5j * D + 2 * m2 * B)
    return dx, dy


def derivative_expansion_check(sol, coeffs, circle_radius=None, samples=512):
    """Compare extracted expansions of d_x f_k, d_y f_k with the prediction."""
    radius = default_circle_radius(sol) if circle_radius is None else float(circle_radius)
    n = sol.n
    zero = np.zeros((n, n))
    dx_pred, dy_pred = predicted_derivative_series(coeffs)
    devs = {}
    for axis, pred, fam in (("x", dx_pred, LinearSpinors(sol, zero, np.eye(n), zero)),
                            ("y", dy_pred, LinearSpinors(sol, zero, zero, np.eye(n)))):
        for o, nu in enumerate((HalfIndex(-3), HalfIndex(-1), HalfIndex(1))):
            got = np.empty((n, n), dtype=complex)
            for j, a in enumerate(sol.configuration.points):
                got[j] = extract_coefficient(fam.sampler(j), a, nu, Circle(a, radius, samples),
                                             sol.mass)
            scale = max(np.abs(pred[o]).max(), 1.0)
            devs[f"d{axis} A_{nu.twice_nu}/2"] = float(np.abs(got - pred[o]).max() / scale)
    return ExpansionReport(max(devs.values()), devs)


def _bump(t):
    """Smooth cutoff: 1 for t <= 1/2, 0 for t >= 1."""
    t = np.clip(2.0 * np.asarray(t, dtype=float) - 1.0, 0.0, 1.0)
    out = np.zeros_like(t)
    inner = (t > 0) & (t < 1)
    ti = t[inner]
    a = np.exp(-1.0 / ti)
    b = np.exp(-1.0 / (1.0 - ti))
    out[inner] = b / (a + b)
    out[t <= 0] = 1.0
    return out


def l2_norms(sol, radial_nodes=48, angular_nodes=96, spacing=None, margin=9.0):
    """∬ |f_k|^2 over the plane, for every k.

    Disks around the points use polar Gauss-Legendre x trapezoid nodes on a
    smooth partition of unity; the rest uses a Cartesian trapezoid rule over
    the region where |f|^2 exceeds ~e^{-4 margin}.
    """
    pts = sol.configuration.array
    am = abs(sol.mass)
    rho = 0.5 * np.minimum(sol.configuration.nearest_distances(), 2.0 / am)
    total = np.zeros(sol.n)

    x, wx = np.polynomial.legendre.leggauss(radial_nodes)
    th = 2.0 * np.pi * np.arange(angular_nodes) / angular_nodes
    for j, a in enumerate(pts):
        r = 0.5 * rho[j] * (x + 1.0)
        wr = 0.5 * rho[j] * wx * r * (2.0 * np.pi / angular_nodes)
        z = (a + r[:, None] * np.exp(1j * th[None, :])).ravel()
        w = (wr[:, None] * np.ones_like(th)[None, :]).ravel() * _bump(np.abs(z - a) / rho[j])
        vals = np.abs(sol.gauge(z)) ** 2
        total += w @ vals

    h = spacing or 0.2 * min(rho.min(), 0.5 / am)
    lo = pts.real.min() - margin / am, pts.imag.min() - margin / am
    hi = pts.real.max() + margin / am, pts.imag.max() + margin / am
    xs = np.arange(lo[0], hi[0] + h, h)
    ys = np.arange(lo[1], hi[1] + h, h)
    for y in np.array_split(ys, max(1, ys.size * xs.size // 200000 + 1)):
        z = (xs[None, :] + 1j * y[:, None]).ravel()
        w = np.ones(z.size)
        for j, a in enumerate(pts):
            w = w - _bump(np.abs(z - a) / rho[j])
        keep = w > 0
        total += (h * h) * (w[keep] @ (np.abs(sol.gauge(z[keep])) ** 2))
    return total


def l2_from_energy_identity(coeffs):
    """π (1 - Σ_{j≠k} 𝓑_jk²) / (2|m|) per k, from the residue formula."""
    off = np.abs(coeffs.B - np.diag(np.diag(coeffs.B))) ** 2
    return np.pi * (1.0 - off.sum(axis=0)) / (2.0 * abs(coeffs.mass))
