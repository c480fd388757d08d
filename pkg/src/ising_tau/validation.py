"""Cross-route checks shared by the command line and the test-suite."""

from dataclasses import dataclass
import time

import numpy as np
from scipy import special

from .contour import Circle, pairing
from .formal_powers import KernelBasis, derivative_terms, z_power
from .special_functions import HalfIndex


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name}: {self.value:.3e} (tol {self.tolerance:.1e}) {self.detail}".rstrip()


def check(name, value, tolerance, detail=""):
    value = float(value)
    return CheckResult(name, bool(value <= tolerance), value, float(tolerance), detail)


# ---- formal powers ------------------------------------------------------------

PAIRING_ORDERS = tuple(HalfIndex(t) for t in (-5, -3, -1, 1, 3))


def pairing_table(m, orders=PAIRING_ORDERS, radius=0.7, samples=2048):
    """Pairings of Z1/Zi of the given orders on a circle about 0.

    Returns (table, expected, labels): the Kronecker pattern is 1 exactly for
    (Z1_{ν1}, Zi_{ν2}) and (Zi_{ν1}, Z1_{ν2}) with ν1 + ν2 = -1.
    """
    circ = Circle(0.0, radius, samples)
    vals, labels = [], []
    for nu in orders:
        for basis in (KernelBasis.ONE, KernelBasis.I):
            vals.append(np.asarray(z_power(basis, nu, circ.nodes, m, theta=circ.theta)))
            labels.append((basis, nu))
    vals = np.array(vals)
    table = pairing(vals[:, None, :], vals[None, :, :], circ)
    expected = np.zeros_like(table)
    for i, (b1, n1) in enumerate(labels):
        for j, (b2, n2) in enumerate(labels):
            if b1 != b2 and n1.twice_nu + n2.twice_nu == -2:
                expected[i, j] = 1.0
    return table, expected, labels


def formalder_errors(m, points=50, seed=0, step=1e-4, orders=(HalfIndex(1), HalfIndex(2))):
    """Max relative error of each derivative identity against central differences.

    Keys are (axis, basis, order); with two orders that is eight identities.
    """
    rng = np.random.default_rng(seed)
    z = (0.3 + 1.2 * rng.random(points)) * np.exp(1j * rng.uniform(-2.5, 2.5, points))
    th = np.angle(z)
    out = {}
    for nu in orders:
        for basis, c in ((KernelBasis.ONE, 1.0), (KernelBasis.I, 1j)):
            def f(w):
                return np.asarray(z_power(basis, nu, w, m, theta=np.angle(w)))
            for axis, dz in (("x", step), ("y", 1j * step)):
                fd = (f(z + dz) - f(z - dz)) / (2 * step)
                pred = 0.0
                for coef, order in derivative_terms(c, nu, axis, m):
                    pred = pred + (coef.real * np.asarray(z_power(KernelBasis.ONE, order, z, m, th))
                                   + coef.imag * np.asarray(z_power(KernelBasis.I, order, z, m, th)))
                out[(axis, basis.value, nu.value)] = float(np.max(np.abs(fd - pred) / np.abs(pred)))
    return out


# ---- suite ------------------------------------------------------------------

def _painleve_checks(results):
    from .painleve3 import integrate_inward

    t0 = time.perf_counter()
    sol = integrate_inward(10.0, 0.3)
    dt = time.perf_counter() - t0
    results.append(check("Painlevé residual on [0.3, 10]", sol.max_residual(), 1e-8,
                         f"({dt:.2f} s)"))
    s = np.array([4.0, 5.0, 6.0])
    dev = np.abs(sol.one_minus_eta_at(s) - (2 / np.pi) * special.k0(2 * s))
    slope = np.polyfit(s, np.log(dev), 1)[0]
    results.append(check("asymptotic deviation / K0(2s) at s=4,5,6",
                         np.max(dev / special.k0(2 * s)), 1e-3, f"log-slope {slope:.2f}"))
    results.append(CheckResult("asymptotic log-slope <= -17/8 * 0.9", slope <= -17 / 8 * 0.9,
                               slope, -17 / 8 * 0.9))
    eta_form = integrate_inward(10.0, 0.3, form="eta")
    ss = np.linspace(1.0, 8.0, 71)
    results.append(check("h-form vs η-form on [1, 8]",
                         np.max(np.abs(eta_form.eta_at(ss) - sol.eta_at(ss))), 1e-9))
    return sol


def _kernel_checks(results):
    from .painleve3 import k_product_closed_form, k_product_quadrature, pfaffian

    table, expected, _ = pairing_table(-1.0)
    results.append(check("pairing table Kronecker pattern (2048 nodes)",
                         np.abs(table - expected).max(), 1e-8))
    errs = formalder_errors(-0.8)
    results.append(check("formal-power derivative identities (8)", max(errs.values()), 1e-6))
    dev = max(abs(k_product_quadrature(s, -1.0)[0] / k_product_closed_form(s, -1.0) - 1)
              for s in (1.0, 2.0, 3.0))
    results.append(check("K1/2 product integral = (π/4) K0", dev, 1e-8))
    rng = np.random.default_rng(3)
    a = rng.normal(size=(6, 6))
    a = a - a.T
    results.append(check("Pf² = det (6x6)", abs(pfaffian(a) ** 2 / np.linalg.det(a) - 1), 1e-10))


def _solver_beta(r, m=-1.0):
    from .spinor_solver import PointConfiguration, coefficients, solve_spinors

    return coefficients(solve_spinors(PointConfiguration((0.0, r)), m))


def run_suite(level="quick", log=None):
    """Run the cross-route checks; returns a list of CheckResult.

    ``quick`` covers the Painlevé route, the kernels and one spinor solve per
    route; ``full`` adds more separations, rotations, deformations and the
    n-point integral (several minutes).
    """
    from .isomonodromy import reduce_two_point, two_point_coefficients
    from .painleve3 import beta_via_contour, pfaffian, scaling_free, scaling_plus

    if level not in ("quick", "full"):
        raise ValueError("level must be 'quick' or 'full'")
    results = []

    def emit():
        if log is not None:
            log(results[-1].line())

    sol = _painleve_checks(results)
    _kernel_checks(results)
    if log is not None:
        for res in results:
            log(res.line())

    radii = (2.0,) if level == "quick" else (1.0, 2.0, 3.0)
    for r in radii:
        c = _solver_beta(r)
        st = reduce_two_point(c)
        results.append(check(f"solver β vs tanh h at r={r:g}", abs(st.beta - sol.beta_at(r)), 1e-3))
        emit()
        ref = two_point_coefficients(sol.beta_at(r), sol.h_prime_at(r) * (1 - sol.beta_at(r) ** 2),
                                     -1.0, a=(0.0, r))
        results.append(check(f"diagonal of [𝓐] (2β' form) at r={r:g}",
                             abs(c.A[0, 0] - ref.A[0, 0]) / abs(ref.A[0, 0]), 1e-3))
        emit()
        ratio = scaling_free(r, -1.0, sol) / scaling_plus(r, -1.0, sol)
        pf = abs(pfaffian(np.real(c.B)))
        results.append(check(f"free/plus vs |Pf Re 𝓑| at r={r:g}", abs(ratio - pf), 1e-3))
        emit()
    results.append(check("scaling_plus(|m|r=10) / (8|m|)^{1/4} - 1",
                         abs(scaling_plus(10.0, -1.0, sol) / 8**0.25 - 1), 1e-4))
    emit()
    results.append(check("contour β vs tanh h at |m|r=3",
                         abs(beta_via_contour(3.0, -1.0) - sol.beta_at(3.0)), np.exp(-17 * 3 / 8)))
    emit()

    from .spinor_solver import PointConfiguration, coefficients, l2_norms, solve_spinors

    pts = (0.0, 1.0 + 0.5j, -0.3 + 1.2j)
    spin = solve_spinors(PointConfiguration(pts), -0.8)
    cs = coefficients(spin)
    inv = cs.invariants()
    results.append(check("n=3 [i𝓑] Hermitian", inv["hermitian"], 1e-5))
    emit()
    results.append(check("n=3 Y symmetric", inv["symmetric"], 1e-4))
    emit()
    results.append(check("n=3 spectral radius of Im[i𝓑]", inv["spectral_radius"], 1 - 1e-3))
    emit()
    l2 = l2_norms(spin)
    results.append(check("n=3 ∬|f|² · 2|m|/π", l2.max() * 2 * 0.8 / np.pi, 1.0))
    emit()

    if level == "full":
        _full_checks(results, sol, emit)
    return results


def _full_checks(results, sol, emit):
    from .isomonodromy import DeformationDirection, ah_rhs, bh_rhs
    from .painleve3 import log_scaling_plus, n_point_log_derivative, radial_family
    from .spinor_solver import PointConfiguration, direct_coefficients, solve_spinors

    m = -0.8
    pts = np.array([0.0, 1.0 + 0.5j, -0.3 + 1.2j])
    base = PointConfiguration(tuple(pts))
    c0 = direct_coefficients(solve_spinors(base, m))
    gap = base.min_distance()
    h = 1e-2 * gap
    for label, v in (("translation", np.ones(3, complex)), ("single point", np.array([1, 0, 0], complex))):
        cp = direct_coefficients(solve_spinors(base.moved(pts + h * v), m))
        cm = direct_coefficients(solve_spinors(base.moved(pts - h * v), m))
        d = DeformationDirection(v)
        fd_b = (cp.iB - cm.iB) / (2 * h)
        fd_a = (cp.A - cm.A) / (2 * h)
        sb = max(np.abs(fd_b).max(), np.abs(c0.iB).max() * 1e-2)
        sa = max(np.abs(fd_a).max(), np.abs(c0.A).max() * 1e-2)
        results.append(check(f"∂[i𝓑] vs finite difference ({label})",
                             np.abs(bh_rhs(c0.A, c0.B, pts, d) - fd_b).max() / sb, 5e-2))
        emit()
        results.append(check(f"∂[𝓐] vs finite difference ({label})",
                             np.abs(ah_rhs(c0.A, c0.B, pts, d, m) - fd_a).max() / sa, 5e-2))
        emit()

    phi = np.pi / 2
    rot = direct_coefficients(solve_spinors(base.transformed(scale=np.exp(1j * phi)), m))
    results.append(check("rotation: [i𝓑] unchanged", np.abs(rot.iB - c0.iB).max(), 1e-4))
    emit()
    results.append(check("rotation: [𝓐] times e^{-iφ}",
                         np.abs(rot.A - np.exp(-1j * phi) * c0.A).max(), 1e-4))
    emit()

    r = 1.0
    res = n_point_log_derivative(radial_family((0.0, r), -1.0), np.array([0.0, r]), -1.0,
                                 details=True)
    results.append(check("n-point integral vs log scaling_plus (n=2, r=1)",
                         abs(res.log_scaling(2, -1.0) - log_scaling_plus(r, -1.0, sol)), 1e-3))
    emit()
