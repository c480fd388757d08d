"""Deformation equations for the spinor coefficients.

Moving the points along ``a + h v`` changes ([𝓐], [i𝓑]) by a closed system of
matrix ODEs.  With Y = [𝓐][i𝓑]^{-1} and

    [diag v]* = [i𝓑] conj([i𝓑])^{-1} conj([diag v][i𝓑]) [i𝓑]^{-1},

the derivative of [i𝓑] is (i/2) Im(conj([i𝓑]) [[diag v], Y] [i𝓑]).  The
derivative of [𝓐] involves [𝓓] only through a commutator with a diagonal
matrix, and the rotation identity pins that commutator down, so the system
closes on ([𝓐], [i𝓑]).

For two points everything reduces to β (with [i𝓑] = [[1, -iβ], [iβ, 1]])
and γ (with [[diag a], Y] = [[0, -γ], [γ, 0]]); then β' = (1-β²) Im γ / (2r).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import Collision, InvalidInput, ShapeMismatch, SingularMatrix, StepFailure
from .formal_powers import Mass
from .spinor_solver.coefficients import CoefficientSet


# ---- directions -----------------------------------------------------------

@dataclass(frozen=True)
class DeformationDirection:
    """Velocities v_1..v_n of the marked points."""

    v: tuple

    def __post_init__(self):
        v = np.asarray(self.v, dtype=complex).ravel()
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise InvalidInput("direction needs finite entries")
        if not np.any(v != 0):
            raise InvalidInput("direction must have a non-zero entry")
        object.__setattr__(self, "v", tuple(complex(x) for x in v))

    @property
    def array(self):
        return np.asarray(self.v, dtype=complex)

    @classmethod
    def rotation(cls, a):
        """v = i a: rotation about the origin."""
        return cls(1j * np.asarray(a, dtype=complex))

    @classmethod
    def radial(cls, a, r=None):
        """v = a / r, the dilation about the origin normalised by r.

        ``r`` defaults to |a_2 - a_1|, so for two points with a_1 = 0 this is
        d/dr at fixed direction.
        """
        a = np.asarray(a, dtype=complex)
        r = abs(a[1] - a[0]) if r is None else float(r)
        return cls(a / r)

    @classmethod
    def single_point(cls, n, j, w=1.0):
        v = np.zeros(n, dtype=complex)
        v[j] = w
        return cls(v)

    @classmethod
    def translation(cls, n, w=1.0):
        return cls(np.full(n, complex(w)))


def _direction(v, n):
    if not isinstance(v, DeformationDirection):
        v = DeformationDirection(v)
    arr = v.array
    if arr.size != n:
        raise InvalidInput(f"direction has {arr.size} entries for {n} points")
    return arr


# ---- matrix algebra -------------------------------------------------------

def _comm(x, y):
    return x @ y - y @ x


def _inv(x, what="[i𝓑]"):
    try:
        out = np.linalg.inv(x)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"{what} is singular") from exc
    if not np.all(np.isfinite(out)):
        raise SingularMatrix(f"{what} is singular")
    return out


class _Frame:
    """Shared products of one (A, B, a) triple."""

    def __init__(self, A, B, a):
        self.A = np.asarray(A, dtype=complex)
        self.iB = 1j * np.asarray(B, dtype=complex)
        self.a = np.asarray(a, dtype=complex).ravel()
        n = self.a.size
        if self.A.shape != (n, n) or self.iB.shape != (n, n):
            raise InvalidInput("matrix sizes do not match the number of points")
        self.iB_inv = _inv(self.iB)
        self.Y = self.A @ self.iB_inv
        self.twist = self.iB @ _inv(self.iB.conj(), "conj([i𝓑])")

    def star(self, v):
        """[diag v]*."""
        return self.twist @ (np.diag(v) @ self.iB).conj() @ self.iB_inv


# ---- right-hand sides -------------------------------------------------------

def bh_rhs(A, B, a, v):
    """[i ∂_h 𝓑] = (i/2) Im(conj([i𝓑]) [[diag v], Y] [i𝓑])."""
    fr = _Frame(A, B, a)
    dv = np.diag(_direction(v, fr.a.size))
    return 0.5j * np.imag(fr.iB.conj() @ _comm(dv, fr.Y) @ fr.iB)


def _abdiag_rhs(fr, m):
    m2 = Mass.of(m).m ** 2
    da = np.diag(fr.a)
    return 2 * m2 * da.conj() - 2 * m2 * fr.star(fr.a) + 0.5 * fr.Y @ _comm(da, fr.Y)


def d_commutator_from_abdiag(A, B, a, m):
    """[[diag a], [𝓓][i𝓑]^{-1}] from the rotation identity.

    Solves Y = -(3/2) C + 2m² conj(diag a) - 2m² [diag a]* + (Y/2)[diag a, Y]
    for C.  The diagonal of the solved expression must vanish and is set to
    exactly zero; ``abdiag_residual`` reports how far it was from zero.
    """
    fr = _Frame(A, B, a)
    c = (2.0 / 3.0) * (_abdiag_rhs(fr, m) - fr.Y)
    np.fill_diagonal(c, 0.0)
    return c


def abdiag_residual(A, B, a, m, D=None):
    """Largest violation of the rotation identity.

    Without ``D`` only the diagonal (which must vanish) is tested; with ``D``
    the off-diagonal commutator is compared as well.
    """
    fr = _Frame(A, B, a)
    full = (2.0 / 3.0) * (_abdiag_rhs(fr, m) - fr.Y)
    res = float(np.abs(np.diag(full)).max())
    if D is not None:
        true = _comm(np.diag(fr.a), np.asarray(D, dtype=complex) @ fr.iB_inv)
        off = full - np.diag(np.diag(full))
        res = max(res, float(np.abs(off - true).max()))
    return res


def _rescale(c_a, a, v):
    """[[diag v], X] from [[diag a], X]: entry (j,k) times (v_j - v_k)/(a_j - a_k)."""
    da = a[:, None] - a[None, :]
    dv = v[:, None] - v[None, :]
    np.fill_diagonal(da, 1.0)
    out = c_a * (dv / da)
    np.fill_diagonal(out, 0.0)
    return out


def ah_rhs(A, B, a, v, m):
    """∂_h [𝓐] with [𝓓] eliminated.

    (3/2) C_v [i𝓑] + 2m² conj(diag v) [i𝓑] - 2m² [i𝓑] conj([i𝓑])^{-1} conj(diag v [i𝓑])
        + ([𝓐]/2) Re([Y, diag v] [i𝓑])
    where C_v = [[diag v], [𝓓][i𝓑]^{-1}] comes from the rotation identity.
    """
    fr = _Frame(A, B, a)
    v = _direction(v, fr.a.size)
    m2 = Mass.of(m).m ** 2
    dv = np.diag(v)
    c_a = (2.0 / 3.0) * (_abdiag_rhs(fr, m) - fr.Y)
    c_v = _rescale(c_a, fr.a, v)
    return (1.5 * c_v @ fr.iB + 2 * m2 * dv.conj() @ fr.iB
            - 2 * m2 * fr.twist @ (dv @ fr.iB).conj()
            + 0.5 * fr.A @ np.real(_comm(fr.Y, dv) @ fr.iB))


def commutator_flow_rhs(A, B, a, v, m):
    """∂_h [[diag a], Y]

    = -2m² [[diag v], [diag a]*] - 2m² [[diag a], [diag v]*]
      + ½ [[diag v, Y], [diag a, Y]].
    """
    fr = _Frame(A, B, a)
    v = _direction(v, fr.a.size)
    m2 = Mass.of(m).m ** 2
    dv, da = np.diag(v), np.diag(fr.a)
    return (-2 * m2 * _comm(dv, fr.star(fr.a)) - 2 * m2 * _comm(da, fr.star(v))
            + 0.5 * _comm(_comm(dv, fr.Y), _comm(da, fr.Y)))


# ---- path integration -------------------------------------------------------

# Dormand-Prince 5(4)
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


class LinearPath:
    """a(t) = (1 - t) start + t end."""

    def __init__(self, start, end):
        self.start = np.asarray(start, dtype=complex)
        self.end = np.asarray(end, dtype=complex)

    def position(self, t):
        return self.start + t * (self.end - self.start)

    def velocity(self, t):
        return self.end - self.start


class RotationPath:
    """a(t) = e^{i angle t} a."""

    def __init__(self, a, angle):
        self.a = np.asarray(a, dtype=complex)
        self.angle = float(angle)

    def position(self, t):
        return np.exp(1j * self.angle * t) * self.a

    def velocity(self, t):
        return 1j * self.angle * self.position(t)


class _CallablePath:
    """Wraps a bare callable; velocity by fourth-order central differences."""

    def __init__(self, fn, step=1e-4):
        self.fn = fn
        self.step = step

    def position(self, t):
        return np.asarray(self.fn(t), dtype=complex)

    def velocity(self, t):
        h = self.step
        f = self.position
        return (8 * (f(t + h) - f(t - h)) - (f(t + 2 * h) - f(t - 2 * h))) / (12 * h)


def _as_path(path):
    if hasattr(path, "position") and hasattr(path, "velocity"):
        return path
    if callable(path):
        return _CallablePath(path)
    raise InvalidInput("path must be callable or provide position/velocity")


@dataclass
class PathReport:
    """Bookkeeping of one integrate_path run."""

    accepted: int = 0
    rejected: int = 0
    max_drift: dict = field(default_factory=dict)

    def record(self, inv):
        for k, val in inv.items():
            self.max_drift[k] = max(self.max_drift.get(k, 0.0), val)


def _structure(A, iB):
    """Deviations that must stay small along a path (cf. CoefficientSet.invariants)."""
    herm = float(np.abs(iB - iB.conj().T).max())
    y = A @ np.linalg.inv(iB)
    sym = float(np.abs(y - y.T).max() / max(np.abs(y).max(), 1e-300))
    rho = float(np.abs(np.linalg.eigvals(iB.imag)).max())
    off = iB - np.diag(np.diag(iB))
    return {"hermitian": herm, "symmetric": sym, "spectral_radius": rho,
            "max_offdiag_B": float(np.abs(off).max()),
            "diag": float(np.abs(np.diag(iB) - 1.0).max())}


def _min_gap(a):
    d = np.abs(a[:, None] - a[None, :])
    np.fill_diagonal(d, np.inf)
    return d.min()


def integrate_path(initial, a_path, m, steps=32, rtol=1e-9, atol=1e-12,
                   invariant_tol=1e-6, min_gap=None, report=None):
    """Carry ([𝓐], [i𝓑]) along a_path(t), t in [0, 1].

    ``a_path`` is either an object with ``position(t)``/``velocity(t)`` (see
    LinearPath, RotationPath) or a plain callable.  Steps are Dormand-Prince
    5(4) with local error control; a step that also breaks Hermiticity of
    [i𝓑], symmetry of Y, the spectral bound or |𝓑_jk| <= 1 by more than
    ``invariant_tol`` is rejected and retried shorter.  ``steps`` sets the
    initial step 1/steps.  Raises StepFailure (with the parameter value) when
    no acceptable step can be found, Collision when the path brings two
    points together.
    """
    path = _as_path(a_path)
    m = Mass.of(m)
    a0 = path.position(0.0)
    if a0.size != initial.n or np.abs(a0 - initial.positions).max() > 1e-9 * max(1.0, np.abs(a0).max()):
        raise InvalidInput("path does not start at the coefficient set's points")
    n = initial.n
    gap0 = _min_gap(a0)
    min_gap = 1e-6 * gap0 if min_gap is None else float(min_gap)
    report = PathReport() if report is None else report

    def rhs(t, A, iB):
        a = path.position(t)
        if _min_gap(a) <= min_gap:
            raise Collision(f"points collide near t = {t:.6g}")
        v = path.velocity(t)
        if not np.any(v != 0):
            return np.zeros_like(A), np.zeros_like(iB)
        B = -1j * iB
        return ah_rhs(A, B, a, v, m), bh_rhs(A, B, a, v)

    A, iB = initial.A.copy(), initial.iB.copy()
    report.record(_structure(A, iB))
    t, h = 0.0, 1.0 / max(int(steps), 1)
    hmin = 1e-10
    k1 = rhs(t, A, iB)
    while t < 1.0:
        h = min(h, 1.0 - t)
        ks = [k1]
        for i in range(1, 7):
            dA = sum(c * k[0] for c, k in zip(_A[i], ks))
            dB = sum(c * k[1] for c, k in zip(_A[i], ks))
            ks.append(rhs(t + _C[i] * h, A + h * dA, iB + h * dB))
        A5 = A + h * sum(b * k[0] for b, k in zip(_B5, ks))
        B5 = iB + h * sum(b * k[1] for b, k in zip(_B5, ks))
        eA = h * sum((b5 - b4) * k[0] for b5, b4, k in zip(_B5, _B4, ks))
        eB = h * sum((b5 - b4) * k[1] for b5, b4, k in zip(_B5, _B4, ks))
        scale = atol + rtol * np.maximum(np.abs(np.concatenate([A.ravel(), iB.ravel()])),
                                         np.abs(np.concatenate([A5.ravel(), B5.ravel()])))
        err = float(np.sqrt(np.mean((np.abs(np.concatenate([eA.ravel(), eB.ravel()])) / scale) ** 2)))
        ok = err <= 1.0
        inv = None
        if ok:
            try:
                inv = _structure(A5, B5)
            except np.linalg.LinAlgError:
                ok = False
        if ok:
            bad = (inv["hermitian"] > invariant_tol or inv["symmetric"] > invariant_tol
                   or inv["diag"] > invariant_tol or inv["spectral_radius"] >= 1.0
                   or inv["max_offdiag_B"] > 1.0)
            ok = not bad
        if ok:
            t += h
            A, iB = A5, B5
            k1 = ks[6]
            report.accepted += 1
            report.record(inv)
            fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h *= fac
        else:
            report.rejected += 1
            h *= 0.5 if inv is not None else max(0.2, 0.9 * err ** -0.25)
            if h < hmin:
                raise StepFailure("no acceptable step (error or invariant drift)", location=t)
    a1 = path.position(1.0)
    if _min_gap(a1) <= min_gap:
        raise Collision("path ends in a collision")
    meta = {"accepted_steps": report.accepted, "rejected_steps": report.rejected,
            "invariant_drift": dict(report.max_drift)}
    return CoefficientSet(A=A, B=-1j * iB, points=tuple(a1), mass=m.m, D=None,
                          residual=initial.residual, meta=meta)


# ---- two points -------------------------------------------------------------

@dataclass(frozen=True)
class TwoPointState:
    """Rotation and translation invariant data of a two-point set."""

    r: float
    beta: float
    gamma: complex

    def __post_init__(self):
        if not self.r > 0:
            raise InvalidInput("separation must be positive")
        if not abs(self.beta) < 1:
            raise InvalidInput("beta must lie in (-1, 1)")
        object.__setattr__(self, "gamma", complex(self.gamma))

    @property
    def h(self):
        return float(np.arctanh(self.beta))

    @property
    def eta(self):
        return float(np.exp(-2.0 * self.h))

    @property
    def beta_prime(self):
        """dβ/dr = (1 - β²) Im γ / (2r)."""
        return (1.0 - self.beta**2) * self.gamma.imag / (2.0 * self.r)

    @property
    def h_prime(self):
        return self.gamma.imag / (2.0 * self.r)


def reduce_two_point(coeffs, a=None, tol=1e-6):
    """(r, β, γ) of a two-point coefficient set.

    Raises ShapeMismatch when [i𝓑] or [[diag a], Y] is not of the two-point
    form, when γ is not imaginary, or when the diagonal of Y is not
    d (conj(a_2) - conj(a_1)), -d (...) with a real d, all beyond ``tol``
    (relative to the matrix scale).
    """
    if coeffs.n != 2:
        raise ShapeMismatch("two-point reduction needs exactly two points")
    a = coeffs.positions if a is None else np.asarray(a, dtype=complex)
    iB = coeffs.iB
    r = float(abs(a[1] - a[0]))
    beta = float(iB[1, 0].imag)
    y = coeffs.Y
    comm = _comm(np.diag(a), y)
    gamma = complex(comm[1, 0])
    scale = max(1.0, abs(gamma))
    checks = {
        "diag [i𝓑]": np.abs(np.diag(iB) - 1.0).max(),
        "[i𝓑] form": abs(iB[0, 1] + 1j * beta) + abs(iB[1, 0].real),
        "commutator form": abs(comm[0, 1] + gamma) / scale,
        "Re gamma": abs(gamma.real) / scale,
    }
    d = y[0, 0] / np.conj(a[1] - a[0])
    dscale = max(1.0, abs(d))
    checks["diagonal antisymmetry"] = abs(y[0, 0] + y[1, 1]) / (dscale * r)
    checks["diagonal phase"] = abs(d.imag) / dscale
    for name, dev in checks.items():
        if dev > tol:
            raise ShapeMismatch(f"{name} off by {dev:.2e}")
    return TwoPointState(r=r, beta=beta, gamma=gamma)


def two_point_coefficients(beta, beta_prime, m, a=(0.0, 1.0), corrected=True):
    """CoefficientSet of two points from β(r) and β'(r).

    [i𝓑] = [[1, -iβ], [iβ, 1]] and Y = [𝓐][i𝓑]^{-1} with
    Y_12 = Y_21 = 2iβ' r / ((1-β²)(a_2-a_1)),
    Y_11 = -Y_22 = (16 m²β² - 4β'²)/(2(1-β²)²) (conj(a_2) - conj(a_1)).
    ``corrected=False`` uses β' in place of 2β' (the form that does not
    match the spinors; kept for comparison).
    """
    a = np.asarray(a, dtype=complex)
    r = abs(a[1] - a[0])
    m2 = Mass.of(m).m ** 2
    bp = 2.0 * beta_prime if corrected else beta_prime
    off = bp * r * 1j / ((1.0 - beta**2) * (a[1] - a[0]))
    d = (16.0 * m2 * beta**2 - bp**2) / (2.0 * (1.0 - beta**2) ** 2)
    diag = d * np.conj(a[1] - a[0])
    y = np.array([[diag, off], [off, -diag]])
    iB = np.array([[1.0, -1j * beta], [1j * beta, 1.0]])
    return CoefficientSet(A=y @ iB, B=-1j * iB, points=tuple(a), mass=Mass.of(m).m)


def check_two_point_ode(states, m):
    """Residual of (r β'/(1-β²))' = 4m² r β(1+β²)/(1-β²)² with the β' of each state.

    ``states`` are TwoPointStates on an increasing grid of r; the left side
    is differentiated by central differences.  Returns the max residual at
    the interior points relative to the right side's scale.
    """
    m2 = Mass.of(m).m ** 2
    r = np.array([s.r for s in states])
    beta = np.array([s.beta for s in states])
    lhs_in = np.array([s.r * s.beta_prime / (1 - s.beta**2) for s in states])
    lhs = np.gradient(lhs_in, r)
    rhs = 4 * m2 * r * beta * (1 + beta**2) / (1 - beta**2) ** 2
    return float(np.abs(lhs - rhs)[1:-1].max() / max(np.abs(rhs).max(), 1e-300))
