"""Local exact solutions of the massive Cauchy-Riemann equation.

A patch is a disk (or the exterior of a disk) together with a truncated
expansion in formal powers that solve ``dbar f = m conj(f)`` exactly inside
it.  Three kinds exist:

* ``puncture`` -- disk centred at a marked point; half-integer orders
  ``-1/2, 1/2, ...`` of the regular family ``Z`` (double-valued around the
  centre);
* ``plain`` -- disk free of marked points; integer orders ``0, 1, ...`` of
  ``Z``;
* ``exterior`` -- outside a disk enclosing every marked point; the decaying
  family ``Y`` built from ``K`` Bessel functions, integer or half-integer
  depending on the parity of the number of points.

Basis columns are normalised so that they are O(1) on the patch circle.
The column order is ``[Z1_nu0, Zi_nu0, Z1_nu1, Zi_nu1, ...]``.
"""

import numpy as np
from scipy import special

PUNCTURE = "puncture"
PLAIN = "plain"
EXTERIOR = "exterior"


def _logk(orders, x):
    """log K_|mu|(x) for every (x, mu) pair, shape (len(x), len(orders)).

    Upward ratio recurrence from two ``kve`` seeds; stable and free of
    overflow at high order.
    """
    orders = np.abs(np.asarray(orders, dtype=float))
    x = np.asarray(x, dtype=float)
    out = np.empty((x.size, orders.size))
    for frac in np.unique(np.round(orders % 1.0, 12)):
        sel = np.isclose(orders % 1.0, frac)
        top = int(round(orders[sel].max() - frac))
        ladder = np.empty((x.size, top + 2))
        ladder[:, 0] = np.log(special.kve(frac, x)) - x
        ladder[:, 1] = np.log(special.kve(frac + 1.0, x)) - x
        rho = np.exp(ladder[:, 1] - ladder[:, 0])
        for k in range(1, top + 1):
            nu = frac + k
            rho = 1.0 / rho + 2.0 * nu / x
            ladder[:, k + 1] = ladder[:, k] + np.log(rho)
        idx = np.rint(orders[sel] - frac).astype(int)
        out[:, sel] = ladder[:, idx]
    return out


class _Family:
    """Evaluates normalised building blocks at fixed sample points."""

    def __init__(self, r, theta, m):
        self.r = np.asarray(r, dtype=float)[:, None]
        self.th = np.asarray(theta, dtype=float)[:, None]
        self.m = float(m)
        self.am = abs(self.m)
        self.s = np.sign(self.m)

    # W-hat_mu = Gamma(mu+1) |m|^-mu W_mu = e^{i mu th} r^mu 0F1(; mu+1; m^2 r^2)
    def what(self, mu, lognorm):
        mu = np.asarray(mu, dtype=float)[None, :]
        ok = ~np.isclose(mu + 1.0, np.round(mu + 1.0)) | (mu + 1.0 > 0.5)
        safe = np.where(ok, mu, 0.0)
        # r**mu rather than exp(mu log r): a sample may sit exactly on a centre
        with np.errstate(divide="ignore"):
            val = np.power(self.r, safe) * np.exp(1j * safe * self.th - lognorm[None, :])
        val = val * special.hyp0f1(safe + 1.0, (self.m * self.r) ** 2)
        return np.where(ok, val, 0.0)

    def dwhat(self, mu, lognorm, axis):
        mu = np.asarray(mu, dtype=float)
        lo = self.what(mu - 1.0, lognorm) * mu[None, :]
        # mu W_{mu-1} -> m^2 conj(W_1) as mu -> 0
        zero = np.isclose(mu, 0.0)
        if zero.any():
            lim = self.m**2 * np.conj(self.what(np.ones_like(mu), lognorm))
            lo = np.where(zero[None, :], lim, lo)
        hi = self.what(mu + 1.0, lognorm) * (self.m**2 / (mu + 1.0))[None, :]
        if axis == "x":
            return lo + hi
        return 1j * (lo - hi)

    # X-hat_mu = e^{i mu th} K_|mu|(2|m| r) / exp(lognorm)
    def xhat(self, mu, lognorm):
        mu = np.asarray(mu, dtype=float)
        lk = _logk(mu, 2.0 * self.am * self.r[:, 0])
        return np.exp(1j * mu[None, :] * self.th + lk - lognorm[None, :])

    def dxhat(self, mu, lognorm, axis):
        mu = np.asarray(mu, dtype=float)
        lo = self.xhat(mu - 1.0, lognorm)
        hi = self.xhat(mu + 1.0, lognorm)
        if axis == "x":
            return -self.am * (lo + hi)
        return -1j * self.am * (lo - hi)


def z_columns(nus, r, theta, m, radius, deriv=None):
    """Regular formal powers Z1_nu, Zi_nu divided by radius**nu.

    ``deriv`` is None, ``"x"`` or ``"y"``.
    """
    fam = _Family(r, theta, m)
    nus = np.asarray(nus, dtype=float)
    lognorm = nus * np.log(radius)
    if deriv is None:
        a = fam.what(nus, lognorm)
        b = np.conj(fam.what(nus + 1.0, lognorm))
    else:
        a = fam.dwhat(nus, lognorm, deriv)
        b = np.conj(fam.dwhat(nus + 1.0, lognorm, deriv))
    b = b * (fam.s * fam.am / (nus + 1.0))[None, :]
    out = np.empty((a.shape[0], 2 * nus.size), dtype=complex)
    out[:, 0::2] = a + b
    out[:, 1::2] = 1j * (a - b)
    return out


def y_columns(nus, r, theta, m, radius, deriv=None):
    """Decaying kernels Y1_{-nu}, Yi_{-nu} divided by C_nu K_nu(2|m| radius)."""
    fam = _Family(r, theta, m)
    nus = np.asarray(nus, dtype=float)
    lognorm = _logk(nus, np.array([2.0 * fam.am * radius]))[0]
    if deriv is None:
        a = fam.xhat(-nus, lognorm)
        b = np.conj(fam.xhat(1.0 - nus, lognorm))
    else:
        a = fam.dxhat(-nus, lognorm, deriv)
        b = np.conj(fam.dxhat(1.0 - nus, lognorm, deriv))
    out = np.empty((a.shape[0], 2 * nus.size), dtype=complex)
    out[:, 0::2] = a - fam.s * b
    out[:, 1::2] = 1j * (a + fam.s * b)
    return out


def _sqrt_away(w, direction):
    """Branch of sqrt(w) whose cut is the ray ``-direction * [0, inf)``."""
    u = direction / abs(direction)
    return np.sqrt(w / u) * np.sqrt(u)


class Patch:
    """One local expansion together with its sheet bookkeeping.

    ``points`` are all marked points; ``sign`` (puncture patches only) fixes
    which of the two branches of prod_{l != j} sqrt(z - a_l) is attached to
    the local square root at the centre.
    """

    def __init__(self, kind, center, radius, orders, points, m, index=None, sign=1.0,
                 analytic_radius=None):
        self.kind = kind
        self.center = complex(center)
        self.radius = float(radius)
        self.orders = np.asarray(orders, dtype=float)
        self.points = np.asarray(points, dtype=complex)
        self.m = float(m)
        self.index = index
        self.sign = float(sign)
        self.analytic_radius = analytic_radius

    @property
    def size(self):
        return 2 * self.orders.size

    def depth(self, z):
        """Relative position of z: < 1 means inside the patch."""
        d = np.abs(np.asarray(z) - self.center)
        if self.kind == EXTERIOR:
            with np.errstate(divide="ignore"):
                return self.radius / d
        return d / self.radius

    def _others_phase(self, z, skip):
        z = np.asarray(z, dtype=complex)
        q = np.ones_like(z)
        for l, a in enumerate(self.points):
            if l == skip:
                continue
            if self.kind == EXTERIOR:
                q = q * np.sqrt(1.0 - (a - self.center) / (z - self.center))
            else:
                q = q * _sqrt_away(z - a, self.center - a)
        return q

    def phase(self, z, theta=None):
        """Unit-modulus phase of the sheet label q = prod sqrt(z - a_l).

        For puncture patches ``theta`` optionally gives a continuous angle of
        z - a_j; otherwise the principal angle is used.
        """
        z = np.asarray(z, dtype=complex)
        if self.kind == PUNCTURE:
            if theta is None:
                theta = np.angle(z - self.center)
            q = np.exp(0.5j * theta) * self._others_phase(z, self.index) * self.sign
        elif self.kind == PLAIN:
            q = self._others_phase(z, None)
        else:
            n = self.points.size
            q = np.exp(0.5j * n * np.angle(z - self.center)) * self._others_phase(z, None)
        return q / np.abs(q)

    def columns(self, z, deriv=None, theta=None):
        """Basis values (not gauge adjusted) at z."""
        z = np.asarray(z, dtype=complex)
        w = z - self.center
        r = np.abs(w)
        th = np.angle(w) if theta is None else np.asarray(theta, dtype=float)
        if self.kind == EXTERIOR:
            return y_columns(self.orders, r, th, self.m, self.radius, deriv)
        return z_columns(self.orders, r, th, self.m, self.radius, deriv)

    def coefficient_scale(self):
        """Factor converting a column weight into the unnormalised coefficient."""
        if self.kind == EXTERIOR:
            nus = self.orders
            am = abs(self.m)
            lk = _logk(nus, np.array([2.0 * am * self.radius]))[0]
            logc = np.log(2.0) + nus * np.log(am) - special.gammaln(nus)
            return np.exp(-(lk + logc))
        return self.radius ** (-self.orders)
