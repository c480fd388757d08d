"""Massive Ising spinors f_1..f_n by overlapping exact local expansions.

Every point of the plane lies well inside at least one patch: a disk around
each marked point, the exterior of a disk enclosing all of them, and a
quadtree of plain disks filling the rest.  Inside each patch the spinor is a
truncated sum of formal powers, so the massive Cauchy-Riemann equation holds
exactly and only the matching between patches is discretised.  Matching is
imposed in the single-valued gauge ``F = f q / |q|`` (``q`` a branch of
prod sqrt(z - a_j)) at points of every patch circle, and the whole real
linear system is solved in the least-squares sense for all n spinors at once.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from ..errors import (AtPuncture, DegenerateConfiguration, IllConditioned, InvalidInput,
                      NoConvergence)
from .config import PointConfiguration
from .patches import EXTERIOR, PLAIN, PUNCTURE, Patch

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class SolverGrid:
    """Layout parameters.

    ``tol`` sets the truncation order of every expansion through its
    geometric convergence ratio; ``refinement`` adds extra orders on top.
    """

    tol: float = 1e-10
    refinement: int = 0
    puncture_ratio: float = 0.5
    plain_ratio: float = 0.6
    exterior_ratio: float = 0.6
    interior_depth: float = 0.8
    mass_cap: float = 1.5
    oversample: float = 1.5
    max_level: int = 12
    max_unknowns: int = 40000

    def order_count(self, ratio):
        return int(np.ceil(np.log(self.tol) / np.log(ratio))) + 2 + 4 * self.refinement


@dataclass(frozen=True)
class Layout:
    """Patch cover produced for one configuration."""

    patches: tuple
    far_field_radius: float
    far_field_center: complex
    grid: SolverGrid = field(default_factory=SolverGrid)

    @property
    def unknowns(self):
        return sum(p.size for p in self.patches)

    def describe(self):
        kinds = [p.kind for p in self.patches]
        return {
            "puncture": kinds.count(PUNCTURE),
            "plain": kinds.count(PLAIN),
            "exterior": kinds.count(EXTERIOR),
            "unknowns": self.unknowns,
            "far_field_radius": self.far_field_radius,
        }


def build_layout(config, m, grid=None):
    """Cover the plane by patches adapted to ``config`` and mass ``m``."""
    grid = grid or SolverGrid()
    pts = config.array
    am = abs(m)
    signs = config.sheet_signs()
    near = config.nearest_distances()
    depth = grid.interior_depth

    patches = []
    n_punct = grid.order_count(grid.puncture_ratio)
    punct_orders = np.arange(n_punct) - 0.5
    rho = np.minimum(grid.puncture_ratio * near, grid.mass_cap / am)
    for j, a in enumerate(pts):
        patches.append(Patch(PUNCTURE, a, rho[j], punct_orders, pts, m, index=j,
                             sign=signs[j], analytic_radius=near[j]))

    lo = np.array([pts.real.min(), pts.imag.min()])
    hi = np.array([pts.real.max(), pts.imag.max()])
    center = complex(*(0.5 * (lo + hi)))
    r0 = np.abs(pts - center).max()
    r_ext = r0 / grid.exterior_ratio
    n_ext = grid.order_count(grid.exterior_ratio)
    if config.n % 2 == 0:
        ext_orders = np.arange(1, n_ext + 1, dtype=float)
    else:
        ext_orders = np.arange(n_ext, dtype=float) + 0.5
    exterior = Patch(EXTERIOR, center, r_ext, ext_orders, pts, m, analytic_radius=r0)

    n_plain = grid.order_count(grid.plain_ratio)
    plain_orders = np.arange(n_plain, dtype=float)
    stack = [(center, r_ext, 0)]
    while stack:
        q, h, level = stack.pop()
        diag = h * _SQRT2
        dist = np.abs(pts - q)
        if np.any(dist + diag <= depth * rho):
            continue
        if abs(q - center) - diag >= r_ext / depth:
            continue
        rad = diag / depth
        if rad <= grid.plain_ratio * dist.min() and rad * am <= grid.mass_cap:
            patches.append(Patch(PLAIN, q, rad, plain_orders, pts, m,
                                 analytic_radius=dist.min()))
            continue
        if level >= grid.max_level:
            raise DegenerateConfiguration(
                "patch refinement limit reached; points too close for the layout")
        h2 = 0.5 * h
        for dx, dy in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            stack.append((q + h2 * complex(dx, dy), h2, level + 1))
    patches.append(exterior)

    layout = Layout(tuple(patches), float(r_ext), center, grid)
    if layout.unknowns > grid.max_unknowns:
        raise DegenerateConfiguration(
            f"layout needs {layout.unknowns} unknowns (limit {grid.max_unknowns})")
    return layout


def _best_patch(patches, z, exclude=None):
    """Index of the patch in which each z lies deepest, and that depth."""
    depths = np.stack([p.depth(z) for p in patches])
    if exclude is not None:
        depths[exclude] = np.inf
    best = np.argmin(depths, axis=0)
    return best, depths[best, np.arange(best.size)]


def _circle_points(patch, grid):
    count = int(np.ceil(grid.oversample * patch.size / 2.0)) + 4
    th = 2.0 * np.pi * (np.arange(count) + 0.5) / count
    return patch.center + patch.radius * np.exp(1j * th)


@dataclass
class SpinorSolution:
    """Solved spinors f_1..f_n, evaluable anywhere off the marked points.

    ``weights[:, k]`` is the real coefficient vector of f_k over the
    concatenated patch bases.  ``residual_norm`` is the largest patch
    mismatch of F relative to max |F| on an independent set of check points.
    """

    configuration: PointConfiguration
    mass: float
    layout: Layout
    weights: np.ndarray
    residual_norm: float
    condition: float

    @property
    def grid(self):
        return self.layout

    @property
    def n(self):
        return self.configuration.n

    def _offsets(self):
        sizes = [p.size for p in self.layout.patches]
        return np.concatenate([[0], np.cumsum(sizes)])

    def patch_weights(self, index, k=None):
        off = self._offsets()
        w = self.weights[off[index]:off[index + 1]]
        return w if k is None else w[:, k]

    def patch_coefficients(self, index):
        """Unnormalised (A^1, A^i) pairs per order for every spinor."""
        p = self.layout.patches[index]
        w = self.patch_weights(index)
        scale = p.coefficient_scale()
        return w[0::2] * scale[:, None], w[1::2] * scale[:, None]

    def gauge(self, z, deriv=None, k=None):
        """Single-valued field F = f q/|q| (or the same combination of f's
        derivatives) at the points ``z``; shape (len(z), n)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        pts = self.configuration.array
        if np.any(np.min(np.abs(z[:, None] - pts[None, :]), axis=1) == 0.0):
            raise AtPuncture("evaluation at a marked point")
        best, _ = _best_patch(self.layout.patches, z)
        cols = slice(None) if k is None else [k]
        out = np.empty((z.size, self.n if k is None else 1), dtype=complex)
        for i in np.unique(best):
            sel = best == i
            p = self.layout.patches[i]
            vals = p.columns(z[sel], deriv) @ self.patch_weights(i)[:, cols]
            out[sel] = vals * p.phase(z[sel])[:, None]
        return out if k is None else out[:, 0]

    def local_values(self, j, z, theta, deriv=None):
        """Spinor values on the sheet of puncture j, continuous in ``theta``.

        ``theta`` is the angle of z - a_j used for the local square root.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        p = self.layout.patches[j]
        ph = p.phase(z, theta=np.asarray(theta, dtype=float))
        return self.gauge(z, deriv) * np.conj(ph)[:, None]

    def gauge_values(self, z):
        """h_k = q f_k, the field of the single-valued equation dbar h = alpha conj(h)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        mod = np.prod(np.abs(z[:, None] - self.configuration.array[None, :]), axis=1)
        return self.gauge(z) * np.sqrt(mod)[:, None]

    def leading_coefficients(self):
        """A_{-1/2}(a_j, f_k) = A^1 + i A^i read from the puncture expansions."""
        a1 = np.empty((self.n, self.n))
        ai = np.empty((self.n, self.n))
        for j in range(self.n):
            c1, ci = self.patch_coefficients(j)
            a1[j], ai[j] = c1[0], ci[0]
        return a1 + 1j * ai


def _assemble(layout):
    """Sparse real matching matrix; each collocation point gives a Re and an Im row."""
    patches = layout.patches
    grid = layout.grid
    off = np.concatenate([[0], np.cumsum([p.size for p in patches])])
    data, rows, cols = [], [], []
    start = 0
    worst = 0.0

    def put(block, r0, c0):
        rr, cc = np.indices(block.shape)
        for part, shift in ((block.real, 0), (block.imag, 1)):
            data.append(part.ravel())
            rows.append(2 * (rr.ravel() + r0) + shift)
            cols.append(cc.ravel() + c0)

    for d, p in enumerate(patches):
        z = _circle_points(p, grid)
        other, dep = _best_patch(patches, z, exclude=d)
        worst = max(worst, float(dep.max()))
        put(p.columns(z) * p.phase(z)[:, None], start, off[d])
        for i in np.unique(other):
            idx = np.flatnonzero(other == i)
            q = patches[i]
            block = -q.columns(z[idx]) * q.phase(z[idx])[:, None]
            rr, cc = np.indices(block.shape)
            for part, shift in ((block.real, 0), (block.imag, 1)):
                data.append(part.ravel())
                rows.append(2 * (idx[rr.ravel()] + start) + shift)
                cols.append(cc.ravel() + off[i])
        start += z.size
    if worst >= 1.0:
        raise DegenerateConfiguration("patch cover has a gap")
    mat = sparse.csc_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(2 * start, off[-1]))
    return mat, off


def _check_points(layout):
    """Points between the collocation nodes, used for the residual."""
    pts = []
    for p in layout.patches:
        z = _circle_points(p, layout.grid)
        th = np.angle(z - p.center)
        dth = np.pi / z.size
        pts.append(p.center + p.radius * np.exp(1j * (th + dth)))
    return np.concatenate(pts)


def solve_spinors(config, m, grid=None, tol=1e-6):
    """Solve for f_1..f_n; ``tol`` bounds the relative matching residual."""
    if not isinstance(config, PointConfiguration):
        config = PointConfiguration(tuple(np.asarray(config, dtype=complex).ravel()))
    m = float(m)
    if not m < 0:
        raise InvalidInput("the spinor problem is posed for m < 0")
    layout = build_layout(config, m, grid)
    mat, off = _assemble(layout)
    n = config.n
    fixed = np.array([off[j] for j in range(n)])
    scale = np.array([layout.patches[j].coefficient_scale()[0] for j in range(n)])
    rhs = -(mat[:, fixed] @ np.diag(1.0 / scale))
    if not np.all(np.isfinite(mat.data)):
        raise IllConditioned("non-finite entries in the matching system")
    allnorm = np.sqrt(np.asarray(mat.multiply(mat).sum(axis=0))).ravel()
    # identically vanishing kernels (Yi_{-1/2} for odd n) carry no unknown
    live = allnorm > 1e-13 * allnorm.max()
    free = np.setdiff1d(np.flatnonzero(live), fixed)
    sub = mat[:, free]
    colnorm = allnorm[free]
    sub = sub @ sparse.diags(1.0 / colnorm)
    # the scaled system is well conditioned, so normal equations lose little
    normal = (sub.T @ sub).tocsc()
    lu = splinalg.splu(normal)
    sol = lu.solve(np.asarray(sub.T @ rhs))
    weights = np.zeros((off[-1], n))
    weights[fixed, np.arange(n)] = 1.0 / scale
    weights[free] = sol / colnorm[:, None]
    inv = splinalg.LinearOperator(normal.shape, matvec=lu.solve, rmatvec=lambda v: lu.solve(v, trans="T"))
    cond = float(np.sqrt(splinalg.onenormest(normal) * splinalg.onenormest(inv)))

    out = SpinorSolution(config, m, layout, weights, np.nan, cond)
    out.residual_norm = _residual(out)
    if not np.isfinite(out.residual_norm):
        raise IllConditioned("spinor system produced non-finite values")
    if out.residual_norm > tol:
        raise NoConvergence(f"matching residual {out.residual_norm:.2e} exceeds {tol:.1e}")
    return out


def _residual(sol):
    layout = sol.layout
    patches = layout.patches
    z = _check_points(layout)
    best, _ = _best_patch(patches, z)
    second, _ = _best_patch(patches, z, exclude=None)
    err = 0.0
    scale = 0.0
    # compare the two deepest patches at every check point
    depths = np.stack([p.depth(z) for p in patches])
    order = np.argsort(depths, axis=0)
    first, second = order[0], order[1]
    for a, b in set(zip(first.tolist(), second.tolist())):
        sel = (first == a) & (second == b)
        pa, pb = patches[a], patches[b]
        fa = (pa.columns(z[sel]) @ sol.patch_weights(a)) * pa.phase(z[sel])[:, None]
        fb = (pb.columns(z[sel]) @ sol.patch_weights(b)) * pb.phase(z[sel])[:, None]
        err = max(err, float(np.abs(fa - fb).max()))
        scale = max(scale, float(np.abs(fa).max()))
    return err / scale
