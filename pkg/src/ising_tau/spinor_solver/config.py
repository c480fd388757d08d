"""Marked-point configurations and their sheet conventions."""

from dataclasses import dataclass

import numpy as np

from ..errors import Collision, DegenerateConfiguration, InvalidInput


def default_branch_phases(points):
    """Phases of prod_{l != k} sqrt(a_k - a_l) taken with principal arguments."""
    pts = np.asarray(points, dtype=complex)
    out = np.empty(pts.size)
    for k in range(pts.size):
        others = np.delete(pts, k)
        out[k] = 0.5 * np.sum(np.angle(pts[k] - others))
    return out


@dataclass(frozen=True)
class PointConfiguration:
    """Distinct points a_1..a_n with a sheet choice at each of them.

    ``branch_phases[k]`` is the argument assigned to
    prod_{l != k} sqrt(a_k - a_l), i.e. it selects which of the two spinors
    +f_k, -f_k is returned.  Only its value modulo 2*pi matters, and it must
    be continued continuously when the points move.
    """

    points: tuple
    branch_phases: tuple = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        if pts.size < 2:
            raise InvalidInput("at least two points are required")
        if not np.all(np.isfinite(pts)):
            raise InvalidInput("points must be finite")
        gaps = np.abs(pts[:, None] - pts[None, :])
        gaps[np.diag_indices(pts.size)] = np.inf
        if gaps.min() == 0.0:
            raise Collision("two marked points coincide")
        if gaps.min() < 1e-9 * max(1.0, np.abs(pts).max()):
            raise DegenerateConfiguration("marked points are numerically coincident")
        object.__setattr__(self, "points", tuple(complex(p) for p in pts))
        if self.branch_phases is None:
            phases = default_branch_phases(pts)
        else:
            phases = np.asarray(self.branch_phases, dtype=float).ravel()
            if phases.size != pts.size:
                raise InvalidInput("one branch phase per point is required")
        object.__setattr__(self, "branch_phases", tuple(float(p) for p in phases))

    @property
    def n(self):
        return len(self.points)

    @property
    def array(self):
        return np.asarray(self.points, dtype=complex)

    def min_distance(self):
        pts = self.array
        gaps = np.abs(pts[:, None] - pts[None, :])
        gaps[np.diag_indices(pts.size)] = np.inf
        return float(gaps.min())

    def nearest_distances(self):
        pts = self.array
        gaps = np.abs(pts[:, None] - pts[None, :])
        gaps[np.diag_indices(pts.size)] = np.inf
        return gaps.min(axis=1)

    def sheet_signs(self):
        """+-1 per point relating the branch phases to the principal choice."""
        ref = default_branch_phases(self.array)
        c = np.cos(np.asarray(self.branch_phases) - ref)
        if np.any(np.abs(c) < 1e-6):
            raise InvalidInput("branch phase is ambiguous (off by pi/2 from a sheet)")
        return np.sign(c)

    def transformed(self, scale=1.0, shift=0.0):
        """Image under z -> scale*z + shift with branches continued along it.

        ``scale`` may be complex; its argument must be the rotation angle
        reached continuously from zero (|arg| < pi is assumed).
        """
        scale = complex(scale)
        rot = np.angle(scale)
        pts = self.array * scale + shift
        phases = np.asarray(self.branch_phases) + 0.5 * (self.n - 1) * rot
        return PointConfiguration(tuple(pts), tuple(phases))

    def moved(self, new_points):
        """Small displacement with phases continued continuously."""
        new = np.asarray(new_points, dtype=complex)
        old = self.array
        phases = np.array(self.branch_phases, dtype=float)
        for k in range(self.n):
            for l in range(self.n):
                if l != k:
                    d = np.angle((new[k] - new[l]) / (old[k] - old[l]))
                    phases[k] += 0.5 * d
        return PointConfiguration(tuple(new), tuple(phases))
