"""Move three points along a path with the isomonodromic equations.

Starts from a direct solve, carries the coefficients to a deformed
configuration, and compares with a fresh solve there.
"""

import numpy as np

from ising_tau.isomonodromy import LinearPath, PathReport, RotationPath, integrate_path
from ising_tau.spinor_solver import PointConfiguration, direct_coefficients, solve_spinors

M = -0.8
start_pts = np.array([0.0, 1.0 + 0.5j, -0.3 + 1.2j])
end_pts = np.array([0.2, 1.6 + 0.2j, -0.5 + 1.9j])

start = direct_coefficients(solve_spinors(PointConfiguration(tuple(start_pts)), M))
report = PathReport()
moved = integrate_path(start, LinearPath(start_pts, end_pts), M, report=report)
fresh = direct_coefficients(solve_spinors(PointConfiguration(tuple(end_pts)), M))

print(f"accepted steps {report.accepted}, rejected {report.rejected}")
print(f"max |Δ[i𝓑]| vs fresh solve: {np.abs(moved.iB - fresh.iB).max():.1e}")
print(f"max |Δ[𝓐]|  vs fresh solve: {np.abs(moved.A - fresh.A).max():.1e}")

# a quarter turn leaves [i𝓑] alone and multiplies [𝓐] by -i
turned = integrate_path(start, RotationPath(start_pts, np.pi / 2), M)
print(f"quarter turn: |Δ[i𝓑]| {np.abs(turned.iB - start.iB).max():.1e}, "
      f"|[𝓐] + i[𝓐]₀| {np.abs(turned.A + 1j * start.A).max():.1e}")
