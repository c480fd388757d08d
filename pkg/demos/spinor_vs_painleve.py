"""Solve the spinor problem at two points and compare β with tanh h₀.

The isomonodromic coefficient β = -𝓑₁₂ read off the spinors must agree with
the Painlevé transcendent, and 2β' (not β') closes the diagonal identity.
"""

from ising_tau.isomonodromy import reduce_two_point, two_point_coefficients
from ising_tau.painleve3 import integrate_inward
from ising_tau.spinor_solver import PointConfiguration, direct_coefficients, solve_spinors

M = -1.0
sol = integrate_inward(10.0, 0.3)

for r in (0.5, 1.0, 2.0, 3.0):
    c = direct_coefficients(solve_spinors(PointConfiguration((0.0, r)), M))
    st = reduce_two_point(c)
    beta = sol.beta_at(r)
    bprime = (1 - beta**2) * sol.h_prime_at(r)
    printed = two_point_coefficients(beta, bprime, M, a=(0.0, r), corrected=False)
    fixed = two_point_coefficients(beta, bprime, M, a=(0.0, r))
    print(f"r={r:3.1f}  β solver {st.beta:.12f}  tanh h0 {beta:.12f}  "
          f"|Δ𝓐11| printed {abs(printed.A[0, 0] - c.A[0, 0]):.1e}  "
          f"with 2β' {abs(fixed.A[0, 0] - c.A[0, 0]):.1e}")
