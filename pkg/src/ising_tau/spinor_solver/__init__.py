"""Massive Ising spinors f_1..f_n and their expansion coefficients."""

from .analysis import (
    ExpansionReport,
    LinearSpinors,
    build_pure_basis,
    coefficients,
    derivative_expansion_check,
    direct_coefficients,
    l2_from_energy_identity,
    l2_norms,
    pure_basis_series,
)
from .cauchy import gauge_alpha, solid_cauchy_transform
from .coefficients import CoefficientSet
from .config import PointConfiguration
from .solver import SolverGrid, SpinorSolution, build_layout, solve_spinors

__all__ = [
    "CoefficientSet",
    "ExpansionReport",
    "LinearSpinors",
    "PointConfiguration",
    "SolverGrid",
    "SpinorSolution",
    "build_layout",
    "build_pure_basis",
    "coefficients",
    "derivative_expansion_check",
    "direct_coefficients",
    "gauge_alpha",
    "l2_from_energy_identity",
    "l2_norms",
    "pure_basis_series",
    "solid_cauchy_transform",
    "solve_spinors",
]
