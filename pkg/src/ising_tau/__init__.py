"""Massive Ising spinors, their isomonodromic deformations and the Painlevé III
route to the two-point scaling functions.

Submodules are imported on first use so that the command line can cap BLAS
threads before numpy loads.
"""

import importlib

__version__ = "0.1.0"

_SUBMODULES = ("special_functions", "formal_powers", "contour", "spinor_solver",
               "isomonodromy", "painleve3", "validation", "cli", "errors")


def __getattr__(name):
    if name in _SUBMODULES:
        return importlib.import_module(f".{name}", __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
