"""Coefficient matrices [𝓐], [𝓑], [𝓓] and their structural identities."""

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInput, InvariantViolation, SingularMatrix

# default tolerances for validate(); the solver reaches ~1e-9 on all of them
HERMITIAN_TOL = 1e-5
SYMMETRY_TOL = 1e-4
SPECTRAL_MARGIN = 1e-3


def _complex_matrix(x, n=None):
    arr = np.asarray(x, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or (n is not None and arr.shape[0] != n):
        raise InvalidInput("expected a square matrix of matching size")
    return arr


@dataclass(frozen=True)
class CoefficientSet:
    """Expansion data of f_1..f_n at a_1..a_n.

    Near a_j, f_k = (i𝓑_jk)•Z_{-1/2} + 𝓐_jk•Z_{1/2} + 𝓓_jk•Z_{3/2} + ...,
    with 𝓑_kk = -i.  ``D`` may be None.
    """

    A: np.ndarray
    B: np.ndarray
    points: tuple
    mass: float
    D: np.ndarray = None
    residual: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = tuple(complex(p) for p in np.asarray(self.points, dtype=complex).ravel())
        object.__setattr__(self, "points", pts)
        n = len(pts)
        object.__setattr__(self, "A", _complex_matrix(self.A, n))
        object.__setattr__(self, "B", _complex_matrix(self.B, n))
        if self.D is not None:
            object.__setattr__(self, "D", _complex_matrix(self.D, n))
        object.__setattr__(self, "mass", float(self.mass))

    @property
    def n(self):
        return len(self.points)

    @property
    def positions(self):
        return np.asarray(self.points, dtype=complex)

    @property
    def iB(self):
        return 1j * self.B

    @property
    def Y(self):
        """[𝓐][i𝓑]^{-1}, symmetric for genuine spinor data."""
        try:
            return np.linalg.solve(self.iB.T, self.A.T).T
        except np.linalg.LinAlgError as exc:
            raise SingularMatrix("[i𝓑] is singular") from exc

    def invariants(self):
        """Deviation of every structural identity (0 means exact)."""
        ib = self.iB
        herm = float(np.abs(ib - ib.conj().T).max())
        y = self.Y
        sym = float(np.abs(y - y.T).max() / max(np.abs(y).max(), 1e-300))
        off = self.B - np.diag(np.diag(self.B))
        rho = float(np.abs(np.linalg.eigvals(ib.imag)).max())
        return {
            "hermitian": herm,
            "symmetric": sym,
            "spectral_radius": rho,
            "max_offdiag_B": float(np.abs(off).max()),
            "diag_B": float(np.abs(np.diag(self.B) + 1j).max()),
            "offdiag_B_imag": float(np.abs(off.imag).max()),
        }

    def validate(self, hermitian_tol=HERMITIAN_TOL, symmetry_tol=SYMMETRY_TOL,
                 spectral_margin=SPECTRAL_MARGIN):
        """Raise InvariantViolation naming the first identity that fails."""
        inv = self.invariants()
        checks = [
            ("hermitian", inv["hermitian"], hermitian_tol),
            ("diag_B", inv["diag_B"], hermitian_tol),
            ("offdiag_B_imag", inv["offdiag_B_imag"], hermitian_tol),
            ("symmetric", inv["symmetric"], symmetry_tol),
            ("spectral_radius", inv["spectral_radius"] - (1.0 - spectral_margin), 0.0),
            ("max_offdiag_B", inv["max_offdiag_B"] - 1.0, 0.0),
        ]
        for name, dev, tol in checks:
            if not dev <= tol:
                raise InvariantViolation(name, dev)
        return inv

    # ---- JSON -----------------------------------------------------------
    def to_dict(self):
        def enc(mat):
            return [[[float(v.real), float(v.imag)] for v in row] for row in mat]

        return {
            "mass": self.mass,
            "points": [[p.real, p.imag] for p in self.points],
            "A": enc(self.A),
            "B": enc(self.B),
            "D": None if self.D is None else enc(self.D),
            "residual": float(self.residual),
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, doc):
        def dec(mat):
            arr = np.asarray(mat, dtype=float)
            return arr[..., 0] + 1j * arr[..., 1]

        try:
            pts = [complex(re, im) for re, im in doc["points"]]
            return cls(A=dec(doc["A"]), B=dec(doc["B"]), points=tuple(pts), mass=doc["mass"],
                       D=None if doc.get("D") is None else dec(doc["D"]),
                       residual=float(doc.get("residual", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed coefficient document: {exc}") from exc

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))
