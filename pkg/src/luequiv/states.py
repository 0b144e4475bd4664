"""Density matrices carrying their multipartite dimension profile."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .tensor import DimProfile, as_cmatrix

TRACE_TOL = 1e-8
PSD_TOL = 1e-8
HERM_TOL = 1e-8


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian PSD operator with local dimensions; unit trace after ingest."""

    matrix: np.ndarray = field(repr=False)
    profile: DimProfile

    def __post_init__(self):
        m = as_cmatrix(self.matrix)
        n = self.profile.total
        if m.shape != (n, n):
            raise ValueError(
                f"matrix shape {m.shape} does not match profile {self.profile.dims}"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.profile.total


def validate_density(rho: DensityMatrix, normalize: bool = True) -> DensityMatrix:
    """Check Hermiticity, positivity, and trace; renormalize trace if asked.

    A trace off by more than TRACE_TOL is repaired with a warning rather than
    rejected; Hermiticity violations and eigenvalues below -PSD_TOL are errors.
    """
    m = rho.matrix
    scale = max(1.0, float(np.linalg.norm(m)))
    dev = float(np.linalg.norm(m - m.conj().T))
    if dev > HERM_TOL * scale:
        raise ValueError(f"density matrix is not Hermitian: ||H - H^dag||_F = {dev:.3e}")
    tr = float(np.trace(m).real)
    if tr <= 0:
        raise ValueError(f"density matrix has non-positive trace {tr:.3e}")
    if abs(tr - 1.0) > TRACE_TOL:
        if not normalize:
            raise ValueError(f"density matrix trace {tr} != 1")
        warnings.warn(
            f"density matrix trace {tr:.12g} != 1; renormalizing", stacklevel=2
        )
        m = m / tr
    lam_min = float(np.linalg.eigvalsh((m + m.conj().T) / 2.0)[0])
    if lam_min < -PSD_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {lam_min:.3e}")
    return DensityMatrix(matrix=m, profile=rho.profile)
