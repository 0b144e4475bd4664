"""Dense complex matrices with multipartite structure: vec, kron, realignment.

Matrices are plain ``numpy.ndarray`` of dtype complex128.  The realignment
of a square operator across a sequential cut 1..k | k+1..M is a pure entry
permutation: row (I, I') of the realigned matrix is the row-major vec of the
(I, I') block when the operator is viewed as a d_L x d_L grid of d_R x d_R
blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ShapeError(ValueError):
    """Raised when a matrix does not conform to the declared dimensions."""


@dataclass(frozen=True)
class DimProfile:
    """Local dimensions (N_1, ..., N_M) of a multipartite system, M >= 2."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) < 2:
            raise ValueError(f"need at least two subsystems, got dims={dims}")
        if any(d < 1 for d in dims):
            raise ValueError(f"dimensions must be positive, got dims={dims}")

    @property
    def total(self) -> int:
        return math.prod(self.dims)

    @property
    def nsites(self) -> int:
        return len(self.dims)

    def split(self, cut: int) -> tuple[int, int]:
        """Left/right dimensions (d_L, d_R) of the sequential cut 1..cut | rest."""
        if not 1 <= cut <= self.nsites - 1:
            raise ValueError(
                f"cut must be in [1, {self.nsites - 1}] for {self.nsites} sites, got {cut}"
            )
        d_left = math.prod(self.dims[:cut])
        return d_left, self.total // d_left

    def drop_left(self) -> "DimProfile":
        """Profile of subsystems 2..M (used when peeling the leftmost factor)."""
        if self.nsites < 3:
            raise ValueError("cannot drop a site from a bipartite profile")
        return DimProfile(self.dims[1:])


@dataclass(frozen=True)
class CutRealignment:
    """Realigned matrix for one sequential cut, shape (d_L^2, d_R^2)."""

    cut: int
    matrix: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def as_cmatrix(a) -> np.ndarray:
    """Coerce to a 2-D complex128 array (no copy when already conforming)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={m.ndim}")
    return m


def leading_index(a, rtol: float = 1e-9) -> int:
    """Flat index of the first entry within rtol of the maximum magnitude.

    Plain argmax is unstable when magnitudes tie up to rounding (common for
    2x2 unitaries); the tolerance makes phase conventions reproducible.
    """
    mags = np.abs(np.asarray(a)).reshape(-1)
    return int(np.argmax(mags >= mags.max() * (1.0 - rtol)))


def vec(a) -> np.ndarray:
    """Row-major flattening [a_11, ..., a_1N, a_21, ..., a_MN]."""
    return as_cmatrix(a).reshape(-1)


def unvec(v, rows: int, cols: int) -> np.ndarray:
    """Inverse of :func:`vec` for a known target shape."""
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if v.size != rows * cols:
        raise ShapeError(f"cannot unvec length {v.size} into {rows}x{cols}")
    return v.reshape(rows, cols)


def kron(a, b) -> np.ndarray:
    """Kronecker product; (a kron b)[i*rb+r, j*cb+c] = a[i,j] * b[r,c]."""
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def kron_all(mats) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    mats = list(mats)
    if not mats:
        raise ValueError("kron_all needs at least one matrix")
    out = as_cmatrix(mats[0])
    for m in mats[1:]:
        out = np.kron(out, as_cmatrix(m))
    return out


def _realign_matrix(z: np.ndarray, d_left: int, d_right: int) -> np.ndarray:
    # (Z~)[(I,I'), (J,J')] = Z[(I,J), (I',J')]; all indices row-major.
    return np.ascontiguousarray(
        z.reshape(d_left, d_right, d_left, d_right)
        .transpose(0, 2, 1, 3)
        .reshape(d_left * d_left, d_right * d_right)
    )


def realign(z, profile: DimProfile, cut: int) -> CutRealignment:
    """Realign a square operator across the sequential cut 1..cut | cut+1..M.

    Row (I, I') of the result is vec of the d_R x d_R block at block-row I,
    block-column I' of ``z``, so a tensor product A kron B realigns to the
    rank-one outer product vec(A) vec(B)^t.
    """
    z = as_cmatrix(z)
    d_left, d_right = profile.split(cut)
    n = profile.total
    if z.shape != (n, n):
        raise ShapeError(
            f"realign at cut {cut}: operator shape {z.shape} does not match "
            f"profile {profile.dims} (expected {(n, n)})"
        )
    return CutRealignment(cut=cut, matrix=_realign_matrix(z, d_left, d_right))


def unrealign(r: CutRealignment, profile: DimProfile) -> np.ndarray:
    """Invert :func:`realign`, recovering the original operator exactly."""
    d_left, d_right = profile.split(r.cut)
    m = as_cmatrix(r.matrix)
    if m.shape != (d_left * d_left, d_right * d_right):
        raise ShapeError(
            f"unrealign at cut {r.cut}: shape {m.shape} does not match "
            f"profile {profile.dims}"
        )
    return np.ascontiguousarray(
        m.reshape(d_left, d_left, d_right, d_right)
        .transpose(0, 2, 1, 3)
        .reshape(profile.total, profile.total)
    )


def realign_all(z, profile: DimProfile) -> list[CutRealignment]:
    """The M-1 sequential-cut realignments, cuts 1..M-1 in order."""
    z = as_cmatrix(z)
    return [realign(z, profile, k) for k in range(1, profile.nsites)]
