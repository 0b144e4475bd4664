"""Hermitian eigendecomposition, degeneracy profiling, and rank-one tests."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import as_cmatrix, leading_index

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order with the pairing eigenvector matrix.

    Column j of ``basis`` is the unit eigenvector for ``eigenvalues[j]``.
    Each column is phase-fixed (largest-magnitude entry real positive) so the
    decomposition is deterministic.
    """

    eigenvalues: np.ndarray = field(repr=False)
    basis: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size


@dataclass(frozen=True)
class DegeneracyProfile:
    """Distinct eigenvalues with multiplicities, in descending order."""

    blocks: tuple[tuple[float, int], ...]

    @property
    def total(self) -> int:
        return sum(n for _, n in self.blocks)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(n for _, n in self.blocks)

    @property
    def is_nondegenerate(self) -> bool:
        return all(n == 1 for n in self.multiplicities)

    @property
    def max_multiplicity(self) -> int:
        return max(self.multiplicities)


@dataclass(frozen=True)
class RankOneReport:
    """Two leading singular values and the rank-one verdict at a tolerance."""

    sigma1: float
    sigma2: float
    ratio: float
    is_rank_one: bool
    cut: int | None = None


def _fix_column_phases(m: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    out = m.copy()
    for j in range(out.shape[1]):
        lead = out[leading_index(out[:, j]), j]
        if abs(lead) > 0:
            out[:, j] /= lead / abs(lead)
    return out


def eig_hermitian(h) -> Spectrum:
    """Decompose a Hermitian matrix as X diag(lambda) X^dag, lambda descending.

    Deterministic: eigenvector phases are fixed per column and exact eigenvalue
    ties are ordered lexicographically by the resulting vectors.
    """
    h = as_cmatrix(h)
    if h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got {h.shape}")
    dev = np.linalg.norm(h - h.conj().T)
    scale = max(1.0, np.linalg.norm(h))
    if dev > HERMITIAN_TOL * scale:
        raise ValueError(f"matrix is not Hermitian: ||H - H^dag||_F = {dev:.3e}")
    w, v = np.linalg.eigh((h + h.conj().T) / 2.0)
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    v = _fix_column_phases(v)
    # exact float ties: order tied columns lexicographically for reproducibility
    j = 0
    n = w.size
    while j < n:
        k = j + 1
        while k < n and w[k] == w[j]:
            k += 1
        if k - j > 1:
            block = v[:, j:k]
            keys = np.concatenate([block.real, block.imag], axis=0)
            order = np.lexsort(keys[::-1])
            v[:, j:k] = block[:, order]
        j = k
    w.setflags(write=False)
    v.setflags(write=False)
    return Spectrum(eigenvalues=w, basis=v)


def degeneracy_profile(s: Spectrum, tol: float) -> DegeneracyProfile:
    """Group consecutive sorted eigenvalues with gap <= tol into blocks."""
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    w = s.eigenvalues
    blocks: list[tuple[float, int]] = []
    j = 0
    while j < w.size:
        k = j + 1
        while k < w.size and w[k - 1] - w[k] <= tol:
            k += 1
        blocks.append((float(np.mean(w[j:k])), k - j))
        j = k
    return DegeneracyProfile(blocks=tuple(blocks))


def spectra_match(s1: Spectrum, s2: Spectrum, tol: float) -> bool:
    """True iff the sorted eigenvalue vectors agree element-wise within tol."""
    if s1.dim != s2.dim:
        raise ValueError(f"spectra have different dimensions: {s1.dim} vs {s2.dim}")
    return bool(np.max(np.abs(s1.eigenvalues - s2.eigenvalues)) <= tol)


def two_leading_singulars(m) -> tuple[float, float]:
    """(sigma1, sigma2) of a matrix; sigma2 = 0 when min(shape) < 2."""
    m = as_cmatrix(m)
    sv = np.linalg.svd(m, compute_uv=False)
    s1 = float(sv[0]) if sv.size else 0.0
    s2 = float(sv[1]) if sv.size > 1 else 0.0
    return s1, s2


def rank_one_test(m, tol: float, cut: int | None = None) -> RankOneReport:
    """Rank-one verdict via the ratio of the two leading singular values.

    is_rank_one <=> sigma1 > 0 and sigma2 <= tol * sigma1.  The ratio is
    scale-invariant, so the verdict ignores any overall scalar factor.
    """
    if not 0 < tol < 1:
        raise ValueError(f"tolerance must lie in (0, 1), got {tol}")
    s1, s2 = two_leading_singulars(m)
    ratio = s2 / s1 if s1 > 0 else 0.0
    return RankOneReport(
        sigma1=s1,
        sigma2=s2,
        ratio=ratio,
        is_rank_one=bool(s1 > 0 and s2 <= tol * s1),
        cut=cut,
    )
