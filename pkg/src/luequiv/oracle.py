"""Ground-truth generators: Haar unitaries, random densities, planted pairs.

LU equivalence is easy to construct even though it is hard to decide, so the
test corpus is built by planting: draw a state, conjugate it by known local
unitaries, and keep those unitaries as the certified witness.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .states import DensityMatrix
from .tensor import DimProfile, as_cmatrix, kron_all


class PairLabel(str, Enum):
    EQUIVALENT = "EQUIVALENT"
    SPECTRUM_MISMATCH = "SPECTRUM_MISMATCH"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class PairSample:
    rho: DensityMatrix
    rho_prime: DensityMatrix
    label: PairLabel
    seed: int
    planted: tuple[np.ndarray, ...] | None = field(default=None, repr=False)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def haar_unitary(n: int, seed) -> np.ndarray:
    """Haar-distributed n x n unitary from a QR-decomposed Ginibre matrix."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    rng = _rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))[np.newaxis, :]
    return q


def _generic_spectrum(n: int, rng: np.random.Generator, min_gap: float = 1e-3) -> np.ndarray:
    """Descending eigenvalues summing to 1 with pairwise gaps >= min_gap.

    A linear ramp is added to sorted uniforms; its slope is chosen so the
    gap bound survives the final normalization exactly.
    """
    headroom = 1.0 - min_gap * n * (n - 1) / 2.0
    if headroom <= 0:
        raise ValueError(f"cannot fit {n} eigenvalues with pairwise gaps >= {min_gap}")
    raw = np.sort(rng.uniform(0.0, 1.0, size=n))[::-1]
    slope = min_gap * raw.sum() / headroom
    lam = raw + slope * np.arange(n - 1, -1, -1, dtype=float)
    return lam / lam.sum()


def random_density(
    profile: DimProfile, spectrum_kind="generic-nondegenerate", seed=0
) -> DensityMatrix:
    """U Lambda U^dag with U Haar on the full space.

    spectrum_kind is either the string "generic-nondegenerate" or an explicit
    eigenvalue list (non-negative, summing to 1).
    """
    rng = _rng(seed)
    n = profile.total
    if isinstance(spectrum_kind, str):
        if spectrum_kind != "generic-nondegenerate":
            raise ValueError(f"unknown spectrum kind {spectrum_kind!r}")
        lam = _generic_spectrum(n, rng)
    else:
        lam = np.asarray(spectrum_kind, dtype=float).reshape(-1)
        if lam.size != n:
            raise ValueError(f"planted spectrum has {lam.size} values, expected {n}")
        if np.any(lam < 0):
            raise ValueError("planted eigenvalues must be non-negative")
        if abs(lam.sum() - 1.0) > 1e-9:
            raise ValueError(f"planted eigenvalues sum to {lam.sum()}, expected 1")
        lam = np.sort(lam / lam.sum())[::-1]
    u = haar_unitary(n, rng)
    m = (u * lam[np.newaxis, :]) @ u.conj().T
    m = (m + m.conj().T) / 2.0
    return DensityMatrix(matrix=m, profile=profile)


def local_unitaries(profile: DimProfile, seed) -> tuple[np.ndarray, ...]:
    rng = _rng(seed)
    return tuple(haar_unitary(d, rng) for d in profile.dims)


def make_equivalent_pair(profile: DimProfile, seed: int) -> PairSample:
    """Plant rho' = (kron U_i) rho (kron U_i)^dag with Haar local factors."""
    rng = np.random.default_rng([int(seed), 0xE9])
    rho = random_density(profile, "generic-nondegenerate", rng)
    factors = local_unitaries(profile, rng)
    w = kron_all(factors)
    m = w @ rho.matrix @ w.conj().T
    m = (m + m.conj().T) / 2.0
    return PairSample(
        rho=rho,
        rho_prime=DensityMatrix(matrix=m, profile=profile),
        label=PairLabel.EQUIVALENT,
        seed=int(seed),
        planted=factors,
    )


def make_degenerate_pair(profile: DimProfile, seed: int) -> PairSample:
    """Planted pair whose common spectrum has one multiplicity-2 block."""
    rng = np.random.default_rng([int(seed), 0xDE9])
    n = profile.total
    lam = _generic_spectrum(n, rng)
    k = int(rng.integers(0, n - 1))
    merged = (lam[k] + lam[k + 1]) / 2.0
    lam[k] = lam[k + 1] = merged
    lam = lam / lam.sum()
    rho = random_density(profile, lam, rng)
    factors = local_unitaries(profile, rng)
    w = kron_all(factors)
    m = w @ rho.matrix @ w.conj().T
    m = (m + m.conj().T) / 2.0
    return PairSample(
        rho=rho,
        rho_prime=DensityMatrix(matrix=m, profile=profile),
        label=PairLabel.EQUIVALENT,
        seed=int(seed),
        planted=factors,
    )


def make_spectrum_mismatch_pair(
    profile: DimProfile, seed: int, delta: float = 1e-2
) -> PairSample:
    """Same eigenvectors, one eigenvalue pair shifted by +/- delta."""
    rng = np.random.default_rng([int(seed), 0x5B])
    n = profile.total
    for _ in range(1000):
        lam = _generic_spectrum(n, rng)
        if lam[1] >= 2 * delta:  # keep the shifted eigenvalue non-negative
            break
    else:
        raise RuntimeError(f"could not draw a spectrum with lambda_2 >= {2 * delta}")
    u = haar_unitary(n, rng)
    rho = (u * lam[np.newaxis, :]) @ u.conj().T
    lam2 = lam.copy()
    lam2[0] += delta
    lam2[1] -= delta
    lam2 = lam2 / lam2.sum()
    rho2 = (u * lam2[np.newaxis, :]) @ u.conj().T
    return PairSample(
        rho=DensityMatrix(matrix=(rho + rho.conj().T) / 2.0, profile=profile),
        rho_prime=DensityMatrix(matrix=(rho2 + rho2.conj().T) / 2.0, profile=profile),
        label=PairLabel.SPECTRUM_MISMATCH,
        seed=int(seed),
    )


def paper_example(a: float, b: float, c: float) -> tuple[DensityMatrix, DensityMatrix]:
    """The 2x2x2 fixture pair: corner-coupled diagonals, trace-normalized.

    The two operators share the unnormalized eigenvalue multiset
    {2, 0, 1/a, a, 1/b, b, 1/c, c}; the spectrum is non-degenerate whenever
    those eight values are pairwise distinct.  A warning is issued otherwise.
    """
    if min(a, b, c) <= 0:
        raise ValueError(f"parameters must be positive, got {(a, b, c)}")
    vals = np.array([2.0, 0.0, 1 / a, a, 1 / b, b, 1 / c, c])
    gaps = np.min(np.diff(np.sort(vals)))
    if gaps < 1e-9:
        warnings.warn(
            f"parameters {(a, b, c)} give a degenerate spectrum; "
            "the phase criterion needs distinct eigenvalues",
            stacklevel=2,
        )
    first = np.diag([1.0, 1 / a, 1 / b, 1 / c, c, b, a, 1.0]).astype(np.complex128)
    first[0, 7] = first[7, 0] = -1.0
    second = np.diag([1.0, a, b, c, 1 / c, 1 / b, 1 / a, 1.0]).astype(np.complex128)
    second[0, 7] = second[7, 0] = 1.0
    trace = float(np.trace(first).real)
    profile = DimProfile((2, 2, 2))
    return (
        DensityMatrix(matrix=first / trace, profile=profile),
        DensityMatrix(matrix=second / trace, profile=profile),
    )


def reduced_density(rho: DensityMatrix, site: int) -> np.ndarray:
    """Single-site reduced density matrix (partial trace over the rest)."""
    dims = rho.profile.dims
    m = len(dims)
    if not 0 <= site < m:
        raise ValueError(f"site must be in [0, {m - 1}], got {site}")
    t = as_cmatrix(rho.matrix).reshape(*dims, *dims)
    # contract bra/ket legs of every traced site via einsum
    letters = "abcdefghijklmnopqrstuvwxyz"
    labels = list(letters[: 2 * m])
    for i in range(m):
        if i != site:
            labels[m + i] = labels[i]
    spec = "".join(labels) + "->" + labels[site] + labels[m + site]
    out = np.einsum(spec, t)
    return np.ascontiguousarray(out)
