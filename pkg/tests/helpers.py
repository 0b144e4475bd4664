"""Independent oracles and fixtures shared across the test modules.

Everything here is deliberately naive (explicit index loops, power iteration)
so it can serve as a cross-check for the library's vectorized paths.
"""

import numpy as np

from luequiv import DimProfile


def realign_index_oracle(z: np.ndarray, dims: tuple[int, ...], cut: int) -> np.ndarray:
    """Entry-by-entry realignment from the index formula, via explicit loops.

    (Z~)[(I,I'), (J,J')] = Z[(I,J), (I',J')] with I, I' over the left block
    (row-major composite) and J, J' over the right block.
    """
    profile = DimProfile(dims)
    d_left, d_right = profile.split(cut)
    out = np.zeros((d_left * d_left, d_right * d_right), dtype=complex)
    for i in range(d_left):
        for ip in range(d_left):
            for j in range(d_right):
                for jp in range(d_right):
                    out[i * d_left + ip, j * d_right + jp] = z[
                        i * d_right + j, ip * d_right + jp
                    ]
    return out


def partial_trace_oracle(rho: np.ndarray, dims: tuple[int, ...], site: int) -> np.ndarray:
    """Single-site reduced density matrix by explicit summation."""
    m = len(dims)
    n = dims[site]
    out = np.zeros((n, n), dtype=complex)
    ranges = [range(d) for d in dims]

    def flat(idx):
        r = 0
        for d, i in zip(dims, idx):
            r = r * d + i
        return r

    import itertools

    for a in range(n):
        for b in range(n):
            for rest in itertools.product(*(ranges[:site] + ranges[site + 1:])):
                left = list(rest[:site])
                right = list(rest[site:])
                row = flat(left + [a] + right)
                col = flat(left + [b] + right)
                out[a, b] += rho[row, col]
    return out


def operator_norm_power_iteration(m: np.ndarray, iters: int = 2000) -> float:
    """Largest singular value via power iteration on m^dag m from a fixed start."""
    g = m.conj().T @ m
    v = np.ones(g.shape[0], dtype=complex) / np.sqrt(g.shape[0])
    for _ in range(iters):
        w = g @ v
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = w / nw
    return float(np.sqrt(np.real(np.vdot(v, g @ v))))


# ---------------------------------------------------------------------------
# fixtures for the corner-coupled 2x2x2 example pair
# ---------------------------------------------------------------------------

WITNESS_SIGNS = np.array([1, -1, 1, -1, -1, 1, -1, 1], dtype=float)


def example_bases(a: float, b: float, c: float):
    """Analytic eigenbases X, Y of the example pair, eigenvalue order
    (2, 0, 1/a, a, 1/b, b, 1/c, c) shared between the two states."""
    s2 = 1.0 / np.sqrt(2.0)
    e = np.eye(8, dtype=complex)
    x = np.stack(
        [(e[0] - e[7]) * s2, (e[0] + e[7]) * s2, e[1], e[6], e[2], e[5], e[3], e[4]],
        axis=1,
    )
    y = np.stack(
        [(e[0] + e[7]) * s2, (e[0] - e[7]) * s2, e[6], e[1], e[5], e[2], e[4], e[3]],
        axis=1,
    )
    lam = np.array([2.0, 0.0, 1 / a, a, 1 / b, b, 1 / c, c])
    return x, y, lam


def reference_basis_pair():
    """Bases X, Y for which X diag(d) Y^dag reproduces the reference V for all d."""
    s2 = 1.0 / np.sqrt(2.0)
    e = np.eye(8, dtype=complex)
    x = np.stack(
        [(e[0] - e[1]) * s2, e[2], e[4], e[6], e[7], e[5], e[3], (e[0] + e[1]) * s2],
        axis=1,
    )
    y = np.stack(
        [(-e[0] + e[1]) * s2, e[3], e[5], e[7], e[6], e[4], e[2], (e[0] + e[1]) * s2],
        axis=1,
    )
    return x, y


def reference_v(d: np.ndarray) -> np.ndarray:
    """The reference 8x8 V pattern as a function of the eight diagonal entries d."""
    d1, d2, d3, d4, d5, d6, d7, d8 = d
    m = np.zeros((8, 8), dtype=complex)
    m[0, 0] = (-d1 + d8) / 2
    m[0, 1] = (d1 + d8) / 2
    m[1, 0] = (d1 + d8) / 2
    m[1, 1] = (-d1 + d8) / 2
    m[2, 3] = d2
    m[3, 2] = d7
    m[4, 5] = d3
    m[5, 4] = d6
    m[6, 7] = d4
    m[7, 6] = d5
    return m


def reference_cut1(d: np.ndarray) -> np.ndarray:
    """The reference 4x16 realignment across the first cut."""
    d1, d2, d3, d4, d5, d6, d7, d8 = d
    m = np.zeros((4, 16), dtype=complex)
    m[0, :] = [
        (-d1 + d8) / 2, (d1 + d8) / 2, 0, 0,
        (d1 + d8) / 2, (-d1 + d8) / 2, 0, 0,
        0, 0, 0, d2,
        0, 0, d7, 0,
    ]
    m[3, :] = [
        0, d3, 0, 0,
        d6, 0, 0, 0,
        0, 0, 0, d4,
        0, 0, d5, 0,
    ]
    return m


def reference_cut2(d: np.ndarray) -> np.ndarray:
    """The reference 16x4 realignment across the second cut."""
    d1, d2, d3, d4, d5, d6, d7, d8 = d
    m = np.zeros((16, 4), dtype=complex)
    m[0, :] = [(-d1 + d8) / 2, (d1 + d8) / 2, (d1 + d8) / 2, (-d1 + d8) / 2]
    m[5, :] = [0, d2, d7, 0]
    m[10, :] = [0, d3, d6, 0]
    m[15, :] = [0, d4, d5, 0]
    return m
