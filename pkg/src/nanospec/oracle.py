"""Brute-force spectral verifiers independent of the analytic machinery.

Two oracles: a symmetric-tridiagonal truncation eigensolver that sees the
bound states (and only those), and a dense finite-cylinder lattice
Hamiltonian whose spectrum must equal the union of the channel truncations,
witnessing the unitary channel decomposition at finite size.
"""

from __future__ import annotations

import cmath

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal

from .background import Background, BandStructure, band_edges
from .jost import Perturbation
from .tube import TubeConfig, channels

__all__ = [
    "truncated_spectrum",
    "channel_truncated_spectrum",
    "gap_spectrum",
    "lattice_spectrum",
    "gap_filter",
    "default_margin",
    "bound_state_oracle",
]


def truncated_spectrum(bg: Background, q: Perturbation, M: int) -> np.ndarray:
    """All M eigenvalues of the size-M truncation, ascending.

    The truncation is the leading M x M principal submatrix of the operator
    (Dirichlet convention: sites 1..M, no site-0 entry).
    """
    return channel_truncated_spectrum(bg.v, bg.a, q, M)


def channel_truncated_spectrum(v: float, a: float, q: Perturbation, M: int) -> np.ndarray:
    """Truncated spectrum from raw (v, a), also valid for a = 0 channels."""
    if M <= 2 * q.p + 10:
        raise ValueError(f"M={M} too small for support p={q.p}")
    diag = np.array([(v if n % 2 == 1 else -v) + q.q_at(n) for n in range(1, M + 1)])
    off = np.array([1.0 if n % 2 == 1 else a for n in range(1, M)])
    return eigh_tridiagonal(diag, off, eigvals_only=True)


def lattice_spectrum(cfg: TubeConfig, M: int) -> np.ndarray:
    """Eigenvalues of the finite-cylinder Hamiltonian with M axial cells.

    Vertices (n, j, k) with 0 <= n < M, j in {0,1}, k in Z_N carry on-site
    potential v~_{2n+1} (j=0) and v~_{2n+2} (j=1).  Hops: amplitude 1 within
    a cell, phases e^{+-ib} across cells with the circumferential index
    shifting by one on one of the two bonds.  The n = 0 row enforces the
    Dirichlet boundary.
    """
    if cfg.N < 1 or M < 2:
        raise ValueError("need N >= 1 and M >= 2")
    N, b, v, q = cfg.N, cfg.b, cfg.v, cfg.q
    size = 2 * M * N

    def idx(n, j, k):
        return (n * 2 + j) * N + (k % N)

    H = np.zeros((size, size), dtype=complex)
    for n in range(M):
        for k in range(N):
            i0, i1 = idx(n, 0, k), idx(n, 1, k)
            H[i0, i0] = v + q.q_at(2 * n + 1)
            H[i1, i1] = -v + q.q_at(2 * n + 2)
            H[i0, i1] += 1.0
            H[i1, i0] += 1.0
            if n + 1 < M:
                up_shift = idx(n + 1, 0, k - 1)
                up_same = idx(n + 1, 0, k)
                H[i1, up_shift] += cmath.exp(1j * b)
                H[up_shift, i1] += cmath.exp(-1j * b)
                H[i1, up_same] += cmath.exp(-1j * b)
                H[up_same, i1] += cmath.exp(1j * b)
    return eigh(H, eigvals_only=True)


def gap_spectrum(bg: Background, q: Perturbation, M: int) -> np.ndarray:
    """Truncation eigenvalues lying in the spectral gaps only, ascending.

    Same matrix as :func:`truncated_spectrum`, but solved with by-value
    eigenvalue selection restricted to the three gap intervals, which is
    orders of magnitude faster than the full spectrum at large M.
    """
    if M <= 2 * q.p + 10:
        raise ValueError(f"M={M} too small for support p={q.p}")
    diag = np.array([bg.diag(n) + q.q_at(n) for n in range(1, M + 1)])
    off = np.array([bg.offdiag(n) for n in range(1, M)])
    (lo1, hi1), (lo2, hi2) = band_edges(bg).bands
    radius = float(np.max(np.abs(diag))) + 2.0 * max(1.0, bg.a) + 1.0
    out = []
    for lo, hi in ((-radius, lo1), (hi1, lo2), (hi2, radius)):
        if hi > lo:
            out.extend(
                eigh_tridiagonal(
                    diag, off, eigvals_only=True, select="v", select_range=(lo, hi)
                )
            )
    return np.sort(out)


def default_margin(bands: BandStructure, M: int) -> float:
    """Edge-artifact exclusion width, 5 x (total band width) / M."""
    width = sum(hi - lo for lo, hi in bands.bands)
    return 5.0 * width / M


def gap_filter(eigs, bands: BandStructure, margin: float):
    """Eigenvalues strictly inside spectral gaps, > margin from every edge."""
    out = []
    for lam in eigs:
        if any(lo - margin <= lam <= hi + margin for lo, hi in bands.bands):
            continue
        if min(abs(lam - e) for e in bands.edges) <= margin:
            continue
        out.append(float(lam))
    return out


def bound_state_oracle(bg: Background, q: Perturbation, M: int, margin: float = None):
    """Gap eigenvalues present in both the M and M+1 truncations.

    A single truncation hosts one spurious boundary eigenvalue in a gap
    whenever it ends mid-period on the unfavorable sublattice; the spurious
    value flips location with the parity of M while genuine bound states do
    not move, so the parity intersection keeps exactly the genuine ones.
    """
    bands = band_edges(bg)
    if margin is None:
        margin = default_margin(bands, M)
    match_tol = max(1e-7, 100.0 * margin / M)
    g1 = gap_filter(gap_spectrum(bg, q, M), bands, margin)
    g2 = gap_filter(gap_spectrum(bg, q, M + 1), bands, margin)
    out = []
    for lam in g1:
        if any(abs(lam - mu) <= match_tol for mu in g2):
            out.append(lam)
    return out
