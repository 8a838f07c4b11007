"""Log-determinants of Haar unitary matrices."""
from __future__ import annotations

import math

import numpy as np
from scipy import special

from ..largedev import CueBarnes

__all__ = ["CueModel", "haar_unitary", "cue_eigenangles", "cue_logdet_sample", "cue_laplace_exact", "cue_residue", "MAX_CUE_SIZE"]

MAX_CUE_SIZE = 512


def haar_unitary(n: int, rng, size: int = 1) -> np.ndarray:
    """Haar-distributed unitaries: QR of complex Ginibre matrices with R's diagonal phases removed."""
    z = (rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r, axis1=1, axis2=2)
    ph = ph / np.abs(ph)
    return q * ph[:, None, :]


def cue_eigenangles(n: int, rng, size: int = 1, chunk: int = 512) -> np.ndarray:
    """Eigenangles in (-pi, pi] of ``size`` independent Haar unitaries, shape (size, n)."""
    if not 1 <= n <= MAX_CUE_SIZE:
        raise ValueError(f"matrix size must lie in [1, {MAX_CUE_SIZE}]")
    out = np.empty((size, n))
    for s in range(0, size, chunk):
        k = min(chunk, size - s)
        out[s:s + k] = np.angle(np.linalg.eigvals(haar_unitary(n, rng, k)))
    return out


def cue_logdet_sample(n: int, rng, size: int | None = None) -> np.ndarray:
    """(Re, Im) of log det(I - U) = sum_j log(1 - e^{i theta_j}) on the principal branch.

    Each term has imaginary part in (-pi/2, pi/2), so the sum is not reduced
    modulo 2 pi.  A zero angle has probability 0 and triggers a redraw.
    """
    m = 1 if size is None else size
    th = cue_eigenangles(n, rng, m)
    bad = np.any(th == 0.0, axis=1)
    while bad.any():
        th[bad] = cue_eigenangles(n, rng, int(bad.sum()))
        bad = np.any(th == 0.0, axis=1)
    # 1 - e^{i t} = -2i sin(t/2) e^{i t/2} = 2 |sin(t/2)| e^{i (t - sign(t) pi)/2}
    re = np.log(2 * np.abs(np.sin(th / 2))).sum(axis=1)
    im = (0.5 * (th - np.sign(th) * math.pi)).sum(axis=1)
    out = np.column_stack([re, im])
    return out[0] if size is None else out


def cue_laplace_exact(n: int, z1: float, z2: float) -> float:
    """E[exp(z1 Re X_n + z2 Im X_n)] as a finite product of Gamma ratios (z1 > -1)."""
    if z1 <= -1:
        raise ValueError("the Laplace transform is finite only for z1 > -1")
    j = np.arange(1, n + 1, dtype=float)
    w = 0.5 * (z1 + 1j * z2)
    log_terms = special.gammaln(j) + special.gammaln(j + z1) - 2.0 * special.loggamma(j + w).real
    return float(np.exp(math.fsum(log_terms)))


def cue_residue() -> CueBarnes:
    """Limit of E[e^{<z, X_n>}] exp(-(log n) |z|^2 / 4)."""
    return CueBarnes()


class CueModel:
    """X_n = log det(I - U_n), mod-Gaussian with t_n = (log n)/2 and K = I_2."""

    def __init__(self, n: int):
        if not 2 <= n <= MAX_CUE_SIZE:
            raise ValueError(f"matrix size must lie in [2, {MAX_CUE_SIZE}]")
        self.n = n
        self.d = 2

    @property
    def t_n(self) -> float:
        return 0.5 * math.log(self.n)

    def sample_tilted(self, h, size: int, rng) -> tuple:
        """Plain draws only: exact tilted sampling is not available for this model."""
        if np.any(np.asarray(h, dtype=float) != 0):
            raise ValueError("CUE sampling supports h = 0 only")
        return cue_logdet_sample(self.n, rng, size), np.zeros(size)
