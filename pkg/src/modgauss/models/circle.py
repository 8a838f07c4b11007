"""Walks with dependent steps built from Brownian motion on the unit circle."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CircleWalkModel",
    "circle_density",
    "circle_density_fourier",
    "circle_fourier_coeff",
    "circle_walk_sample",
    "circle_step_covariance",
    "exact_covariance",
    "limit_K",
]


def circle_fourier_coeff(lam: float, l: int) -> float:
    """Fourier coefficient E[e^{-i l theta}] = e^{-lam l^2 / 2} of the law L(lam)."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return math.exp(-0.5 * lam * l * l)


def circle_density(lam: float, theta, tol: float = 1e-17):
    """Wrapped normal density of the angle at time lam, summed over images."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    th = np.asarray(theta, dtype=float)
    out = np.exp(-th * th / (2 * lam))
    k = 1
    while True:
        term = np.exp(-(th - 2 * math.pi * k) ** 2 / (2 * lam)) + np.exp(-(th + 2 * math.pi * k) ** 2 / (2 * lam))
        out = out + term
        if np.max(term) < tol * np.max(out):
            break
        k += 1
    out = out / math.sqrt(2 * math.pi * lam)
    return out if out.ndim else float(out)


def circle_density_fourier(lam: float, theta, tol: float = 1e-17):
    """Same density from its Fourier series."""
    th = np.asarray(theta, dtype=float)
    out = np.ones_like(th)
    l = 1
    while True:
        c = circle_fourier_coeff(lam, l)
        out = out + 2 * c * np.cos(l * th)
        if c < tol:
            break
        l += 1
    out = out / (2 * math.pi)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class CircleWalkModel:
    """X_i = U_i ... U_{i+D-1} (indices mod N) with U_j iid of law L(lam / D)."""

    N: int
    D: int
    lam: float = 1.0

    def __post_init__(self):
        if self.D < 1 or self.N <= 2 * self.D:
            raise ValueError("circle walk needs N > 2D >= 2")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if self.N ** (1.0 / 3.0) > 10 * self.D:
            warnings.warn("N^{1/3} is large compared to D; the cumulant regime may not apply", stacklevel=2)

    @property
    def step_mean(self) -> np.ndarray:
        return np.array([math.exp(-self.lam / 2), 0.0])

    def mean(self) -> np.ndarray:
        return self.N * self.step_mean

    @property
    def normalization(self) -> float:
        """sqrt((2D - 1) N), the scale of Y_n = (S_n - E S_n) / normalization."""
        return math.sqrt((2 * self.D - 1) * self.N)


def circle_step_covariance(lam: float, delta, D: int) -> np.ndarray:
    """(2, 2) covariance of X_i and X_j at cyclic distance delta < D; zero beyond."""
    delta = abs(int(delta))
    if delta >= D:
        return np.zeros((2, 2))
    u = delta / D
    a, b = math.exp(-u * lam), math.exp(-(2 - u) * lam)
    return np.diag([(a + b - 2 * math.exp(-lam)) / 2, (a - b) / 2])


def exact_covariance(model: CircleWalkModel) -> np.ndarray:
    """cov(S_n) = N sum_{|delta| < D} cov(X_0, X_delta)."""
    tot = np.zeros((2, 2))
    for delta in range(-(model.D - 1), model.D):
        tot += circle_step_covariance(model.lam, delta, model.D)
    return model.N * tot


def limit_K(lam: float) -> np.ndarray:
    """Limit of cov(S_n) / ((2D - 1) N) as D grows."""
    e1, e2 = math.exp(-lam), math.exp(-2 * lam)
    return np.diag([1 - 2 * lam * e1 - e2, (1 - e1) ** 2]) / (2 * lam)


def circle_walk_sample(model: CircleWalkModel, rng, size: int | None = None, trajectory: bool = False):
    """Exact draws of S_n (shape (size, 2)); with ``trajectory`` one walk's partial sums (N+1, 2).

    Angles of U_j are normals of variance lam/D reduced mod 2 pi; X_i has
    angle equal to a cyclic window sum of D of them.
    """
    N, D = model.N, model.D
    sd = math.sqrt(model.lam / D)
    if trajectory:
        a = rng.normal(0.0, sd, size=N)
        ang = _window_sums(a[None, :], D)[0]
        steps = np.column_stack([np.cos(ang), np.sin(ang)])
        return np.vstack([np.zeros((1, 2)), np.cumsum(steps, axis=0)])
    m = 1 if size is None else size
    out = np.empty((m, 2))
    block = max(1, 4_000_000 // N)
    for s in range(0, m, block):
        k = min(block, m - s)
        ang = _window_sums(rng.normal(0.0, sd, size=(k, N)), D)
        out[s:s + k, 0] = np.cos(ang).sum(axis=1)
        out[s:s + k, 1] = np.sin(ang).sum(axis=1)
    return out[0] if size is None else out


def _window_sums(a: np.ndarray, D: int) -> np.ndarray:
    """Cyclic sums a_i + ... + a_{i+D-1} along the last axis."""
    ext = np.concatenate([a, a[:, : D - 1]], axis=1)
    c = np.concatenate([np.zeros((a.shape[0], 1)), np.cumsum(ext, axis=1)], axis=1)
    return c[:, D:D + a.shape[1]] - c[:, : a.shape[1]]
