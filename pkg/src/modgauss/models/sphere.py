"""Walks with dependent steps built from Brownian motion on SO(d) acting on e_d."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from ..numeric_core import sphere_legendre

__all__ = [
    "SphereWalkModel",
    "sphere_heat_density",
    "sphere_walk_sample",
    "sphere_step_covariance",
    "exact_covariance",
    "limit_K",
    "so3_brownian_increment",
    "heat_moment",
    "last_coordinate_weight",
]

MAX_HEAT_TERMS = 64


def _dimension_factor(d: int, k: int) -> float:
    """(2k+d-2)/(k+d-2) * C(k+d-2, d-2), with the value 1 at k = 0."""
    if k == 0:
        return 1.0
    return (2 * k + d - 2) / (k + d - 2) * math.comb(k + d - 2, d - 2)


def sphere_heat_density(d: int, t: float, x_last, tol: float = 1e-14):
    """Density at time t of spherical Brownian motion started at e_d.

    The density is taken against the uniform probability on S^{d-1} and
    depends on the last coordinate only.
    """
    if t <= 0:
        raise ValueError("time must be positive")
    if d < 2:
        raise ValueError("need d >= 2")
    x = np.asarray(x_last, dtype=float)
    out = np.ones_like(x)
    for k in range(1, MAX_HEAT_TERMS + 1):
        coef = math.exp(-0.5 * (k * k + (d - 2) * k) * t) * _dimension_factor(d, k)
        out = out + coef * sphere_legendre(d, k, x)
        if coef < tol:
            break
    else:
        raise ValueError("heat series not converged; time too small for the truncation")
    return out if out.ndim else float(out)


def last_coordinate_weight(d: int, x):
    """Density of x_d under the uniform probability on S^{d-1} (d >= 3)."""
    c = math.gamma(d / 2) / (math.sqrt(math.pi) * math.gamma((d - 1) / 2))
    return c * (1 - np.asarray(x, dtype=float) ** 2) ** ((d - 3) / 2)


def heat_moment(d: int, t: float, power: int = 1) -> float:
    """E[x_d^power] under the heat kernel, by quadrature (d >= 3)."""
    val, _ = integrate.quad(lambda x: x ** power * sphere_heat_density(d, t, x) * last_coordinate_weight(d, x),
                            -1, 1, epsabs=1e-13, limit=200)
    return val


@dataclass(frozen=True)
class SphereWalkModel:
    """X_i = g_i e_3 with g_i = u_i ... u_{i+D-1} (mod N), u_j Brownian on SO(3) at time lam/D."""

    N: int
    D: int
    lam: float = 1.0
    substeps: int = 4
    d: int = 3

    def __post_init__(self):
        if self.d != 3:
            raise NotImplementedError("trajectory simulation is implemented for d = 3 only")
        if self.D < 1 or self.N <= 2 * self.D:
            raise ValueError("sphere walk needs N > 2D >= 2")
        if self.lam <= 0 or self.substeps < 1:
            raise ValueError("lambda and substeps must be positive")

    @property
    def step_mean(self) -> np.ndarray:
        m = np.zeros(self.d)
        m[-1] = math.exp(-(self.d - 1) * self.lam / 2)
        return m

    def mean(self) -> np.ndarray:
        return self.N * self.step_mean

    @property
    def normalization(self) -> float:
        return math.sqrt((2 * self.D - 1) * self.N)


def _rodrigues(a: np.ndarray) -> np.ndarray:
    """exp of the antisymmetric matrices with axis vectors a (shape (..., 3))."""
    th = np.linalg.norm(a, axis=-1)[..., None, None]
    safe = np.where(th > 0, th, 1.0)
    k = a / safe[..., 0]
    kx = np.zeros(a.shape[:-1] + (3, 3))
    kx[..., 0, 1], kx[..., 0, 2] = -k[..., 2], k[..., 1]
    kx[..., 1, 0], kx[..., 1, 2] = k[..., 2], -k[..., 0]
    kx[..., 2, 0], kx[..., 2, 1] = -k[..., 1], k[..., 0]
    eye = np.broadcast_to(np.eye(3), kx.shape)
    return eye + np.sin(th) * kx + (1 - np.cos(th)) * (kx @ kx)


def so3_brownian_increment(t: float, rng, size: int, substeps: int = 4) -> np.ndarray:
    """Approximate Brownian increments on SO(3) at time t: products of exp(A) with Gaussian generators.

    Each generator has independent N(0, t / substeps) coordinates on the basis
    e_i e_j^T - e_j e_i^T, which makes g e_3 a spherical Brownian motion with
    generator Delta/2 in the limit of many substeps.  The bias on moments is
    O(t^2 / substeps).
    """
    h = t / substeps
    out = _rodrigues(rng.normal(0.0, math.sqrt(h), size=(size, 3)))
    for _ in range(substeps - 1):
        out = out @ _rodrigues(rng.normal(0.0, math.sqrt(h), size=(size, 3)))
    return out


def sphere_walk_sample(model: SphereWalkModel, rng, size: int | None = None, trajectory: bool = False):
    """Draws of S_n (shape (size, 3)); with ``trajectory`` the partial sums of one walk."""
    m = 1 if size is None else size
    reps = 1 if trajectory else m
    out = np.empty((reps, 3))
    path = None
    for r in range(reps):
        u = so3_brownian_increment(model.lam / model.D, rng, model.N, model.substeps)
        ext = np.concatenate([u, u[: model.D]], axis=0)
        prefix = np.empty((model.N + model.D + 1, 3, 3))
        prefix[0] = np.eye(3)
        for j in range(model.N + model.D):
            prefix[j + 1] = prefix[j] @ ext[j]
        # g_i = P_i^T P_{i+D}; X_i = g_i e_3
        col = prefix[model.D:model.D + model.N, :, 2]
        x = np.einsum("nji,nj->ni", prefix[: model.N], col)
        out[r] = x.sum(axis=0)
        if trajectory:
            path = np.vstack([np.zeros((1, 3)), np.cumsum(x, axis=0)])
    if trajectory:
        return path
    return out[0] if size is None else out


def sphere_step_covariance(d: int, lam: float, delta: int, D: int) -> np.ndarray:
    """cov(X_i, X_j) at cyclic distance delta (zero when delta >= D)."""
    delta = abs(int(delta))
    if delta >= D:
        return np.zeros((d, d))
    u = delta / D
    a = math.exp(-(d - 1) * u * lam)
    b = math.exp(-(d - u) * lam)
    c = np.full(d, (a - b) / d)
    c[-1] = (a + (d - 1) * b - d * math.exp(-(d - 1) * lam)) / d
    return np.diag(c)


def exact_covariance(model: SphereWalkModel) -> np.ndarray:
    tot = np.zeros((model.d, model.d))
    for delta in range(-(model.D - 1), model.D):
        tot += sphere_step_covariance(model.d, model.lam, delta, model.D)
    return model.N * tot


def limit_K(d: int, lam: float) -> np.ndarray:
    """Limit of cov(S_n) / ((2D - 1) N) for the walk on S^{d-1}."""
    if d < 2:
        raise ValueError("need d >= 2")
    e1, e2 = math.exp(-(d - 1) * lam), math.exp(-d * lam)
    den = d * (d - 1) * lam
    diag = np.full(d, (1 - d * e1 + (d - 1) * e2) / den)
    diag[-1] = (1 + d * (d - 2 - (d - 1) * lam) * e1 - (d - 1) ** 2 * e2) / den
    return np.diag(diag)
