"""Smoothing kernel, Fourier-derivative distance and convex-distance estimates.

The kernel is the normalized product of ``sinc(x/m)^m`` with ``m = 2d + 2``.
Its Fourier transform is an Irwin-Hall density (the law of a sum of m
uniforms), rescaled to be supported on [-1, 1] in each coordinate, and is
evaluated here in closed form together with its derivatives.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special, stats

from .numeric_core import Jet, SpdMatrix, multi_indices

__all__ = [
    "SmoothingKernel",
    "GaussianFT",
    "ModifiedGaussianFT",
    "EmpiricalFT",
    "KernelFT",
    "ConvexFamily",
    "kernel_density",
    "kernel_fourier",
    "kernel_fourier_derivative",
    "kernel_derivative_bound",
    "kernel_ball_mass",
    "delta_epsilon",
    "empirical_ft_derivative",
    "gaussian_regularity_constant",
    "convex_distance_upper_bound",
    "berry_esseen_constant",
    "residue_sup_M",
    "exp_polynomial_residue",
    "lattice_walk_residue",
    "convex_distance_lower_bound",
    "kolmogorov_distance_1d",
]

SMOOTHING_FACTOR = 1.0 - 4.0 / (9.0 * math.pi)  # 2 c_2 - 1 lower bound


def _order(d: int) -> int:
    return 2 * d + 2


def _box_halfwidth(d: int, eps: float) -> float:
    return _order(d) ** 1.5 / eps


# ---------------------------------------------------------------------------
# Irwin-Hall pieces
# ---------------------------------------------------------------------------

def _irwin_hall(m: int, x, j: int = 0) -> np.ndarray:
    """j-th derivative of the density of a sum of m independent U(0,1).

    Evaluated on the half x <= m/2 of the support (reflection handles the
    rest), which keeps the alternating sum short.
    """
    x = np.asarray(x, dtype=float)
    refl = x > 0.5 * m
    y = np.where(refl, m - x, x)
    p = m - 1 - j
    if p < 0:
        raise ValueError("derivative order exceeds the smoothness of the kernel transform")
    out = np.zeros_like(y)
    for k in range(0, m // 2 + 1):
        t = y - k
        pos = t > 0
        if p == 0:
            term = np.where(pos, 1.0, 0.0)
        else:
            term = np.where(pos, np.maximum(t, 0.0) ** p, 0.0)
        out = out + ((-1) ** k) * math.comb(m, k) * term
    out = out / math.factorial(p)
    if j % 2 == 1:
        out = np.where(refl, -out, out)
    out = np.where((x <= 0) | (x >= m), 0.0, out)
    return out


def kernel_fourier_1d(m: int, zeta, j: int = 0) -> np.ndarray:
    """j-th derivative of the 1-d kernel transform (m-fold convolution power)."""
    zeta = np.asarray(zeta, dtype=float)
    norm = float(_irwin_hall(m, 0.5 * m))
    val = (0.5 * m) ** j * _irwin_hall(m, 0.5 * m * (zeta + 1.0), j) / norm
    return np.where(np.abs(zeta) >= 1.0, 0.0, val)


def kernel_density(d: int, x) -> np.ndarray:
    """Normalized product kernel prod_i sinc(x_i/m)^m, m = 2d+2."""
    if d > 6:
        raise ValueError("kernel is provided for d <= 6")
    m = _order(d)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    z1 = math.pi * m * float(_irwin_hall(m, 0.5 * m))
    vals = np.prod(np.sinc(x / (m * math.pi)) ** m, axis=-1) / z1 ** d
    return vals if vals.size > 1 else float(vals[0])


def kernel_fourier(d: int, zeta) -> np.ndarray:
    """Fourier transform of the kernel; vanishes outside [-1, 1]^d."""
    if d > 6:
        raise ValueError("kernel is provided for d <= 6")
    zeta = np.atleast_2d(np.asarray(zeta, dtype=float))
    vals = np.prod(kernel_fourier_1d(_order(d), zeta), axis=-1)
    return vals if vals.size > 1 else float(vals[0])


def kernel_fourier_derivative(d: int, beta: Sequence[int], zeta) -> np.ndarray:
    zeta = np.atleast_2d(np.asarray(zeta, dtype=float))
    m = _order(d)
    out = np.ones(zeta.shape[0])
    for i, b in enumerate(beta):
        out = out * kernel_fourier_1d(m, zeta[:, i], int(b))
    return out


def kernel_derivative_bound(d: int, weight: int) -> float:
    """Uniform bound 2^{1+d/2} pi^{-d/2} (2d+2)^{|beta|+d/2} on kernel transform derivatives."""
    return 2.0 ** (1 + d / 2) * math.pi ** (-d / 2) * _order(d) ** (weight + d / 2)


def _kernel_cdf_1d(m: int, r) -> np.ndarray:
    """P(|X| <= r) for one coordinate of the kernel, by Gauss-Legendre panels."""
    from scipy import integrate

    z1 = math.pi * m * float(_irwin_hall(m, 0.5 * m))
    r = np.atleast_1d(np.asarray(r, dtype=float))
    f = lambda t: np.sinc(t / (m * math.pi)) ** m / z1
    out = np.empty_like(r)
    for i, ri in enumerate(r):
        if ri <= 0:
            out[i] = 0.0
            continue
        cuts = np.linspace(0.0, ri, 1 + int(math.ceil(ri / (m * math.pi / 2))))
        out[i] = 2.0 * sum(integrate.fixed_quad(f, a, b, n=40)[0] for a, b in zip(cuts[:-1], cuts[1:]))
    return out


def kernel_ball_mass(d: int, radius: float | None = None, nodes: int = 160) -> float:
    """Kernel mass of the Euclidean ball of radius (2d+2)^{3/2} (default).

    Peels one coordinate at a time: the mass of a d-ball of radius r is the
    integral over x of rho_1(x) times the (d-1)-ball mass of radius
    sqrt(r^2 - x^2).  Each layer uses Gauss-Legendre in the angle x = r sin(phi),
    which removes the square-root endpoint singularity.
    """
    if d > 3:
        raise ValueError("ball mass is computed for d <= 3")
    m = _order(d)
    radius = m ** 1.5 if radius is None else radius
    z1 = math.pi * m * float(_irwin_hall(m, 0.5 * m))
    rho1 = lambda t: np.sinc(t / (m * math.pi)) ** m / z1
    u, w = np.polynomial.legendre.leggauss(nodes)
    phi, wphi = 0.5 * math.pi * u, 0.5 * math.pi * w  # phi in (-pi/2, pi/2)

    def mass(k, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if k == 1:
            return _kernel_cdf_1d(m, r)
        out = np.empty_like(r)
        for i, ri in enumerate(r):
            x = ri * np.sin(phi)
            inner = mass(k - 1, ri * np.cos(phi))
            out[i] = float(np.sum(wphi * ri * np.cos(phi) * rho1(x) * inner))
        return out

    return float(mass(d, radius)[0])


@dataclass(frozen=True)
class SmoothingKernel:
    d: int
    eps: float

    @property
    def scale(self) -> float:
        return _order(self.d) ** 1.5 / self.eps

    def density(self, x) -> np.ndarray:
        return self.scale ** self.d * kernel_density(self.d, np.asarray(x) * self.scale)

    def fourier(self, zeta) -> np.ndarray:
        return kernel_fourier(self.d, np.asarray(zeta) / self.scale)


# ---------------------------------------------------------------------------
# Fourier objects
# ---------------------------------------------------------------------------

def _jet_derivatives(jet: Jet, d: int, q: int) -> dict:
    return {mi.orders: np.asarray(jet.derivative(mi.orders)) for mi in multi_indices(d, q)}


class GaussianFT:
    """exp(-zeta^T K zeta / 2) and its partial derivatives."""

    def __init__(self, K):
        self.K = K if isinstance(K, SpdMatrix) else SpdMatrix(K)
        self.d = self.K.dim

    def _jet(self, zeta: np.ndarray, q: int) -> Jet:
        d = self.d
        xs = [Jet.variable(d, q, i, zeta[:, i]) for i in range(d)]
        quad = Jet.constant(d, q, np.zeros(zeta.shape[0]))
        Ka = self.K.array
        for i in range(d):
            for j in range(d):
                if Ka[i, j] != 0.0:
                    quad = quad + xs[i] * xs[j] * (-0.5 * Ka[i, j])
        return quad.exp()

    def derivatives(self, zeta, q: int) -> dict:
        zeta = np.atleast_2d(np.asarray(zeta, dtype=float))
        return {k: v.astype(complex) for k, v in _jet_derivatives(self._jet(zeta, q), self.d, q).items()}

    def value(self, zeta) -> np.ndarray:
        zeta = np.atleast_2d(np.asarray(zeta, dtype=float))
        return np.exp(-0.5 * np.einsum("ni,ij,nj->n", zeta, self.K.array, zeta)).astype(complex)


class ModifiedGaussianFT(GaussianFT):
    """exp(-zeta^T K zeta / 2) (1 + i <zeta, g> / sqrt(t)).

    ``gradient`` is the real vector g with grad theta(0) = i g, that is the
    mean of the un-normalized variable.
    """

    def __init__(self, K, gradient, t_n: float):
        super().__init__(K)
        self.g = np.asarray(gradient, dtype=float).ravel()
        self.t_n = float(t_n)

    def derivatives(self, zeta, q: int) -> dict:
        zeta = np.atleast_2d(np.asarray(zeta, dtype=float))
        d = self.d
        base = self._jet(zeta, q)
        lin = Jet.constant(d, q, np.ones(zeta.shape[0], dtype=complex))
        for i in range(d):
            lin = lin + Jet.variable(d, q, i, zeta[:, i]) * (1j * self.g[i] / math.sqrt(self.t_n))
        return _jet_derivatives(base * lin, d, q)

    def value(self, zeta) -> np.ndarray:
        zeta = np.atleast_2d(np.asarray(zeta, dtype=float))
        return super().value(zeta) * (1.0 + 1j * (zeta @ self.g) / math.sqrt(self.t_n))


class EmpiricalFT:
    """Fourier transform of the empirical law of a sample set."""

    def __init__(self, samples, chunk: int = 4096):
        arr = np.asarray(samples, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        self.x = arr
        self.d = arr.shape[1]
        self.chunk = chunk

    def derivatives(self, zeta, q: int) -> dict:
        zeta = np.atleast_2d(np.asarray(zeta, dtype=float))
        betas = [mi.orders for mi in multi_indices(self.d, q)]
        out = {b: np.zeros(zeta.shape[0], dtype=complex) for b in betas}
        n = self.x.shape[0]
        for start in range(0, n, self.chunk):
            xs = self.x[start:start + self.chunk]
            e = np.exp(1j * (xs @ zeta.T))
            for b in betas:
                w = np.prod([(1j * xs[:, i]) ** b[i] for i in range(self.d)], axis=0)
                out[b] += w @ e
        return {b: v / n for b, v in out.items()}

    def value(self, zeta) -> np.ndarray:
        return self.derivatives(zeta, 0)[(0,) * self.d]


class KernelFT:
    """Fourier transform of the scaled kernel rho_eps."""

    def __init__(self, d: int, eps: float):
        self.d, self.eps = d, eps
        self.scale = _order(d) ** 1.5 / eps

    def derivatives(self, zeta, q: int) -> dict:
        zeta = np.atleast_2d(np.asarray(zeta, dtype=float)) / self.scale
        out = {}
        for mi in multi_indices(self.d, q):
            out[mi.orders] = (kernel_fourier_derivative(self.d, mi.orders, zeta)
                              * self.scale ** (-mi.weight)).astype(complex)
        return out

    def value(self, zeta) -> np.ndarray:
        return self.derivatives(zeta, 0)[(0,) * self.d]


def empirical_ft_derivative(samples, beta: Sequence[int], zeta) -> complex:
    """E[(i x)^beta e^{i <zeta, x>}] under the empirical law."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    zeta = np.asarray(zeta, dtype=float).reshape(1, -1)
    if sum(beta) > arr.shape[1] + 1:
        raise ValueError("derivative order above d + 1")
    val = EmpiricalFT(arr).derivatives(zeta, sum(beta))[tuple(int(b) for b in beta)]
    return complex(val[0])


def _composite_legendre(half: float, panels: int, nodes: int) -> tuple:
    """Gauss-Legendre with ``nodes`` points on each of ``panels`` equal panels of [-half, half]."""
    u, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(-half, half, panels + 1)
    mid, rad = 0.5 * (edges[1:] + edges[:-1]), 0.5 * (edges[1:] - edges[:-1])
    return (mid[:, None] + rad[:, None] * u).ravel(), (rad[:, None] * w).ravel()


def delta_epsilon(a, b, eps: float, d: int, order: int | None = None, panels: int | None = None,
                  return_all: bool = False):
    """Max over |beta| <= d+1 of the L1 norm of d^beta (a - b) on the box [-L, L]^d.

    L = (2d+2)^{3/2}/eps.  The integral uses a tensor composite Gauss-Legendre
    rule with ``order`` nodes (4 by default) on each of ``panels`` panels per
    axis; by default panels are at most 2 wide, which resolves features of
    unit scale such as a standard Gaussian.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if d > 3 and (isinstance(a, EmpiricalFT) or isinstance(b, EmpiricalFT)):
        raise ValueError("empirical transforms are limited to d <= 3")
    q = d + 1
    if a is b:
        zero = {mi.orders: 0.0 for mi in multi_indices(d, q)}
        return (0.0, zero) if return_all else 0.0
    half = _box_halfwidth(d, eps)
    order = 4 if order is None else order
    panels = max(1, math.ceil(half)) if panels is None else panels
    nodes, weights = _composite_legendre(half, panels, order)
    grid = np.stack(np.meshgrid(*([nodes] * d), indexing="ij"), axis=-1).reshape(-1, d)
    wgrid = np.prod(np.stack(np.meshgrid(*([weights] * d), indexing="ij"), axis=-1).reshape(-1, d), axis=1)
    da = a.derivatives(grid, q)
    db = b.derivatives(grid, q)
    per = {}
    for beta in da:
        per[beta] = float(math.fsum(wgrid * np.abs(da[beta] - db[beta])))
    best = max(per.values())
    return (best, per) if return_all else best


# ---------------------------------------------------------------------------
# Berry-Esseen constants
# ---------------------------------------------------------------------------

def gaussian_regularity_constant(K) -> float:
    """2 sqrt((d+1) rho(K^{-1}))."""
    K = K if isinstance(K, SpdMatrix) else SpdMatrix(K)
    return 2.0 * math.sqrt((K.dim + 1) * K.inv_spectral_radius())


def convex_distance_upper_bound(delta: float, R: float, eps: float, d: int) -> float:
    """2/(1 - 4/(9 pi)) ((d+1)^{(d+1)/2} Delta + R eps), valid for eps < 1/sqrt(2d+2)."""
    if not 0 < eps < 1.0 / math.sqrt(2 * d + 2):
        raise ValueError("eps must lie in (0, 1/sqrt(2d+2))")
    return 2.0 / SMOOTHING_FACTOR * ((d + 1) ** ((d + 1) / 2) * delta + R * eps)


def berry_esseen_constant(d: int, K, M_B: float, B: float) -> float:
    """Constant of the general O(1/sqrt(t_n)) convex-distance bound for d >= 2."""
    if d < 2:
        raise ValueError("the constant is stated for d >= 2")
    if M_B <= 0 or B <= 0:
        raise ValueError("M(B) and B must be positive")
    K = K if isinstance(K, SpdMatrix) else SpdMatrix(K)
    tau = K.tau()
    rho_inv_sqrt = math.sqrt(K.inv_spectral_radius())
    inner = ((2 * math.pi / math.e) ** (d / 2) * (d + 1) ** (1.5 * d + 3.25) * tau ** (d / 2 + 1) * M_B
             + 2.0 * math.sqrt((d + 1) * tau) / B)
    return 2.0 * rho_inv_sqrt / SMOOTHING_FACTOR * inner


def exp_polynomial_residue(tensors) -> Callable:
    """Derivative evaluator of theta(zeta) = psi(i zeta) for psi = exp(sum_r (1/r!) L_r z^r)."""

    def evaluator(zeta, q):
        zeta = np.atleast_2d(np.asarray(zeta, dtype=float))
        d = zeta.shape[1]
        xs = [Jet.variable(d, q, i, 1j * zeta[:, i]) for i in range(d)]
        poly = Jet.constant(d, q, np.zeros(zeta.shape[0], dtype=complex))
        for order, L in tensors:
            L = np.asarray(L, dtype=float)
            for idx in itertools.product(range(d), repeat=order):
                c = L[idx]
                if c == 0.0:
                    continue
                term = xs[idx[0]]
                for i in idx[1:]:
                    term = term * xs[i]
                poly = poly + term * (c / math.factorial(order))
        # chain rule for z = i zeta: d/dzeta = i d/dz
        jet = poly.exp()
        out = {}
        for mi in multi_indices(d, q):
            out[mi.orders] = (1j) ** mi.weight * np.asarray(jet.derivative(mi.orders))
        return out

    return evaluator


def lattice_walk_residue(n: int, d: int = 2) -> Callable:
    """Exact finite-n residue theta_n of the simple walk rescaled by n^{1/4}.

    theta_n(zeta) = phi(zeta / n^{1/4})^n exp(sqrt(n) |zeta|^2 / (2d)), with
    phi(u) = (1/d) sum_i cos(u_i) the characteristic function of one step.
    """
    s = n ** 0.25
    t_n = math.sqrt(n)

    def evaluator(zeta, q):
        zeta = np.atleast_2d(np.asarray(zeta, dtype=float))
        xs = [Jet.variable(d, q, i, zeta[:, i]) for i in range(d)]
        phi = Jet.constant(d, q, np.zeros(zeta.shape[0]))
        for x in xs:
            phi = phi + (x * (1.0 / s)).cos() * (1.0 / d)
        quad = Jet.constant(d, q, np.zeros(zeta.shape[0]))
        for x in xs:
            quad = quad + x * x * (t_n / (2.0 * d))
        if np.all(phi.value > 0):
            jet = (phi.log() * n + quad).exp()
        else:
            jet = phi.power(n) * quad.exp()
        return {mi.orders: np.asarray(jet.derivative(mi.orders)) for mi in multi_indices(d, q)}

    return evaluator


def residue_sup_M(evaluators, B: float, d: int, points: int = 33) -> tuple:
    """Grid supremum of |d^alpha theta_n| over |alpha| <= d+1 and the cube of half-width B(2d+2)^{3/2}.

    ``evaluators`` is one derivative evaluator or a sequence of them (one per n);
    returns (M, grid spacing).
    """
    if callable(evaluators):
        evaluators = [evaluators]
    half = B * _order(d) ** 1.5
    axis = np.linspace(-half, half, points)
    grid = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    best = 0.0
    for ev in evaluators:
        ders = ev(grid, d + 1)
        best = max(best, max(float(np.max(np.abs(v))) for v in ders.values()))
    return best, float(axis[1] - axis[0])


# ---------------------------------------------------------------------------
# Practical distances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvexFamily:
    """Parametric test class for the convex-distance lower bound.

    kind is one of "halfspace", "ball", "box", "polytope"; ``size`` sets the
    resolution (directions, centre grid per axis, cut points, polytopes).
    """

    kind: str
    size: int = 0
    seed: int = 0
    faces: int = 6


def _unit_directions(d: int, count: int, seed: int) -> np.ndarray:
    if d == 1:
        return np.ones((1, 1))
    if d == 2:
        ang = np.pi * np.arange(count) / count
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    rng = np.random.Generator(np.random.Philox(seed))
    u = rng.normal(size=(count, d))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def _ks_sorted(values: np.ndarray, ref_cdf: np.ndarray) -> float:
    n = values.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - ref_cdf), np.max(ref_cdf - (i - 1) / n)))


def _halfspace_bound(z: np.ndarray, size: int, seed: int) -> float:
    d = z.shape[1]
    dirs = _unit_directions(d, size or (180 if d == 2 else 400), seed)
    best = 0.0
    for u in dirs:
        p = np.sort(z @ u)
        best = max(best, _ks_sorted(p, special.ndtr(p)))
    return best


def _ball_bound(z: np.ndarray, size: int) -> float:
    d = z.shape[1]
    per_axis = size or 5
    axis = np.linspace(-2.0, 2.0, per_axis)
    best = 0.0
    for c in itertools.product(axis, repeat=d):
        c = np.asarray(c)
        r2 = np.sort(np.sum((z - c) ** 2, axis=1))
        ref = stats.ncx2.cdf(r2, d, float(c @ c)) if np.any(c) else stats.chi2.cdf(r2, d)
        best = max(best, _ks_sorted(r2, ref))
    return best


def _box_bound(z: np.ndarray, size: int) -> float:
    d = z.shape[1]
    g = size or (16 if d <= 2 else 8)
    cuts = special.ndtri(np.linspace(0, 1, g + 1)[1:-1])
    edges = np.concatenate([[-np.inf], cuts, [np.inf]])
    counts, _ = np.histogramdd(z, bins=[edges] * d)
    prefix = counts / z.shape[0]
    for ax in range(d):
        prefix = np.cumsum(prefix, axis=ax)
    prefix = np.pad(prefix, [(1, 0)] * d)
    cdf_1d = np.concatenate([[0.0], special.ndtr(cuts), [1.0]])
    n_cut = g + 1
    best = 0.0
    pairs = [(a, b) for a in range(n_cut) for b in range(a + 1, n_cut)]
    lo = np.array([p[0] for p in pairs])
    hi = np.array([p[1] for p in pairs])
    ref_1d = cdf_1d[hi] - cdf_1d[lo]
    # inclusion-exclusion on the prefix table for every box in the grid
    index = np.arange(len(pairs))
    mesh = np.meshgrid(*([index] * d), indexing="ij")
    mesh = [m.ravel() for m in mesh]
    emp = np.zeros(mesh[0].size)
    for corner in itertools.product((0, 1), repeat=d):
        sel = tuple(np.where(corner[i], hi[mesh[i]], lo[mesh[i]]) for i in range(d))
        sign = (-1) ** (d - sum(corner))
        emp += sign * prefix[sel]
    ref = np.ones(mesh[0].size)
    for i in range(d):
        ref = ref * ref_1d[mesh[i]]
    best = float(np.max(np.abs(emp - ref)))
    return best


def _polytope_bound(z: np.ndarray, size: int, seed: int, faces: int) -> float:
    d = z.shape[1]
    rng = np.random.Generator(np.random.Philox(seed))
    ref = rng.normal(size=(400_000, d))
    best = 0.0
    for _ in range(size or 50):
        normals = rng.normal(size=(faces, d))
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        offsets = rng.uniform(-0.5, 1.5, size=faces)
        p_emp = np.mean(np.all(z @ normals.T <= offsets, axis=1))
        p_ref = np.mean(np.all(ref @ normals.T <= offsets, axis=1))
        best = max(best, abs(p_emp - p_ref))
    return best


def convex_distance_lower_bound(samples, K=None, mean=None,
                                families: Sequence = ("halfspace", "ball", "box")) -> dict:
    """Largest discrepancy over finite convex test families against N(mean, K).

    Samples are whitened so the reference becomes N(0, I).  Half-spaces use
    the exact sup over offsets for each direction, balls the exact sup over
    radii for each centre, boxes the full grid of boxes between fixed
    Gaussian quantile cuts.  Polytope probabilities under the reference come
    from a fixed 4e5-point Gaussian sample, so that family carries about 1e-3
    of Monte Carlo error.  Every value is a lower bound on the convex distance
    up to that error.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    d = x.shape[1]
    K = SpdMatrix(np.eye(d)) if K is None else (K if isinstance(K, SpdMatrix) else SpdMatrix(K))
    mean = np.zeros(d) if mean is None else np.asarray(mean, dtype=float)
    z = (x - mean) @ K.inv_sqrt()
    report = {}
    for fam in families:
        fam = fam if isinstance(fam, ConvexFamily) else ConvexFamily(str(fam))
        if fam.kind == "halfspace":
            report["halfspace"] = _halfspace_bound(z, fam.size, fam.seed)
        elif fam.kind == "ball":
            report["ball"] = _ball_bound(z, fam.size)
        elif fam.kind == "box":
            report["box"] = _box_bound(z, fam.size)
        elif fam.kind == "polytope":
            report["polytope"] = _polytope_bound(z, fam.size, fam.seed, fam.faces)
        else:
            raise ValueError(f"unknown convex family {fam.kind!r}")
    report["lower_bound"] = max(report.values())
    return report


def kolmogorov_distance_1d(samples, cdf: Callable) -> float:
    """sup_x |F_n(x) - F(x)| evaluated at the jumps of the empirical CDF."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("no samples")
    return _ks_sorted(x, np.asarray(cdf(x), dtype=float))
