"""Residue functions, sector tail asymptotics and tilted Monte Carlo.

Conventions: a sequence X_n with E[exp(<z, X_n>)] ~ exp(t_n z^T K z / 2) psi(z).
A sector B = S x [b, oo) collects the points rho * s with s on the K-sphere
{x : x^T K^{-1} x = 1}, s in S and rho >= b.  All tail formulas concern
P[X_n in t_n B].
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special
from scipy.interpolate import RegularGridInterpolator

from .numeric_core import SpdMatrix, barnes_g_conjugate_product, log_barnes_g, log_barnes_g_conjugate_product
from .sphere_mesh import FacetMesh, build_mesh, surface_integral

__all__ = [
    "ResidueFunction",
    "One",
    "ExpTensor",
    "CueBarnes",
    "LatticeWalk4",
    "Tabulated",
    "SphericalSector",
    "UniformCube",
    "DiscreteLaw",
    "ToyModel",
    "ConeAsymptotic",
    "tail_probability_formula",
    "cone_tail_asymptotic",
    "tilted_mc_tail",
    "toy_sampler",
    "lattice_conditional_density",
    "lattice_axis_mass",
    "cue_sector_density",
]


# ---------------------------------------------------------------------------
# Residue functions
# ---------------------------------------------------------------------------
class ResidueFunction:
    """A limiting residue psi on R^d with psi(0) = 1, evaluated row-wise."""

    d: int

    def __call__(self, z) -> np.ndarray:
        raise NotImplementedError

    def value(self, z) -> float:
        return float(self(np.atleast_2d(np.asarray(z, dtype=float)))[0])

    def gradient(self, z, step: float = 1e-5) -> np.ndarray:
        """Central-difference gradient at one point; variants override it."""
        z = np.asarray(z, dtype=float).ravel()
        e = np.eye(z.size) * step
        pts = np.vstack([z + e, z - e])
        v = self(pts)
        return (v[: z.size] - v[z.size:]) / (2 * step)


def _rows(z, d: int) -> np.ndarray:
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if z.shape[1] != d:
        raise ValueError(f"expected points of dimension {d}")
    return z


@dataclass(frozen=True)
class One(ResidueFunction):
    d: int

    def __call__(self, z):
        return np.ones(_rows(z, self.d).shape[0])

    def gradient(self, z, step=None):
        return np.zeros(self.d)


@dataclass(frozen=True, eq=False)
class ExpTensor(ResidueFunction):
    """psi(z) = exp((1/v!) sum L_{i_1..i_v} z^{i_1} ... z^{i_v}) for a symmetric L."""

    L: np.ndarray

    def __post_init__(self):
        L = np.asarray(self.L, dtype=float)
        v = L.ndim
        if v < 1 or len(set(L.shape)) != 1:
            raise ValueError("L must be a cubical tensor")
        for perm in itertools.permutations(range(v)):
            if not np.allclose(L, np.transpose(L, perm), atol=1e-13, rtol=0):
                raise ValueError("L must be symmetric")
        object.__setattr__(self, "L", L)

    @property
    def d(self) -> int:
        return self.L.shape[0]

    @property
    def order(self) -> int:
        return self.L.ndim

    def exponent(self, z) -> np.ndarray:
        z = _rows(z, self.d)
        acc = np.broadcast_to(self.L, (z.shape[0],) + self.L.shape)
        for _ in range(self.order):
            acc = np.einsum("n...i,ni->n...", acc, z)
        return acc / math.factorial(self.order)

    def __call__(self, z):
        return np.exp(self.exponent(z))

    def gradient(self, z, step=None):
        z = np.asarray(z, dtype=float).ravel()
        acc = self.L
        for _ in range(self.order - 1):
            acc = acc @ z
        return self.value(z) * acc / math.factorial(self.order - 1)


def _lattice_tensor(d: int) -> np.ndarray:
    """Fourth cumulant tensor of one uniform step on {+-e_i}, scaled by d^2 (K = I/d)."""
    L = np.zeros((d,) * 4)
    for i in range(d):
        L[i, i, i, i] = 1.0 / d - 3.0 / d ** 2
    for i, j in itertools.permutations(range(d), 2):
        for idx in set(itertools.permutations((i, i, j, j))):
            L[idx] = -1.0 / d ** 2
    return L


class LatticeWalk4(ExpTensor):
    """Residue of the simple walk on Z^d at scale n^{1/4}; d=2 gives exp(-(z1^4+z2^4+6 z1^2 z2^2)/96)."""

    def __init__(self, d: int = 2):
        if d < 1:
            raise ValueError("dimension must be positive")
        super().__init__(_lattice_tensor(d))


@dataclass(frozen=True)
class CueBarnes(ResidueFunction):
    """psi(z) = G(1+w) G(1+conj w) / G(1+z1) with w = (z1 + i z2)/2, for z1 > -1."""

    d: int = 2

    def __call__(self, z):
        z = _rows(z, 2)
        r = np.hypot(z[:, 0], z[:, 1])
        th = np.arctan2(z[:, 1], z[:, 0])
        if np.any(z[:, 0] <= -1):
            raise ValueError("the CUE residue needs z1 > -1")
        return np.exp(log_barnes_g_conjugate_product(1.0, r, th) - log_barnes_g(1.0 + z[:, 0]))


class Tabulated(ResidueFunction):
    """Multilinear interpolation of values on a tensor grid that contains 0."""

    def __init__(self, axes: Sequence[Sequence[float]], values):
        self.axes = [np.asarray(a, dtype=float) for a in axes]
        self.values = np.asarray(values, dtype=float)
        self.d = len(self.axes)
        self._interp = RegularGridInterpolator(self.axes, self.values, bounds_error=True)
        at0 = float(self._interp(np.zeros((1, self.d)))[0])
        if abs(at0 - 1.0) > 1e-12:
            raise ValueError("tabulated residue must equal 1 at the origin")

    def __call__(self, z):
        return self._interp(_rows(z, self.d))


# ---------------------------------------------------------------------------
# Sectors
# ---------------------------------------------------------------------------
@dataclass
class SphericalSector:
    """B = S x [b, oo) with S a region of the K-sphere.

    ``region`` receives (n, d) points of the K-sphere and returns booleans.
    """

    b: float
    region: Callable
    K: SpdMatrix
    d: int
    description: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError("sector radius must be positive")
        if not isinstance(self.K, SpdMatrix):
            self.K = SpdMatrix(self.K)
        if self.K.dim != self.d:
            raise ValueError("covariance dimension mismatch")

    @classmethod
    def angular(cls, b: float, theta1: float, theta2: float, K=None) -> "SphericalSector":
        """Directions with polar angle in [theta1, theta2] (d = 2)."""
        if not theta1 < theta2 or theta2 - theta1 > 2 * math.pi:
            raise ValueError("need theta1 < theta2 <= theta1 + 2 pi")

        def region(s):
            ang = np.mod(np.arctan2(s[:, 1], s[:, 0]) - theta1, 2 * math.pi)
            return ang <= theta2 - theta1

        K = SpdMatrix(np.eye(2) if K is None else K)
        return cls(b, region, K, 2, {"kind": "angular", "data": [theta1, theta2]})

    @classmethod
    def facet_cells(cls, b: float, d: int, m: int, cells: Sequence, K=None) -> "SphericalSector":
        """Union of cube-face cells (face, cell-tuple) at resolution m, directions taken in K^{-1/2} space."""
        K = SpdMatrix(np.eye(d) if K is None else K)
        mesh = FacetMesh(d, 1.0, m)
        per_face = m ** (d - 1)
        wanted = set()
        for face, cell in cells:
            flat = 0
            for c in cell:
                flat = flat * m + int(c)
            wanted.add(int(face) * per_face + flat)
        inv_sqrt = K.inv_sqrt()

        def region(s):
            return np.isin(mesh.locate(s @ inv_sqrt.T), list(wanted))

        return cls(b, region, K, d, {"kind": "facet-cells", "data": {"m": m, "cells": [list(map(int, [f, *c])) for f, c in cells]}})

    @classmethod
    def half_line(cls, b: float, signs=(1,), K=None) -> "SphericalSector":
        K = SpdMatrix(np.atleast_2d(1.0 if K is None else K))
        signs = tuple(int(s) for s in signs)

        def region(s):
            return np.isin(np.sign(s[:, 0]).astype(int), signs)

        return cls(b, region, K, 1, {"kind": "half-line", "data": list(signs)})

    def contains(self, x) -> np.ndarray:
        """Membership of points x in B."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        q = np.sqrt(np.einsum("ni,ij,nj->n", x, self.K.inv(), x))
        with np.errstate(invalid="ignore", divide="ignore"):
            s = x / q[:, None]
        return (q >= self.b) & np.asarray(self.region(np.nan_to_num(s)), dtype=bool)


def tail_probability_formula(t_n: float, sector: SphericalSector, psi: ResidueFunction, res: int = 64) -> float:
    """(t/2 pi)^{d/2} e^{-t b^2/2} / (t b) times the surface integral of psi(K^{-1/2} s) over the sector base."""
    if t_n <= 0:
        raise ValueError("t_n must be positive")
    d, b = sector.d, sector.b
    inv_sqrt = sector.K.inv_sqrt()
    sqrtK = sector.K.sqrt()
    if d == 1:
        pts = np.array([[b], [-b]])
        sel = np.asarray(sector.region(pts @ sqrtK.T / b), dtype=bool)
        integral = math.fsum(psi(pts[sel] @ inv_sqrt.T))
        if not sel.any():
            raise ValueError("sector has zero measure")
    else:
        mesh = build_mesh(d, b, res)

        def region(c):
            return sector.region(c @ sqrtK.T / b)

        if not np.any(region(mesh.centers)):
            raise ValueError("sector has zero measure on the mesh")
        integral = surface_integral(lambda c: psi(c @ inv_sqrt.T), region, mesh)
    return (t_n / (2 * math.pi)) ** (d / 2) * math.exp(-t_n * b * b / 2) / (t_n * b) * integral


# ---------------------------------------------------------------------------
# Cones
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ConeAsymptotic:
    normalized: float  # (t)^{d/2-1} int_{D0} (...) dd
    probability: float | None  # the implied P[X_n in t_n C], when psi_n(h) is supplied


def _simplex_rule(k: int, order: int) -> tuple:
    """Collapsed Gauss-Legendre rule on the unit k-simplex: (barycentric coords (n, k+1), weights)."""
    x, w = np.polynomial.legendre.leggauss(order)
    u = 0.5 * (x + 1.0)
    w = 0.5 * w
    U = np.stack(np.meshgrid(*([u] * k), indexing="ij"), axis=-1).reshape(-1, k)
    W = np.prod(np.stack(np.meshgrid(*([w] * k), indexing="ij"), axis=-1).reshape(-1, k), axis=1)
    lam = np.zeros((U.shape[0], k + 1))
    rest = np.ones(U.shape[0])
    for i in range(k):
        lam[:, i + 1] = rest * U[:, i]
        W = W * (1.0 - U[:, i]) ** (k - 1 - i)
        rest = rest * (1.0 - U[:, i])
    lam[:, 0] = rest
    return lam, W


def _integrate_polytope(f: Callable, verts: np.ndarray, order: int = 24, splits: int = 4) -> float:
    """Integral of f over the convex hull of ``verts`` in R^k, k in {1, 2, 3}."""
    k = verts.shape[1]
    if k == 1:
        lo, hi = float(verts.min()), float(verts.max())
        edges = np.linspace(lo, hi, 8 * splits + 1)
        x, w = np.polynomial.legendre.leggauss(order)
        tot = []
        for a, c in zip(edges[:-1], edges[1:]):
            pts = 0.5 * (a + c) + 0.5 * (c - a) * x
            tot.append(float(np.dot(w, f(pts[:, None]))) * 0.5 * (c - a))
        return math.fsum(tot)
    from scipy.spatial import Delaunay

    tri = Delaunay(verts)
    lam, W = _simplex_rule(k, order)
    # barycentric subdivision of each simplex into splits^k pieces via edge midpoints
    sub = _subdivide_unit_simplex(k, splits)
    tot = []
    for simplex in tri.simplices:
        V = verts[simplex]
        for piece in sub:
            P = piece @ V
            vol = abs(np.linalg.det(P[1:] - P[0]))
            pts = lam @ P
            tot.append(vol * float(np.dot(W, f(pts))))
    return math.fsum(tot)


@lru_cache(maxsize=None)
def _subdivide_unit_simplex_cached(k: int, splits: int) -> tuple:
    pieces = [np.eye(k + 1)]
    for _ in range(int(math.log2(splits))):
        nxt = []
        for P in pieces:
            nxt.extend(_split_once(P))
        pieces = nxt
    return tuple(pieces)


def _subdivide_unit_simplex(k, splits):
    return _subdivide_unit_simplex_cached(k, splits)


def _split_once(P: np.ndarray) -> list:
    """Split a simplex (rows are barycentric vertices) along its longest edge."""
    n = P.shape[0]
    best, pair = -1.0, (0, 1)
    for i, j in itertools.combinations(range(n), 2):
        L = float(np.sum((P[i] - P[j]) ** 2))
        if L > best:
            best, pair = L, (i, j)
    i, j = pair
    mid = 0.5 * (P[i] + P[j])
    A, B = P.copy(), P.copy()
    A[j] = mid
    B[i] = mid
    return [A, B]


def cone_tail_asymptotic(t_n: float, h, base: np.ndarray, basis: np.ndarray, psi: ResidueFunction,
                         psi_n_h: float | None = None, order: int = 24) -> ConeAsymptotic:
    """Leading asymptotic of the tail of the cone over D = h + D0.

    ``base`` holds the vertices of D0 in the orthonormal ``basis`` (d, d-1) of h^perp.
    The normalized value is (t)^{d/2-1} int_{D0} (1 + <grad psi(h), x>/psi(h)) |h| e^{-t|x|^2/2}/(|h|^2+|x|^2) dx;
    multiplying by (2 pi)^{-d/2} e^{-t|h|^2/2} psi_n(h) gives the probability.
    """
    h = np.asarray(h, dtype=float).ravel()
    nh = float(np.linalg.norm(h))
    if nh <= 0:
        raise ValueError("h must be non-zero")
    d = h.size
    ph = psi.value(h)
    if ph == 0 or not np.isfinite(ph):
        raise ValueError("singular tilt: psi(h) vanishes")
    g = psi.gradient(h) / ph
    gb = basis.T @ g

    def f(y):
        r2 = np.sum(y * y, axis=1)
        return (1.0 + y @ gb) * nh * np.exp(-0.5 * t_n * r2) / (nh * nh + r2)

    integral = _integrate_polytope(f, np.asarray(base, dtype=float), order=order)
    normalized = t_n ** (d / 2 - 1) * integral
    prob = None
    if psi_n_h is not None:
        prob = normalized * psi_n_h * math.exp(-0.5 * t_n * nh * nh) / (2 * math.pi) ** (d / 2)
    return ConeAsymptotic(normalized, prob)


# ---------------------------------------------------------------------------
# Toy model and tilted Monte Carlo
# ---------------------------------------------------------------------------
class UniformCube:
    """Y uniform on [-a, a]^d, with psi(z) = prod sinh(a z_i)/(a z_i)."""

    def __init__(self, d: int, a: float = 1.0):
        self.d, self.a = d, float(a)

    @property
    def bound(self) -> float:
        return self.a * math.sqrt(self.d)

    def laplace(self, z) -> np.ndarray:
        z = _rows(z, self.d) * self.a
        return np.prod(np.where(np.abs(z) < 1e-8, 1.0 + z * z / 6.0, np.sinh(z) / np.where(z == 0, 1.0, z)), axis=1)

    def mean(self) -> np.ndarray:
        return np.zeros(self.d)

    def cov(self) -> np.ndarray:
        return np.eye(self.d) * self.a ** 2 / 3.0

    def sample(self, n: int, rng, tilt=None) -> np.ndarray:
        """Draws from the law, exponentially tilted by e^{<tilt, y>} when given."""
        u = rng.random((n, self.d))
        if tilt is None:
            return self.a * (2 * u - 1)
        out = np.empty((n, self.d))
        for i, c in enumerate(np.asarray(tilt, dtype=float) * self.a):
            if abs(c) < 1e-12:
                out[:, i] = 2 * u[:, i] - 1
            else:
                # inverse CDF of density prop. to e^{c y} on [-1, 1]
                out[:, i] = -1.0 + np.log1p(u[:, i] * np.expm1(2 * c)) / c
        return self.a * out


class DiscreteLaw:
    """Finitely supported Y with exact tilting."""

    def __init__(self, atoms, weights=None):
        self.atoms = np.atleast_2d(np.asarray(atoms, dtype=float))
        n = self.atoms.shape[0]
        w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float)
        self.weights = w / w.sum()
        self.d = self.atoms.shape[1]

    @property
    def bound(self) -> float:
        return float(np.max(np.linalg.norm(self.atoms, axis=1)))

    def laplace(self, z) -> np.ndarray:
        return np.exp(_rows(z, self.d) @ self.atoms.T) @ self.weights

    def mean(self) -> np.ndarray:
        return self.weights @ self.atoms

    def cov(self) -> np.ndarray:
        c = self.atoms - self.mean()
        return (c * self.weights[:, None]).T @ c

    def sample(self, n: int, rng, tilt=None) -> np.ndarray:
        w = self.weights
        if tilt is not None:
            w = w * np.exp(self.atoms @ np.asarray(tilt, dtype=float))
            w = w / w.sum()
        return self.atoms[rng.choice(len(w), size=n, p=w)]


@dataclass
class ToyModel(ResidueFunction):
    """X_n = sqrt(t_n) G + Y with G standard Gaussian and Y bounded, independent."""

    t_n: float
    law: object

    def __post_init__(self):
        if self.t_n <= 0:
            raise ValueError("t_n must be positive")

    @property
    def d(self) -> int:
        return self.law.d

    def __call__(self, z):
        return self.law.laplace(z)

    def sample(self, n: int, rng) -> np.ndarray:
        g = rng.standard_normal((n, self.d))
        return math.sqrt(self.t_n) * g + self.law.sample(n, rng)

    def sample_tilted(self, h, n: int, rng, tilt_y: bool = True) -> tuple:
        """Draws from the law tilted by e^{<h, x>} and the log of dP/dQ at each draw."""
        h = np.asarray(h, dtype=float).ravel()
        st = math.sqrt(self.t_n)
        g = rng.standard_normal((n, self.d)) + st * h
        y = self.law.sample(n, rng, tilt=h if tilt_y else None)
        x = st * g + y
        logw = -st * (g @ h) + 0.5 * self.t_n * float(h @ h)
        if tilt_y:
            logw = logw - y @ h + math.log(float(self.law.laplace(h[None, :])[0]))
        return x, logw


def toy_sampler(toy: ToyModel, rng, n: int | None = None) -> np.ndarray:
    """Exact draw(s) of X_n from the toy model."""
    x = toy.sample(1 if n is None else n, rng)
    return x[0] if n is None else x


def tilted_mc_tail(model, event: Callable, t_n: float, h, n_samples: int, rng, chunk: int = 1 << 16,
                   threads: int = 1, **kwargs) -> tuple:
    """Importance-sampling estimate of P[X_n in t_n B] for B given by ``event``.

    ``model.sample_tilted(h, n, rng)`` must return draws of the tilted law and
    log dP/dQ.  ``event`` acts on X_n / t_n.  With h = 0 this is plain Monte
    Carlo.  ``rng`` is an RngStream (chunked, reproducible for any thread
    count) or a numpy Generator (sequential).
    """
    h = np.asarray(h, dtype=float).ravel()
    if not np.all(np.isfinite(h)):
        raise ValueError("tilt must be finite")

    def work(item):
        gen, m = item
        x, logw = model.sample_tilted(h, m, gen, **kwargs)
        if not np.all(np.isfinite(logw)):
            raise ValueError("tilt is not normalizable")
        vals = np.where(np.asarray(event(x / t_n), dtype=bool), np.exp(logw), 0.0)
        return math.fsum(vals), math.fsum(vals * vals), m

    if hasattr(rng, "chunks"):
        items = list(rng.chunks(n_samples, chunk))
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(work, items))
        else:
            parts = [work(it) for it in items]
    else:
        parts = [work(it) for it in _split(rng, n_samples, chunk)]
    count = sum(p[2] for p in parts)
    mean = math.fsum(p[0] for p in parts) / count
    var = max(math.fsum(p[1] for p in parts) / count - mean * mean, 0.0)
    return mean, math.sqrt(var / count)


def _split(gen, total, chunk):
    done = 0
    while done < total:
        m = min(chunk, total - done)
        yield gen, m
        done += m


# ---------------------------------------------------------------------------
# Angular densities
# ---------------------------------------------------------------------------
def _pair_sum(x: np.ndarray) -> np.ndarray:
    """sum_{i<j} (x_i x_j)^2 row-wise."""
    s2 = np.sum(x * x, axis=1)
    s4 = np.sum(x ** 4, axis=1)
    return 0.5 * (s2 * s2 - s4)


@lru_cache(maxsize=64)
def _lattice_normalizer(d: int, r: float, res: int) -> float:
    mesh = build_mesh(d, 1.0, res)
    c = d ** 3 * r ** 4 / 12.0
    return surface_integral(lambda s: np.exp(-c * _pair_sum(s)), None, mesh, rule="nodes")


def lattice_conditional_density(r: float, point, d: int = 2, res: int = 16):
    """Angular density of the lattice walk endpoint given a large radius r.

    d = 2: F(r, theta) on [0, 2 pi) proportional to exp(-r^4 sin(2 theta)^2 / 6).
    d >= 3: density on the unit sphere proportional to
    exp(-d^3 r^4 / 12 sum_{i<j} (x_i x_j)^2).
    """
    if r < 0:
        raise ValueError("r must be non-negative")
    if d == 2:
        a = r ** 4 / 6.0
        theta = np.asarray(point, dtype=float)
        # int_0^{2 pi} exp(-a sin^2 2t) dt = 2 pi e^{-a/2} I0(a/2)
        z = 2 * math.pi * special.ive(0, a / 2)
        out = np.exp(-a * np.sin(2 * theta) ** 2) / z
        return out if out.ndim else float(out)
    x = np.atleast_2d(np.asarray(point, dtype=float))
    if x.shape[1] != d or np.any(np.abs(np.linalg.norm(x, axis=1) - 1) > 1e-9):
        raise ValueError("expects unit vectors of dimension d")
    c = d ** 3 * r ** 4 / 12.0
    out = np.exp(-c * _pair_sum(x)) / _lattice_normalizer(d, float(r), res)
    return out if np.ndim(point) > 1 else float(out[0])


def lattice_axis_mass(r: float, d: int = 2, halfwidth: float = math.pi / 16, res: int = 16) -> float:
    """Conditional mass of directions within angle ``halfwidth`` of a coordinate axis."""
    if d == 2:
        val, _ = integrate.quad(lambda t: lattice_conditional_density(r, t), -halfwidth, halfwidth,
                                epsabs=1e-13, epsrel=1e-12)
        return 4 * val
    mesh = build_mesh(d, 1.0, res)
    return surface_integral(lambda s: lattice_conditional_density(r, s, d, res),
                            lambda s: np.max(np.abs(s), axis=1) >= math.cos(halfwidth), mesh)


def cue_sector_density(r, theta):
    """H(r, theta) = G(1 + w) G(1 + conj w) / G(1 + r cos theta), w = (r/2) e^{i theta}."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(r < 0) or np.any(r >= 1):
        raise ValueError("H is defined for 0 <= r < 1")
    out = barnes_g_conjugate_product(1.0, r, theta) / np.exp(log_barnes_g(1.0 + r * np.cos(theta)))
    return out if np.ndim(out) else float(out)
