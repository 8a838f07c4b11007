"""Shared numerical substrate.

SPD linear algebra, probabilists' Hermite polynomials, Barnes G on the real
axis and on conjugate pairs, normalized sphere Legendre (Gegenbauer)
polynomials, multi-indices, truncated multivariate Taylor jets and the
seeded random stream contract used by every Monte Carlo routine.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np
from scipy import special

__all__ = [
    "SpdMatrix",
    "MultiIndex",
    "RngStream",
    "Jet",
    "hermite",
    "hermite_multi",
    "barnes_g",
    "log_barnes_g",
    "log_barnes_g_conjugate_product",
    "barnes_g_conjugate_product",
    "sphere_legendre",
    "spd_functions",
    "multi_indices",
]

EULER_GAMMA = float(np.euler_gamma)
LOG_2PI = math.log(2.0 * math.pi)


# ---------------------------------------------------------------------------
# Hermite polynomials
# ---------------------------------------------------------------------------

def hermite(n: int, x):
    """Probabilists' Hermite polynomial He_n evaluated at ``x``.

    Uses the three-term recurrence He_{k+1} = x He_k - k He_{k-1}.
    """
    if n < 0:
        raise ValueError("hermite degree must be non-negative")
    if n > 64:
        raise ValueError("hermite degree is capped at 64")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = x.copy()
    for k in range(1, n):
        prev, cur = cur, x * cur - k * prev
    return cur if cur.ndim else float(cur)


def hermite_multi(alpha: Sequence[int], zeta) -> np.ndarray:
    """Product of Hermite polynomials, ``prod_i He_{alpha_i}(zeta[..., i])``."""
    zeta = np.asarray(zeta, dtype=float)
    out = np.ones(zeta.shape[:-1])
    for i, a in enumerate(alpha):
        out = out * hermite(int(a), zeta[..., i])
    return out


# ---------------------------------------------------------------------------
# Barnes G
# ---------------------------------------------------------------------------

def _product_terms(x: float) -> int:
    return int(max(50, math.ceil(4.0 * abs(x) + 8)))


def _log_g1p_real_part(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Re log G(1+u) for u = x + iy from the Weierstrass product.

    The finite part of the product is summed directly, the remainder over
    k > M is expanded in powers of u and resummed with Hurwitz zeta values.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = np.hypot(x, y)
    m = _product_terms(float(np.max(r)) if r.size else 0.0)
    k = np.arange(1, m + 1, dtype=float).reshape((-1,) + (1,) * x.ndim)
    body = 0.5 * k * np.log((1.0 + x / k) ** 2 + (y / k) ** 2) - x + (x * x - y * y) / (2.0 * k)
    s = np.sum(body, axis=0)
    phi = np.arctan2(y, x)
    # tail: sum_{j>=3} (-1)^{j+1} Re(u^j)/j * zeta(j-1, M+1)
    ratio = float(np.max(r)) / (m + 1.0) if r.size else 0.0
    jmax = 3
    while jmax < 400 and (ratio ** jmax) * (m + 1.0) ** 2 > 1e-18:
        jmax += 1
    tail = np.zeros_like(x)
    for j in range(3, jmax + 1):
        hz = special.zeta(j - 1, m + 1.0)
        tail = tail + ((-1.0) ** (j + 1)) * (r ** j) * np.cos(j * phi) / j * hz
    lead = 0.5 * x * LOG_2PI - 0.5 * (x + (1.0 + EULER_GAMMA) * (x * x - y * y))
    return lead + s + tail


def log_barnes_g(z):
    """log G(z) for real z > 0."""
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise ValueError("barnes_g requires z > 0")
    u = z - 1.0
    out = _log_g1p_real_part(u, np.zeros_like(u))
    return out if out.ndim else float(out)


def barnes_g(z):
    """Barnes G function on the positive real axis.

    >>> round(barnes_g(4.0), 12)
    2.0
    """
    out = np.exp(log_barnes_g(z))
    return out if np.ndim(out) else float(out)


def log_barnes_g_conjugate_product(a, r, theta):
    """log of G(a+w) G(a+conj(w)) for w = (r/2) e^{i theta}.

    The product equals |G(a+w)|^2 and is computed from real formulas only.
    """
    a = np.asarray(a, dtype=float)
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    x = a - 1.0 + 0.5 * r * np.cos(theta)
    y = 0.5 * r * np.sin(theta)
    if np.any(x + 1.0 <= 0):
        raise ValueError("conjugate product requires a + (r/2) cos(theta) > 0")
    out = 2.0 * _log_g1p_real_part(x, y)
    return out if out.ndim else float(out)


def barnes_g_conjugate_product(a, r, theta):
    """G(a+w) G(a+conj(w)) for w = (r/2) e^{i theta}; real and positive."""
    out = np.exp(log_barnes_g_conjugate_product(a, r, theta))
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# Sphere Legendre polynomials
# ---------------------------------------------------------------------------

def sphere_legendre(d: int, k: int, t):
    """Degree-k orthogonal polynomial for the weight (1-t^2)^{(d-3)/2}, normalized to 1 at t=1.

    This is the Gegenbauer polynomial C_k^{(d-2)/2} divided by its value at 1
    (Chebyshev T_k when d = 2, Legendre P_k when d = 3).
    """
    if d < 2:
        raise ValueError("sphere_legendre needs d >= 2")
    if k < 0 or k > 64:
        raise ValueError("degree must lie in [0, 64]")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + 1e-12):
        raise ValueError("sphere_legendre is defined on [-1, 1]")
    lam = 0.5 * (d - 2)
    prev = np.ones_like(t)
    if k == 0:
        return prev if prev.ndim else float(prev)
    cur = t.copy()
    for j in range(1, k):
        prev, cur = cur, (2.0 * (j + lam) * t * cur - j * prev) / (j + 2.0 * lam)
    return cur if cur.ndim else float(cur)


# ---------------------------------------------------------------------------
# SPD matrices
# ---------------------------------------------------------------------------

class SpdMatrix:
    """Immutable symmetric positive-definite matrix with cached spectral data."""

    __slots__ = ("_a", "_w", "_v")

    def __init__(self, entries, *, rtol: float = 1e-12):
        a = np.array(entries, dtype=float, copy=True)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("SpdMatrix needs a square array")
        scale = max(float(np.max(np.abs(a))), 1e-300)
        if np.max(np.abs(a - a.T)) > rtol * scale:
            raise ValueError("matrix is not symmetric")
        a = 0.5 * (a + a.T)
        w, v = np.linalg.eigh(a)
        if w[0] <= 0:
            raise ValueError("matrix is not positive definite")
        a.setflags(write=False)
        w.setflags(write=False)
        v.setflags(write=False)
        self._a, self._w, self._v = a, w, v

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._w

    def _fn(self, f) -> np.ndarray:
        out = (self._v * f(self._w)) @ self._v.T
        out = 0.5 * (out + out.T)
        out.setflags(write=False)
        return out

    def sqrt(self) -> np.ndarray:
        return self._fn(np.sqrt)

    def inv_sqrt(self) -> np.ndarray:
        return self._fn(lambda w: 1.0 / np.sqrt(w))

    def inv(self) -> np.ndarray:
        return self._fn(lambda w: 1.0 / w)

    def det(self) -> float:
        return float(np.prod(self._w))

    def spectral_radius(self) -> float:
        return float(self._w[-1])

    def inv_spectral_radius(self) -> float:
        """rho(K^{-1}) = 1 / smallest eigenvalue."""
        return float(1.0 / self._w[0])

    def tau(self) -> float:
        return self.spectral_radius() * self.inv_spectral_radius()

    def normalized(self) -> "SpdMatrix":
        """(det K)^{-1/d} K, which has unit determinant."""
        return SpdMatrix(self._a * self.det() ** (-1.0 / self.dim))

    def __repr__(self) -> str:
        return f"SpdMatrix({self._a.tolist()!r})"


def spd_functions(K) -> dict:
    """Bundle of spectral quantities of an SPD matrix.

    Returns a dict with keys ``sqrt, inv_sqrt, det, rho, rho_inv, tau, K_norm``.
    """
    if not isinstance(K, SpdMatrix):
        K = SpdMatrix(K)
    return {
        "sqrt": K.sqrt(),
        "inv_sqrt": K.inv_sqrt(),
        "det": K.det(),
        "rho": K.spectral_radius(),
        "rho_inv": K.inv_spectral_radius(),
        "tau": K.tau(),
        "K_norm": K.normalized().array,
    }


# ---------------------------------------------------------------------------
# Multi-indices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultiIndex:
    orders: tuple

    def __post_init__(self):
        orders = tuple(int(o) for o in self.orders)
        if any(o < 0 for o in orders):
            raise ValueError("multi-index orders must be non-negative")
        object.__setattr__(self, "orders", orders)

    @property
    def dim(self) -> int:
        return len(self.orders)

    @property
    def weight(self) -> int:
        return sum(self.orders)

    def factorial(self) -> int:
        return math.prod(math.factorial(o) for o in self.orders)

    def __le__(self, other: "MultiIndex") -> bool:  # componentwise partial order
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return all(a <= b for a, b in zip(self.orders, other.orders))

    def __ge__(self, other: "MultiIndex") -> bool:
        return other.__le__(self)

    def binomial(self, alpha: "MultiIndex") -> int:
        """prod_i C(beta_i, alpha_i); requires alpha <= self."""
        if not alpha <= self:
            raise ValueError("binomial(beta, alpha) needs alpha <= beta")
        return math.prod(math.comb(b, a) for b, a in zip(self.orders, alpha.orders))

    def __sub__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(tuple(a - b for a, b in zip(self.orders, other.orders)))

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(tuple(a + b for a, b in zip(self.orders, other.orders)))

    def below(self) -> Iterator["MultiIndex"]:
        """All alpha with alpha <= self."""
        for t in itertools.product(*(range(o + 1) for o in self.orders)):
            yield MultiIndex(t)


@lru_cache(maxsize=None)
def _indices_of_weight(d: int, w: int) -> tuple:
    if d == 1:
        return ((w,),)
    out = []
    for first in range(w, -1, -1):
        for rest in _indices_of_weight(d - 1, w - first):
            out.append((first,) + rest)
    return tuple(out)


def multi_indices(d: int, max_weight: int, min_weight: int = 0) -> list:
    """All d-dimensional multi-indices with weight in [min_weight, max_weight]."""
    return [MultiIndex(t) for w in range(min_weight, max_weight + 1) for t in _indices_of_weight(d, w)]


# ---------------------------------------------------------------------------
# Truncated multivariate Taylor jets
# ---------------------------------------------------------------------------

class Jet:
    """Truncated Taylor expansion in d variables up to total degree q.

    ``coef[alpha]`` is the Taylor coefficient of the monomial h^alpha, so the
    partial derivative of order alpha is ``alpha! * coef[alpha]``.  Trailing
    axes of ``coef`` are batch axes, which lets one jet carry a whole grid of
    base points.
    """

    __slots__ = ("d", "q", "coef")

    def __init__(self, d: int, q: int, coef: np.ndarray):
        self.d, self.q, self.coef = d, q, coef

    @staticmethod
    def _mask(d, q):
        grids = np.indices((q + 1,) * d).sum(axis=0)
        return grids <= q

    @classmethod
    def constant(cls, d, q, value) -> "Jet":
        value = np.asarray(value)
        coef = np.zeros((q + 1,) * d + value.shape, dtype=np.result_type(value, float))
        coef[(0,) * d] = value
        return cls(d, q, coef)

    @classmethod
    def variable(cls, d, q, i, value) -> "Jet":
        """The coordinate function x_i expanded around ``value``."""
        jet = cls.constant(d, q, value)
        if q >= 1:
            idx = [0] * d
            idx[i] = 1
            jet.coef[tuple(idx)] = 1.0
        return jet

    @property
    def value(self):
        return self.coef[(0,) * self.d]

    def derivative(self, alpha: Sequence[int]):
        alpha = tuple(int(a) for a in alpha)
        return math.prod(math.factorial(a) for a in alpha) * self.coef[alpha]

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(self.d, self.q, np.broadcast_to(other, self.value.shape))

    def __add__(self, other):
        other = self._coerce(other)
        return Jet(self.d, self.q, self.coef + other.coef)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.d, self.q, -self.coef)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.d, self.q, self.coef * np.asarray(other))
        d, q = self.d, self.q
        a, b = self.coef, other.coef
        batch = np.broadcast_shapes(a.shape[d:], b.shape[d:])
        out = np.zeros((q + 1,) * d + batch, dtype=np.result_type(a, b))
        for alpha in itertools.product(range(q + 1), repeat=d):
            wa = sum(alpha)
            if wa > q:
                continue
            ca = a[alpha]
            if not np.any(ca):
                continue
            for beta in itertools.product(*(range(q + 1 - wa) for _ in range(d))):
                if wa + sum(beta) > q:
                    continue
                tgt = tuple(x + y for x, y in zip(alpha, beta))
                out[tgt] = out[tgt] + ca * b[beta]
        return Jet(d, q, out)

    __rmul__ = __mul__

    def _series(self, derivs) -> "Jet":
        """Compose with a scalar function given its Taylor coefficients at the base value."""
        h = Jet(self.d, self.q, self.coef.copy())
        h.coef[(0,) * self.d] = 0
        out = Jet.constant(self.d, self.q, derivs[0])
        power = None
        for k in range(1, self.q + 1):
            power = h if power is None else power * h
            out = out + power * derivs[k]
        return out

    def exp(self) -> "Jet":
        v = np.exp(self.value)
        return self._series([v / math.factorial(k) for k in range(self.q + 1)])

    def log(self) -> "Jet":
        v = self.value
        c = [np.log(v)] + [((-1.0) ** (k + 1)) / (k * v ** k) for k in range(1, self.q + 1)]
        return self._series(c)

    def power(self, n: float) -> "Jet":
        v = self.value
        c = [special.binom(n, k) * v ** (n - k) for k in range(self.q + 1)]
        return self._series(c)

    def cos(self) -> "Jet":
        v = self.value
        base = [np.cos(v), -np.sin(v), -np.cos(v), np.sin(v)]
        return self._series([base[k % 4] / math.factorial(k) for k in range(self.q + 1)])

    def sin(self) -> "Jet":
        v = self.value
        base = [np.sin(v), np.cos(v), -np.sin(v), -np.cos(v)]
        return self._series([base[k % 4] / math.factorial(k) for k in range(self.q + 1)])


# ---------------------------------------------------------------------------
# Random streams
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RngStream:
    """Seeded counter-based random stream.

    Generators are Philox instances keyed by (seed, stream, chunk), so that a
    Monte Carlo run split into fixed-size chunks is reproducible whatever the
    number of workers.
    """

    seed: int
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not 0 <= int(v) < 2 ** 64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer")

    def generator(self, chunk: int | None = None) -> np.random.Generator:
        key = (int(self.stream),) if chunk is None else (int(self.stream), int(chunk))
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=key)
        return np.random.Generator(np.random.Philox(ss))

    def substream(self, stream: int) -> "RngStream":
        return RngStream(self.seed, stream)

    def chunks(self, total: int, chunk_size: int) -> Iterator[tuple]:
        """Yield (generator, count) pairs that cover ``total`` draws."""
        n_chunks = -(-int(total) // int(chunk_size))
        for c in range(n_chunks):
            count = min(chunk_size, total - c * chunk_size)
            yield self.generator(c), count
