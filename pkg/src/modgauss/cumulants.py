"""Joint cumulants from moments, plug-in estimates and log-Laplace expansions."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol, Sequence

import numpy as np

from .numeric_core import SpdMatrix

__all__ = [
    "SetPartition",
    "MomentOracle",
    "DiscreteMomentOracle",
    "CumulantTensor",
    "SampleSet",
    "moebius_coefficient",
    "enumerate_set_partitions",
    "bell_number",
    "joint_cumulant",
    "cumulant_tensor",
    "empirical_joint_cumulant",
    "log_laplace_expansion",
    "residue_from_model",
]

MAX_PARTITION_ORDER = 10


@dataclass(frozen=True)
class SetPartition:
    """Set partition of {0, ..., r-1} given as a tuple of sorted blocks."""

    blocks: tuple

    @property
    def size(self) -> int:
        return len(self.blocks)

    @property
    def coefficient(self) -> int:
        return moebius_coefficient(self.size)


class MomentOracle(Protocol):
    def moment(self, indices: Sequence[int]) -> float:
        """E[prod_{i in indices} Y_i]; the empty product has moment 1."""


@dataclass(frozen=True)
class SampleSet:
    """n x d observations together with where they came from."""

    data: np.ndarray
    model: str = ""
    seed: int | None = None

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


class DiscreteMomentOracle:
    """Exact moments of a finitely supported law on R^d.

    Parameters
    ----------
    atoms : (m, d) array
    weights : (m,) array of probabilities, normalized on construction
    """

    def __init__(self, atoms, weights=None):
        atoms = np.asarray(atoms, dtype=float)
        if atoms.ndim == 1:
            atoms = atoms[:, None]
        if weights is None:
            weights = np.full(atoms.shape[0], 1.0 / atoms.shape[0])
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (atoms.shape[0],) or np.any(weights < 0):
            raise ValueError("weights must be a non-negative vector matching the atoms")
        self.atoms = atoms
        self.weights = weights / weights.sum()
        self._cache: dict = {}

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    def moment(self, indices: Sequence[int]) -> float:
        key = tuple(sorted(int(i) for i in indices))
        hit = self._cache.get(key)
        if hit is None:
            prod = np.ones(self.atoms.shape[0])
            for i in key:
                prod = prod * self.atoms[:, i]
            hit = float(np.dot(self.weights, prod))
            self._cache[key] = hit
        return hit

    def log_laplace(self, z) -> float:
        z = np.asarray(z, dtype=float)
        e = self.atoms @ z
        top = e.max()
        return float(top + np.log(np.dot(self.weights, np.exp(e - top))))


def moebius_coefficient(blocks: int) -> int:
    """(-1)^{l-1} (l-1)! for a partition with l blocks."""
    if blocks < 1:
        raise ValueError("a set partition has at least one block")
    return (-1) ** (blocks - 1) * math.factorial(blocks - 1)


def _restricted_growth_strings(r: int):
    """Yield strings a with a[0] = 0 and a[i] <= 1 + max(a[:i]), one per set partition."""

    def rec(prefix, top):
        if len(prefix) == r:
            yield tuple(prefix)
            return
        for v in range(top + 2):
            prefix.append(v)
            yield from rec(prefix, max(top, v))
            prefix.pop()

    yield from rec([0], 0)


@lru_cache(maxsize=None)
def enumerate_set_partitions(r: int) -> tuple:
    """All set partitions of {0, ..., r-1}; there are Bell(r) of them."""
    if r < 1:
        raise ValueError("order must be positive")
    if r > MAX_PARTITION_ORDER:
        raise ValueError(f"set partitions are enumerated up to order {MAX_PARTITION_ORDER}")
    out = []
    for rgs in _restricted_growth_strings(r):
        nb = max(rgs) + 1
        blocks = tuple(tuple(i for i in range(r) if rgs[i] == b) for b in range(nb))
        out.append(SetPartition(blocks))
    return tuple(out)


def bell_number(r: int) -> int:
    row = [1]
    for _ in range(r):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def joint_cumulant(oracle: MomentOracle, indices: Sequence[int]) -> float:
    """kappa(Y_{i_1}, ..., Y_{i_r}) as a Moebius sum of products of joint moments."""
    idx = tuple(int(i) for i in indices)
    r = len(idx)
    if r == 0:
        raise ValueError("need at least one index")
    terms = []
    for part in enumerate_set_partitions(r):
        prod = float(part.coefficient)
        for block in part.blocks:
            prod *= oracle.moment([idx[j] for j in block])
        terms.append(prod)
    return math.fsum(terms)


@dataclass(frozen=True)
class CumulantTensor:
    order: int
    array: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.array, dtype=float)
        if arr.ndim != self.order:
            raise ValueError("tensor rank does not match its order")
        if len(set(arr.shape)) > 1:
            raise ValueError("cumulant tensors are cubical")
        object.__setattr__(self, "array", arr)

    @property
    def dim(self) -> int:
        return self.array.shape[0] if self.order else 0


def symmetric_fill(d: int, order: int, value_of) -> np.ndarray:
    """Fill a symmetric d^order tensor from its values on sorted index tuples."""
    out = np.zeros((d,) * order)
    for combo in itertools.combinations_with_replacement(range(d), order):
        v = value_of(combo)
        for perm in set(itertools.permutations(combo)):
            out[perm] = v
    return out


def cumulant_tensor(oracle: MomentOracle, d: int, order: int) -> CumulantTensor:
    return CumulantTensor(order, symmetric_fill(d, order, lambda c: joint_cumulant(oracle, c)))


def _as_samples(samples) -> np.ndarray:
    arr = samples.data if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.shape[0] == 0:
        raise ValueError("empty sample set")
    return arr


def empirical_joint_cumulant(samples, indices: Sequence[int]) -> float:
    """Plug-in joint cumulant: the exact joint cumulant of the empirical law.

    Plain averages are used for every moment (no k-statistic correction),
    so the estimator carries an O(1/n) bias.
    """
    arr = _as_samples(samples)
    if len(indices) > 6:
        raise ValueError("empirical cumulants are limited to order 6")
    # centring does not change cumulants of order >= 2 but improves round-off
    idx = [int(i) for i in indices]
    if len(idx) >= 2:
        arr = arr - arr.mean(axis=0)
    return joint_cumulant(DiscreteMomentOracle(arr), idx)


def log_laplace_expansion(tensors: Sequence[CumulantTensor], z) -> float:
    """Truncated series sum_r (1/r!) sum kappa_{i_1..i_r} z^{i_1} ... z^{i_r}."""
    z = np.asarray(z, dtype=float).ravel()
    total = []
    for t in tensors:
        if t.order > MAX_PARTITION_ORDER:
            raise ValueError("expansion order exceeds 10")
        if t.order and t.dim != z.size:
            raise ValueError("tensor dimension does not match the point")
        acc = t.array
        for _ in range(t.order):
            acc = acc @ z
        total.append(float(acc) / math.factorial(t.order))
    return math.fsum(total)


def residue_from_model(tensors: Sequence[CumulantTensor], N: float, D: float, K, v: int, z) -> float:
    """Finite-n residue of the method-of-cumulants scaling.

    The cumulant tensors describe S_n; the rescaled variable is
    X_n = S_n / (N^{1/v} D^{1-1/v}) with parameter t_n = (N/D)^{1-2/v}.
    Returns exp(log E[e^{<z,X_n>}] - t_n z^T K z / 2) using the truncated
    expansion from the supplied tensors.
    """
    if v < 3:
        raise ValueError("the scaling exponent v must be at least 3")
    K = K if isinstance(K, SpdMatrix) else SpdMatrix(K)
    z = np.asarray(z, dtype=float).ravel()
    scale = N ** (1.0 / v) * D ** (1.0 - 1.0 / v)
    t_n = (N / D) ** (1.0 - 2.0 / v)
    rescaled = [CumulantTensor(t.order, t.array / scale ** t.order) for t in tensors]
    log_lap = log_laplace_expansion(rescaled, z)
    return float(np.exp(log_lap - 0.5 * t_n * float(z @ K.array @ z)))
