"""Subgraph counts in Erdos-Renyi random graphs."""
from __future__ import annotations

import math
import string
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..cumulants import enumerate_set_partitions

__all__ = [
    "Motif",
    "ErdosRenyiModel",
    "er_graph",
    "homomorphism_count",
    "embedding_count",
    "er_subgraph_counts",
    "er_mean",
    "er_cov_leading",
    "projection",
    "projection_residual",
    "MAX_MOTIF_VERTICES",
]

MAX_MOTIF_VERTICES = 5
MAX_GRAPH_SIZE = 300


@dataclass(frozen=True)
class Motif:
    """Simple graph on vertices 0..k-1; vertices without edges are allowed."""

    k: int
    edges: tuple

    def __post_init__(self):
        norm = set()
        for a, b in self.edges:
            if a == b or not (0 <= a < self.k and 0 <= b < self.k):
                raise ValueError("motif edges must join distinct vertices in range")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @property
    def h(self) -> int:
        return len(self.edges)

    def padded(self, k: int) -> "Motif":
        if k < self.k:
            raise ValueError("cannot pad to fewer vertices")
        return Motif(k, self.edges)

    @classmethod
    def edge(cls) -> "Motif":
        return cls(2, ((0, 1),))

    @classmethod
    def triangle(cls) -> "Motif":
        return cls(3, ((0, 1), (1, 2), (0, 2)))

    @classmethod
    def path(cls, length: int) -> "Motif":
        return cls(length + 1, tuple((i, i + 1) for i in range(length)))


@dataclass(frozen=True)
class ErdosRenyiModel:
    n: int
    p: float
    motifs: tuple = field(default_factory=lambda: (Motif.edge(), Motif.triangle()))

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")
        k = max(m.k for m in self.motifs)
        if k > MAX_MOTIF_VERTICES:
            raise ValueError(f"motifs are limited to {MAX_MOTIF_VERTICES} vertices")
        if not k <= self.n <= MAX_GRAPH_SIZE:
            raise ValueError(f"graph size must lie in [k, {MAX_GRAPH_SIZE}]")
        object.__setattr__(self, "motifs", tuple(m.padded(k) for m in self.motifs))

    @property
    def k(self) -> int:
        return self.motifs[0].k

    @property
    def w(self) -> np.ndarray:
        """Direction of the rank-one limit: (h_i p^{h_i})_i."""
        return np.array([m.h * self.p ** m.h for m in self.motifs])


def er_graph(n: int, p: float, rng, size: int = 1) -> np.ndarray:
    """Symmetric 0/1 adjacency matrices with empty diagonal, shape (size, n, n)."""
    iu = np.triu_indices(n, 1)
    a = np.zeros((size, n, n))
    a[:, iu[0], iu[1]] = rng.random((size, iu[0].size)) < p
    return a + np.transpose(a, (0, 2, 1))


@lru_cache(maxsize=None)
def _quotients(motif: Motif) -> tuple:
    """(coefficient, vertex count, edge set) of every loop-free quotient of the motif.

    Counting injective maps by Moebius inversion over set partitions of the
    vertices: inj = sum_pi mu(0, pi) hom(motif / pi).
    """
    out = {}
    for part in enumerate_set_partitions(motif.k):
        block_of = {v: i for i, blk in enumerate(part.blocks) for v in blk}
        if any(block_of[a] == block_of[b] for a, b in motif.edges):
            continue
        coef = 1
        for blk in part.blocks:
            coef *= (-1) ** (len(blk) - 1) * math.factorial(len(blk) - 1)
        edges = frozenset((min(block_of[a], block_of[b]), max(block_of[a], block_of[b])) for a, b in motif.edges)
        key = (part.size, edges)
        out[key] = out.get(key, 0) + coef
    return tuple((c, k, tuple(sorted(e))) for (k, e), c in out.items() if c)


def homomorphism_count(adj: np.ndarray, k: int, edges) -> np.ndarray:
    """Number of vertex maps {0..k-1} -> V(G) sending edges to edges, per graph in the batch."""
    adj = np.asarray(adj, dtype=float)
    batch = adj.reshape((-1,) + adj.shape[-2:])
    n = batch.shape[-1]
    used = {v for e in edges for v in e}
    letters = string.ascii_lowercase
    free = k - len(used)
    if not edges:
        return np.full(batch.shape[0], float(n) ** k)
    spec = ",".join(letters[a] + letters[b] for a, b in edges) + "->"
    path = np.einsum_path(spec, *([batch[0]] * len(edges)), optimize="greedy")[0]
    # per-graph contraction lets einsum hand pairwise steps to BLAS
    vals = np.array([np.einsum(spec, *([g] * len(edges)), optimize=path) for g in batch])
    # vertices of the motif without edges each contribute a factor n
    return vals * float(n) ** free


def embedding_count(adj: np.ndarray, motif: Motif) -> np.ndarray:
    """Number of injective maps V(motif) -> V(G) sending edges to edges."""
    tot = 0.0
    for coef, k, edges in _quotients(motif):
        tot = tot + coef * homomorphism_count(adj, k, edges)
    return np.rint(tot)


def er_subgraph_counts(model: ErdosRenyiModel, rng, size: int | None = None, batch: int = 64,
                       graphs: np.ndarray | None = None) -> np.ndarray:
    """Counts I(H_i, G) for each motif over ``size`` random graphs, shape (size, len(motifs))."""
    if graphs is not None:
        g = np.asarray(graphs, dtype=float).reshape((-1, model.n, model.n))
        return np.column_stack([embedding_count(g, m) for m in model.motifs])
    m = 1 if size is None else size
    out = np.empty((m, len(model.motifs)))
    for s in range(0, m, batch):
        k = min(batch, m - s)
        g = er_graph(model.n, model.p, rng, k)
        out[s:s + k] = np.column_stack([embedding_count(g, mo) for mo in model.motifs])
    return out[0] if size is None else out


def er_mean(model: ErdosRenyiModel) -> np.ndarray:
    """E[I(H, G_n)] = n(n-1)...(n-k+1) p^h."""
    falling = math.perm(model.n, model.k)
    return np.array([falling * model.p ** mo.h for mo in model.motifs])


def er_cov_leading(model: ErdosRenyiModel) -> np.ndarray:
    """2 (1/p - 1) w w^T n^{2k-2}."""
    w = model.w
    return 2 * (1 / model.p - 1) * np.outer(w, w) * float(model.n) ** (2 * model.k - 2)


def _normalized(model: ErdosRenyiModel, counts: np.ndarray) -> np.ndarray:
    scale = math.sqrt(2 * (1 / model.p - 1)) * float(model.n) ** (model.k - 1)
    return (np.atleast_2d(counts) - er_mean(model)) / scale


def projection(model: ErdosRenyiModel, counts: np.ndarray) -> np.ndarray:
    """Y^(w) = <Y, w>/|w|^2 with Y the centred counts over sqrt(2(1/p-1)) n^{k-1}; close to N(0, 1)."""
    w = model.w
    return _normalized(model, counts) @ w / float(w @ w)


def projection_residual(model: ErdosRenyiModel, counts: np.ndarray) -> float:
    """Sample mean of |Y - Y^(w) w|^2, which is O(1/n)."""
    y = _normalized(model, counts)
    r = y - np.outer(projection(model, counts), model.w)
    return float(np.mean(np.sum(r * r, axis=1)))
