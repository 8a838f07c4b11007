"""Dependency graphs, the spanning-tree cumulant bound and method-of-cumulants checks."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

from .cumulants import DiscreteMomentOracle, joint_cumulant
from .numeric_core import SpdMatrix

__all__ = [
    "DependencyGraph",
    "BoundedVectorFamily",
    "cumulant_bound",
    "spanning_tree_count",
    "verify_tree_bound",
    "random_family",
    "CumulantModel",
    "IidStepsModel",
    "check_mc_hypotheses",
]

MAX_TREE_VERTICES = 9
MAX_OUTCOMES = 1 << 16


@dataclass(frozen=True)
class DependencyGraph:
    """Simple undirected graph with the size and degree parameters of the bound.

    ``D`` is one plus the maximal number of neighbours; it may be set larger.
    """

    n_vertices: int
    edges: frozenset = frozenset()
    D: int | None = None

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ValueError("a dependency graph has at least one vertex")
        clean = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError("self loops are not allowed")
            if not (0 <= a < self.n_vertices and 0 <= b < self.n_vertices):
                raise ValueError("edge endpoint out of range")
            clean.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(clean))
        need = 1 + max(self.degrees(), default=0)
        if self.D is None:
            object.__setattr__(self, "D", need)
        elif self.D < need:
            raise ValueError(f"D={self.D} is below 1 + max degree = {need}")

    @property
    def N(self) -> int:
        return self.n_vertices

    def degrees(self) -> list:
        deg = [0] * self.n_vertices
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def neighbours(self, v: int) -> list:
        return sorted({b for a, b in self.edges if a == v} | {a for a, b in self.edges if b == v})


def cumulant_bound(N: float, D: float, A: float, r: int) -> float:
    """N (2D)^{r-1} A^r r^{r-2}."""
    if r < 2:
        raise ValueError("the bound is stated for r >= 2")
    return float(N) * (2.0 * D) ** (r - 1) * float(A) ** r * float(r) ** (r - 2)


def _bareiss_det(m: list) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination."""
    m = [row[:] for row in m]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def spanning_tree_count(n_vertices: int, edges: Sequence[tuple]) -> int:
    """Number of spanning trees of a multigraph, by the matrix-tree theorem.

    Repeated edges count with multiplicity; loops are ignored.
    """
    if n_vertices > MAX_TREE_VERTICES:
        raise ValueError(f"spanning trees are counted for at most {MAX_TREE_VERTICES} vertices")
    if n_vertices < 1:
        raise ValueError("need at least one vertex")
    lap = [[0] * n_vertices for _ in range(n_vertices)]
    for a, b in edges:
        if a == b:
            continue
        lap[a][a] += 1
        lap[b][b] += 1
        lap[a][b] -= 1
        lap[b][a] -= 1
    reduced = [row[1:] for row in lap[1:]]
    return _bareiss_det(reduced)


@dataclass
class BoundedVectorFamily:
    """Random vectors indexed by graph vertices, built from finite latent variables.

    Vertex ``v`` depends only on the latents listed in ``vertex_latents[v]``;
    vertices with no edge between them share no latent, so the declared graph
    is a dependency graph.  ``vertex_map(v, values)`` maps an (m, k) array of
    latent values to an (m, d) array with sup-norm at most ``A``.
    """

    graph: DependencyGraph
    dim: int
    A: float
    latents: list  # list of (values, probabilities)
    vertex_latents: list
    vertex_map: Callable
    exact: bool = True

    def outcome_count(self) -> int:
        return math.prod(len(v) for v, _ in self.latents)

    def sum_law(self) -> DiscreteMomentOracle:
        """Exact law of S = sum_v A_v as a discrete moment oracle."""
        if not self.exact:
            raise ValueError("family does not provide an exact law")
        if self.outcome_count() > MAX_OUTCOMES:
            raise ValueError("family too large for exhaustive enumeration")
        vals = [np.asarray(v, dtype=float) for v, _ in self.latents]
        probs = [np.asarray(p, dtype=float) for _, p in self.latents]
        grids = np.meshgrid(*[np.arange(len(v)) for v in vals], indexing="ij")
        idx = [g.ravel() for g in grids]
        weight = np.ones(idx[0].size)
        for j, p in enumerate(probs):
            weight = weight * p[idx[j]]
        latent_values = np.stack([vals[j][idx[j]] for j in range(len(vals))], axis=1)
        total = np.zeros((weight.size, self.dim))
        for v in range(self.graph.N):
            cols = self.vertex_latents[v]
            a_v = np.asarray(self.vertex_map(v, latent_values[:, cols]), dtype=float)
            if np.max(np.abs(a_v)) > self.A * (1 + 1e-12):
                raise ValueError(f"vertex {v} exceeds the declared bound A")
            total = total + a_v
        return DiscreteMomentOracle(total, weight)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        cols = []
        for values, p in self.latents:
            cols.append(np.asarray(values, dtype=float)[rng.choice(len(values), size=n, p=p)])
        latent_values = np.stack(cols, axis=1)
        total = np.zeros((n, self.dim))
        for v in range(self.graph.N):
            total += self.vertex_map(v, latent_values[:, self.vertex_latents[v]])
        return total


def random_family(rng: np.random.Generator, *, max_vertices: int = 6, dim: int = 2,
                  max_atoms: int = 4, edge_prob: float = 0.5) -> BoundedVectorFamily:
    """Random exhaustively enumerable family on at most ``max_vertices`` vertices.

    Each edge carries a latent with 2..max_atoms atoms and each vertex one
    binary latent; the vertex vector is A * tanh of a random linear form in
    its latents, which is bounded by A in sup-norm.
    """
    while True:
        nv = int(rng.integers(1, max_vertices + 1))
        edges = [e for e in itertools.combinations(range(nv), 2) if rng.random() < edge_prob]
        atoms = [int(rng.integers(2, max_atoms + 1)) for _ in edges]
        if math.prod(atoms) * 2 ** nv <= MAX_OUTCOMES:
            break
    latents = []
    for a in atoms:
        p = rng.dirichlet(np.ones(a))
        latents.append((rng.normal(size=a), p))
    for _ in range(nv):
        latents.append((np.array([-1.0, 1.0]), np.array([0.5, 0.5]) + np.array([-1, 1]) * rng.uniform(-0.3, 0.3)))
    vertex_latents = []
    for v in range(nv):
        own = [j for j, e in enumerate(edges) if v in e]
        vertex_latents.append(own + [len(edges) + v])
    A = float(rng.uniform(0.2, 2.0))
    weights = [rng.normal(size=(len(vl), dim)) for vl in vertex_latents]
    shifts = [rng.normal(size=dim) for _ in range(nv)]

    def vertex_map(v, values):
        return A * np.tanh(values @ weights[v] + shifts[v])

    graph = DependencyGraph(nv, frozenset(edges))
    return BoundedVectorFamily(graph, dim, A, latents, vertex_latents, vertex_map)


def verify_tree_bound(family: BoundedVectorFamily, r: int) -> list:
    """Compare every exact joint cumulant of order r of S with the tree bound.

    Returns one record per sorted index tuple with the cumulant, the bound and
    the margin ``bound - |kappa|``.
    """
    if not family.exact:
        raise ValueError("verification needs an exact moment oracle")
    if r < 2 or r > 4:
        raise ValueError("exhaustive verification is run for 2 <= r <= 4")
    law = family.sum_law()
    g = family.graph
    bound = cumulant_bound(g.N, g.D, family.A, r)
    report = []
    for idx in itertools.combinations_with_replacement(range(family.dim), r):
        k = joint_cumulant(law, idx)
        report.append({"indices": idx, "cumulant": k, "bound": bound, "margin": bound - abs(k),
                       "holds": abs(k) <= bound})
    return report


# ---------------------------------------------------------------------------
# Method of cumulants
# ---------------------------------------------------------------------------

class CumulantModel(Protocol):
    dim: int

    def params(self, n: int) -> tuple:
        """(N_n, D_n, A)."""

    def cumulant(self, n: int, indices: Sequence[int]) -> float | None:
        """Exact joint cumulant of S_n, or None when unavailable."""


@dataclass
class IidStepsModel:
    """S_n = sum of n iid copies of a finitely supported vector; D_n = 1."""

    atoms: np.ndarray
    weights: np.ndarray | None = None
    A: float | None = None
    _law: DiscreteMomentOracle = field(init=False, repr=False)

    def __post_init__(self):
        self._law = DiscreteMomentOracle(self.atoms, self.weights)
        if self.A is None:
            self.A = float(np.max(np.abs(self._law.atoms)))

    @property
    def dim(self) -> int:
        return self._law.dim

    def params(self, n: int) -> tuple:
        return float(n), 1.0, float(self.A)

    def cumulant(self, n: int, indices) -> float:
        return n * joint_cumulant(self._law, indices)


def _fit_power(x, y) -> tuple:
    """Least-squares fit of log y = c + s log x; returns (slope, intercept)."""
    x, y = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    s, c = np.polyfit(x, y, 1)
    return float(s), float(c)


def check_mc_hypotheses(model: CumulantModel, n_grid: Sequence[int], v: int, K, tol: float = 1e-8,
                        mc2_exponent: float = 0.45) -> dict:
    """Check MC1-MC5 (and the stronger MC2') on a grid of n.

    MC2 and MC2' are judged from the fitted decay exponent of the relative
    covariance defect against D_n/N_n; MC5 fits kappa / (N D^{v-1}) = L + c/N
    by least squares and reports L and the residual.
    """
    n_grid = sorted(int(n) for n in n_grid)
    if len(n_grid) < 3:
        raise ValueError("need at least three values of n")
    K = K if isinstance(K, SpdMatrix) else SpdMatrix(K)
    d = model.dim
    params = [model.params(n) for n in n_grid]
    ratio = np.array([D / N for N, D, _ in params])
    out: dict = {"n_grid": n_grid, "v": v, "D_over_N": ratio.tolist()}

    # MC1
    means = []
    for n, (N, D, _) in zip(n_grid, params):
        vals = [model.cumulant(n, (i,)) for i in range(d)]
        means.append(None if any(m is None for m in vals) else max(abs(m) for m in vals) / math.sqrt(N * D))
    if any(m is None for m in means):
        out["MC1"] = {"status": "unavailable"}
    else:
        out["MC1"] = {"status": "pass" if max(means) <= tol else "fail", "max_scaled_mean": max(means)}

    # MC2 / MC2'
    defects = []
    for n, (N, D, _) in zip(n_grid, params):
        cov = np.array([[model.cumulant(n, (i, j)) for j in range(d)] for i in range(d)], dtype=float)
        defects.append(float(np.max(np.abs(cov / (N * D) - K.array)) / np.max(np.abs(K.array))))
    defects = np.array(defects)
    ratio_to_zero = bool(np.all(np.diff(ratio) < 0))
    if np.all(defects <= 1e-12):
        exponent = math.inf
    else:
        exponent, _ = _fit_power(ratio, np.maximum(defects, 1e-300))
    out["MC2"] = {"status": "pass" if ratio_to_zero and exponent > 1.0 - 2.0 / v - 0.05 else "fail",
                  "relative_defects": defects.tolist(), "fitted_exponent": exponent,
                  "D_over_N_decreasing": ratio_to_zero}
    out["MC2prime"] = {"status": "pass" if ratio_to_zero and exponent >= mc2_exponent else "fail",
                       "fitted_exponent": exponent}

    # MC3 / MC4 / MC5
    mc3_worst, mc3_missing = -math.inf, False
    mc4_worst = 0.0
    L_fit = {}
    for r in range(3, v + 1):
        for idx in itertools.combinations_with_replacement(range(d), r):
            vals = []
            for n, (N, D, A) in zip(n_grid, params):
                k = model.cumulant(n, idx)
                if k is None:
                    mc3_missing = True
                    vals = None
                    break
                mc3_worst = max(mc3_worst, abs(k) / cumulant_bound(N, D, A, r))
                vals.append(k)
                if r < v:
                    mc4_worst = max(mc4_worst, abs(k) / cumulant_bound(N, D, A, r))
            if vals is not None and r == v:
                y = np.array([k / (N * D ** (v - 1)) for k, (N, D, _) in zip(vals, params)])
                inv_n = np.array([1.0 / N for N, _, _ in params])
                design = np.stack([np.ones_like(inv_n), inv_n], axis=1)
                coef, *_ = np.linalg.lstsq(design, y, rcond=None)
                resid = float(np.max(np.abs(design @ coef - y)))
                L_fit[idx] = {"L": float(coef[0]), "slope": float(coef[1]), "residual": resid}
    if mc3_missing:
        out["MC3"] = out["MC4"] = out["MC5"] = {"status": "unavailable"}
    else:
        out["MC3"] = {"status": "pass" if mc3_worst <= 1.0 else "fail", "worst_ratio_to_bound": mc3_worst}
        out["MC4"] = {"status": "pass" if mc4_worst <= tol else "fail", "worst_scaled_cumulant": mc4_worst}
        scale = max([abs(f["L"]) for f in L_fit.values()] + [1e-300])
        worst_res = max(f["residual"] for f in L_fit.values()) if L_fit else 0.0
        out["MC5"] = {"status": "pass" if worst_res <= max(tol, 1e-6 * scale) else "fail",
                      "limits": {",".join(map(str, k)): f for k, f in L_fit.items()}}
    return out
