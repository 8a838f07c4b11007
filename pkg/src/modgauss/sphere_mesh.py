"""Hypercubic facets on spheres and their surface measures.

A facet is the radial projection onto the sphere of radius b of an
axis-aligned cell of the boundary of [-1, 1]^d.  On the face x_a = +-1 the
projected surface element is b^{d-1} |u|^{-d} du, which is integrated per
cell with a tensor Gauss-Legendre rule.  All 2d faces are congruent and
each face is symmetric under reflections and permutations of its free axes,
so only one representative cell per symmetry class is integrated.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import special

__all__ = [
    "HypercubicFacet",
    "FacetMesh",
    "ConePair",
    "build_mesh",
    "facet_surface_measure",
    "cone_pair",
    "surface_integral",
    "sphere_area",
]

MAX_RESOLUTION = 256


def sphere_area(d: int, b: float = 1.0) -> float:
    """2 pi^{d/2} b^{d-1} / Gamma(d/2)."""
    return 2.0 * math.pi ** (d / 2) * b ** (d - 1) / math.gamma(d / 2)


def _face_axis_sign(face: int) -> tuple:
    return face // 2, (1.0 if face % 2 else -1.0)


def _cell_integral(lo: np.ndarray, hi: np.ndarray, d: int, order: int) -> np.ndarray:
    """Integral of |(1, y)|^{-d} over boxes [lo, hi] in R^{d-1} (rows are boxes)."""
    x, w = np.polynomial.legendre.leggauss(order)
    k = d - 1
    if k == 0:
        return np.ones(lo.shape[0])
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = np.stack(np.meshgrid(*([x] * k), indexing="ij"), axis=-1).reshape(-1, k)
    wts = np.prod(np.stack(np.meshgrid(*([w] * k), indexing="ij"), axis=-1).reshape(-1, k), axis=1)
    out = np.empty(lo.shape[0])
    step = max(1, 2_000_000 // nodes.shape[0])
    for s in range(0, lo.shape[0], step):
        y = mid[s:s + step, None, :] + half[s:s + step, None, :] * nodes[None, :, :]
        f = (1.0 + np.sum(y * y, axis=-1)) ** (-0.5 * d)
        out[s:s + step] = (f @ wts) * np.prod(half[s:s + step], axis=1)
    return out


@dataclass(frozen=True)
class HypercubicFacet:
    """Cell ``cell`` (indices along the free axes) of cube face ``face`` at resolution m."""

    d: int
    face: int
    cell: tuple
    m: int
    b: float = 1.0

    def __post_init__(self):
        if not 0 <= self.face < 2 * self.d:
            raise ValueError("face id out of range")
        if len(self.cell) != self.d - 1 or any(not 0 <= c < self.m for c in self.cell):
            raise ValueError("cell index out of range")

    @property
    def free_axes(self) -> list:
        a, _ = _face_axis_sign(self.face)
        return [i for i in range(self.d) if i != a]

    def bounds(self) -> tuple:
        lo = np.array([-1.0 + 2.0 * c / self.m for c in self.cell])
        return lo, lo + 2.0 / self.m

    def _embed(self, y: np.ndarray) -> np.ndarray:
        a, s = _face_axis_sign(self.face)
        y = np.atleast_2d(y)
        u = np.empty((y.shape[0], self.d))
        u[:, a] = s
        u[:, self.free_axes] = y
        return u

    def corners(self) -> np.ndarray:
        """The 2^{d-1} cell corners projected to the sphere of radius b."""
        lo, hi = self.bounds()
        pts = np.array(list(itertools.product(*zip(lo, hi)))) if self.d > 1 else np.zeros((1, 0))
        u = self._embed(pts)
        return self.b * u / np.linalg.norm(u, axis=1, keepdims=True)

    def center(self) -> np.ndarray:
        lo, hi = self.bounds()
        u = self._embed(0.5 * (lo + hi))[0]
        return self.b * u / np.linalg.norm(u)

    def contains_direction(self, x) -> np.ndarray:
        """Whether the rays through the points x pass through this cell."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        a, s = _face_axis_sign(self.face)
        inf = np.max(np.abs(x), axis=1)
        on_face = (np.argmax(np.abs(x), axis=1) == a) & (np.sign(x[:, a]) == s)
        y = x[:, self.free_axes] / np.where(inf > 0, inf, 1.0)[:, None]
        lo, hi = self.bounds()
        return on_face & np.all((y >= lo - 1e-15) & (y <= hi + 1e-15), axis=1)

    def children(self) -> list:
        out = []
        for offs in itertools.product((0, 1), repeat=self.d - 1):
            out.append(HypercubicFacet(self.d, self.face, tuple(2 * c + o for c, o in zip(self.cell, offs)),
                                       2 * self.m, self.b))
        return out


def facet_surface_measure(facet: HypercubicFacet, order: int = 16) -> float:
    """Surface measure of one facet on the sphere of radius b."""
    lo, hi = facet.bounds()
    val = _cell_integral(lo[None, :], hi[None, :], facet.d, order)[0]
    return float(facet.b ** (facet.d - 1) * val)


class FacetMesh:
    """All 2d m^{d-1} facets of the sphere of radius b, built lazily.

    Per-cell measures are computed once per symmetry class of a face; the
    full arrays of centres and measures are materialized on first use.
    """

    def __init__(self, d: int, b: float, m: int, order: int = 16):
        if d < 2 or d > 4:
            raise ValueError("meshes are built for 2 <= d <= 4")
        if m < 1 or m > MAX_RESOLUTION:
            raise ValueError(f"resolution must lie in [1, {MAX_RESOLUTION}]")
        if b <= 0:
            raise ValueError("radius must be positive")
        self.d, self.b, self.m, self.order = d, float(b), int(m), int(order)

    def __len__(self) -> int:
        return 2 * self.d * self.m ** (self.d - 1)

    @cached_property
    def face_measures(self) -> np.ndarray:
        """Measures of the m^{d-1} cells of one face, shape (m,)*(d-1)."""
        d, m = self.d, self.m
        k = d - 1
        if k == 0:
            return np.array(self.b ** 0 * 1.0)
        half = (m + 1) // 2
        classes = list(itertools.combinations_with_replacement(range(half), k))
        cls = np.array(classes, dtype=float)
        lo = -1.0 + 2.0 * cls / m
        vals = _cell_integral(lo, lo + 2.0 / m, d, self.order) * self.b ** (d - 1)
        table = dict(zip(classes, vals))
        canon = np.minimum(np.arange(m), m - 1 - np.arange(m))
        out = np.empty((m,) * k)
        for idx in itertools.product(range(m), repeat=k):
            out[idx] = table[tuple(sorted(canon[list(idx)]))]
        return out

    def facets(self):
        for face in range(2 * self.d):
            for cell in itertools.product(range(self.m), repeat=self.d - 1):
                yield HypercubicFacet(self.d, face, cell, self.m, self.b)

    @cached_property
    def _arrays(self) -> tuple:
        d, m = self.d, self.m
        k = d - 1
        mids = -1.0 + (2.0 * np.arange(m) + 1.0) / m
        if k:
            y = np.stack(np.meshgrid(*([mids] * k), indexing="ij"), axis=-1).reshape(-1, k)
        else:
            y = np.zeros((1, 0))
        meas_face = np.asarray(self.face_measures).reshape(-1)
        centers, measures, faces = [], [], []
        for face in range(2 * d):
            a, s = _face_axis_sign(face)
            u = np.empty((y.shape[0], d))
            u[:, a] = s
            u[:, [i for i in range(d) if i != a]] = y
            centers.append(self.b * u / np.linalg.norm(u, axis=1, keepdims=True))
            measures.append(meas_face)
            faces.append(np.full(y.shape[0], face))
        return np.concatenate(centers), np.concatenate(measures), np.concatenate(faces)

    @property
    def centers(self) -> np.ndarray:
        return self._arrays[0]

    @property
    def measures(self) -> np.ndarray:
        return self._arrays[1]

    def total_measure(self) -> float:
        return 2 * self.d * math.fsum(np.asarray(self.face_measures).reshape(-1))

    def locate(self, x) -> np.ndarray:
        """Index of the facet whose cell contains the direction of each point."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        d, m = self.d, self.m
        ab = np.abs(x)
        a = np.argmax(ab, axis=1)
        s = np.sign(x[np.arange(len(x)), a])
        face = 2 * a + (s > 0)
        inf = ab[np.arange(len(x)), a]
        idx = np.zeros(len(x), dtype=np.int64)
        for row in range(len(x)):
            free = [i for i in range(d) if i != a[row]]
            y = x[row, free] / inf[row]
            cell = np.clip(np.floor((y + 1.0) * m / 2.0).astype(int), 0, m - 1)
            flat = 0
            for c in cell:
                flat = flat * m + int(c)
            idx[row] = face[row] * m ** (d - 1) + flat
        return idx


def build_mesh(d: int, b: float, m: int, order: int = 16) -> FacetMesh:
    return FacetMesh(d, b, m, order)


@dataclass(frozen=True)
class ConePair:
    """Negative and positive cone approximations of the sector over one facet.

    Both cones are spanned by the facet corners; C(r) is the part of the
    cone with <x, h_unit> >= r.  ``outer = C(r_minus)`` contains the sector
    piece and ``inner = C(b)`` is contained in it.  ``base(r)`` returns the
    vertices of D(r) - r h_unit expressed in an orthonormal basis of the
    hyperplane orthogonal to h_unit.
    """

    h: np.ndarray
    corners: np.ndarray
    r_minus: float
    b: float
    basis: np.ndarray

    @property
    def h_unit(self) -> np.ndarray:
        return self.h / np.linalg.norm(self.h)

    def base(self, r: float) -> np.ndarray:
        hu = self.h_unit
        pts = r * self.corners / (self.corners @ hu)[:, None] - r * hu
        return pts @ self.basis

    def in_cone(self, x, r: float) -> np.ndarray:
        """Membership of points in C(r)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        hu = self.h_unit
        height = x @ hu
        ok = height >= r - 1e-12
        # direction test: project to the level of the corners' hyperplane and
        # check it lies in the convex hull of the rescaled corners
        proj = (x / np.where(height > 0, height, np.inf)[:, None]) @ self.basis
        verts = (self.corners / (self.corners @ hu)[:, None]) @ self.basis
        return ok & (height > 0) & _in_hull(proj, verts)


def _in_hull(points: np.ndarray, verts: np.ndarray) -> np.ndarray:
    k = verts.shape[1]
    if k == 0:
        return np.ones(points.shape[0], dtype=bool)
    if k == 1:
        lo, hi = verts.min(), verts.max()
        return (points[:, 0] >= lo - 1e-12) & (points[:, 0] <= hi + 1e-12)
    from scipy.spatial import Delaunay

    return Delaunay(verts).find_simplex(points, tol=1e-12) >= 0


def _orth_basis(hu: np.ndarray) -> np.ndarray:
    d = hu.size
    q, _ = np.linalg.qr(np.column_stack([hu, np.eye(d)]))
    basis = q[:, 1:d]
    return basis


def cone_pair(facet: HypercubicFacet) -> ConePair:
    """Barycentre tilt h and the cone pair bracketing the sector over the facet."""
    corners = facet.corners()
    h = corners.mean(axis=0)
    nh = np.linalg.norm(h)
    if nh <= 1e-14 * facet.b:
        raise ValueError("degenerate facet")
    hu = h / nh
    r_minus = float(np.min(corners @ hu))
    return ConePair(h=h, corners=corners, r_minus=r_minus, b=facet.b, basis=_orth_basis(hu))


def surface_integral(psi: Callable, region: Callable | None, mesh: FacetMesh, rule: str = "center") -> float:
    """Riemann sum of psi over the facets whose centre lies in ``region``.

    ``psi`` and ``region`` act on (n, d) arrays of points of the sphere of
    radius b.  With ``rule="nodes"`` each selected facet is integrated with
    its Gauss-Legendre nodes instead of the centre value.
    """
    c, w = mesh.centers, mesh.measures
    sel = np.ones(len(c), dtype=bool) if region is None else np.asarray(region(c), dtype=bool)
    if rule == "center":
        vals = np.asarray(psi(c[sel]), dtype=float)
        return math.fsum(vals * w[sel])
    if rule != "nodes":
        raise ValueError("rule must be 'center' or 'nodes'")
    return _node_rule(psi, mesh, np.nonzero(sel)[0])


def _node_rule(psi, mesh: FacetMesh, chosen: np.ndarray, order: int = 4) -> float:
    d, m = mesh.d, mesh.m
    k = d - 1
    per_face = m ** k
    x, wq = np.polynomial.legendre.leggauss(order)
    nodes = np.stack(np.meshgrid(*([x] * k), indexing="ij"), axis=-1).reshape(-1, k) if k else np.zeros((1, 0))
    wts = np.prod(np.stack(np.meshgrid(*([wq] * k), indexing="ij"), axis=-1).reshape(-1, k), axis=1) if k else np.ones(1)
    total = []
    for start in range(0, len(chosen), 4096):
        ids = chosen[start:start + 4096]
        face = ids // per_face
        flat = ids % per_face
        cell = np.array(np.unravel_index(flat, (m,) * k)).T if k else np.zeros((len(ids), 0))
        lo = -1.0 + 2.0 * cell / m
        y = lo[:, None, :] + (nodes[None, :, :] + 1.0) / m
        a = face // 2
        s = np.where(face % 2 == 1, 1.0, -1.0)
        u = np.empty(y.shape[:2] + (d,))
        for row in range(len(ids)):
            free = [i for i in range(d) if i != a[row]]
            u[row, :, a[row]] = s[row]
            u[row][:, free] = y[row]
        nrm = np.linalg.norm(u, axis=-1)
        pts = mesh.b * u / nrm[..., None]
        jac = mesh.b ** k * nrm ** (-d) * (1.0 / m) ** k
        vals = np.asarray(psi(pts.reshape(-1, d)), dtype=float).reshape(pts.shape[:2])
        total.append(float(np.sum(vals * jac * wts[None, :])))
    return math.fsum(total)
