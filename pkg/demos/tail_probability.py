"""Sector tail probabilities: asymptotic formula against tilted Monte Carlo.

A single tilt aimed at the middle of a wide arc gives importance weights
that vary like exp(t b (1 - cos(angle to the tilt))) along the arc, so for
large t the estimate is driven by rare draws.  The arc is therefore split
into pieces, each sampled with its own tilt, and the pieces are summed.

Run with ``python demos/tail_probability.py``.
"""
import math

import numpy as np

from modgauss.largedev import (LatticeWalk4, SphericalSector, ToyModel, UniformCube, tail_probability_formula,
                               tilted_mc_tail)
from modgauss.models import LatticeWalkModel
from modgauss.numeric_core import RngStream

def split_estimate(model, t, b, K_inv_sqrt, theta1, theta2, pieces, n_samples, seed):
    """Tilted Monte Carlo over ``pieces`` equal sub-arcs; returns (estimate, stderr)."""
    edges = np.linspace(theta1, theta2, pieces + 1)
    total, var = 0.0, 0.0
    for k, (a, c) in enumerate(zip(edges[:-1], edges[1:])):
        sub = SphericalSector.angular(b, a, c, np.linalg.inv(K_inv_sqrt @ K_inv_sqrt))
        mid = 0.5 * (a + c)
        h = b * K_inv_sqrt @ np.array([math.cos(mid), math.sin(mid)])
        est, se = tilted_mc_tail(model, sub.contains, t, h, n_samples // pieces, RngStream(seed, k))
        total, var = total + est, var + se * se
    return total, math.sqrt(var)


# toy model: sqrt(t) G + Y with Y uniform on the square
sector = SphericalSector.angular(1.0, 0.0, math.pi / 4)
print("toy model, sector b=1, angles [0, pi/4]")
print(f"{'t_n':>6} {'formula':>12} {'tilted MC':>12} {'stderr':>10} {'ratio':>7}")
for t in (16.0, 64.0, 256.0):
    toy = ToyModel(t, UniformCube(2, 1.0))
    formula = tail_probability_formula(t, sector, toy)
    est, se = split_estimate(toy, t, 1.0, np.eye(2), 0.0, math.pi / 4, 16, 1_600_000, int(t))
    print(f"{t:6.0f} {formula:12.4e} {est:12.4e} {se:10.2e} {est / formula:7.3f}")

# simple walk on Z^2: X_n = S_n / n^{1/4}, t_n = sqrt(n), K = I/2
print("\nlattice walk, sector b=0.8, angles [0, pi/4]")
print(f"{'n':>6} {'formula':>12} {'tilted MC':>12} {'stderr':>10} {'ratio':>7}")
for n in (256, 1024, 4096):
    model = LatticeWalkModel(2, n)
    sec = SphericalSector.angular(0.8, 0.0, math.pi / 4, model.K)
    formula = tail_probability_formula(model.t_n, sec, LatticeWalk4(2))
    est, se = split_estimate(model, model.t_n, 0.8, np.eye(2) * math.sqrt(2), 0.0, math.pi / 4, 16, 1_600_000, n)
    print(f"{n:6d} {formula:12.4e} {est:12.4e} {se:10.2e} {est / formula:7.3f}")
