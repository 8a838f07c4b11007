"""Convex-distance lower bounds for the circle walk as N/D grows.

Run with ``python demos/circle_walk_distance.py``.
"""
import numpy as np

from modgauss.models import CircleWalkModel, circle_walk_sample
from modgauss.models.circle import exact_covariance, limit_K
from modgauss.numeric_core import RngStream
from modgauss.smoothing_distance import convex_distance_lower_bound

gen = RngStream(7, 13).generator()
print(f"{'N':>6} {'D':>4} {'N/D':>5} {'halfspace':>10} {'ball':>8} {'box':>8} {'|cov/K - 1|':>12}")
for N, D in [(100, 10), (400, 20), (1600, 40), (6400, 80)]:
    model = CircleWalkModel(N, D)
    y = (circle_walk_sample(model, gen, 20_000) - model.mean()) / model.normalization
    rep = convex_distance_lower_bound(y, limit_K(1.0))
    cov_err = np.max(np.abs(np.diag(exact_covariance(model)) / model.normalization ** 2 / np.diag(limit_K(1.0)) - 1))
    print(f"{N:6d} {D:4d} {N // D:5d} {rep['halfspace']:10.4f} {rep['ball']:8.4f} {rep['box']:8.4f} {cov_err:12.4f}")
