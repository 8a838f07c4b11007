"""Simple random walk on Z^d."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..cumulants import DiscreteMomentOracle
from ..largedev import LatticeWalk4

__all__ = ["LatticeWalkModel", "lattice_walk_sample", "lattice_walk_trajectory", "lattice_step_oracle"]


@dataclass(frozen=True)
class LatticeWalkModel:
    """n uniform steps on {+-e_1, ..., +-e_d}.

    Mod-Gaussian data: X_n = S_n / n^{1/4}, t_n = sqrt(n), K = I/d and the
    residue is :class:`~modgauss.largedev.LatticeWalk4`.
    """

    d: int
    n: int

    def __post_init__(self):
        if self.d < 1 or self.n < 1:
            raise ValueError("need d >= 1 and n >= 1")

    @property
    def steps(self) -> np.ndarray:
        e = np.eye(self.d)
        return np.concatenate([np.stack([-e[i], e[i]]) for i in range(self.d)])

    def mean(self) -> np.ndarray:
        return np.zeros(self.d)

    def cov(self) -> np.ndarray:
        return np.eye(self.d) * self.n / self.d

    @property
    def t_n(self) -> float:
        return math.sqrt(self.n)

    @property
    def K(self) -> np.ndarray:
        return np.eye(self.d) / self.d

    @property
    def scale(self) -> float:
        return self.n ** 0.25

    def residue(self) -> LatticeWalk4:
        return LatticeWalk4(self.d)

    def sample_tilted(self, h, size: int, rng) -> tuple:
        """Draws of X_n = S_n / n^{1/4} under the law tilted by e^{<h, X_n>}, with log dP/dQ.

        The tilt factorizes over steps, so the tilted walk has iid steps with
        probabilities proportional to e^{<h, s>/n^{1/4}}.
        """
        h = np.asarray(h, dtype=float).ravel()
        e = self.steps @ (h / self.scale)
        w = np.exp(e - e.max())
        probs = w / w.sum()
        counts = rng.multinomial(self.n, probs, size=size)
        x = (counts[:, 1::2] - counts[:, 0::2]) / self.scale
        log_mgf = self.n * (e.max() + math.log(float(np.mean(np.exp(e - e.max())))))
        return x, log_mgf - x @ h


def lattice_step_oracle(d: int) -> DiscreteMomentOracle:
    """Exact moments of a single step, for cumulant checks."""
    return DiscreteMomentOracle(LatticeWalkModel(d, 1).steps)


def lattice_walk_sample(model: LatticeWalkModel, rng, size: int | None = None) -> np.ndarray:
    """Endpoints S_n, drawn exactly through the multinomial counts of the 2d directions."""
    m = 1 if size is None else size
    counts = rng.multinomial(model.n, np.full(2 * model.d, 1.0 / (2 * model.d)), size=m)
    s = counts[:, 1::2] - counts[:, 0::2]
    return s[0] if size is None else s


def lattice_walk_trajectory(model: LatticeWalkModel, rng) -> np.ndarray:
    """Positions S_0 = 0, S_1, ..., S_n of one walk, shape (n+1, d)."""
    idx = rng.integers(0, 2 * model.d, size=model.n)
    steps = model.steps[idx].astype(np.int64)
    return np.vstack([np.zeros((1, model.d), dtype=np.int64), np.cumsum(steps, axis=0)])
