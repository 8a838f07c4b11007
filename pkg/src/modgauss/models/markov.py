"""Empirical measures of finite ergodic Markov chains."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MarkovModel",
    "markov_empirical",
    "markov_K",
    "markov_K_fundamental",
    "markov_exact_cov",
    "markov_third_tensor",
    "theta_P",
]


def _stationary(P: np.ndarray) -> np.ndarray:
    d = P.shape[0]
    A = np.vstack([P.T - np.eye(d), np.ones((1, d))])
    rhs = np.zeros(d + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    return pi


def _is_ergodic(P: np.ndarray) -> bool:
    """P^m > 0 entrywise for some m <= (d-1)^2 + 1."""
    d = P.shape[0]
    B = (P > 0).astype(np.int64)
    M = B.copy()
    for _ in range((d - 1) ** 2 + 1):
        if M.all():
            return True
        M = np.minimum(M @ B, 1)
    return bool(M.all())


@dataclass(frozen=True, eq=False)
class MarkovModel:
    """Chain on {0..d-1} started from its stationary law.

    S_n = n (pi_n - pi) is mod-Gaussian at scale n^{1/3} with t_n = n^{1/3}
    and limiting covariance :func:`markov_K`.
    """

    P: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError("transition matrix must be square")
        if np.any(P < 0) or np.max(np.abs(P.sum(axis=1) - 1)) > 1e-12:
            raise ValueError("rows of P must be probability vectors")
        if not _is_ergodic(P):
            raise ValueError("transition matrix is not ergodic")
        P.setflags(write=False)
        object.__setattr__(self, "P", P)
        pi = _stationary(P)
        pi.setflags(write=False)
        object.__setattr__(self, "pi", pi)

    @property
    def d(self) -> int:
        return self.P.shape[0]

    @property
    def reversible(self) -> bool:
        F = self.pi[:, None] * self.P
        return bool(np.allclose(F, F.T, atol=1e-13))


def _as_model(P) -> MarkovModel:
    return P if isinstance(P, MarkovModel) else MarkovModel(P)


def markov_empirical(model: MarkovModel, n: int, rng, size: int | None = None, trajectory: bool = False):
    """S_n = counts - n pi for ``size`` stationary chains of length n; with ``trajectory`` the states of one chain."""
    m = 1 if size is None else size
    cum = np.cumsum(model.P, axis=1)
    cum[:, -1] = 1.0
    state = np.searchsorted(np.cumsum(model.pi), rng.random(m), side="right").clip(0, model.d - 1)
    counts = np.zeros((m, model.d))
    rows = np.arange(m)
    path = [state.copy()] if trajectory else None
    for step in range(n):
        counts[rows, state] += 1
        if step == n - 1:
            break
        u = rng.random(m)
        state = (u[:, None] >= cum[state]).sum(axis=1).clip(0, model.d - 1)
        if trajectory:
            path.append(state.copy())
    if trajectory:
        return np.array(path)[:, 0]
    out = counts - n * model.pi
    return out[0] if size is None else out


def markov_K(P, tol: float = 1e-14, max_terms: int = 100_000) -> np.ndarray:
    """lim cov(S_n)/n = D - pi pi^T + sum_{k>=1} (D R^k + (D R^k)^T), R = P - 1 pi."""
    model = _as_model(P)
    pi = model.pi
    Dm = np.diag(pi)
    R = model.P - np.outer(np.ones(model.d), pi)
    K = Dm - np.outer(pi, pi)
    Rk = R.copy()
    for _ in range(max_terms):
        if np.max(np.abs(Rk)) < tol:
            break
        T = Dm @ Rk
        K = K + T + T.T
        Rk = Rk @ R
    else:
        raise ValueError("series did not converge")
    return K


def markov_K_fundamental(P) -> np.ndarray:
    """Same limit through the fundamental matrix Z = (I - P + 1 pi)^{-1}."""
    model = _as_model(P)
    pi = model.pi
    Pi = np.outer(np.ones(model.d), pi)
    Z = np.linalg.inv(np.eye(model.d) - model.P + Pi)
    Dm = np.diag(pi)
    A = Dm @ (Z - Pi)
    return A + A.T - Dm + np.outer(pi, pi)


def markov_exact_cov(P, n: int) -> np.ndarray:
    """cov(S_n) for the stationary chain: n (D - pi pi^T) + sum_{k=1}^{n-1} (n-k)(D R^k + transpose)."""
    model = _as_model(P)
    pi = model.pi
    Dm = np.diag(pi)
    R = model.P - np.outer(np.ones(model.d), pi)
    C = n * (Dm - np.outer(pi, pi))
    Rk = R.copy()
    for k in range(1, n):
        T = (n - k) * (Dm @ Rk)
        C = C + T + T.T
        Rk = Rk @ R
        if np.max(np.abs(Rk)) < 1e-300:
            break
    return C


def theta_P(P) -> float:
    """sqrt of the largest modulus among non-unit eigenvalues of P D^{-1} P^T D."""
    model = _as_model(P)
    Dm = np.diag(model.pi)
    M = model.P @ np.diag(1 / model.pi) @ model.P.T @ Dm
    ev = np.linalg.eigvals(M)
    i = int(np.argmin(np.abs(ev - 1)))
    rest = np.delete(ev, i)
    return float(math.sqrt(np.max(np.abs(rest)))) if rest.size else 0.0


def markov_third_tensor(P, M: int = 50) -> tuple:
    """sum_{|a|,|b| <= M} kappa(1[X_0=i], 1[X_a=j], 1[X_b=k]) for the two-sided stationary chain.

    Returns (tensor, tail) where tail = M-th power of theta_P is the geometric
    rate at which neglected terms decay.
    """
    model = _as_model(P)
    d, pi = model.d, model.pi
    powers = [np.eye(d)]
    for _ in range(2 * M):
        powers.append(powers[-1] @ model.P)
    Dm = np.diag(pi)

    def pair(s, t):
        """E[1[X_s=i] 1[X_t=j]] as a (d, d) array."""
        if s <= t:
            return Dm @ powers[t - s]
        return (Dm @ powers[s - t]).T

    L = np.zeros((d, d, d))
    for a in range(-M, M + 1):
        for b in range(-M, M + 1):
            times = (0, a, b)
            order = sorted(range(3), key=lambda q: times[q])
            t0, t1, t2 = (times[q] for q in order)
            joint = np.einsum("x,xy,yz->xyz", pi, powers[t1 - t0], powers[t2 - t1])
            joint = np.transpose(joint, np.argsort(order))
            e2_01 = pair(0, a)
            e2_02 = pair(0, b)
            e2_12 = pair(a, b)
            L += (joint
                  - pi[:, None, None] * e2_12[None, :, :]
                  - pi[None, :, None] * e2_02[:, None, :]
                  - pi[None, None, :] * e2_01[:, :, None]
                  + 2 * np.einsum("i,j,k->ijk", pi, pi, pi))
    return L, theta_P(model) ** M
