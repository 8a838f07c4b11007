"""Acceptance criteria C1-C13 at their stated tolerances.

Each test records its sub-checks through the ``record`` fixture; the terminal
summary prints one PASS/FAIL line per criterion.  Sub-checks that cannot be
met are kept at the stated tolerance and marked ``xfail(strict=True)``: they
show up as FAIL in the summary and turn the run red if they ever start
passing, so the marker has to be revisited.

All Monte Carlo criteria use seed 7 with one stream id per criterion.

Run as a script (``python tests/test_acceptance.py``) for the same summary
without pytest's capture.
"""
import itertools
import math
import time

import mpmath
import numpy as np
import pytest
from scipy import integrate, special, stats

from modgauss.cumulants import DiscreteMomentOracle, joint_cumulant
from modgauss.depgraph import random_family, spanning_tree_count, verify_tree_bound
from modgauss.largedev import (SphericalSector, ToyModel, UniformCube, cue_sector_density, lattice_conditional_density,
                               tail_probability_formula, tilted_mc_tail)
from modgauss.models.circle import CircleWalkModel, circle_walk_sample, exact_covariance, limit_K
from modgauss.models.cue import cue_laplace_exact, cue_logdet_sample
from modgauss.models.erdos_renyi import (ErdosRenyiModel, Motif, er_cov_leading, er_mean, er_subgraph_counts,
                                         projection, projection_residual)
from modgauss.models.lattice import LatticeWalkModel
from modgauss.models.markov import markov_exact_cov, markov_K, theta_P
from modgauss.numeric_core import RngStream, SpdMatrix, barnes_g, log_barnes_g
from modgauss.smoothing_distance import (EmpiricalFT, GaussianFT, convex_distance_lower_bound,
                                         convex_distance_upper_bound, delta_epsilon, gaussian_regularity_constant,
                                         kernel_ball_mass, kernel_density, kernel_derivative_bound, kernel_fourier,
                                         kernel_fourier_derivative)
from modgauss.sphere_mesh import build_mesh, sphere_area

SEED = 7


def stream(cid: int) -> RngStream:
    return RngStream(SEED, cid)


# ---------------------------------------------------------------------------
# C1
# ---------------------------------------------------------------------------
def _fd_cumulant(atoms, weights, idx):
    """Mixed partial of log E exp<z, Y> at 0, by mpmath numerical differentiation."""
    mp_atoms = [[mpmath.mpf(float(v)) for v in a] for a in atoms]
    mp_w = [mpmath.mpf(float(w)) for w in weights]

    def log_laplace(*z):
        return mpmath.log(mpmath.fsum(w * mpmath.exp(mpmath.fsum(a_i * z_i for a_i, z_i in zip(a, z)))
                                      for a, w in zip(mp_atoms, mp_w)))

    orders = tuple(idx.count(i) for i in range(len(atoms[0])))
    return float(mpmath.diff(log_laplace, (0,) * len(orders), orders))


def test_c1_cumulant_oracle_equivalence(record):
    gen = stream(1).generator()
    t0 = time.perf_counter()
    worst = 0.0
    with mpmath.workdps(30):
        for _ in range(20):
            k = int(gen.integers(1, 5))
            atoms = gen.uniform(-1.5, 1.5, size=(k, 3))
            weights = gen.dirichlet(np.ones(k))
            oracle = DiscreteMomentOracle(atoms, weights)
            for r in range(1, 5):
                for idx in itertools.combinations_with_replacement(range(3), r):
                    got = joint_cumulant(oracle, idx)
                    ref = _fd_cumulant(atoms, weights, list(idx))
                    worst = max(worst, abs(got - ref))
    elapsed = time.perf_counter() - t0
    ok1 = record(1, "max |set-partition - finite difference| <= 1e-6", worst <= 1e-6, f"{worst:.3g}")
    ok2 = record(1, "runtime < 10 s", elapsed < 10, f"{elapsed:.2f} s (includes the mpmath oracle)")
    assert ok1 and ok2


# ---------------------------------------------------------------------------
# C2
# ---------------------------------------------------------------------------
def test_c2_cayley(record):
    counts = {r: spanning_tree_count(r, list(itertools.combinations(range(r), 2))) for r in range(2, 8)}
    ok = all(counts[r] == r ** (r - 2) and isinstance(counts[r], int) for r in counts)
    record(2, "spanning_tree_count(K_r) == r^(r-2), r = 2..7", ok, str(counts))
    assert ok


# ---------------------------------------------------------------------------
# C3
# ---------------------------------------------------------------------------
def test_c3_tree_bound(record):
    gen = stream(3).generator()
    t0 = time.perf_counter()
    checked, violations, tightest = 0, 0, math.inf
    for _ in range(100):
        fam = random_family(gen, max_vertices=6, max_atoms=4)
        for r in (2, 3, 4):
            for row in verify_tree_bound(fam, r):
                checked += 1
                violations += not row["holds"]
                if row["bound"] > 0:
                    tightest = min(tightest, row["margin"] / row["bound"])
    elapsed = time.perf_counter() - t0
    ok1 = record(3, "no violation over 100 families, r = 2..4", violations == 0,
                 f"{checked} cumulants, {violations} violations, smallest relative margin {tightest:.3g}")
    ok2 = record(3, "runtime < 2 min", elapsed < 120, f"{elapsed:.1f} s")
    assert ok1 and ok2


# ---------------------------------------------------------------------------
# C4
# ---------------------------------------------------------------------------
def _mass_errors(d):
    out = {}
    for m in (32, 64):
        exact = sphere_area(d, 1.0)
        out[m] = abs(build_mesh(d, 1.0, m).total_measure() - exact) / exact
    return out


def test_c4_mesh_mass_tolerance(record):
    oks = []
    for d in (2, 3, 4):
        err = _mass_errors(d)[32]
        oks.append(record(4, f"d={d}: relative mass error at m=32 <= 1e-3", err <= 1e-3, f"{err:.3g}"))
    assert all(oks)


@pytest.mark.xfail(strict=True, reason="per-cell 16x16 Gauss-Legendre already reaches rounding level at m=32; "
                                       "no strict decrease is observable at m=64")
def test_c4_mesh_mass_strictly_decreases(record):
    oks = []
    for d in (2, 3, 4):
        e = _mass_errors(d)
        oks.append(record(4, f"d={d}: error strictly decreases from m=32 to m=64", e[64] < e[32],
                          f"{e[32]:.3g} -> {e[64]:.3g} (both at double-precision rounding)"))
    assert all(oks)


# ---------------------------------------------------------------------------
# C5
# ---------------------------------------------------------------------------
def test_c5_toy_tail(record):
    t0 = time.perf_counter()
    toy = ToyModel(64.0, UniformCube(2, 1.0))
    sector = SphericalSector.angular(1.0, 0.0, math.pi / 4)
    formula = tail_probability_formula(64.0, sector, toy, res=64)
    h = np.array([math.cos(math.pi / 8), math.sin(math.pi / 8)])  # centre of the sector base
    est, se = tilted_mc_tail(toy, sector.contains, 64.0, h, 10 ** 6, stream(5))
    elapsed = time.perf_counter() - t0
    ratio = est / formula
    ok1 = record(5, "MC/formula in [0.85, 1.15]", 0.85 <= ratio <= 1.15,
                 f"ratio {ratio:.4f} (MC {est:.5g} +- {se:.2g}, formula {formula:.5g})")
    ok2 = record(5, "runtime < 1 min", elapsed < 60, f"{elapsed:.1f} s")
    assert ok1 and ok2


# ---------------------------------------------------------------------------
# C6
# ---------------------------------------------------------------------------
def _fold(theta):
    """Map an angle to [0, pi/4] through the symmetries of the square lattice."""
    phi = np.mod(theta, math.pi / 2)
    return np.where(phi > math.pi / 4, math.pi / 2 - phi, phi)


def test_c6_lattice_loss_of_symmetry(record):
    t0 = time.perf_counter()
    n, r, walks = 1024, 0.45, 5 * 10 ** 6
    model = LatticeWalkModel(2, n)
    threshold = r * n ** 0.75
    edges = np.linspace(0.0, math.pi / 4, 5)
    counts = np.zeros(4)
    for gen, m in stream(6).chunks(walks, 10 ** 6):
        c = gen.multinomial(n, np.full(4, 0.25), size=m)
        s = (c[:, 1::2] - c[:, 0::2]).astype(float)
        far = s[np.hypot(s[:, 0], s[:, 1]) >= threshold]
        counts += np.histogram(_fold(np.arctan2(far[:, 1], far[:, 0])), bins=edges)[0]
    observed = counts / counts.sum()
    predicted = np.array([integrate.quad(lambda t: lattice_conditional_density(r, t), a, b)[0]
                          for a, b in zip(edges[:-1], edges[1:])])
    predicted /= predicted.sum()
    rel = np.abs(observed / predicted - 1)
    elapsed = time.perf_counter() - t0
    assert model.n == n
    ok1 = record(6, "folded-angle bin fractions within 20% of the F integrals", np.all(rel <= 0.2),
                 f"{int(counts.sum())} walks beyond {threshold:.1f}; observed {np.round(observed, 4).tolist()}, "
                 f"predicted {np.round(predicted, 4).tolist()}, max rel {rel.max():.3g}")
    ok2 = record(6, "runtime < 5 min", elapsed < 300, f"{elapsed:.1f} s")
    assert ok1 and ok2


# ---------------------------------------------------------------------------
# C7
# ---------------------------------------------------------------------------
@pytest.mark.xfail(strict=True, reason="the stated values 1.1154 and 2.1994 are H at r = 0.8; at r = 0.7 "
                                       "H(0) = 1.0981 and H(pi) = 1.6203 (see README)")
def test_c7_h_values(record):
    h0, hpi = cue_sector_density(0.7, 0.0), cue_sector_density(0.7, math.pi)
    alt0, altpi = cue_sector_density(0.8, 0.0), cue_sector_density(0.8, math.pi)
    ok1 = record(7, "H(0.7, 0) = 1.1154 +- 1e-3", abs(h0 - 1.1154) <= 1e-3,
                 f"{h0:.5f}; for reference H(0.8, 0) = {alt0:.5f}")
    ok2 = record(7, "H(0.7, pi) = 2.1994 +- 1e-3", abs(hpi - 2.1994) <= 1e-3,
                 f"{hpi:.5f}; for reference H(0.8, pi) = {altpi:.5f}")
    assert ok1 and ok2


def test_c7_barnes_and_laplace(record):
    t0 = time.perf_counter()
    z = np.linspace(0.05, 6.0, 240)
    resid = np.abs(log_barnes_g(z + 1) - log_barnes_g(z) - special.gammaln(z))
    ok1 = record(7, "Barnes G(z+1) = Gamma(z) G(z) residual <= 1e-9", resid.max() <= 1e-9,
                 f"max log-residual {resid.max():.3g} on [0.05, 6]")
    x = cue_logdet_sample(32, stream(7).generator(), 20_000)
    mc = float(np.mean(np.exp(0.5 * x[:, 0] + 0.5 * x[:, 1])))
    exact = cue_laplace_exact(32, 0.5, 0.5)
    rel = abs(mc / exact - 1)
    ok2 = record(7, "cue_laplace_exact vs MC (n=32, 2e4, z=(0.5,0.5)) within 2%", rel <= 0.02,
                 f"exact {exact:.5f}, MC {mc:.5f}, rel {rel:.3g}")
    elapsed = time.perf_counter() - t0
    ok3 = record(7, "runtime < 3 min", elapsed < 180, f"{elapsed:.1f} s")
    assert barnes_g(1.0) == pytest.approx(1.0)
    assert ok1 and ok2 and ok3


# ---------------------------------------------------------------------------
# C8
# ---------------------------------------------------------------------------
def test_c8_circle_covariance_decay(record):
    K = limit_K(1.0)
    Ds = np.array([10, 20, 40, 80])
    defects = []
    for D in Ds:
        model = CircleWalkModel(1000, int(D))
        defects.append(np.max(np.abs(exact_covariance(model) / ((2 * D - 1) * model.N) - K)))
    slope = np.polyfit(np.log(Ds), np.log(defects), 1)[0]
    assert record(8, "slope of log defect vs log D is -1 +- 0.2", abs(slope + 1) <= 0.2,
                  f"slope {slope:.3f}, defects {[f'{v:.3g}' for v in defects]}")


@pytest.mark.xfail(strict=True, reason="noise-limited: the relative standard error of a 200-sample variance is "
                                       "about 10%, and at seed 7 the K11 estimate lands 1.4 standard errors out "
                                       "(tests/test_models.py checks the same estimator at 5000 repetitions)")
def test_c8_circle_covariance_mc(record):
    K = limit_K(1.0)
    model = CircleWalkModel(2000, 50)
    s = circle_walk_sample(model, stream(8).generator(), 200)
    y = (s - model.mean()) / math.sqrt((2 * model.D - 1) * model.N)
    emp = y.T @ y / len(y)
    scale = math.sqrt(K[0, 0] * K[1, 1])
    rel = [abs(emp[0, 0] / K[0, 0] - 1), abs(emp[1, 1] / K[1, 1] - 1), abs(emp[0, 1] - K[0, 1]) / scale]
    assert record(8, "MC (N=2000, D=50, 200 reps) entrywise within 15%", max(rel) <= 0.15,
                  f"rel errors (11, 22, 12/sqrt(K11 K22)) {[f'{v:.3f}' for v in rel]}")


# ---------------------------------------------------------------------------
# C9
# ---------------------------------------------------------------------------
BIRTH_DEATH = np.array([[0.6, 0.4, 0.0],
                        [0.2, 0.5, 0.3],
                        [0.0, 0.4, 0.6]])


def test_c9_markov(record):
    K = markov_K(BIRTH_DEATH)
    ns = [64 * 2 ** k for k in range(7)]
    scaled = np.array([n * np.max(np.abs(markov_exact_cov(BIRTH_DEATH, n) / n - K)) for n in ns])
    variation = scaled.max() / scaled.min() - 1
    ok1 = record(9, "n |cov_n/n - K|_inf bounded, variation <= 25% over n = 64..4096", variation <= 0.25,
                 f"values {np.round(scaled, 6).tolist()}, variation {variation:.3g}")
    colsum = np.abs(K.sum(axis=0)).max()
    ok2 = record(9, "sum_i K_ij = 0 to 1e-12", colsum <= 1e-12, f"{colsum:.3g}")
    lam = np.sort(np.abs(np.linalg.eigvals(BIRTH_DEATH)))[::-1][1]
    diff = abs(theta_P(BIRTH_DEATH) - lam)
    ok3 = record(9, "theta_P = |lambda_2| to 1e-10", diff <= 1e-10, f"|lambda_2| = {lam:.12f}, diff {diff:.3g}")
    assert ok1 and ok2 and ok3


# ---------------------------------------------------------------------------
# C10
# ---------------------------------------------------------------------------
@pytest.fixture(scope="module")
def c10():
    gen = stream(10).generator()
    rows, kol, resid = [], [], []
    for n in (30, 60, 120):
        model = ErdosRenyiModel(n, 0.3, (Motif.edge(), Motif.triangle()))
        counts = er_subgraph_counts(model, gen, 2000)
        c = counts - er_mean(model)
        emp = c.T @ c / len(c) / n ** (2 * model.k - 2)
        lead = er_cov_leading(model) / n ** (2 * model.k - 2)
        vals, vecs = np.linalg.eigh(emp)
        u = vecs[:, -1]
        rows.append(abs(vals[-1] / float(u @ lead @ u) - 1))
        kol.append(stats.kstest(projection(model, counts), "norm").statistic)
        resid.append(n * projection_residual(model, counts))
    return rows, kol, resid


def test_c10_erdos_renyi(record, c10):
    rows, _, resid = c10
    ok1 = record(10, "top-eigenvector component within 15% at n = 30, 60, 120", max(rows) <= 0.15,
                 f"rel errors {[f'{v:.3f}' for v in rows]}")
    variation = max(resid) / min(resid) - 1
    ok2 = record(10, "n E|Y - Y_w w|^2 bounded, variation <= 50%", variation <= 0.5,
                 f"{[f'{v:.4f}' for v in resid]}, variation {variation:.3g}")
    assert ok1 and ok2


@pytest.mark.xfail(strict=True, reason="noise-limited: with 2000 graphs the KS statistic has a null level near "
                                       "0.02, above the true distance at n = 60 and 120 "
                                       "(tests/test_models.py shows the decrease with 20000 graphs)")
def test_c10_kolmogorov_decreasing(record, c10):
    kol = c10[1]
    assert record(10, "d_Kol(Y_w, N(0,1)) strictly decreasing in n", kol[0] > kol[1] > kol[2],
                  f"{[f'{v:.4f}' for v in kol]}; KS null median at 2000 samples is about "
                  f"{stats.kstwo.median(2000):.4f}")


# ---------------------------------------------------------------------------
# C11
# ---------------------------------------------------------------------------
def _kernel_total_mass(d):
    """(int g)^d with g the one-coordinate factor of the kernel, by panelled adaptive quadrature."""
    m = 2 * d + 2
    rho0 = kernel_density(d, np.zeros(d))
    factor = lambda t: kernel_density(d, np.r_[t, np.zeros(d - 1)]) / rho0 ** ((d - 1) / d)
    panel = m * math.pi  # zeros of the factor
    L = 400 * panel
    half = sum(integrate.quad(factor, k * panel, (k + 1) * panel, epsabs=1e-15, epsrel=1e-13)[0]
               for k in range(400))
    # tail beyond L: |factor| <= rho0^{1/d} (m/t)^m
    tail = rho0 ** (1 / d) * m ** m * L ** (1 - m) / (m - 1)
    return (2 * half) ** d, tail


def test_c11_kernel_suite(record):
    oks = []
    for d in (1, 2, 3):
        total, tail = _kernel_total_mass(d)
        oks.append(record(11, f"d={d}: integral of rho = 1 +- 1e-6", abs(total - 1) <= 1e-6 - tail,
                          f"{total:.12f} (tail bound {tail:.1g})"))
        mass = kernel_ball_mass(d)
        oks.append(record(11, f"d={d}: ball mass >= 1 - 2/(9 pi)", mass >= 1 - 2 / (9 * math.pi),
                          f"{mass:.6f} vs {1 - 2 / (9 * math.pi):.6f}"))
        gen = stream(11).generator(d)
        probes = gen.uniform(-3, 3, size=(4000, d))
        probes = probes[np.max(np.abs(probes), axis=1) > 1][:1000]
        worst = np.max(np.abs(kernel_fourier(d, probes)))
        oks.append(record(11, f"d={d}: |rho_hat| <= 1e-8 outside [-1,1]^d ({len(probes)} probes)",
                          len(probes) == 1000 and worst <= 1e-8, f"max {worst:.3g}"))
        grid = np.array(list(itertools.product(np.linspace(-1, 1, 41 if d < 3 else 21), repeat=d)))
        ratio = 0.0
        for w in range(3):
            for beta in itertools.product(range(w + 1), repeat=d):
                if sum(beta) != w:
                    continue
                vals = np.abs(kernel_fourier_derivative(d, beta, grid))
                ratio = max(ratio, vals.max() / kernel_derivative_bound(d, w))
        oks.append(record(11, f"d={d}: derivative bound holds for |beta| <= 2", ratio <= 1,
                          f"max |d^beta rho_hat| / bound = {ratio:.3g}"))
    assert all(oks)


# ---------------------------------------------------------------------------
# C12
# ---------------------------------------------------------------------------
def _c12_bounds():
    gen = stream(12).generator()
    x = gen.standard_normal((10 ** 5, 2))
    K = SpdMatrix(np.eye(2))
    lows = [convex_distance_lower_bound(x[:m], K)["lower_bound"] for m in (10 ** 3, 10 ** 4, 10 ** 5)]
    delta = delta_epsilon(EmpiricalFT(x), GaussianFT(K), 0.4, 2, panels=16)
    upper = convex_distance_upper_bound(delta, gaussian_regularity_constant(K), 0.4, 2)
    self_delta = delta_epsilon(EmpiricalFT(x[:2000]), EmpiricalFT(x[:2000]), 0.4, 2)
    return lows, delta, upper, self_delta


@pytest.fixture(scope="module")
def c12():
    return _c12_bounds()


def test_c12_distance_coherence(record, c12):
    lows, delta, upper, self_delta = c12
    ok1 = record(12, "Delta_eps(nu, nu) = 0 exactly", self_delta == 0.0, repr(self_delta))
    ok2 = record(12, "upper bound >= lower bound (n = 1e5)", upper >= lows[-1],
                 f"upper {upper:.4g} (Delta_eps {delta:.3g}), lower {lows[-1]:.4g}")
    ok3 = record(12, "lower bound <= 0.1 (n = 1e5)", lows[-1] <= 0.1, f"{lows[-1]:.4g}")
    ok4 = record(12, "lower bound decreases over n = 1e3, 1e4, 1e5", lows[0] > lows[1] > lows[2],
                 f"{[f'{v:.4g}' for v in lows]}")
    assert ok1 and ok2 and ok3 and ok4


@pytest.mark.xfail(strict=True, reason="the smoothing constant 2/(1-4/(9 pi)) (d+1)^((d+1)/2) and the R eps term "
                                       "keep the computable upper bound far above 0.1 at desk-scale n")
def test_c12_upper_bound_small(record, c12):
    lows, delta, upper, _ = c12
    assert record(12, "upper bound <= 0.1 (n = 1e5)", upper <= 0.1,
                  f"{upper:.4g}; the R eps term alone is "
                  f"{convex_distance_upper_bound(0.0, gaussian_regularity_constant(np.eye(2)), 0.4, 2):.4g}")


# ---------------------------------------------------------------------------
# C13
# ---------------------------------------------------------------------------
def test_c13_superspeed(record):
    K = SpdMatrix(limit_K(1.0))
    gen = stream(13).generator()
    grid = [(100, 10), (400, 20), (1600, 40), (6400, 80)]
    lows = []
    for N, D in grid:
        model = CircleWalkModel(N, D)
        s = circle_walk_sample(model, gen, 20_000)
        y = (s - model.mean()) / math.sqrt((2 * D - 1) * N)
        lows.append(convex_distance_lower_bound(y, K)["lower_bound"])
    ok = record(13, "lower bound decreases as N/D = 10, 20, 40, 80", all(a > b for a, b in zip(lows, lows[1:])),
                f"{[f'{v:.4f}' for v in lows]}; sqrt(D/N) = {[f'{math.sqrt(D / N):.3f}' for N, D in grid]}")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-rxX"]))
