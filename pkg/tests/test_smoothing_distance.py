import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from modgauss.numeric_core import hermite
from modgauss.smoothing_distance import (EmpiricalFT, GaussianFT, KernelFT, ModifiedGaussianFT, SmoothingKernel,
                                         berry_esseen_constant, convex_distance_lower_bound,
                                         convex_distance_upper_bound, delta_epsilon, empirical_ft_derivative,
                                         exp_polynomial_residue, gaussian_regularity_constant, kernel_ball_mass,
                                         kernel_density, kernel_fourier, kernel_fourier_derivative,
                                         kolmogorov_distance_1d, lattice_walk_residue, residue_sup_M)


# -- kernel --------------------------------------------------------------------
def _kernel_ft_by_quadrature(zeta, m=4):
    # 2 int_0^inf rho(x) cos(zeta x) dx, rho(x) = sinc(x/m)^m / Z with Z from the zeta = 0 case
    f = lambda x: np.sinc(x / (m * math.pi)) ** m
    val = lambda z: integrate.quad(f, 0, np.inf, weight="cos", wvar=z, limit=400, limlst=200)[0] if z else \
        integrate.quad(f, 0, np.inf, limit=400)[0]
    return val(zeta) / val(0.0)


@pytest.mark.parametrize("zeta", [0.0, 0.1, 0.37, 0.5, 0.8, 0.95])
def test_kernel_fourier_matches_quadrature(zeta):
    assert kernel_fourier(1, np.array([[zeta]])) == pytest.approx(_kernel_ft_by_quadrature(zeta), abs=1e-7)


def test_kernel_fourier_support_and_normalization():
    assert kernel_fourier(2, np.zeros((1, 2))) == pytest.approx(1.0)
    assert kernel_fourier(2, np.array([[1.0, 0.0]])) == 0.0
    assert kernel_fourier(3, np.array([[0.2, 1.3, 0.0]])) == 0.0
    total = integrate.quad(lambda x: kernel_density(1, np.array([[x]])), -np.inf, np.inf, limit=400)[0]
    assert total == pytest.approx(1.0, abs=1e-7)


@given(st.integers(1, 3), st.floats(-0.9, 0.9), st.integers(1, 3))
@settings(max_examples=40)
def test_kernel_fourier_derivative_finite_difference(d, x, j):
    h = 1e-4
    m = 2 * d + 2
    # the transform is a piecewise polynomial with knots at -1 + 2k/m
    assume(min(abs(x + 1 - 2 * k / m) for k in range(m + 1)) > 10 * h)
    beta = (j,) + (0,) * (d - 1)
    lower = (j - 1,) + (0,) * (d - 1)
    pt = lambda s: np.array([[x + s] + [0.1] * (d - 1)])
    fd = (kernel_fourier_derivative(d, lower, pt(h)) - kernel_fourier_derivative(d, lower, pt(-h))) / (2 * h)
    got = kernel_fourier_derivative(d, beta, pt(0.0))
    assert got[0] == pytest.approx(fd[0], rel=1e-5, abs=1e-6)


def test_scaled_kernel():
    k = SmoothingKernel(2, 0.5)
    assert k.scale == pytest.approx(6 ** 1.5 / 0.5)
    assert k.fourier(np.array([[k.scale, 0.0]])) == 0.0
    kf = KernelFT(2, 0.5)
    assert kf.value(np.array([[3.0, -2.0]]))[0] == pytest.approx(k.fourier(np.array([[3.0, -2.0]])))


def test_kernel_ball_mass_monotone():
    small, default, large = kernel_ball_mass(1, 2.0), kernel_ball_mass(1), kernel_ball_mass(1, 40.0)
    assert 0 < small < default < large < 1
    ref = integrate.quad(lambda x: kernel_density(1, np.array([[x]])), -8, 8, limit=200)[0]
    assert default == pytest.approx(ref, abs=1e-9)


# -- transforms ------------------------------------------------------------------
def test_gaussian_derivatives_are_hermite_products():
    g = GaussianFT(np.eye(2))
    z = np.array([[0.3, -1.1], [1.7, 0.4]])
    ders = g.derivatives(z, 3)
    base = np.exp(-0.5 * np.sum(z ** 2, axis=1))
    for (a, b), v in ders.items():
        ref = (-1) ** (a + b) * hermite(a, z[:, 0]) * hermite(b, z[:, 1]) * base
        assert np.allclose(v, ref, atol=1e-13)


@given(st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=30)
def test_correlated_gaussian_derivative_finite_difference(x, y):
    K = np.array([[1.5, 0.4], [0.4, 0.7]])
    g = GaussianFT(K)
    h = 1e-5
    z = np.array([[x, y]])
    d = g.derivatives(z, 2)
    fd = (g.derivatives(z + [0, h], 2)[(1, 0)] - g.derivatives(z - [0, h], 2)[(1, 0)]) / (2 * h)
    assert d[(1, 1)][0] == pytest.approx(fd[0], abs=1e-7)


def test_modified_gaussian():
    m = ModifiedGaussianFT(np.eye(1), [0.5], 4.0)
    z = np.array([[0.8]])
    assert m.value(z)[0] == pytest.approx(math.exp(-0.32) * (1 + 0.2j))
    h = 1e-6
    fd = (m.value(z + h)[0] - m.value(z - h)[0]) / (2 * h)
    assert m.derivatives(z, 1)[(1,)][0] == pytest.approx(fd, abs=1e-8)


def test_empirical_ft_of_a_point_mass():
    x0 = np.array([[0.7, -0.2]])
    z = np.array([1.3, 0.4])
    e = np.exp(1j * x0[0] @ z)
    assert empirical_ft_derivative(x0, (0, 0), z) == pytest.approx(e)
    assert empirical_ft_derivative(x0, (2, 1), z) == pytest.approx((0.7j) ** 2 * (-0.2j) * e)
    assert empirical_ft_derivative([1.0], (1,), [0.0]) == pytest.approx(1j)
    with pytest.raises(ValueError):
        empirical_ft_derivative([1.0], (3,), [0.0])
    assert EmpiricalFT(np.zeros((5, 1))).value([[2.0]])[0] == pytest.approx(1.0)


# -- distance ----------------------------------------------------------------------
def test_delta_epsilon_is_a_pseudometric():
    a, b, c = (GaussianFT(np.eye(1) * s) for s in (1.0, 1.3, 2.0))
    eps = 0.4
    assert delta_epsilon(a, a, eps, 1) == 0.0
    ab, ba = delta_epsilon(a, b, eps, 1), delta_epsilon(b, a, eps, 1)
    assert ab == pytest.approx(ba) and ab > 0
    assert delta_epsilon(a, c, eps, 1) <= ab + delta_epsilon(b, c, eps, 1) + 1e-12
    with pytest.raises(ValueError):
        delta_epsilon(a, b, 0.0, 1)


def test_delta_epsilon_closed_form():
    # beta = 0 term for N(0,1) vs N(0,4) over the whole line is int |e^{-x^2/2} - e^{-2 x^2}| = sqrt(2 pi) - sqrt(pi/2)
    _, per = delta_epsilon(GaussianFT(np.eye(1)), GaussianFT(np.eye(1) * 4), 0.1, 1, order=200, return_all=True)
    assert per[(0,)] == pytest.approx(math.sqrt(2 * math.pi) - math.sqrt(math.pi / 2), rel=1e-9)


@pytest.mark.parametrize("d,expected", [(1, 2 * math.sqrt(2)), (2, 2 * math.sqrt(3)), (3, 4.0)])
def test_gaussian_regularity_constant(d, expected):
    assert gaussian_regularity_constant(np.eye(d)) == pytest.approx(expected)
    assert gaussian_regularity_constant(np.eye(d) / 4) == pytest.approx(2 * expected)


def test_upper_bound_arithmetic():
    factor = 2 / (1 - 4 / (9 * math.pi))
    assert convex_distance_upper_bound(0.0, 1.0, 0.1, 2) == pytest.approx(factor * 0.1)
    assert convex_distance_upper_bound(1.0, 0.0, 0.1, 2) == pytest.approx(factor * 3 ** 1.5)
    for eps in (0.0, 1 / math.sqrt(6), 1.0):
        with pytest.raises(ValueError):
            convex_distance_upper_bound(0.1, 1.0, eps, 2)


def test_berry_esseen_constant_monotone():
    K = np.eye(2)
    base = berry_esseen_constant(2, K, 1.0, 1.0)
    assert berry_esseen_constant(2, K, 2.0, 1.0) > base > berry_esseen_constant(2, K, 1.0, 2.0)
    assert berry_esseen_constant(2, np.diag([2.0, 0.5]), 1.0, 1.0) > base
    for bad in [(1, np.eye(1), 1.0, 1.0), (2, K, 0.0, 1.0), (2, K, 1.0, -1.0)]:
        with pytest.raises(ValueError):
            berry_esseen_constant(*bad)


def test_residue_sup_of_constant_one():
    M, step = residue_sup_M(exp_polynomial_residue([]), 0.1, 2, points=9)
    assert M == pytest.approx(1.0) and step == pytest.approx(2 * 0.1 * 6 ** 1.5 / 8)


def _quartic_tensor():
    L = np.zeros((2,) * 4)
    for idx in np.ndindex(L.shape):
        if all(idx.count(i) % 2 == 0 for i in (0, 1)):
            L[idx] = -0.25
    return L


def test_lattice_residue_converges_to_quartic_limit():
    limit = exp_polynomial_residue([(4, _quartic_tensor())])
    z = np.array([[0.6, -0.9], [1.2, 0.3]])
    ref = np.exp(-(z[:, 0] ** 4 + z[:, 1] ** 4 + 6 * (z[:, 0] * z[:, 1]) ** 2) / 96)
    lim = limit(z, 3)
    assert np.allclose(lim[(0, 0)], ref, rtol=1e-13)
    errs = []
    for n in (10 ** 4, 10 ** 6, 10 ** 8):
        fin = lattice_walk_residue(n)(z, 3)
        errs.append(max(float(np.max(np.abs(fin[k] - lim[k]))) for k in lim))
    assert errs[0] > errs[1] > errs[2] and errs[2] < 1e-3


# -- practical bounds ----------------------------------------------------------------
def test_lower_bound_of_a_point_mass():
    rep = convex_distance_lower_bound(np.zeros((100, 2)), families=("halfspace", "ball", "box"))
    assert rep["halfspace"] == pytest.approx(0.5)
    assert rep["lower_bound"] >= 0.5


def test_lower_bound_gaussian_and_shifted():
    gen = np.random.default_rng(2)
    x = gen.standard_normal((20000, 2))
    assert convex_distance_lower_bound(x)["lower_bound"] < 0.03
    shifted = convex_distance_lower_bound(x + [1.0, 0.0])["halfspace"]
    assert shifted == pytest.approx(special.ndtr(0.5) - special.ndtr(-0.5), abs=0.02)
    with pytest.raises(ValueError):
        convex_distance_lower_bound(x, families=("spiral",))


def test_kolmogorov_1d():
    assert kolmogorov_distance_1d([0.0], special.ndtr) == pytest.approx(0.5)
    assert kolmogorov_distance_1d([-1.0, 1.0], special.ndtr) == pytest.approx(special.ndtr(1.0) - 0.5)
    with pytest.raises(ValueError):
        kolmogorov_distance_1d([], special.ndtr)
