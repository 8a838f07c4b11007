import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from numpy.polynomial import hermite_e
from scipy import special

from modgauss.numeric_core import (Jet, MultiIndex, RngStream, SpdMatrix, barnes_g, barnes_g_conjugate_product,
                                   hermite, hermite_multi, log_barnes_g, log_barnes_g_conjugate_product,
                                   multi_indices, sphere_legendre, spd_functions)


# -- Hermite -----------------------------------------------------------------
@pytest.mark.parametrize("n,x,expected", [(0, 3.7, 1.0), (2, 2.0, 3.0), (3, 1.5, -1.125)])
def test_hermite_examples(n, x, expected):
    assert hermite(n, x) == pytest.approx(expected, abs=1e-14)


@given(st.integers(0, 12), st.floats(-6, 6))
def test_hermite_matches_numpy(n, x):
    ref = hermite_e.hermeval(x, [0] * n + [1])
    assert hermite(n, x) == pytest.approx(ref, rel=1e-10, abs=1e-10)


def test_hermite_orthogonality():
    x, w = hermite_e.hermegauss(64)
    for j in range(9):
        for k in range(9):
            val = np.sum(w * hermite(j, x) * hermite(k, x))
            ref = math.sqrt(2 * math.pi) * math.factorial(j) if j == k else 0.0
            assert abs(val - ref) <= 1e-8 * max(1.0, ref)


def test_hermite_multi_is_a_product():
    z = np.array([[0.3, -1.2], [2.0, 0.5]])
    got = hermite_multi((2, 3), z)
    assert np.allclose(got, hermite(2, z[:, 0]) * hermite(3, z[:, 1]))


# -- Barnes G ------------------------------------------------------------------
@pytest.mark.parametrize("z,expected", [(1.0, 1.0), (2.0, 1.0), (3.0, 1.0), (4.0, 2.0), (5.0, 12.0)])
def test_barnes_g_integers(z, expected):
    assert barnes_g(z) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("z", [0.5 + k for k in range(9)])
def test_barnes_functional_equation(z):
    assert barnes_g(z + 1) / barnes_g(z) == pytest.approx(math.gamma(z), rel=1e-9)


@given(st.floats(0.05, 12.0))
@settings(max_examples=60)
def test_log_barnes_g_matches_mpmath(z):
    ref = float(mpmath.log(mpmath.barnesg(z)))
    assert log_barnes_g(z) == pytest.approx(ref, abs=1e-10, rel=1e-10)


@given(st.floats(0.2, 2.5), st.floats(0.0, 1.9), st.floats(-math.pi, math.pi))
@settings(max_examples=60)
def test_conjugate_product_matches_complex_barnes(a, r, theta):
    assume(a + 0.5 * r * math.cos(theta) > 0.05)
    w = mpmath.mpc(r / 2 * math.cos(theta), r / 2 * math.sin(theta))
    ref = mpmath.barnesg(a + w) * mpmath.barnesg(a + mpmath.conj(w))
    assert abs(ref.imag) < 1e-12 * abs(ref.real)
    assert barnes_g_conjugate_product(a, r, theta) == pytest.approx(float(ref.real), rel=1e-9)
    assert log_barnes_g_conjugate_product(a, r, theta) == pytest.approx(float(mpmath.log(ref.real)), abs=1e-9)


def test_conjugate_product_domain():
    with pytest.raises(ValueError):
        barnes_g_conjugate_product(0.2, 1.0, math.pi)


def test_conjugate_product_theta_zero_is_a_square():
    for r in (0.1, 0.7, 1.4):
        assert barnes_g_conjugate_product(1.0, r, 0.0) == pytest.approx(barnes_g(1 + r / 2) ** 2, rel=1e-12)


def test_conjugate_product_pinned_by_weierstrass_product():
    # direct summation of log G(1+w) = w log(2 pi)/2 - (w + (1+gamma) w^2)/2 + sum_k [k log(1+w/k) - w + w^2/(2k)]
    w = 0.7 * 1j
    terms = mpmath.nsum(lambda k: k * mpmath.log(1 + w / k) - w + w ** 2 / (2 * k), [1, mpmath.inf])
    logg = w * mpmath.log(2 * mpmath.pi) / 2 - (w + (1 + mpmath.euler) * w ** 2) / 2 + terms
    ref = float(mpmath.exp(2 * logg.real))
    assert barnes_g_conjugate_product(1.0, 1.4, math.pi / 2) == pytest.approx(ref, rel=1e-10)


# -- sphere Legendre ------------------------------------------------------------
def test_sphere_legendre_examples():
    t = np.linspace(-1, 1, 7)
    assert np.allclose(sphere_legendre(3, 1, t), t)
    assert sphere_legendre(3, 2, 0.0) == pytest.approx(-0.5)
    for d in (2, 3, 4, 5):
        for k in range(6):
            assert sphere_legendre(d, k, 1.0) == pytest.approx(1.0)


@given(st.integers(2, 6), st.integers(0, 8), st.floats(-1, 1))
def test_sphere_legendre_is_normalized_gegenbauer(d, k, t):
    if d == 2:
        ref = math.cos(k * math.acos(t))  # Chebyshev
    else:
        lam = (d - 2) / 2
        ref = special.eval_gegenbauer(k, lam, t) / special.eval_gegenbauer(k, lam, 1.0)
    assert sphere_legendre(d, k, t) == pytest.approx(ref, abs=1e-10)


# -- SPD matrices -----------------------------------------------------------------
def test_spd_identity():
    f = spd_functions(np.eye(3))
    assert np.allclose(f["sqrt"], np.eye(3)) and np.allclose(f["inv_sqrt"], np.eye(3))
    assert f["det"] == pytest.approx(1) and f["tau"] == pytest.approx(1)
    assert f["rho"] == pytest.approx(1) and f["rho_inv"] == pytest.approx(1)


def test_spd_diagonal():
    K = SpdMatrix(np.diag([4.0, 1.0]))
    assert K.spectral_radius() == pytest.approx(4)
    assert K.inv_spectral_radius() == pytest.approx(1)
    assert K.tau() == pytest.approx(4)
    assert K.det() == pytest.approx(4)
    assert np.allclose(K.normalized().array, np.diag([2.0, 0.5]))


spd = st.integers(1, 5).flatmap(
    lambda d: st.lists(st.floats(-2, 2), min_size=d * d, max_size=d * d).map(
        lambda v: (lambda a: a @ a.T + 0.1 * np.eye(d))(np.array(v).reshape(d, d))))


@given(spd)
def test_spd_properties(a):
    K = SpdMatrix(a)
    s = K.sqrt()
    assert np.allclose(s @ s, a, rtol=1e-10, atol=1e-10 * np.abs(a).max())
    assert np.allclose(K.inv_sqrt() @ a @ K.inv_sqrt(), np.eye(K.dim), atol=1e-8)
    assert K.inv_spectral_radius() == pytest.approx(1 / np.linalg.eigvalsh(a).min(), rel=1e-9)
    assert K.tau() >= 1 - 1e-12
    assert K.normalized().det() == pytest.approx(1.0, rel=1e-9)


@pytest.mark.parametrize("bad", [np.array([[1.0, 2.0], [0.0, 1.0]]), np.array([[1.0, 0.0], [0.0, -1.0]]),
                                 np.array([[1.0, 1.0], [1.0, 1.0]])])
def test_spd_rejects(bad):
    with pytest.raises(ValueError):
        SpdMatrix(bad)


# -- multi-indices and jets ---------------------------------------------------------
def test_multi_indices_count():
    for d in (1, 2, 3):
        for q in range(5):
            assert len(multi_indices(d, q)) == math.comb(d + q, d)


def test_multi_index_algebra():
    b = MultiIndex((2, 1))
    assert b.weight == 3 and b.factorial() == 2
    assert b.binomial(MultiIndex((1, 1))) == 2
    assert sorted(a.orders for a in b.below()) == [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)]
    with pytest.raises(ValueError):
        MultiIndex((-1,))


def test_jet_derivatives_of_exp_quadratic():
    # f(x, y) = exp(x^2 y + sin(y)) at (0.3, -0.4)
    x = Jet.variable(2, 3, 0, 0.3)
    y = Jet.variable(2, 3, 1, -0.4)
    f = (x * x * y + y.sin()).exp()
    X, Y = mpmath.mpf("0.3"), mpmath.mpf("-0.4")
    g = lambda u, v: mpmath.exp(u * u * v + mpmath.sin(v))
    for alpha in [(0, 0), (1, 0), (0, 1), (2, 1), (1, 2), (0, 3)]:
        ref = float(mpmath.diff(g, (X, Y), alpha))
        assert f.derivative(alpha) == pytest.approx(ref, rel=1e-10)


def test_jet_log_power_cos():
    x = Jet.variable(1, 4, 0, 1.7)
    for f, g in [(x.log(), mpmath.log), (x.power(2.5), lambda u: u ** 2.5), (x.cos(), mpmath.cos)]:
        for k in range(5):
            assert f.derivative((k,)) == pytest.approx(float(mpmath.diff(g, mpmath.mpf("1.7"), k)), rel=1e-10)


# -- random streams ------------------------------------------------------------------
def test_rng_stream_reproducible():
    a = RngStream(7, 3).generator().standard_normal(100)
    b = RngStream(7, 3).generator().standard_normal(100)
    c = RngStream(7, 4).generator().standard_normal(100)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_rng_chunks_cover_total():
    parts = list(RngStream(1).chunks(10, 4))
    assert [m for _, m in parts] == [4, 4, 2]
    again = [g.random(m) for g, m in RngStream(1).chunks(10, 4)]
    assert all(np.array_equal(g.random(m), v) for (g, m), v in zip(RngStream(1).chunks(10, 4), again))


def test_rng_rejects_negative_seed():
    with pytest.raises(ValueError):
        RngStream(-1)
