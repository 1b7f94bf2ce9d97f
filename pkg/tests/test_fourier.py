import math

import numpy as np
import pytest

from jpkorovkin.errors import CutoffExceeded, QuadratureError
from jpkorovkin.fourier import (abel_poisson_mean, coeffs, partial_sum, poisson_kernel,
                                radii)
from jpkorovkin.periodic import Fn2D, Grid2D, sin_sin, test_function


def random_trig_poly(rng, degree=8, terms=6):
    """Sum of random ``c * trig(j x) * trig(k y)`` with ``j, k <= degree``."""
    parts = []
    for _ in range(terms):
        j, k = rng.integers(0, degree + 1, 2)
        c = rng.normal()
        px, py = rng.integers(0, 2, 2)
        parts.append((c, int(j), int(k), int(px), int(py)))

    def ev(x, y):
        out = 0.0
        for c, j, k, px, py in parts:
            fx = np.cos(j * x) if px == 0 else np.sin(j * x)
            fy = np.cos(k * y) if py == 0 else np.sin(k * y)
            out = out + c * fx * fy
        return out + 0 * x + 0 * y

    return Fn2D(ev, "trigpoly"), parts


def damped_oracle(parts, m, n):
    """Exact Abel-Poisson mean of a trig polynomial: scale each term."""
    rho, sigma = radii(m, n)

    def ev(x, y):
        out = 0.0
        for c, j, k, px, py in parts:
            fx = np.cos(j * x) if px == 0 else np.sin(j * x)
            fy = np.cos(k * y) if py == 0 else np.sin(k * y)
            out = out + c * rho**j * sigma**k * fx * fy
        return out + 0 * x + 0 * y

    return ev


def only_nonzero(t, **expected):
    arrays = {"a": t.a, "b": t.b, "c": t.c, "d": t.d}
    for name, arr in arrays.items():
        want = np.zeros_like(arr)
        for key, val in expected.items():
            if key[0] == name:
                want[int(key[1]), int(key[2])] = val
        np.testing.assert_allclose(arr, want, atol=1e-13)


def test_coeffs_constant():
    only_nonzero(coeffs(test_function(0), 4, 4, 16), a00=4.0)


def test_coeffs_sin_x():
    only_nonzero(coeffs(test_function(1), 4, 4, 16), c10=2.0)


def test_coeffs_sin_sin():
    only_nonzero(coeffs(sin_sin(), 4, 4, 16), d11=1.0)


def test_coeffs_quadrature_guard():
    with pytest.raises(QuadratureError):
        coeffs(sin_sin(), 8, 8, 16)
    with pytest.raises(QuadratureError):
        coeffs(sin_sin(), 4, 4, 24)


def test_unused_slots_are_zero(rng):
    f, _ = random_trig_poly(rng)
    t = coeffs(f, 8, 8, 64)
    assert np.all(t.b[:, 0] == 0) and np.all(t.d[:, 0] == 0)
    assert np.all(t.c[0, :] == 0) and np.all(t.d[0, :] == 0)


def test_partial_sum_examples(rng):
    one = partial_sum(coeffs(test_function(0), 4, 4, 16), 3, 2)
    pts = rng.uniform(-4, 4, (2, 100))
    np.testing.assert_allclose(one(*pts), 1.0, atol=1e-14)
    t = coeffs(sin_sin(), 4, 4, 16)
    np.testing.assert_allclose(partial_sum(t, 1, 1)(*pts), np.sin(pts[0]) * np.sin(pts[1]),
                               atol=1e-10)
    np.testing.assert_allclose(partial_sum(t, 0, 0)(*pts), 0.0, atol=1e-14)
    with pytest.raises(CutoffExceeded):
        partial_sum(t, 5, 1)


@pytest.mark.parametrize("seed", range(5))
def test_partial_sum_reproduces_trig_polys(seed):
    rng = np.random.default_rng(seed)
    f, _ = random_trig_poly(rng)
    pts = rng.uniform(-4, 4, (2, 100))
    np.testing.assert_allclose(partial_sum(coeffs(f, 8, 8, 32), 8, 8)(*pts), f(*pts), atol=1e-10)


def test_coeff_linearity(rng):
    f, _ = random_trig_poly(rng)
    g, _ = random_trig_poly(rng)
    h = 2.0 * f + (-0.5) * g
    tf, tg, th = (coeffs(q, 8, 8, 64) for q in (f, g, h))
    for name in "abcd":
        np.testing.assert_allclose(getattr(th, name),
                                   2 * getattr(tf, name) - 0.5 * getattr(tg, name), atol=1e-12)


def test_poisson_kernel_values():
    t = np.linspace(-3, 3, 7)
    np.testing.assert_allclose(poisson_kernel(0.0, t), 1.0)
    assert poisson_kernel(0.5, 0.0) == pytest.approx(3.0)
    assert np.all(poisson_kernel(0.95, np.linspace(-math.pi, math.pi, 101)) > 0)
    for bad in (-0.1, 1.0):
        with pytest.raises(ValueError):
            poisson_kernel(bad, 0.0)


@pytest.mark.parametrize("r", [0.3, 0.9])
def test_poisson_kernel_normalization(r):
    n = 1024
    t = -math.pi + 2 * math.pi * np.arange(n) / n
    assert abs(np.mean(poisson_kernel(r, t)) - 1.0) <= 1e-10


@pytest.mark.parametrize("path", ["convolution", "damping"])
def test_mean_of_constant(path):
    g = Grid2D.square(16)
    for m, n in [(0, 0), (3, 7), (20, 1)]:
        T = abel_poisson_mean(test_function(0), m, n, path, 1024, 16)
        np.testing.assert_allclose(T.on(g), 1.0, atol=1e-12)


@pytest.mark.parametrize("path", ["convolution", "damping"])
def test_mean_of_sin_x(path):
    g = Grid2D.square(16)
    X, Y = g.mesh()
    for m, n in [(1, 0), (4, 9)]:
        T = abel_poisson_mean(test_function(1), m, n, path, 512, 16)
        np.testing.assert_allclose(T.on(g), m / (m + 1) * np.sin(X), atol=1e-12)


@pytest.mark.parametrize("path", ["convolution", "damping"])
def test_mean_of_sin_sin(path):
    g = Grid2D.square(16)
    X, Y = g.mesh()
    T = abel_poisson_mean(sin_sin(), 1, 1, path, 64, 16)
    np.testing.assert_allclose(T.on(g), 0.25 * np.sin(X) * np.sin(Y), atol=1e-12)


def test_convolution_off_grid_points(rng):
    f, parts = random_trig_poly(rng, degree=4)
    T = abel_poisson_mean(f, 2, 3, "convolution", 256)
    pts = rng.uniform(-3, 3, (2, 5))
    np.testing.assert_allclose(T(*pts), damped_oracle(parts, 2, 3)(*pts), atol=1e-10)


def test_convolution_quadrature_error_is_geometric():
    # the trapezoid sum of the kernel on n nodes is (1 + r^n) / (1 - r^n)
    n, m = 64, 20
    rho = m / (m + 1)
    T = abel_poisson_mean(test_function(0), m, 0, "convolution", n)
    assert T(0.0, 0.0) == pytest.approx((1 + rho**n) / (1 - rho**n), rel=1e-12)


def test_convolution_positivity(rng):
    g = Grid2D.square(64)
    f = Fn2D(lambda x, y: np.abs(np.sin(3 * x) * np.cos(y)) + np.maximum(np.cos(x + y), 0), "pos")
    for m, n in [(0, 0), (2, 5), (8, 8), (30, 2)]:
        assert np.min(abel_poisson_mean(f, m, n, "convolution", 64).on(g)) >= -1e-10


def test_mean_linearity(rng):
    f, _ = random_trig_poly(rng)
    g, _ = random_trig_poly(rng)
    h = 1.5 * f + (-2.0) * g
    grid = Grid2D.square(32)
    for path in ("convolution", "damping"):
        Tf, Tg, Th = (abel_poisson_mean(q, 3, 5, path, 64, 16).on(grid) for q in (f, g, h))
        np.testing.assert_allclose(Th, 1.5 * Tf - 2.0 * Tg, atol=1e-11)


def test_two_paths_against_exact_damping(rng):
    f, parts = random_trig_poly(rng)
    grid = Grid2D.square(256)
    X, Y = grid.mesh()
    for m, n in [(0, 8), (5, 5), (8, 1)]:
        exact = damped_oracle(parts, m, n)(X, Y)
        for path in ("convolution", "damping"):
            np.testing.assert_allclose(abel_poisson_mean(f, m, n, path, 256).on(grid), exact,
                                       atol=1e-10)


def test_mean_guards():
    with pytest.raises(ValueError):
        abel_poisson_mean(sin_sin(), 1, 1, "fft")
    t = coeffs(sin_sin(), 4, 4, 16)
    with pytest.raises(CutoffExceeded):
        abel_poisson_mean(sin_sin(), 1, 1, "damping", cutoff=8, table=t)
    with pytest.raises(QuadratureError):
        abel_poisson_mean(sin_sin(), 1, 1, "convolution", n_quad=8192)
