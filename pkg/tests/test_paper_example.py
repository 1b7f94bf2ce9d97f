import math

import numpy as np
import pytest

from jpkorovkin.paper_example import (E, ClosedErrorCurve, block_sequence,
                                      classical_failure_table, closed_error,
                                      closed_gamma_series, gamma_sequence, paper_operator,
                                      signed_error)
from jpkorovkin.periodic import Grid2D, test_function
from jpkorovkin.summability import abel, ps_transform

# 400x400 brute-force oracle of the gamma series at r = s = 1/2
GAMMA_HALF = 0.9101111012376456
# J_1 average coefficient of L_mn(f1) at r = s = 1/2, minus one
SIGNED_HALF = -0.717191105484889


def brute_gamma(r, s, n=400):
    m = np.arange(n)
    M, N = np.meshgrid(m, m, indexing="ij")
    a = (1 + (-1.0) ** (M + N)) * (0.5 / (M + 1) + 0.5 / (N + 1))
    return math.sqrt((1 - r) * (1 - s) * float(np.sum(a * r**M * s**N)))


def brute_signed(r, s, n=400):
    m = np.arange(n)
    M, N = np.meshgrid(m, m, indexing="ij")
    a = (1 + (-1.0) ** (M + N)) * M / (M + 1)
    return (1 - r) * (1 - s) * float(np.sum(a * r**M * s**N)) - 1


@pytest.fixture(scope="module")
def L():
    return paper_operator(16, 64)


def test_operator_values(L):
    g = Grid2D.square(16)
    np.testing.assert_allclose(L.apply(1, 0, test_function(0)).on(g), 0.0)
    np.testing.assert_allclose(L.apply(2, 2, test_function(0)).on(g), 2.0, atol=1e-13)
    assert L.apply(2, 2, test_function(2))(0.4, math.pi / 2) == pytest.approx(4 / 3, abs=1e-13)


def test_operator_matches_closed_images(L):
    g = Grid2D.square(16)
    X, Y = g.mesh()
    for m, n in [(0, 0), (1, 2), (3, 1), (4, 6)]:
        for i in range(5):
            got = L.apply(m, n, test_function(i)).on(g)
            np.testing.assert_allclose(got, L.test_closed_form(i, m, n, X, Y), atol=1e-13)


def test_block_sequence_values():
    seq = block_sequence(1, 0)
    assert seq.term(0, 0) == 0.0
    assert seq.term(1, 0) == 0.0
    assert seq.term(1, 1) == pytest.approx(1.0)
    assert seq.term(3, 1) == pytest.approx(1.5)


def test_closed_error_examples():
    assert closed_error(0, 0.5, 0.5) == pytest.approx(1 / 9, abs=1e-15)
    assert closed_error(0, 0.9, 0.9) == pytest.approx(1 / 361, abs=1e-15)
    assert signed_error(0.5, 0.5) == pytest.approx(SIGNED_HALF, abs=1e-14)
    assert brute_signed(0.5, 0.5) == pytest.approx(SIGNED_HALF, abs=1e-12)
    assert closed_error(1, 0.5, 0.5) == pytest.approx(-SIGNED_HALF, abs=1e-14)
    assert ClosedErrorCurve(3)(0.5, 0.5) == closed_error(1, 0.5, 0.5)


@pytest.mark.parametrize("r,s", [(0.3, 0.7), (0.9, 0.2), (0.99, 0.5)])
def test_closed_error_against_series(r, s):
    assert signed_error(r, s) == pytest.approx(brute_signed(r, s, 3000), abs=1e-10)


def test_closed_error_symmetry():
    for r, s in [(0.2, 0.6), (0.95, 0.35)]:
        assert closed_error(2, r, s) == closed_error(1, s, r)
        assert closed_error(4, r, s) == closed_error(3, s, r)
        assert closed_error(0, r, s) == closed_error(0, s, r)


def test_closed_error_domain():
    with pytest.raises(ValueError):
        closed_error(1, 1.0, 0.5)
    with pytest.raises(ValueError):
        closed_error(1, 0.5, 0.0)
    with pytest.raises(IndexError):
        closed_error(5, 0.5, 0.5)


def test_E_vanishes_at_the_boundary():
    vals = [E(1 - 10.0**-k, 1 - 10.0**-k) for k in range(1, 7)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-4


def test_small_argument_branch_matches_direct_form():
    def direct(x, t):
        return ((1 - x) * (1 - t) / ((1 + x) * (1 + t)) + (1 - x) * math.log1p(-x) / x
                - (1 - t) * (1 - x) * math.log1p(x) / (x * (1 + t)))

    for x in (1e-12, 1e-10, 0.999e-8):
        for t in (0.1, 0.6):
            assert signed_error(x, t) == pytest.approx(direct(x, t), abs=1e-14)


def test_gamma_series_regression():
    assert closed_gamma_series(0.5, 0.5) == pytest.approx(GAMMA_HALF, abs=1e-12)
    assert brute_gamma(0.5, 0.5) == pytest.approx(GAMMA_HALF, abs=1e-12)


def test_gamma_series_symmetry_and_decrease():
    assert closed_gamma_series(0.3, 0.8) == pytest.approx(closed_gamma_series(0.8, 0.3), abs=1e-12)
    vals = [closed_gamma_series(r, r) for r in (0.5, 0.9, 0.99, 0.999)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_gamma_sequence_terms():
    seq = gamma_sequence()
    assert seq.term(0, 0) == pytest.approx(2.0)
    assert seq.term(1, 0) == 0.0
    assert seq.term(1, 1) == pytest.approx(1.0)
    assert ps_transform(seq, abel(), (0.9, 0.9)).tail_bound <= 1e-10


def test_classical_failure_table():
    t = classical_failure_table(20)
    assert t.errors.shape == (20, 20)
    np.testing.assert_allclose(t.errors, 1.0, atol=1e-12)
    m, n = np.indices((20, 20))
    np.testing.assert_allclose(t.values, np.where((m + n) % 2, 0.0, 2.0), atol=1e-12)
    assert not t.probe.converged
    with pytest.raises(ValueError):
        classical_failure_table(1)
