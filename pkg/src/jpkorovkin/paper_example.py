"""Abel-Poisson example: ``L_mn = (1 + (-1)^(m+n)) T_mn`` and its reference curves.

The prefactor kills every operator with odd ``m + n`` and doubles the rest, so
``L_mn(1)`` oscillates between 0 and 2 and never converges in Pringsheim's
sense, yet the Abel (J_1) averages recover every ``f``.  The closed forms below
give the exact sup-norm errors of those averages for the test functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fourier import DEFAULT_CUTOFF, DEFAULT_NQUAD, abel_poisson_mean, coeffs, radii
from .korovkin import Expansion, OperatorFamily
from .periodic import Fn2D, Grid2D, test_function
from .summability import DoubleSeq, PringsheimVerdict, abel, pringsheim_probe, ps_transform

_BLOCK_ATOL = 1e-14


def _sign(k):
    return 1.0 - 2.0 * (np.asarray(k) % 2)


def _prefactor(m: int, n: int) -> float:
    return 0.0 if (m + n) % 2 else 2.0


def _damping_axis(power: int):
    def fn(k):
        k = np.asarray(k, dtype=float)
        return (k / (k + 1.0)) ** power
    return fn


def _signed_damping_axis(power: int):
    base = _damping_axis(power)
    return lambda k: _sign(k) * base(k)


def block_sequence(j: int, k: int) -> DoubleSeq:
    """``(m, n) -> (1 + (-1)^(m+n)) (m/(m+1))^j (n/(n+1))^k``."""
    return DoubleSeq.separable(
        [(_damping_axis(j), _damping_axis(k)),
         (_signed_damping_axis(j), _signed_damping_axis(k))],
        bound=2.0,
    )


def _zero(f: Fn2D) -> Fn2D:
    return Fn2D(lambda x, y: np.zeros(np.broadcast(x, y).shape), f"0[{f.name}]", 0.0)


def paper_operator(cutoff: int = DEFAULT_CUTOFF, n_quad: int = DEFAULT_NQUAD) -> OperatorFamily:
    """The example family, with Abel-Poisson means taken by coefficient damping."""
    tables: dict[int, object] = {}

    def table(f: Fn2D):
        key = id(f)
        if key not in tables:
            tables[key] = (f, coeffs(f, cutoff, cutoff, n_quad))
        return tables[key][1]

    def apply(m: int, n: int, f: Fn2D) -> Fn2D:
        c = _prefactor(m, n)
        if c == 0.0:
            return _zero(f)
        return c * abel_poisson_mean(f, m, n, "damping", n_quad, cutoff, table=table(f))

    def closed(i: int, m: int, n: int, x, y):
        c = _prefactor(m, n)
        rho, sigma = radii(m, n)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        scale = (1.0, rho, sigma, rho, sigma)[i]
        return c * scale * test_function(i)(x, y)

    def expand(f: Fn2D) -> Expansion:
        t = table(f)
        mag = t.block_magnitude()
        top = float(mag.max()) if mag.size else 0.0
        blocks = [tuple(b) for b in np.argwhere(mag > _BLOCK_ATOL * max(top, 1.0))]
        # a unit value on block (j, k) contributes at most the sum of its coefficients
        scales = [float(np.abs([t.a[b], t.b[b], t.c[b], t.d[b]]).sum()) for b in blocks]

        def assemble(vals):
            W = np.zeros_like(t.a)
            for (j, k), v in zip(blocks, vals):
                W[j, k] = v
            return type(t)(t.a * W, t.b * W, t.c * W, t.d * W).as_function("J_p avg")

        return Expansion([block_sequence(j, k) for j, k in blocks], scales, assemble)

    return OperatorFamily(apply=apply, is_positive=True, test_closed_form=closed,
                          norm_bound=_prefactor, expand=expand, name="paper")


def _ln1m_over(x: float) -> float:
    """``ln(1 - x) / x`` with its removable singularity at 0."""
    if x < 1e-8:
        return -1.0 - x / 2.0 - x * x / 3.0
    return math.log1p(-x) / x


def _ln1p_over(x: float) -> float:
    """``ln(1 + x) / x`` with its removable singularity at 0."""
    if x < 1e-8:
        return 1.0 - x / 2.0 + x * x / 3.0
    return math.log1p(x) / x


def signed_error(x: float, t: float) -> float:
    """The expression inside ``E(x, t)``: J_1 average coefficient minus one."""
    return ((1 - x) * (1 - t) / ((1 + x) * (1 + t))
            + (1 - x) * _ln1m_over(x)
            - (1 - t) * (1 - x) * _ln1p_over(x) / (1 + t))


def E(x: float, t: float) -> float:
    return abs(signed_error(x, t))


def closed_error(i: int, r: float, s: float) -> float:
    """Exact sup-norm error of the J_1 average of ``L_mn(f_i)`` at ``(r, s)``."""
    if not (0 < r < 1 and 0 < s < 1):
        raise ValueError("closed_error needs 0 < r, s < 1")
    if i == 0:
        return (1 - r) * (1 - s) / ((1 + r) * (1 + s))
    if i in (1, 3):
        return E(r, s)
    if i in (2, 4):
        return E(s, r)
    raise IndexError(f"test function index must be in 0..4, got {i}")


@dataclass(frozen=True)
class ClosedErrorCurve:
    index: int

    def __call__(self, r: float, s: float) -> float:
        return closed_error(self.index, r, s)


def _inv_axis(k):
    return 1.0 / (np.asarray(k, dtype=float) + 1.0)


def _one_axis(k):
    return np.ones(np.shape(k))


def gamma_sequence() -> DoubleSeq:
    """``(m, n) -> (1 + (-1)^(m+n)) (1/(2(m+1)) + 1/(2(n+1)))``."""
    half_inv = lambda k: 0.5 * _inv_axis(k)  # noqa: E731
    return DoubleSeq.separable(
        [(half_inv, _one_axis), (_one_axis, half_inv),
         (lambda k: _sign(k) * half_inv(k), _sign),
         (_sign, lambda k: _sign(k) * half_inv(k))],
        bound=2.0,
    )


def closed_gamma_series(r: float, s: float, tol: float = 1e-12) -> float:
    """``gamma(r, s)`` from the summed series, tail-bounded to ``tol`` before the root."""
    res = ps_transform(gamma_sequence(), abel(), (r, s), tol)
    return math.sqrt(res.value)


@dataclass(frozen=True)
class FailureTable:
    errors: np.ndarray
    values: np.ndarray
    probe: PringsheimVerdict


def classical_failure_table(window: int = 20, grid: Grid2D | None = None) -> FailureTable:
    """``||L_mn(f0) - f0||`` for ``0 <= m, n < window``.

    ``values`` holds ``L_mn(f0)`` at the first grid node; ``probe`` is the
    Pringsheim probe run on that double sequence.
    """
    if window < 2:
        raise ValueError("window must be at least 2")
    grid = grid or Grid2D.square(16)
    L = paper_operator()
    f0 = test_function(0)
    F0 = f0.on(grid)
    errors = np.empty((window, window))
    values = np.empty((window, window))
    for m in range(window):
        for n in range(window):
            V = L.apply(m, n, f0).on(grid)
            errors[m, n] = float(np.max(np.abs(V - F0)))
            values[m, n] = float(V[0, 0])
    seq = DoubleSeq(lambda m, n: values[m, n], bound=float(np.max(np.abs(values))))
    return FailureTable(errors, values, pringsheim_probe(seq, window, 1e-6))
