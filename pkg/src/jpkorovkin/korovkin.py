"""Operator families and numeric checks of the Korovkin-type J_p theorems.

The J_p average of a family ``L_mn`` applied to ``f`` is, node by node,

    (1 / p(r, s)) * sum_{m,n} L_mn(f; x, y) p_mn r^m s^n.

Families that know how their index dependence factors (``expand``) are
averaged with one scalar transform per component.  Opaque families are
averaged term by term on the grid, capped at a 256x256 truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NoAdmissibleDelta
from .periodic import Fn2D, Grid2D, modulus, phi_at, sup_norm, test_function
from .summability import (DoubleSeq, MethodPoint, WeightFamily, _p_tail, _point,
                          ps_transform, ps_transform_terms)

BLACK_BOX_CAP = 256
DELTA_LADDER = tuple(math.pi * 2.0**-k for k in range(13))


@dataclass(frozen=True, eq=False)
class Expansion:
    """``L_mn(f) == assemble([seq(m, n) for seq in seqs])``, with ``assemble`` linear.

    ``scales[q]`` bounds the sup-norm contribution of a unit value in slot ``q``.
    """

    seqs: list
    scales: list
    assemble: Callable[[list], Fn2D]


@dataclass(frozen=True, eq=False)
class OperatorFamily:
    """A double sequence of linear operators ``(m, n) -> L_mn``.

    ``expand(f)`` optionally returns an :class:`Expansion` that separates the
    index dependence of ``L_mn(f)`` into scalar double sequences.
    ``test_closed_form(i, m, n, x, y)`` gives ``L_mn(f_i)(x, y)`` exactly.
    """

    apply: Callable[[int, int, Fn2D], Fn2D]
    is_positive: bool = True
    test_closed_form: Optional[Callable] = None
    norm_bound: Optional[Callable[[int, int], float]] = None
    expand: Optional[Callable[[Fn2D], Expansion]] = None
    name: str = "L"


def identity_family() -> OperatorFamily:
    return OperatorFamily(
        apply=lambda m, n, f: f,
        test_closed_form=lambda i, m, n, x, y: test_function(i)(x, y),
        norm_bound=lambda m, n: 1.0,
        expand=lambda f: Expansion([DoubleSeq.constant(1.0)], [f.claimed_bound or 1.0],
                                   lambda v: v[0] * f),
        name="identity",
    )


def reindexed(L: OperatorFamily) -> OperatorFamily:
    """The family ``(m, n) -> L_nm``."""
    tcf = None
    if L.test_closed_form is not None:
        def tcf(i, m, n, x, y):
            return L.test_closed_form(i, n, m, x, y)
    nb = None if L.norm_bound is None else (lambda m, n: L.norm_bound(n, m))
    ex = None
    if L.expand is not None:
        def ex(f):
            e = L.expand(f)
            return Expansion([seq.transpose() for seq in e.seqs], e.scales, e.assemble)
    return OperatorFamily(lambda m, n, f: L.apply(n, m, f), L.is_positive, tcf, nb, ex,
                          f"{L.name}^T")


def _norm_window(L: OperatorFamily, size: int, grid: Grid2D) -> np.ndarray:
    out = np.empty((size, size))
    f0 = test_function(0)
    for m in range(size):
        for n in range(size):
            if L.norm_bound is not None:
                out[m, n] = L.norm_bound(m, n)
            else:
                out[m, n] = sup_norm(L.apply(m, n, f0), grid)
    return out


@dataclass(frozen=True)
class ConditionVerdict:
    holds: bool
    partial_sum: float
    tail_bound: float


def basic_condition_probe(L: OperatorFamily, w: WeightFamily, pt, window: int,
                          grid: Optional[Grid2D] = None, growth_tol: float = 1e-9
                          ) -> ConditionVerdict:
    """Probe ``sum ||L_mn(f0)|| p_mn r^m s^n < inf`` on a finite window.

    The norms come from ``norm_bound`` or grid sup-norms.  The verdict holds
    when the norm envelope on the outer half of the window does not exceed the
    envelope on the inner quarter by more than ``growth_tol`` (relative); the
    tail beyond the window is then bounded by that envelope times the weight
    tail.  Otherwise no verdict is given; failure is never claimed.
    """
    if window < 4:
        raise ValueError("window must be at least 4")
    pt = _point(pt)
    grid = grid or Grid2D.square(32)
    norms = _norm_window(L, window, grid)
    idx = np.arange(window)
    mm, nn = np.meshgrid(idx, idx, indexing="ij")
    wts = np.asarray(w.weight(mm, nn), dtype=float) * pt.r**mm * pt.s**nn
    partial = math.fsum((norms * wts).ravel().tolist())
    half = window // 2
    inner = float(norms[:half, :half].max())
    band = np.maximum(mm, nn) >= half
    outer = float(norms[band].max())
    if not np.all(np.isfinite(norms)) or outer > inner * (1.0 + growth_tol):
        return ConditionVerdict(False, partial, math.inf)
    P = math.fsum(wts.ravel().tolist())
    UM = VN = None
    if w.axes is not None:
        UM = math.fsum((w.axes[0](idx) * pt.r**idx).tolist())
        VN = math.fsum((w.axes[1](idx) * pt.s**idx).tolist())
    tail = max(inner, outer) * _p_tail(w, pt, window, window, P, UM, VN)
    return ConditionVerdict(True, partial, tail)


def _black_box_bound(L: OperatorFamily, f: Fn2D, X, Y) -> Optional[float]:
    if not L.is_positive or L.norm_bound is None:
        return None
    mf = f.claimed_bound if f.claimed_bound is not None else float(np.max(np.abs(f(X, Y))))
    env = max(L.norm_bound(m, n) for m in range(BLACK_BOX_CAP) for n in range(BLACK_BOX_CAP))
    return env * mf


def jp_average_at(L: OperatorFamily, f: Fn2D, w: WeightFamily, pt, X, Y,
                  tol: float = 1e-10) -> np.ndarray:
    """J_p average of ``L_mn(f)`` at the points ``(X, Y)``."""
    pt = _point(pt)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if L.expand is not None:
        e = L.expand(f)
        if not e.seqs:
            return np.zeros(np.broadcast(X, Y).shape)
        share = tol / len(e.seqs)
        vals = [ps_transform(seq, w, pt, share / max(1.0, sc)).value
                for seq, sc in zip(e.seqs, e.scales)]
        return e.assemble(vals)(X, Y)
    bound = _black_box_bound(L, f, X, Y)
    values, _, _ = ps_transform_terms(lambda m, n: L.apply(m, n, f)(X, Y), bound, w, pt, tol,
                                      max_order=BLACK_BOX_CAP)
    return values


def jp_average(L: OperatorFamily, f: Fn2D, w: WeightFamily, pt, grid: Grid2D,
               tol: float = 1e-10) -> np.ndarray:
    """J_p average of ``L_mn(f)`` on every node of ``grid``."""
    X, Y = grid.mesh()
    return jp_average_at(L, f, w, pt, X, Y, tol)


def test_averages(L: OperatorFamily, w: WeightFamily, pt, grid: Grid2D, tol: float = 1e-10):
    """J_p averages of the five test functions on ``grid``."""
    return [jp_average(L, test_function(i), w, pt, grid, tol) for i in range(5)]


test_averages.__test__ = False


def theorem1_errors(L: OperatorFamily, w: WeightFamily, pt, grid: Grid2D,
                    tol: float = 1e-10) -> tuple[float, ...]:
    """Grid sup-norm errors of the J_p averages of ``f_0, ..., f_4``."""
    avgs = test_averages(L, w, pt, grid, tol)
    return tuple(float(np.max(np.abs(A - test_function(i).on(grid))))
                 for i, A in enumerate(avgs))


def _phi_average_decomposed(avgs, grid: Grid2D) -> np.ndarray:
    X, Y = grid.mesh()
    A0, A1, A2, A3, A4 = avgs
    return A0 - 0.5 * (np.cos(X) * A3 + np.sin(X) * A1 + np.cos(Y) * A4 + np.sin(Y) * A2)


def phi_averages(L: OperatorFamily, w: WeightFamily, pt, grid: Grid2D, tol: float = 1e-10,
                 method: str = "decomposition") -> np.ndarray:
    """J_p average of ``L_mn(phi_{x,y})`` evaluated at ``(x, y)``, for every node.

    ``decomposition`` uses linearity and the half-angle identity to reduce to
    the five test-function averages; ``direct`` builds ``phi_{x,y}`` per node.
    """
    if method == "decomposition":
        return _phi_average_decomposed(test_averages(L, w, pt, grid, tol), grid)
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    X, Y = grid.mesh()
    out = np.empty(X.shape)
    for idx in np.ndindex(X.shape):
        x, y = X[idx], Y[idx]
        out[idx] = float(jp_average_at(L, phi_at(x, y), w, pt, np.array(x), np.array(y), tol))
    return out


def gamma(L: OperatorFamily, w: WeightFamily, pt, grid: Grid2D, tol: float = 1e-10,
          method: str = "decomposition") -> float:
    """Square root of the grid sup of the J_p-averaged ``L_mn(phi_{x,y})(x, y)``.

    The base point of ``phi`` and the evaluation point coincide.
    """
    vals = phi_averages(L, w, pt, grid, tol, method)
    return math.sqrt(max(float(np.max(np.abs(vals))), 0.0))


@dataclass(frozen=True)
class Theorem2Check:
    lhs: float
    rhs: float
    holds: bool
    e0: float
    gamma: float
    omega: float
    K: float


def theorem2_bound_check(f: Fn2D, L: OperatorFamily, w: WeightFamily, pt, grid: Grid2D,
                         tol: float = 1e-10, samples: int = 1024) -> Theorem2Check:
    """Compare ``||avg L(f) - f||`` with ``K (e0 w + w + e0)``, ``w = omega(f; gamma)``."""
    pt = _point(pt)
    Mf = f.claimed_bound if f.claimed_bound is not None else sup_norm(f, grid)
    K = max(1.0 + math.pi**2, Mf)
    lhs = float(np.max(np.abs(jp_average(L, f, w, pt, grid, tol) - f.on(grid))))
    avgs = test_averages(L, w, pt, grid, tol)
    e0 = float(np.max(np.abs(avgs[0] - 1.0)))
    g = math.sqrt(max(float(np.max(np.abs(_phi_average_decomposed(avgs, grid)))), 0.0))
    om = modulus(f, g, samples)
    rhs = K * (e0 * om + om + e0)
    return Theorem2Check(lhs, rhs, lhs <= rhs + tol, e0, g, om, K)


@dataclass(frozen=True)
class PointwiseCheck:
    delta: float
    holds: bool
    worst_margin: float


def theorem1_pointwise_check(f: Fn2D, eps: float, grid: Grid2D,
                             samples: int = 4096) -> PointwiseCheck:
    """Check the localisation inequality behind the first theorem on all node pairs.

    ``delta`` is the largest ladder value ``pi 2^-k`` with
    ``omega(f; sqrt(2) delta) <= eps``.  The check then verifies

        |f(u,v) - f(x,y)| < eps + 2 M_f / sin^2(delta/2) * phi_{x,y}(u, v)

    for every pair of grid nodes.  ``worst_margin`` is the smallest
    right-minus-left gap seen.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    Mf = f.claimed_bound if f.claimed_bound is not None else sup_norm(f, grid)
    delta = next((d for d in DELTA_LADDER if modulus(f, math.sqrt(2.0) * d, samples) <= eps),
                 None)
    if delta is None:
        raise NoAdmissibleDelta(f"no ladder delta with omega(f; sqrt2 delta) <= {eps}")
    X, Y = grid.mesh()
    xs, ys, F = X.ravel(), Y.ravel(), f(X, Y).ravel()
    coef = 2.0 * Mf / math.sin(delta / 2.0) ** 2
    worst = math.inf
    chunk = max(1, (1 << 22) // xs.size)
    for i0 in range(0, xs.size, chunk):
        sl = slice(i0, i0 + chunk)
        lhs = np.abs(F[sl, None] - F[None, :])
        phi = np.sin((xs[sl, None] - xs[None, :]) / 2) ** 2 + \
            np.sin((ys[sl, None] - ys[None, :]) / 2) ** 2
        worst = min(worst, float(np.min(eps + coef * phi - lhs)))
    return PointwiseCheck(delta, worst > 0.0, worst)


__all__ = [
    "ConditionVerdict", "MethodPoint", "OperatorFamily", "PointwiseCheck", "Theorem2Check",
    "basic_condition_probe", "gamma", "identity_family", "jp_average", "jp_average_at",
    "phi_averages", "reindexed", "test_averages", "theorem1_errors",
    "theorem1_pointwise_check", "theorem2_bound_check",
]
