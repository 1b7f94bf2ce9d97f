"""Power series summability methods J_p for real double sequences.

A method is fixed by a weight double sequence ``p_mn >= 0`` with ``p_00 > 0``.
For a point ``0 < r, s < 1`` the transform of a bounded double sequence is

    (1 / p(r, s)) * sum_{m,n} a_mn p_mn r^m s^n,    p(r, s) = sum p_mn r^m s^n

and the sequence is J_p-summable to ``l`` when this tends to ``l`` as
``r, s -> 1-``.  Everything here works on truncation rectangles
``0 <= m < M, 0 <= n < N`` that grow geometrically until a tail bound meets the
requested tolerance.

Sequences and weights that factor as sums of products of one-dimensional
sequences are summed axis by axis, which keeps points like ``r = s = 0.999``
inside the term budget.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import BudgetExceeded, MissingBound

BOUNDARY_CAP = 0.9999
TERM_BUDGET = 10**8
START_ORDER = 16
_DENSE_BLOCK = 1 << 20
_EPS = np.finfo(float).eps

AxisFn = Callable[[np.ndarray], np.ndarray]
TermFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class MethodPoint:
    r: float
    s: float

    def __post_init__(self):
        if not (0.0 < self.r < 1.0 and 0.0 < self.s < 1.0):
            raise ValueError(f"method point needs 0 < r, s < 1, got ({self.r}, {self.s})")


def _point(pt) -> MethodPoint:
    if isinstance(pt, MethodPoint):
        return pt
    r, s = pt
    return MethodPoint(float(r), float(s))


def _check_cap(pt: MethodPoint) -> None:
    if pt.r > BOUNDARY_CAP or pt.s > BOUNDARY_CAP:
        raise BudgetExceeded(
            f"method point ({pt.r}, {pt.s}) lies beyond the boundary cap "
            f"{BOUNDARY_CAP}; the truncated series cannot meet tolerance within "
            f"the term budget of {TERM_BUDGET:.0e} terms"
        )


@dataclass(frozen=True, eq=False)
class WeightFamily:
    """Weights ``p_mn`` of a J_p method.

    ``axes`` is set when ``p_mn = u(m) * v(n)``; ``axis_tail(M, t)`` must then
    bound ``sum_{m >= M} u(m) t^m`` (and the same for ``v``).
    """

    name: str
    kind: str
    weight: TermFn
    closed_p: Optional[Callable[[float, float], float]] = None
    axes: Optional[tuple[AxisFn, AxisFn]] = None
    axis_tail: Optional[Callable[[int, float], float]] = None
    divergent: bool = True

    def __post_init__(self):
        if self.kind not in ("abel", "logarithmic", "custom"):
            raise ValueError(f"unknown weight family kind {self.kind!r}")
        w00 = float(np.asarray(self.weight(np.zeros(1, int), np.zeros(1, int)))[0])
        if not w00 > 0:
            raise ValueError("weight(0, 0) must be positive")


def _abel_weight(m, n):
    return np.ones(np.broadcast(m, n).shape)


def _abel_axis(m):
    return np.ones(np.shape(m))


def _log_axis(m):
    return 1.0 / (np.asarray(m, dtype=float) + 1.0)


def _log_weight(m, n):
    return _log_axis(m) * _log_axis(n)


def _log_series(t: float) -> float:
    # sum_m t^m / (m + 1) = -ln(1 - t) / t
    return -math.log1p(-t) / t


def abel() -> WeightFamily:
    return WeightFamily(
        name="abel",
        kind="abel",
        weight=_abel_weight,
        closed_p=lambda r, s: 1.0 / ((1.0 - r) * (1.0 - s)),
        axes=(_abel_axis, _abel_axis),
        axis_tail=lambda M, t: t**M / (1.0 - t),
    )


def logarithmic() -> WeightFamily:
    return WeightFamily(
        name="logarithmic",
        kind="logarithmic",
        weight=_log_weight,
        closed_p=lambda r, s: _log_series(r) * _log_series(s),
        axes=(_log_axis, _log_axis),
        axis_tail=lambda M, t: t**M / ((M + 1) * (1.0 - t)),
    )


def custom(weight: TermFn, name: str = "custom", *, divergent: bool, closed_p=None,
           axes=None, axis_tail=None) -> WeightFamily:
    """Build a user weight family.

    ``divergent`` declares that the partial sums of ``p_mn`` grow without bound.
    The declaration is trusted; a 64x64 spot check only warns when it looks wrong.
    """
    w = WeightFamily(name=name, kind="custom", weight=weight, closed_p=closed_p,
                     axes=axes, axis_tail=axis_tail, divergent=divergent)
    m, n = np.meshgrid(np.arange(64), np.arange(64), indexing="ij")
    vals = np.asarray(weight(m, n), dtype=float)
    if np.any(vals < 0):
        raise ValueError("weights must be nonnegative")
    half = vals[:32, :32].sum()
    full = vals.sum()
    if divergent and full < 1.5 * half:
        warnings.warn(f"weights of {name!r} barely grow on a 64x64 window; "
                      "are the partial sums really divergent?", stacklevel=2)
    if not divergent and full >= 3.5 * half:
        warnings.warn(f"weights of {name!r} keep growing on a 64x64 window "
                      "although declared convergent", stacklevel=2)
    return w


def family(name: str) -> WeightFamily:
    """Look up a built-in family by name (``abel``, ``log``/``logarithmic``)."""
    if name == "abel":
        return abel()
    if name in ("log", "logarithmic"):
        return logarithmic()
    raise ValueError(f"unknown weight family {name!r}")


@dataclass(frozen=True, eq=False)
class DoubleSeq:
    """A real double sequence evaluated on index arrays.

    ``term(m, n)`` must broadcast over integer arrays.  When ``factors`` is
    given, ``term(m, n) == sum(row(m) * col(n) for row, col in factors)``.
    """

    term: TermFn
    bound: Optional[float] = None
    factors: Optional[tuple[tuple[AxisFn, AxisFn], ...]] = None

    @classmethod
    def separable(cls, factors: Sequence[tuple[AxisFn, AxisFn]], bound=None) -> "DoubleSeq":
        factors = tuple(factors)

        def term(m, n):
            return sum(row(m) * col(n) for row, col in factors)

        return cls(term, bound, factors)

    @classmethod
    def constant(cls, c: float) -> "DoubleSeq":
        return cls.separable([(lambda m: np.full(np.shape(m), float(c)), _abel_axis)],
                             bound=abs(float(c)))

    def transpose(self) -> "DoubleSeq":
        term = self.term
        factors = None
        if self.factors is not None:
            factors = tuple((col, row) for row, col in self.factors)
        return DoubleSeq(lambda m, n: term(n, m), self.bound, factors)

    def window(self, size: int) -> np.ndarray:
        m, n = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
        return np.broadcast_to(np.asarray(self.term(m, n), dtype=float), m.shape)

    def check_bound(self, size: int = 64) -> bool:
        if self.bound is None:
            return True
        return bool(np.all(np.abs(self.window(size)) <= self.bound))

    def __add__(self, other: "DoubleSeq") -> "DoubleSeq":
        return self.combine(1.0, other, 1.0)

    def scaled(self, alpha: float) -> "DoubleSeq":
        return self.combine(alpha, None, 0.0)

    def combine(self, alpha: float, other: Optional["DoubleSeq"], beta: float) -> "DoubleSeq":
        """Return ``alpha * self + beta * other``."""
        if other is None:
            f = self.term
            bound = None if self.bound is None else abs(alpha) * self.bound
            factors = None
            if self.factors is not None:
                factors = tuple((_scale_axis(row, alpha), col) for row, col in self.factors)
            return DoubleSeq(lambda m, n: alpha * f(m, n), bound, factors)
        f, g = self.term, other.term
        bound = None
        if self.bound is not None and other.bound is not None:
            bound = abs(alpha) * self.bound + abs(beta) * other.bound
        factors = None
        if self.factors is not None and other.factors is not None:
            factors = tuple((_scale_axis(row, alpha), col) for row, col in self.factors) + \
                tuple((_scale_axis(row, beta), col) for row, col in other.factors)
        return DoubleSeq(lambda m, n: alpha * f(m, n) + beta * g(m, n), bound, factors)


def _scale_axis(fn: AxisFn, c: float) -> AxisFn:
    return lambda m: c * fn(m)


@dataclass(frozen=True)
class TransformResult:
    value: float
    trunc_orders: tuple[int, int]
    tail_bound: float


def _axis_sums(w: WeightFamily, pt: MethodPoint, M: int, N: int):
    m = np.arange(M)
    n = np.arange(N)
    U = w.axes[0](m) * np.power(pt.r, m)
    V = w.axes[1](n) * np.power(pt.s, n)
    return U, V


def _p_tail(w: WeightFamily, pt: MethodPoint, M: int, N: int, P: float,
            UM: Optional[float], VN: Optional[float]) -> float:
    """Bound (or for opaque custom weights, estimate) ``p(r,s) - P_MN``."""
    r, s = pt.r, pt.s
    if w.axes is not None and w.axis_tail is not None and UM is not None:
        Ut, Vt = w.axis_tail(M, r), w.axis_tail(N, s)
        return Ut * (VN + Vt) + UM * Vt
    if w.closed_p is not None:
        p = w.closed_p(r, s)
        return max(p - P, 0.0) + 8 * _EPS * p
    # heuristic for opaque weights: exact for constant weights
    rM, sN = r**M, s**N
    return P * (rM + sN) / ((1.0 - rM) * (1.0 - sN))


def _budget(M: int, N: int, separable: bool, nfactors: int = 1) -> int:
    return nfactors * (M + N) if separable else M * N


def _dense_sums(term: Optional[TermFn], w: WeightFamily, pt: MethodPoint, M: int, N: int):
    """Row-major compensated sums of ``a_mn w_mn r^m s^n`` and of ``w_mn r^m s^n``."""
    rows = max(1, _DENSE_BLOCK // max(N, 1))
    n = np.arange(N)
    spow = np.power(pt.s, n)
    num_parts, p_parts = [], []
    for m0 in range(0, M, rows):
        m = np.arange(m0, min(M, m0 + rows))
        mm, nn = np.meshgrid(m, n, indexing="ij")
        W = np.asarray(w.weight(mm, nn), dtype=float) * np.power(pt.r, m)[:, None] * spow[None, :]
        p_parts.append(math.fsum(W.ravel().tolist()))
        if term is not None:
            T = np.broadcast_to(np.asarray(term(mm, nn), dtype=float), W.shape)
            num_parts.append(math.fsum((T * W).ravel().tolist()))
    num = math.fsum(num_parts) if term is not None else None
    return num, math.fsum(p_parts)


def _evaluate(a: Optional[DoubleSeq], w: WeightFamily, pt: MethodPoint, M: int, N: int):
    """Return (numerator or None, P_MN, UM, VN)."""
    UM = VN = None
    if w.axes is not None:
        U, V = _axis_sums(w, pt, M, N)
        UM, VN = math.fsum(U.tolist()), math.fsum(V.tolist())
        if a is None or a.factors is not None:
            num = None
            if a is not None:
                m, n = np.arange(M), np.arange(N)
                num = math.fsum(
                    math.fsum((np.broadcast_to(row(m), U.shape) * U).tolist())
                    * math.fsum((np.broadcast_to(col(n), V.shape) * V).tolist())
                    for row, col in a.factors
                )
            return num, UM * VN, UM, VN
    num, P = _dense_sums(None if a is None else a.term, w, pt, M, N)
    return num, P, UM, VN


def _is_separable(a: Optional[DoubleSeq], w: WeightFamily) -> bool:
    return w.axes is not None and (a is None or a.factors is not None)


def eval_p(w: WeightFamily, pt, tol: float = 1e-12) -> float:
    """Evaluate ``p(r, s)`` within ``tol``, in closed form when the family has one."""
    pt = _point(pt)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if w.closed_p is not None:
        return float(w.closed_p(pt.r, pt.s))
    _check_cap(pt)
    M = N = START_ORDER
    sep = _is_separable(None, w)
    while True:
        if _budget(M, N, sep) > TERM_BUDGET:
            raise BudgetExceeded(f"p({pt.r}, {pt.s}) did not reach tol={tol:g} "
                                 f"within {TERM_BUDGET:.0e} terms")
        _, P, UM, VN = _evaluate(None, w, pt, M, N)
        if _p_tail(w, pt, M, N, P, UM, VN) <= tol:
            return P
        M, N = 2 * M, 2 * N


def ps_transform(a: DoubleSeq, w: WeightFamily, pt, tol: float = 1e-10,
                 orders: Optional[tuple[int, int]] = None) -> TransformResult:
    """J_p transform of ``a`` at ``pt``.

    With a uniform bound ``B`` on ``a`` the reported ``tail_bound`` is
    ``B * tail(p) / p`` (twice that when ``p`` itself is only known by
    truncation).  Explicit ``orders`` skip the adaptive loop.
    """
    pt = _point(pt)
    if tol <= 0:
        raise ValueError("tol must be positive")
    _check_cap(pt)
    if orders is None and a.bound is None:
        raise MissingBound("sequence has no uniform bound; pass explicit truncation orders")
    sep = _is_separable(a, w)
    nf = len(a.factors) if sep else 1
    M, N = orders if orders is not None else (START_ORDER, START_ORDER)
    while True:
        if _budget(M, N, sep, nf) > TERM_BUDGET:
            raise BudgetExceeded(f"J_p transform at ({pt.r}, {pt.s}) did not reach "
                                 f"tol={tol:g} within {TERM_BUDGET:.0e} terms")
        num, P, UM, VN = _evaluate(a, w, pt, M, N)
        ptail = _p_tail(w, pt, M, N, P, UM, VN)
        if w.closed_p is not None:
            norm, factor = w.closed_p(pt.r, pt.s), 1.0
        else:
            norm, factor = P, 2.0
        value = num / norm
        if a.bound is None:
            return TransformResult(value, (M, N), math.inf)
        tail = factor * a.bound * ptail / norm
        if tail <= tol or orders is not None:
            return TransformResult(value, (M, N), tail)
        M, N = 2 * M, 2 * N


def ps_transform_terms(term_at: Callable[[int, int], np.ndarray], bound: Optional[float],
                       w: WeightFamily, pt, tol: float, max_order: int = 256):
    """Transform a vector-valued sequence given one term at a time.

    Used for black-box operators, where ``term_at(m, n)`` is an array of
    values at grid nodes.  Terms are cached across truncation rounds and
    accumulated row-major with Neumaier compensation.  The rectangle stops
    growing at ``max_order`` with a warning.

    Returns ``(values, (M, N), tail_bound)``.
    """
    pt = _point(pt)
    _check_cap(pt)
    cache: dict[tuple[int, int], np.ndarray] = {}
    M = N = min(START_ORDER, max_order)
    while True:
        total = comp = None
        P_parts = []
        for m in range(M):
            for n in range(N):
                wt = float(np.asarray(w.weight(np.array(m), np.array(n)))) * pt.r**m * pt.s**n
                P_parts.append(wt)
                if (m, n) not in cache:
                    cache[(m, n)] = np.asarray(term_at(m, n), dtype=float)
                x = wt * cache[(m, n)]
                if total is None:
                    total, comp = x.copy(), np.zeros_like(x)
                else:
                    t = total + x
                    comp += np.where(np.abs(total) >= np.abs(x), (total - t) + x, (x - t) + total)
                    total = t
        P = math.fsum(P_parts)
        UM = VN = None
        if w.axes is not None:
            U, V = _axis_sums(w, pt, M, N)
            UM, VN = math.fsum(U.tolist()), math.fsum(V.tolist())
        ptail = _p_tail(w, pt, M, N, P, UM, VN)
        if w.closed_p is not None:
            norm, factor = w.closed_p(pt.r, pt.s), 1.0
        else:
            norm, factor = P, 2.0
        values = (total + comp) / norm
        tail = math.inf if bound is None else factor * bound * ptail / norm
        if tail <= tol:
            return values, (M, N), tail
        if M >= max_order:
            warnings.warn(f"black-box truncation capped at {M}x{N}; tail bound {tail:.3g} "
                          f"exceeds tol {tol:.3g}", stacklevel=2)
            return values, (M, N), tail
        M = N = min(2 * M, max_order)


def _axis_row_sum(w: WeightFamily, fixed: int, t: float, along_m: bool, tol_abs: float) -> float:
    """``sum_k p_{k,fixed} t^k`` (or ``p_{fixed,k}``) with absolute error <= tol_abs."""
    K = START_ORDER
    while True:
        if K > TERM_BUDGET:
            raise BudgetExceeded("row sum did not converge within the term budget")
        k = np.arange(K)
        f = np.full(K, fixed)
        wts = w.weight(k, f) if along_m else w.weight(f, k)
        terms = np.asarray(wts, dtype=float) * np.power(t, k)
        S = math.fsum(terms.tolist())
        if w.axes is not None and w.axis_tail is not None:
            other = w.axes[1] if along_m else w.axes[0]
            tail = float(other(np.array(fixed))) * w.axis_tail(K, t)
        else:
            # heuristic: largest weight in the last half persists
            tail = float(np.max(np.asarray(wts)[K // 2:])) * t**K / (1.0 - t)
        if tail <= tol_abs:
            return S
        K *= 2


def b_regularity_residuals(w: WeightFamily, m0: int, n0: int, pt, tol: float = 1e-12):
    """Normalised row and column weight sums at fixed indices.

    Follows the literal display: the row sum carries only ``r^m`` and the
    column sum only ``s^n`` (no power of the fixed index).
    """
    pt = _point(pt)
    if m0 < 0 or n0 < 0:
        raise ValueError("fixed indices must be nonnegative")
    p = eval_p(w, pt, tol)
    row = _axis_row_sum(w, n0, pt.r, True, tol * p) / p
    col = _axis_row_sum(w, m0, pt.s, False, tol * p) / p
    return row, col


@dataclass(frozen=True)
class PringsheimVerdict:
    converged: bool
    limit: Optional[float] = None


def pringsheim_probe(a: DoubleSeq, window: int, tol: float) -> PringsheimVerdict:
    """Look for Pringsheim convergence on ``window//2 <= m, n < window``.

    Reports convergence only when every term there lies within ``tol`` of a
    common value; otherwise no verdict.  Divergence is never claimed.
    """
    if window < 2:
        raise ValueError("window must be at least 2")
    idx = np.arange(window // 2, window)
    m, n = np.meshgrid(idx, idx, indexing="ij")
    vals = np.broadcast_to(np.asarray(a.term(m, n), dtype=float), m.shape)
    lo, hi = float(vals.min()), float(vals.max())
    if hi - lo <= 2 * tol:
        return PringsheimVerdict(True, 0.5 * (lo + hi))
    return PringsheimVerdict(False)
