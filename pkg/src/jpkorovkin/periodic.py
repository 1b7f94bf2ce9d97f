"""Real 2pi-periodic functions of two variables on the period square."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize

TWO_PI = 2.0 * math.pi
N_DIRECTIONS = 64
N_MAGNITUDES = 16


@dataclass(frozen=True, eq=False)
class Fn2D:
    """A function ``f(x, y)`` evaluated elementwise on broadcastable arrays."""

    eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    name: str = "f"
    claimed_bound: Optional[float] = None

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        shape = np.broadcast(x, y).shape
        return np.broadcast_to(np.asarray(self.eval(x, y), dtype=float), shape)

    def on(self, grid: "Grid2D") -> np.ndarray:
        X, Y = grid.mesh()
        return self(X, Y)

    def __add__(self, other: "Fn2D") -> "Fn2D":
        return linear_combination([(1.0, self), (1.0, other)])

    def __sub__(self, other: "Fn2D") -> "Fn2D":
        return linear_combination([(1.0, self), (-1.0, other)])

    def __mul__(self, c: float) -> "Fn2D":
        return linear_combination([(c, self)])

    __rmul__ = __mul__


def linear_combination(terms) -> Fn2D:
    """``sum(c * f for c, f in terms)`` as a new function."""
    terms = [(float(c), f) for c, f in terms]
    bound = None
    if all(f.claimed_bound is not None for _, f in terms):
        bound = sum(abs(c) * f.claimed_bound for c, f in terms)
    name = " + ".join(f"{c:g}*{f.name}" for c, f in terms)
    return Fn2D(lambda x, y: sum(c * f(x, y) for c, f in terms), name, bound)


@dataclass(frozen=True)
class Grid2D:
    """Uniform nodes ``-pi + 2 pi i / n`` on ``[-pi, pi)`` in each variable."""

    n_x: int
    n_y: int

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError("grid sizes must be positive")

    @classmethod
    def square(cls, n: int) -> "Grid2D":
        return cls(n, n)

    @property
    def xs(self) -> np.ndarray:
        return -math.pi + TWO_PI * np.arange(self.n_x) / self.n_x

    @property
    def ys(self) -> np.ndarray:
        return -math.pi + TWO_PI * np.arange(self.n_y) / self.n_y

    def mesh(self):
        return np.meshgrid(self.xs, self.ys, indexing="ij")


def sup_norm(f: Fn2D, grid: Grid2D) -> float:
    """Max of ``|f|`` over the grid nodes; a lower bound for the true sup-norm."""
    return float(np.max(np.abs(f.on(grid))))


def check_periodic(f: Fn2D, samples: int = 64, atol: float = 1e-12) -> float:
    """Largest periodicity mismatch over a deterministic sample; raise if above ``atol``."""
    g = Grid2D.square(max(2, int(math.isqrt(samples)) or 2))
    X, Y = g.mesh()
    # shift off the nodes so the sample does not only see symmetric points
    X, Y = X + 0.1234, Y - 0.4321
    base = f(X, Y)
    worst = float(max(np.max(np.abs(f(X + TWO_PI, Y) - base)),
                      np.max(np.abs(f(X, Y + TWO_PI) - base))))
    if worst > atol:
        raise ValueError(f"{f.name} is not 2pi-periodic: mismatch {worst:.3g}")
    return worst


def _ladder(delta: float) -> tuple[np.ndarray, np.ndarray]:
    ang = TWO_PI * np.arange(N_DIRECTIONS) / N_DIRECTIONS
    mag = delta * np.arange(1, N_MAGNITUDES + 1) / N_MAGNITUDES
    return (np.outer(mag, np.cos(ang)).ravel(), np.outer(mag, np.sin(ang)).ravel())


def _pair_gap(f: Fn2D, delta: float, z) -> float:
    px, py, theta, rho = z
    rho = min(max(rho, 0.0), delta)
    u, v = px + rho * math.cos(theta), py + rho * math.sin(theta)
    return abs(float(f(u, v) - f(px, py)))


def _modulus_level(f: Fn2D, delta: float, side: int, refine: int = 4) -> float:
    g = Grid2D.square(side)
    X, Y = g.mesh()
    F = f(X, Y)
    dxs, dys = _ladder(delta)
    gaps = np.empty(dxs.size)
    where = np.empty(dxs.size, dtype=np.int64)
    for k, (dx, dy) in enumerate(zip(dxs, dys)):
        diff = np.abs(f(X + dx, Y + dy) - F).ravel()
        where[k] = int(np.argmax(diff))
        gaps[k] = diff[where[k]]
    best = float(gaps.max())
    # polish the strongest candidates with a local search; every evaluated
    # pair is admissible, so the estimate stays a lower bound
    for k in np.argsort(-gaps, kind="stable")[:refine]:
        i = where[k]
        z0 = np.array([X.ravel()[i], Y.ravel()[i],
                       math.atan2(dys[k], dxs[k]), math.hypot(dxs[k], dys[k])])
        res = minimize(lambda z: -_pair_gap(f, delta, z), z0, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000})
        best = max(best, _pair_gap(f, delta, res.x))
    return best


def modulus(f: Fn2D, delta: float, samples: int = 1024) -> float:
    """Estimate the modulus of continuity ``omega(f; delta)`` from below.

    ``samples`` base points form a square period grid of side
    ``isqrt(samples)``.  Each base point is paired with 64 directions times 16
    magnitudes up to ``delta``; the best candidates are then polished by a
    local search.  Dyadically coarser grids are included as well, so refining
    ``samples`` by powers of four never lowers the estimate.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if samples < 2:
        raise ValueError("samples must be at least 2")
    if delta == 0:
        return 0.0
    side = max(1, math.isqrt(samples))
    best = 0.0
    while side >= 1:
        best = max(best, _modulus_level(f, delta, side))
        if side % 2:
            break
        side //= 2
    return best


_CATALOG = (
    ("f0 = 1", lambda x, y: np.ones(np.broadcast(x, y).shape)),
    ("f1 = sin x", lambda x, y: np.sin(x) + 0 * y),
    ("f2 = sin y", lambda x, y: np.sin(y) + 0 * x),
    ("f3 = cos x", lambda x, y: np.cos(x) + 0 * y),
    ("f4 = cos y", lambda x, y: np.cos(y) + 0 * x),
)
_TEST_FUNCTIONS = tuple(Fn2D(fn, name, 1.0) for name, fn in _CATALOG)


def test_function(i: int) -> Fn2D:
    """Korovkin test functions ``1, sin x, sin y, cos x, cos y`` (indices 0..4)."""
    if not 0 <= i <= 4:
        raise IndexError(f"test function index must be in 0..4, got {i}")
    return _TEST_FUNCTIONS[i]


test_function.__test__ = False  # keep pytest from collecting it


def phi_at(x: float, y: float) -> Fn2D:
    """``(u, v) -> sin^2((u - x)/2) + sin^2((v - y)/2)``."""
    x, y = float(x), float(y)
    return Fn2D(lambda u, v: np.sin((u - x) / 2) ** 2 + np.sin((v - y) / 2) ** 2,
                f"phi({x:g}, {y:g})", 2.0)


def sin_sin() -> Fn2D:
    return Fn2D(lambda x, y: np.sin(x) * np.sin(y), "sin x sin y", 1.0)
