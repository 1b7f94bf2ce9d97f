"""Double Fourier series and Abel-Poisson means.

Series layout (all coefficients integrate against ``1/pi^2`` over the square)::

    a00/4 + 1/2 sum_j (a_j0 cos jx + c_j0 sin jx) + 1/2 sum_k (a_0k cos ky + b_0k sin ky)
          + sum_{j,k>=1} (a_jk cos jx cos ky + b_jk cos jx sin ky
                          + c_jk sin jx cos ky + d_jk sin jx sin ky)

Integrals use the trapezoid rule on the uniform periodic grid, which is exact
for trigonometric polynomials below the Nyquist cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CutoffExceeded, QuadratureError
from .periodic import TWO_PI, Fn2D, Grid2D

DEFAULT_CUTOFF = 32
DEFAULT_NQUAD = 256
MAX_NQUAD = 4096


def _block_scale(J: int, K: int) -> np.ndarray:
    S = np.ones((J + 1, K + 1))
    S[0, :] = 0.5
    S[:, 0] = 0.5
    S[0, 0] = 0.25
    return S


@dataclass(frozen=True, eq=False)
class CoeffTable:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    @property
    def J(self) -> int:
        return self.a.shape[0] - 1

    @property
    def K(self) -> int:
        return self.a.shape[1] - 1

    def truncated(self, m: int, n: int) -> "CoeffTable":
        if m > self.J or n > self.K or m < 0 or n < 0:
            raise CutoffExceeded(f"partial sum ({m}, {n}) exceeds cutoff ({self.J}, {self.K})")
        return CoeffTable(*(arr[: m + 1, : n + 1] for arr in (self.a, self.b, self.c, self.d)))

    def damped(self, rho: float, sigma: float) -> "CoeffTable":
        """Multiply the (j, k) block by ``rho**j * sigma**k``."""
        D = np.outer(rho ** np.arange(self.J + 1), sigma ** np.arange(self.K + 1))
        return CoeffTable(self.a * D, self.b * D, self.c * D, self.d * D)

    def scaled(self, alpha: float) -> "CoeffTable":
        return CoeffTable(alpha * self.a, alpha * self.b, alpha * self.c, alpha * self.d)

    def block_magnitude(self) -> np.ndarray:
        return np.max(np.abs(np.stack([self.a, self.b, self.c, self.d])), axis=0)

    def block(self, j: int, k: int) -> Fn2D:
        """The (j, k) harmonic block of the series as a function."""
        sub = np.zeros_like(self.a)
        mask = sub.copy()
        mask[j, k] = 1.0
        t = CoeffTable(self.a * mask, self.b * mask, self.c * mask, self.d * mask)
        return t.as_function(f"block({j},{k})")

    def __call__(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        shape = np.broadcast(x, y).shape
        xf = np.broadcast_to(x, shape).ravel()
        yf = np.broadcast_to(y, shape).ravel()
        j = np.arange(self.J + 1)
        k = np.arange(self.K + 1)
        cx, sx = np.cos(np.outer(xf, j)), np.sin(np.outer(xf, j))
        cy, sy = np.cos(np.outer(yf, k)), np.sin(np.outer(yf, k))
        S = _block_scale(self.J, self.K)
        out = (np.einsum("pj,jk,pk->p", cx, S * self.a, cy)
               + np.einsum("pj,jk,pk->p", cx, S * self.b, sy)
               + np.einsum("pj,jk,pk->p", sx, S * self.c, cy)
               + np.einsum("pj,jk,pk->p", sx, S * self.d, sy))
        return out.reshape(shape)

    def as_function(self, name: str = "series") -> Fn2D:
        return Fn2D(self.__call__, name)


def _check_nquad(n_quad: int, J: int, K: int) -> None:
    if n_quad < 4 * max(J, K, 1) or n_quad & (n_quad - 1):
        raise QuadratureError(
            f"n_quad={n_quad} must be a power of two and at least 4*max(J, K)={4 * max(J, K)}")
    if n_quad > MAX_NQUAD:
        raise QuadratureError(f"n_quad={n_quad} exceeds the quadrature budget {MAX_NQUAD}")


@lru_cache(maxsize=64)
def _grid_samples(f: Fn2D, n: int) -> np.ndarray:
    return np.ascontiguousarray(f.on(Grid2D.square(n)))


def coeffs(f: Fn2D, J: int = DEFAULT_CUTOFF, K: int = DEFAULT_CUTOFF,
           n_quad: int = DEFAULT_NQUAD) -> CoeffTable:
    """Real double Fourier coefficients up to ``(J, K)`` by the periodic trapezoid rule."""
    _check_nquad(n_quad, J, K)
    t = Grid2D.square(n_quad).xs
    F = _grid_samples(f, n_quad)
    cj, sj = np.cos(np.outer(np.arange(J + 1), t)), np.sin(np.outer(np.arange(J + 1), t))
    ck, sk = np.cos(np.outer(np.arange(K + 1), t)), np.sin(np.outer(np.arange(K + 1), t))
    w = 4.0 / (n_quad * n_quad)
    a = w * cj @ F @ ck.T
    b = w * cj @ F @ sk.T
    c = w * sj @ F @ ck.T
    d = w * sj @ F @ sk.T
    # slots the series layout never uses
    b[:, 0] = 0.0
    d[:, 0] = 0.0
    c[0, :] = 0.0
    d[0, :] = 0.0
    return CoeffTable(a, b, c, d)


def partial_sum(t: CoeffTable, m: int, n: int) -> Fn2D:
    """Rectangular partial sum ``S_mn`` of the series held in ``t``."""
    return t.truncated(m, n).as_function(f"S_{m},{n}")


def poisson_kernel(r: float, t):
    """Abel-Poisson kernel ``(1 - r^2) / (1 - 2 r cos t + r^2)``."""
    if not 0.0 <= r < 1.0:
        raise ValueError(f"Poisson kernel needs 0 <= r < 1, got {r}")
    return (1.0 - r * r) / (1.0 - 2.0 * r * np.cos(t) + r * r)


def radii(m: int, n: int) -> tuple[float, float]:
    return m / (m + 1.0), n / (n + 1.0)


class _ConvolutionMean:
    """Abel-Poisson mean evaluated by quadrature of the convolution integral."""

    def __init__(self, f: Fn2D, rho: float, sigma: float, n: int):
        self.f, self.n = f, n
        nodes = Grid2D.square(n).xs
        self.nodes = nodes
        self.Pr = poisson_kernel(rho, nodes)
        self.Ps = poisson_kernel(sigma, nodes)
        # node q holds -pi + 2 pi q / n, so x_a - u_i sits at node a - i + n/2
        a = np.arange(n)
        shift = (a[:, None] - a[None, :] + n // 2) % n
        Cx = self.Pr[shift] / n
        Cy = self.Ps[shift] / n
        self.values = Cx @ _grid_samples(f, n) @ Cy.T

    def _node_index(self, z: np.ndarray):
        q = (z + math.pi) / (TWO_PI / self.n)
        qi = np.rint(q)
        return (qi.astype(np.int64) % self.n), np.abs(q - qi) < 1e-9

    def __call__(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        shape = np.broadcast(x, y).shape
        xf = np.broadcast_to(x, shape).ravel()
        yf = np.broadcast_to(y, shape).ravel()
        ix, okx = self._node_index(xf)
        iy, oky = self._node_index(yf)
        out = np.empty(xf.size)
        on = okx & oky
        out[on] = self.values[ix[on], iy[on]]
        U, V = np.meshgrid(self.nodes, self.nodes, indexing="ij")
        for p in np.flatnonzero(~on):
            G = self.f(xf[p] - U, yf[p] - V)
            out[p] = self.Pr @ G @ self.Ps / (self.n * self.n)
        return out.reshape(shape)


def abel_poisson_mean(f: Fn2D, m: int, n: int, path: str = "damping",
                      n_quad: int = DEFAULT_NQUAD, cutoff: int = DEFAULT_CUTOFF,
                      table: CoeffTable | None = None) -> Fn2D:
    """The ``(m/(m+1), n/(n+1))`` Abel-Poisson mean ``T_mn(f)``.

    ``path="convolution"`` integrates ``f(x-u, y-v) P(rho, u) P(sigma, v)`` on the
    quadrature grid; values at grid nodes are exact sums, other points are
    integrated directly.  ``path="damping"`` scales the coefficient block
    ``(j, k)`` by ``rho**j sigma**k``.
    """
    rho, sigma = radii(m, n)
    if path == "convolution":
        _check_nquad(n_quad, 0, 0)
        return Fn2D(_ConvolutionMean(f, rho, sigma, n_quad), f"T_{m},{n}[{f.name}]")
    if path != "damping":
        raise ValueError(f"unknown path {path!r}")
    if table is None:
        table = coeffs(f, cutoff, cutoff, n_quad)
    elif cutoff > min(table.J, table.K):
        raise CutoffExceeded(f"table cutoff ({table.J}, {table.K}) below requested {cutoff}")
    return table.damped(rho, sigma).as_function(f"T_{m},{n}[{f.name}]")
