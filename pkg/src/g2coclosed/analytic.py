"""Closed-form and quadrature solutions used as independent oracles.

* the cone family ``A_i = t/2`` (explicit),
* the symmetric family ``A_1 = A_2 = A_3``, ``B_1 = B_2 = B_3`` by quadrature,
* the Bryant-Salamon torsion-free metric, tabulated in its radial coordinate,
* the linear growth rate of ``B_1`` for linearly growing ``A_1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .scalar import ScalarFn, T, leaf, sqrt, tanh
from .structures import ProfileSet, cone_profiles

__all__ = [
    "QuadratureError",
    "cone_family",
    "SymmetricFamily",
    "symmetric_solution",
    "BryantSalamonProfile",
    "bryant_salamon",
    "bryant_salamon_point",
    "asymptotic_slope",
    "linear_A",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


class QuadratureError(RuntimeError):
    pass


def cone_family(b0: float) -> ProfileSet:
    """``A_i = t/2``, ``B_i = sign(b0) sqrt(t^2/4 + b0^2)``.

    The metric is ``dt^2 + t^2 sum eta+^2 + (t^2 + 4 b0^2) sum eta-^2``; at
    ``b0 = 0`` it is the cone over the nearly Kaehler ``S^3 x S^3``.
    """
    return cone_profiles(b0)


def _gl_nodes(a: np.ndarray, b: np.ndarray):
    """Gauss-Legendre nodes/weights on each ``[a_k, b_k]`` (broadcast)."""
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    half = 0.5 * (b - a)
    return a + half * (1.0 + _GL_X), half * _GL_W


def _refine(grid: np.ndarray, ratio: float = 1.05, hmax: float = 0.02) -> np.ndarray:
    """Insert points so consecutive nodes differ by at most ``max(hmax, ratio)``."""
    pts = [grid[0]]
    for a, b in zip(grid[:-1], grid[1:]):
        step = max(hmax, (ratio - 1.0) * a)
        n = max(1, int(math.ceil((b - a) / step)))
        pts.extend(np.linspace(a, b, n + 1)[1:])
    return np.asarray(pts)


@dataclass(frozen=True, eq=False)
class SymmetricFamily:
    """``D = (b0^2/4) F + F * int_0^t A^3/F`` with ``F(t) = t^2 exp(G(t))``,
    ``G(t) = int_0^t (1/A - 2/s) ds``.

    ``F`` is the integrating factor normalised so that ``F ~ t^2``; this pins
    ``D = (b0^2/4) t^2 + O(t^4)``.
    """

    A1: ScalarFn
    b0: float
    nodes: np.ndarray
    G: np.ndarray
    E: np.ndarray  # D / t^2 on nodes

    def D_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return t**2 * self._E_spline(t)

    @property
    def _E_spline(self) -> CubicHermiteSpline:
        sp = self.__dict__.get("_sp")
        if sp is None:
            # E' = A^3/t^2 + E (1/A - 2/t), and E'(0) = 0 by evenness
            t = self.nodes[1:]
            A = self.A1(t)
            slope = np.concatenate([[0.0], A**3 / t**2 + self.E[1:] * (1.0 / A - 2.0 / t)])
            sp = CubicHermiteSpline(self.nodes, self.E, slope)
            self.__dict__["_sp"] = sp
        return sp

    def D_fn(self) -> ScalarFn:
        A = self.A1
        Dfn = leaf(self.D_at, tag="D_sym")
        # d/dt [F (c + I)] = (F'/F) D + A^3 and F'/F = 1/A
        Dfn._dspec = lambda: Dfn / A + A * A * A
        return Dfn

    def profiles(self) -> ProfileSet:
        s = 1.0 if self.b0 > 0 else -1.0
        A = self.A1
        Dfn = self.D_fn()
        expr = s * sqrt(Dfn) / A

        def value(t):
            t = np.asarray(t, dtype=float)
            alpha = np.where(t > 0, A(t) / np.where(t > 0, t, 1.0), 0.5)
            return s * np.sqrt(self._E_spline(t)) / alpha

        B = leaf(value, deriv=expr.derivative, tag="B_sym")
        return ProfileSet((A,) * 3, (B,) * 3, self.b0, label="symmetric")


def symmetric_solution(A1: ScalarFn, b0: float, grid: Sequence[float]) -> SymmetricFamily:
    """Quadrature solution of ``D' = A^3 + D/A`` with ``D ~ (b0^2/4) t^2``."""
    if b0 == 0:
        raise ValueError("b0 must be nonzero")
    grid = np.asarray(sorted(set(float(x) for x in grid) | {0.0}), dtype=float)
    if grid[0] < 0:
        raise ValueError("grid must lie in [0, inf)")
    nodes = _refine(grid)
    a, b = nodes[:-1], nodes[1:]

    def g(x):
        return 1.0 / A1(x) - 2.0 / x

    x, w = _gl_nodes(a, b)  # (n, Q)
    G = np.concatenate([[0.0], np.cumsum(np.sum(w * g(x), axis=1))])
    # G at every outer quadrature node, by a nested rule on [a_k, x_q]
    xi, wi = _gl_nodes(np.broadcast_to(a[:, None], x.shape), x)  # (n, Q, Q)
    Gx = G[:-1, None] + np.sum(wi * g(xi), axis=2)
    h = A1(x) ** 3 * np.exp(-Gx) / x**2
    inner = np.concatenate([[0.0], np.cumsum(np.sum(w * h, axis=1))])
    if not (np.all(np.isfinite(G)) and np.all(np.isfinite(inner))):
        raise QuadratureError("quadrature produced non-finite values; is A1 positive?")
    E = np.exp(G) * (0.25 * b0 * b0 + inner)
    return SymmetricFamily(A1, float(b0), nodes, G, E)


@dataclass(frozen=True, eq=False)
class BryantSalamonProfile:
    """Torsion-free profile tabulated on an ``r``-grid.

    The interpolated quantity is ``U = sqrt(r - 1)`` as a function of arc
    length ``t``: it is odd and smooth in ``t``, and its derivative
    ``dU/dt = sqrt((r^2 + r + 1)/r^3) / 2`` is exact, so ``A`` and ``B``
    carry analytic derivatives in ``t``.
    """

    r: np.ndarray
    t: np.ndarray
    U: ScalarFn

    @property
    def R(self) -> ScalarFn:
        return 1.0 + self.U * self.U

    @property
    def A(self) -> ScalarFn:
        # (r/3) sqrt(1 - r^-3) with the factor U pulled out of the root
        R = self.R
        return R / 3.0 * self.U * sqrt((R * R + R + 1.0) * R ** -3.0)

    @property
    def B(self) -> ScalarFn:
        return self.R / math.sqrt(3.0)

    def profiles(self) -> ProfileSet:
        A, B = self.A, self.B
        return ProfileSet((A,) * 3, (B,) * 3, 1.0 / math.sqrt(3.0), label="bryant_salamon")

    @property
    def t_max(self) -> float:
        return float(self.t[-1])


def _dudt(u: np.ndarray) -> np.ndarray:
    r = 1.0 + u * u
    return 0.5 * np.sqrt((r * r + r + 1.0) / r**3)


def _arc_length_increments(r: np.ndarray) -> np.ndarray:
    # s = 1 + u^2 removes the inverse-square-root singularity at s = 1
    u = np.sqrt(r - 1.0)
    x, w = _gl_nodes(u[:-1], u[1:])
    return np.sum(w / _dudt(x), axis=1)


def bryant_salamon(r_grid: Sequence[float] | None = None) -> BryantSalamonProfile:
    if r_grid is None:
        r_grid = np.geomspace(1.0, 1e3, 2000)
    r = np.asarray(r_grid, dtype=float)
    if r.size < 4 or np.any(r < 1.0):
        raise ValueError("r grid must lie in [1, inf) and have at least 4 points")
    if np.any(np.diff(r) <= 0):
        raise ValueError("r grid must be strictly ascending")
    # extra knots where r - 1 is small and the grid in r resolves t poorly
    fill = 1.0 + np.linspace(0.0, min(1.0, math.sqrt(r[-1] - 1.0)), 201) ** 2
    r = np.union1d(r, fill[fill <= r[-1]])
    u = np.sqrt(r - 1.0)
    t = np.concatenate([[0.0], np.cumsum(_arc_length_increments(r))])
    spline = CubicHermiteSpline(t, u, _dudt(u))

    U = leaf(spline, tag="sqrt(r-1)(t)")
    U._dspec = lambda: 0.5 * sqrt((U * U + 1.0) ** -3.0 * ((U * U + 1.0) * (U * U + 1.0) + U * U + 2.0))
    return BryantSalamonProfile(r, t, U)


def bryant_salamon_point(r: float) -> tuple[float, float, float]:
    """``(t, A1, B1)`` at a single radius, by direct quadrature."""
    if r < 1.0:
        raise ValueError("r must be >= 1")
    if r == 1.0:
        return 0.0, 0.0, 1.0 / math.sqrt(3.0)
    rr = 1.0 + (r - 1.0) * np.linspace(0.0, 1.0, 65) ** 2
    t = float(np.sum(_arc_length_increments(rr)))
    return t, r / 3.0 * math.sqrt(1.0 - r**-3), r / math.sqrt(3.0)


def asymptotic_slope(a: float) -> float:
    """Growth rate of ``B_1`` when ``A_1 ~ a t``: ``sqrt(a^2 / (4a - 1))``."""
    if not a > 0.25:
        raise ValueError("no linear asymptote for a <= 1/4")
    return math.sqrt(a * a / (4.0 * a - 1.0))


def linear_A(a: float) -> ScalarFn:
    """Odd profile ``a t + (1/2 - a) tanh t``: slope 1/2 at 0, ``~ a t`` at infinity."""
    return a * T + (0.5 - a) * tanh()
