"""The coclosed system for ``D_i = A_j B_j A_k B_k`` and its singular IVP.

Near the singular orbit ``t = 0`` the solution is an even power series
whose coefficients are matched order by order in exact rational
arithmetic.  Beyond ``t_switch`` the linear system ``D' = M(t) D + N(t)``
is integrated with an adaptive embedded Runge-Kutta pair, in the rescaled
unknown ``E = D/t^2`` so that relative and absolute tolerances mean the
same thing near the singular orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .scalar import ScalarFn, evaluate_many, leaf, odd_polynomial, sine, sqrt
from .structures import ProfileSet

__all__ = [
    "SingularPointError",
    "SeriesError",
    "NumericalFailure",
    "InvariantViolation",
    "CoclosedSystem",
    "SeriesBootstrap",
    "DSolution",
    "rhs",
    "series_bootstrap",
    "solve",
    "recover_B",
]

CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


class SingularPointError(ValueError):
    """rhs evaluated at ``t <= 0``; use the series branch there."""


class SeriesError(ArithmeticError):
    pass


class NumericalFailure(RuntimeError):
    def __init__(self, message: str, t_last: float | None = None):
        super().__init__(message if t_last is None else f"{message} (last good t={t_last:.6g})")
        self.t_last = t_last


class InvariantViolation(RuntimeError):
    """A property guaranteed by the theory failed numerically; indicates a bug."""


@dataclass(frozen=True)
class CoclosedSystem:
    """Free data of the coclosed problem.

    ``taylor[i]`` lists the odd Taylor coefficients of ``A_i`` at 0
    (``[a_{i,1}, a_{i,3}, a_{i,5}, ...]``); missing higher orders are taken
    as zero by the series bootstrap.
    """

    A: tuple[ScalarFn, ScalarFn, ScalarFn]
    taylor: tuple[tuple[float, ...], ...]
    b0: float
    L: float = math.inf
    label: str = ""

    def __post_init__(self):
        if self.b0 == 0 or not math.isfinite(self.b0):
            raise ValueError("b0 must be nonzero")
        if len(self.A) != 3 or len(self.taylor) != 3:
            raise ValueError("need three A_i and three Taylor lists")
        object.__setattr__(self, "A", tuple(self.A))
        object.__setattr__(self, "taylor", tuple(tuple(float(c) for c in tl) for tl in self.taylor))
        for i, tl in enumerate(self.taylor):
            if not tl or abs(tl[0] - 0.5) > 1e-12:
                raise ValueError(
                    f"A_{i + 1} must be odd with derivative 1/2 at t=0 (got {tl[:1]})"
                )

    @classmethod
    def from_odd_poly(cls, coeffs: Sequence[Sequence[float]], b0: float, L: float = math.inf) -> CoclosedSystem:
        A = tuple(odd_polynomial(c, tag=f"A{i + 1}") for i, c in enumerate(coeffs))
        return cls(A, tuple(tuple(c) for c in coeffs), b0, L, label="odd_poly")

    @classmethod
    def sine_profile(cls, b0: float, L: float = 1.0, terms: int = 10) -> CoclosedSystem:
        """``A_i = (L/2pi) sin(pi t / L)``: positive on ``(0, L)``, vanishing at both ends."""
        k = math.pi / L
        amp = 1.0 / (2.0 * k)
        tl = tuple(amp * (-1) ** n * k ** (2 * n + 1) / math.factorial(2 * n + 1) for n in range(terms))
        A = sine(amp, k)
        return cls((A, A, A), (tl, tl, tl), b0, L, label="sine")

    @property
    def a3(self) -> tuple[float, float, float]:
        return tuple(tl[1] if len(tl) > 1 else 0.0 for tl in self.taylor)

    def with_b0(self, b0: float) -> CoclosedSystem:
        return CoclosedSystem(self.A, self.taylor, b0, self.L, self.label)


def rhs(sys: CoclosedSystem, t, D) -> np.ndarray:
    """``D'`` from the coclosed equations; vectorised over ``t``."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise SingularPointError("rhs is singular at t <= 0; use the series bootstrap")
    A = np.stack(evaluate_many(sys.A, t))
    D = np.asarray(D, dtype=float)
    return _rhs_values(A, D)


def _rhs_values(A: np.ndarray, D: np.ndarray) -> np.ndarray:
    P = A[0] * A[1] * A[2]
    w = A**2 * D
    tot = w[0] + w[1] + w[2]
    return P + (tot - 2.0 * w) / P


def _rhs_E(t, alpha: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Same system for ``E = D/t^2`` with ``alpha = A/t`` (regular data at 0)."""
    Pa = alpha[0] * alpha[1] * alpha[2]
    w = alpha**2 * E
    tot = w[0] + w[1] + w[2]
    return t * Pa + ((tot - 2.0 * w) / Pa - 2.0 * E) / t


# -- series bootstrap ------------------------------------------------------


def _coef(f: Sequence[Fraction], g: Sequence[Fraction], n: int) -> Fraction:
    return sum((f[p] * g[n - p] for p in range(n + 1) if f[p] and g[n - p]), Fraction(0))


def _mul(f, g, N):
    return [_coef(f, g, n) for n in range(N)]


def _div(f, g, N):
    """Power-series quotient ``f/g`` truncated to ``N`` terms (``g[0] != 0``)."""
    q: list[Fraction] = []
    for n in range(N):
        s = f[n] - sum((q[p] * g[n - p] for p in range(n)), Fraction(0))
        q.append(s / g[0])
    return q


def _solve3(M, r):
    """Exact Gaussian elimination; ``None`` if singular."""
    a = [list(row) + [ri] for row, ri in zip(M, r)]
    n = len(a)
    for c in range(n):
        piv = next((k for k in range(c, n) if a[k][c] != 0), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        for k in range(n):
            if k != c and a[k][c] != 0:
                f = a[k][c] / a[c][c]
                a[k] = [x - f * y for x, y in zip(a[k], a[c])]
    return [a[k][n] / a[k][k] for k in range(n)]


@dataclass(frozen=True)
class SeriesBootstrap:
    """Even Taylor expansion of ``D_i`` at the singular orbit (exact rationals)."""

    order: int
    coeffs: tuple[tuple[Fraction, ...], ...]  # coeffs[i][n] multiplies t^n
    t_switch: float
    b0: float
    a_coeffs: tuple[tuple[Fraction, ...], ...] = field(repr=False, default=())

    def d(self, i: int, power: int) -> Fraction:
        return self.coeffs[i][power] if power <= self.order else Fraction(0)

    @property
    def d4(self) -> tuple[Fraction, Fraction, Fraction]:
        return tuple(self.d(i, 4) for i in range(3))

    @cached_property
    def float_coeffs(self) -> np.ndarray:
        return np.array([[float(c) for c in row] for row in self.coeffs])

    def evaluate(self, t) -> np.ndarray:
        """``D`` on ``t``, shape ``(3, *t.shape)``."""
        t = np.asarray(t, dtype=float)
        return np.stack([np.polyval(row[::-1], t) for row in self.float_coeffs])

    def evaluate_E(self, t) -> np.ndarray:
        """``D / t^2`` (regular at 0)."""
        t = np.asarray(t, dtype=float)
        return np.stack([np.polyval(row[2:][::-1], t) for row in self.float_coeffs])

    def evaluate_deriv(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = []
        for row in self.float_coeffs:
            dc = row[1:] * np.arange(1, row.size)
            out.append(np.polyval(dc[::-1], t))
        return np.stack(out)

    def b2(self) -> tuple[Fraction, Fraction, Fraction]:
        """Exact ``t^2`` coefficients of the recovered ``B_i``."""
        N = 3
        E = [list(row[2:2 + N]) + [Fraction(0)] * max(0, N - len(row[2:])) for row in self.coeffs]
        alpha = [list(a[1:1 + N]) + [Fraction(0)] * max(0, N - len(a[1:])) for a in self.a_coeffs]
        b0 = Fraction(self.b0)
        out = []
        for i, j, k in CYCLIC:
            num = _mul(E[j], E[k], N)
            den = _mul(E[i], _mul(alpha[i], alpha[i], N), N)
            X = _div(num, den, N)
            # B = sign(b0) sqrt(X) with X(0) = b0^2, so b2 = X_2 / (2 b0)
            out.append(X[2] / (2 * b0))
        return tuple(out)


def series_bootstrap(sys: CoclosedSystem, order: int = 8, t_switch: float = 1e-2) -> SeriesBootstrap:
    """Match powers in ``P D_i' = P^2 - A_i^2 D_i + A_j^2 D_j + A_k^2 D_k``, ``P = A1 A2 A3``."""
    if order < 4 or order % 2:
        raise ValueError("series order must be an even integer >= 4")
    N = order + 3
    a = []
    for tl in sys.taylor:
        s = [Fraction(0)] * N
        for n, c in enumerate(tl):
            if 2 * n + 1 < N:
                s[2 * n + 1] = Fraction(c)
        a.append(s)
    P = _mul(_mul(a[0], a[1], N), a[2], N)
    P2 = _mul(P, P, N)
    A2 = [_mul(x, x, N) for x in a]
    d = [[Fraction(0)] * N for _ in range(3)]
    b0sq = Fraction(sys.b0) ** 2

    def residual(n: int) -> list[Fraction]:
        out = []
        for i, j, k in CYCLIC:
            dD = [(q + 1) * d[i][q + 1] for q in range(N - 1)] + [Fraction(0)]
            r = _coef(P, dD, n) - P2[n]
            r += _coef(A2[i], d[i], n) - _coef(A2[j], d[j], n) - _coef(A2[k], d[k], n)
            out.append(r)
        return out

    for m in range(1, order // 2 + 1):
        p, n = 2 * m, 2 * m + 2
        if m == 1:
            # the free direction: D_i ~ (b0^2/4) t^2 for every i
            for i in range(3):
                d[i][2] = b0sq / 4
            if any(residual(n)):
                raise SeriesError("leading-order equations inconsistent with D_i = b0^2 t^2/4")
            continue
        for i in range(3):
            d[i][p] = Fraction(0)
        r0 = residual(n)
        # d_{l,p} enters the t^(p+2) equation only through the lowest-order
        # coefficients P_3 and (A_l^2)_2
        M = [[P[3] * p + A2[i][2] if l == i else -A2[l][2] for l in range(3)] for i in range(3)]
        x = _solve3(M, [-v for v in r0])
        if x is None:
            raise SeriesError(f"order-{p} coefficient system is singular")
        for i in range(3):
            d[i][p] = x[i]
        if any(residual(n)):
            raise SeriesError(f"order-{p} equations not satisfied after the solve")
    coeffs = tuple(tuple(row[: order + 1]) for row in d)
    return SeriesBootstrap(order, coeffs, t_switch, sys.b0, tuple(tuple(x) for x in a))


# -- full solve ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DSolution:
    system: CoclosedSystem
    bootstrap: SeriesBootstrap
    t: np.ndarray
    D: np.ndarray
    Ddot: np.ndarray
    interpolant: object = field(repr=False)
    t_end: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    @property
    def t_switch(self) -> float:
        return self.bootstrap.t_switch

    def E_at(self, t) -> np.ndarray:
        """``D / t^2``, regular at the singular orbit; shape ``(3, *t.shape)``."""
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).ravel()
        out = np.empty((3, flat.size))
        lo = flat < self.t_switch
        if lo.any():
            out[:, lo] = self.bootstrap.evaluate_E(flat[lo])
        if (~lo).any():
            th = flat[~lo]
            out[:, ~lo] = self.interpolant(th).reshape(3, -1)
        return out.reshape((3,) + t.shape)

    def D_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return t**2 * self.E_at(t)

    def Ddot_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).ravel()
        out = np.empty((3, flat.size))
        pos = flat > 0
        out[:, ~pos] = 0.0
        if pos.any():
            out[:, pos] = rhs(self.system, flat[pos], self.D_at(flat[pos]))
        return out.reshape((3,) + t.shape)

    @cached_property
    def D_fns(self) -> tuple[ScalarFn, ScalarFn, ScalarFn]:
        """``D_i`` as ScalarFn; the derivative is the coclosed right-hand side."""
        A = self.system.A
        fns: list[ScalarFn] = []

        def rhs_expr(i: int) -> ScalarFn:
            j, k = CYCLIC[i][1], CYCLIC[i][2]
            P = A[0] * A[1] * A[2]
            return P + (A[j] * A[j] * fns[j] + A[k] * A[k] * fns[k] - A[i] * A[i] * fns[i]) / P

        for i in range(3):
            fns.append(
                leaf(
                    (lambda t, i=i: self.D_at(t)[i]),
                    deriv=(lambda i=i: rhs_expr(i)),
                    tag=f"D{i + 1}",
                )
            )
        return tuple(fns)

    def profiles(self) -> ProfileSet:
        return ProfileSet(self.system.A, recover_B(self), self.system.b0, self.system.L,
                          label=self.system.label)


def solve(
    sys: CoclosedSystem,
    t_max: float | None = None,
    grid: Sequence[float] | None = None,
    *,
    t_switch: float = 1e-2,
    order: int = 8,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    method: str = "DOP853",
) -> DSolution:
    """Series on ``[0, t_switch]``, adaptive Runge-Kutta beyond."""
    if grid is not None:
        grid = np.asarray(sorted(set(float(x) for x in grid)), dtype=float)
        if t_max is None:
            t_max = float(grid[-1])
    if t_max is None:
        raise ValueError("give t_max or an evaluation grid")
    if not t_max > t_switch > 0:
        raise ValueError("need t_max > t_switch > 0")
    if t_max >= sys.L:
        raise ValueError(f"t_max={t_max} must lie inside the domain [0, {sys.L})")
    if grid is None:
        grid = np.linspace(0.0, t_max, 201)
    if grid[0] < 0 or grid[-1] > t_max:
        raise ValueError("evaluation grid outside [0, t_max]")

    boot = series_bootstrap(sys, order, t_switch)
    y0 = boot.evaluate_E(np.array(t_switch))
    # truncation estimate: the next two even orders of the same expansion
    finer = series_bootstrap(sys, order + 4, t_switch).evaluate_E(np.array(t_switch))
    mismatch = float(np.max(np.abs(finer - y0) / np.abs(finer)))

    probe = np.union1d(grid[grid > 0], np.linspace(t_switch, t_max, 2001))
    if np.any(np.stack(evaluate_many(sys.A, probe)) <= 0):
        raise ValueError("A_i must be positive on the open interval up to t_max")

    def f(t, E):
        alpha = np.array(evaluate_many(sys.A, t), dtype=float).reshape(3) / t
        return _rhs_E(t, alpha, E)

    res = solve_ivp(f, (t_switch, t_max), y0, method=method, rtol=rtol, atol=atol, dense_output=True)
    if not res.success:
        raise NumericalFailure(f"integrator failed: {res.message}", float(res.t[-1]))

    sol = DSolution(
        sys, boot, grid, np.empty((3, 0)), np.empty((3, 0)), res.sol, float(t_max),
        {"nfev": int(res.nfev), "steps": int(res.t.size), "switch_mismatch": mismatch},
    )
    D = sol.D_at(grid)
    Ddot = sol.Ddot_at(grid)
    object.__setattr__(sol, "D", D)
    object.__setattr__(sol, "Ddot", Ddot)

    inner = grid > 0
    A_grid = np.stack(evaluate_many(sys.A, grid[inner]))
    if np.any(A_grid <= 0):
        raise ValueError("A_i must be positive on the open interval")
    if not np.all(np.isfinite(D)):
        raise NumericalFailure("non-finite D on the grid")
    if np.any(D[:, inner] <= 0) or np.any(res.y[:, :] <= 0):
        bad = grid[inner][np.any(D[:, inner] <= 0, axis=0)]
        raise InvariantViolation(f"D_i <= 0 at t={bad[:1]} although D_i > 0 must hold")
    return sol


def recover_B(sol: DSolution) -> tuple[ScalarFn, ScalarFn, ScalarFn]:
    """``B_i = sign(b0) sqrt(D_j D_k / (D_i A_i^2))``, ``B_i(0) = b0``."""
    inner = sol.t > 0
    if np.any(sol.D[:, inner] <= 0):
        raise InvariantViolation("cannot take the root: some D_i <= 0")
    sys = sol.system
    s = 1.0 if sys.b0 > 0 else -1.0
    Dfn = sol.D_fns
    A = sys.A
    out = []
    for i, j, k in CYCLIC:
        expr = s * sqrt(Dfn[j] * Dfn[k] / Dfn[i]) / A[i]

        def value(t, i=i, j=j, k=k):
            t = np.asarray(t, dtype=float)
            E = sol.E_at(t)
            a = A[i](t)
            alpha = np.where(t > 0, a / np.where(t > 0, t, 1.0), 0.5)
            with np.errstate(invalid="ignore"):
                return s * np.sqrt(E[j] * E[k] / E[i]) / alpha

        out.append(leaf(value, deriv=expr.derivative, tag=f"B{i + 1}"))
    return tuple(out)
