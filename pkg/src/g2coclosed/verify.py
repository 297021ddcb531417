"""Claim checks for coclosed structures.

Every check returns a :class:`CheckResult`; :func:`verify_profiles` and
:func:`verify_solution` bundle them into an immutable
:class:`VerificationReport` that serialises to JSON.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .exterior import EM, EP, InvariantForm, d, monomial_mask, wedge
from .ode import CYCLIC, CoclosedSystem, DSolution, solve
from .scalar import evaluate_many
from .structures import G2Structure, ProfileSet, build_g2, check_halfflat

__all__ = [
    "SCHEMA_VERSION",
    "CheckResult",
    "VerificationReport",
    "BoundaryFit",
    "default_grid",
    "coclosed_residual",
    "closed_residual",
    "boundary_report",
    "taylor_relations",
    "parity_fit",
    "torsion_report",
    "TorsionReport",
    "FLUX_MONOMIALS",
    "compact_obstruction_demo",
    "CompactReport",
    "continuity_ratio",
    "run_checks",
    "thread_count",
    "verify_profiles",
    "verify_solution",
]

SCHEMA_VERSION = 1
_TINY = 1e-300


@dataclass(frozen=True)
class CheckResult:
    name: str
    anchor: str
    passed: bool
    residual: float
    tolerance: float
    grid: Mapping[str, float] = field(default_factory=dict)
    details: Mapping[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "status": "pass" if self.passed else "fail",
            "residual": _jsonable(self.residual),
            "tolerance": _jsonable(self.tolerance),
            "grid": dict(self.grid),
            "details": _jsonable(dict(self.details)),
        }


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]
    meta: Mapping[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self) -> list[str]:
        return [c.name for c in self.checks]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "passed": self.passed,
            "meta": _jsonable(dict(self.meta)),
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else repr(v)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def _grid_summary(t: np.ndarray) -> dict:
    return {"t_min": float(t.min()), "t_max": float(t.max()), "points": int(t.size)}


# -- grids -------------------------------------------------------------------


def default_grid(t_max: float, t_min: float = 1e-3, per_decade: int = 400) -> np.ndarray:
    """Chebyshev points on every decade of ``[t_min, t_max]``; ``t = 0`` excluded."""
    if not t_max > t_min > 0:
        raise ValueError("need t_max > t_min > 0")
    lo, hi = math.log10(t_min), math.log10(t_max)
    edges = [10.0**k for k in range(math.floor(lo) + 1, math.ceil(hi))]
    edges = [t_min, *[e for e in edges if t_min < e < t_max], t_max]
    k = np.arange(per_decade)
    cheb = 0.5 * (1.0 - np.cos(np.pi * (k + 0.5) / per_decade))
    pts = [a + (b - a) * cheb for a, b in zip(edges[:-1], edges[1:])]
    return np.unique(np.concatenate([*pts, edges]))


# -- coclosedness ------------------------------------------------------------


def _relative_d(f: InvariantForm, t: np.ndarray) -> float:
    num = d(f).max_abs(t)
    den = np.maximum(f.max_abs(t), _TINY)
    return float(np.max(num / den, initial=0.0))


def coclosed_residual(g: G2Structure, grid) -> float:
    """Largest coefficient of ``d psi`` relative to the largest of ``psi``, pointwise."""
    return _relative_d(g.psi, np.asarray(grid, dtype=float))


def closed_residual(g: G2Structure, grid) -> float:
    return _relative_d(g.phi, np.asarray(grid, dtype=float))


# -- smooth extension ----------------------------------------------------------


@dataclass(frozen=True)
class BoundaryFit:
    """Polynomial fits in the distance ``s`` to an endpoint.

    ``A[i]`` and ``B[i]`` hold ascending coefficients in ``s`` (unscaled);
    ``fit_residual`` is the max misfit of each fit on its window.
    """

    end: int
    window: float
    degree: int
    A: tuple[np.ndarray, np.ndarray, np.ndarray]
    B: tuple[np.ndarray, np.ndarray, np.ndarray]
    fit_residual: tuple[float, ...]
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _window_points(window: float, n: int) -> np.ndarray:
    k = np.arange(n)
    return window * 0.5 * (1.0 - np.cos(np.pi * (k + 0.5) / n))


def _scaled_fit(s: np.ndarray, y: np.ndarray, window: float, degree: int):
    x = s / window
    c = np.polynomial.polynomial.polyfit(x, y, degree)
    resid = float(np.max(np.abs(np.polynomial.polynomial.polyval(x, c) - y)))
    return c, resid


def _leak(c_scaled: np.ndarray, wrong_parity: int) -> float:
    scale = max(float(np.max(np.abs(c_scaled))), _TINY)
    return float(np.max(np.abs(c_scaled[wrong_parity::2]))) / scale


def boundary_report(
    p: ProfileSet,
    end: int = 0,
    *,
    window: float = 0.1,
    degree: int = 7,
    tol: float = 1e-5,
    samples: int = 200,
) -> BoundaryFit:
    """Fit the profiles near ``t = 0`` (or ``t = L``) and test the smooth-extension conditions.

    (i)  every ``A_i`` odd in ``s`` with ``|dA_i/ds| = 1/2`` at the endpoint;
    (ii) every ``B_i`` even, with equal nonzero values and equal second derivatives.
    """
    if degree < 5:
        raise ValueError("fit degree must be at least 5")
    if samples <= 2 * (degree + 1):
        raise ValueError("insufficient samples in fit window")
    if end not in (0, 1):
        raise ValueError("end must be 0 or 1")
    if end == 1 and not math.isfinite(p.L):
        raise ValueError("profile has no second endpoint")
    s = _window_points(window, samples)
    t = s if end == 0 else p.L - s
    A, B = p.values(t)
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        fits = (np.full(degree + 1, np.nan),) * 3
        bad = CheckResult("extension_finite", "smooth extension", False, math.inf, tol)
        return BoundaryFit(end, window, degree, fits, fits, (math.inf,), (bad,))

    scale = window ** -np.arange(degree + 1)
    cA, cB, res = [], [], []
    for i in range(3):
        c, r = _scaled_fit(s, A[i], window, degree)
        cA.append(c)
        res.append(r)
    for i in range(3):
        c, r = _scaled_fit(s, B[i], window, degree)
        cB.append(c)
        res.append(r)

    gsum = {"window": window, "degree": degree, "points": samples, "end": end}
    anchor_i = "smooth extension: A_i odd, |A_i'| = 1/2"
    anchor_ii = "smooth extension: B_i even, equal value and second derivative"
    checks = []
    leakA = max(_leak(c, 0) for c in cA)
    checks.append(CheckResult("A_odd", anchor_i, leakA <= tol, leakA, tol, gsum))
    slope = [abs(c[1] * scale[1]) for c in cA]
    r = max(abs(x - 0.5) / 0.5 for x in slope)
    checks.append(CheckResult("A_slope", anchor_i, r <= tol, r, tol, gsum, {"slopes": slope}))
    leakB = max(_leak(c, 1) for c in cB)
    checks.append(CheckResult("B_even", anchor_ii, leakB <= tol, leakB, tol, gsum))
    b0 = [c[0] for c in cB]
    ref = max(max(abs(x) for x in b0), _TINY)
    r = (max(b0) - min(b0)) / ref
    nonzero = ref > tol
    checks.append(
        CheckResult("B_value", anchor_ii, bool(r <= tol and nonzero), r, tol, gsum, {"B_at_end": b0})
    )
    b2 = [c[2] * scale[2] for c in cB]
    spread = (max(b2) - min(b2)) * window**2 / ref
    checks.append(CheckResult("B_second", anchor_ii, spread <= tol, spread, tol, gsum, {"b2": b2}))
    return BoundaryFit(
        end, window, degree,
        tuple(c * scale for c in cA), tuple(c * scale for c in cB),
        tuple(res), tuple(checks),
    )


# -- Taylor data ---------------------------------------------------------------


def _even_fit(s: np.ndarray, y: np.ndarray, window: float, n_terms: int) -> np.ndarray:
    x = (s / window) ** 2
    c = np.polynomial.polynomial.polyfit(x, y, n_terms - 1)
    return c * window ** (-2.0 * np.arange(n_terms))


def taylor_relations(sol: DSolution, *, tol: float = 1e-6, window: float = 0.1) -> tuple[CheckResult, CheckResult]:
    """Exact ``d_{i,4}`` from the recurrence and fitted ``b_{i,2}`` against closed forms."""
    sys = sol.system
    b0 = Fraction(sys.b0)
    a3 = [Fraction(x) for x in sys.a3]
    d4 = sol.bootstrap.d4
    expected_d4 = [Fraction(1, 16) - b0 * b0 * a / 2 for a in a3]
    exact = all(x == y for x, y in zip(d4, expected_d4))
    r_d4 = max(abs(float(x - y)) for x, y in zip(d4, expected_d4))
    c_d4 = CheckResult(
        "taylor_d4", "fourth-order coefficient of D_i", exact, r_d4, 0.0,
        details={"d4": [float(x) for x in d4], "expected": [float(x) for x in expected_d4]},
    )

    expected_b2 = 1.0 / (8.0 * sys.b0) - sys.b0 * sum(sys.a3)
    s = _window_points(window, 200)
    B = evaluate_many(sol.profiles().B, s)
    fitted = [float(_even_fit(s, B[i], window, 5)[1]) for i in range(3)]
    r_b2 = max(abs(f - expected_b2) for f in fitted) / max(1.0, abs(expected_b2))
    c_b2 = CheckResult(
        "taylor_b2", "second-order coefficient of B_i", r_b2 <= tol, r_b2, tol,
        {"window": window, "points": 200},
        {"fitted": fitted, "expected": expected_b2, "exact_series": [float(x) for x in sol.bootstrap.b2()]},
    )
    return c_d4, c_b2


def parity_fit(sol: DSolution, *, tol: float = 1e-6, window: float = 0.1, degree: int = 7) -> CheckResult:
    """Odd-power leakage of a full polynomial fit to ``D_i`` near 0."""
    s = _window_points(window, 200)
    D = sol.D_at(s)
    leak = 0.0
    for i in range(3):
        c, _ = _scaled_fit(s, D[i], window, degree)
        even = max(float(np.max(np.abs(c[0::2]))), _TINY)
        leak = max(leak, float(np.max(np.abs(c[1::2]))) / even)
    return CheckResult(
        "parity_D", "D_i even", leak <= tol, leak, tol, {"window": window, "degree": degree}
    )


# -- torsion and flux ------------------------------------------------------------


def _flux_monomial(i: int) -> tuple[int, int]:
    j, k = CYCLIC[i][1], CYCLIC[i][2]
    j, k = min(j, k), max(j, k)
    return monomial_mask((EM[j], EM[k], EP[j], EP[k]))


#: ``(sign, mask)`` of eta_jk^- ^ eta_jk^+ for i = 1, 2, 3 with {i, j, k} = {1, 2, 3}
FLUX_MONOMIALS = tuple(_flux_monomial(i) for i in range(3))


def _orth_max(f: InvariantForm, g: G2Structure, t: np.ndarray) -> np.ndarray:
    """Pointwise max of ``f``'s components in the orthonormal coframe."""
    fac = evaluate_many(g.scaling.factors(), t)
    out = np.zeros(t.shape)
    for mask, c in f.terms.items():
        v = np.abs(c(t))
        for b in range(7):
            if mask >> b & 1:
                v = v / np.abs(fac[b])
        out = np.maximum(out, v)
    return out


def _closed_form_flux(p: ProfileSet, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form ``dH`` coefficients on the three orbit monomials, and the bracket relative to the
    size of the bracket's terms; both of shape ``(3, len(t))``."""
    A, B = p.A, p.B
    P = B[0] * B[1] * B[2]
    Q = [A[1] * A[2] * B[0], A[2] * A[0] * B[1], A[0] * A[1] * B[2]]
    dP = P.derivative()
    dQ = [q.derivative() for q in Q]
    vals = evaluate_many([*A, *B, dP, *dQ], t)
    a, b, dp, dq = vals[0:3], vals[3:6], vals[6], vals[7:10]
    pref = np.abs(a[0] * b[0] * a[1] * b[1] * a[2] * b[2]) / 6.0
    out, rel = [], []
    for i in range(3):
        signs = [1.0 if m != i else -1.0 for m in range(3)]
        bracket = -4.0 * a[i] * b[i] + dp + sum(sg * x for sg, x in zip(signs, dq))
        size = 4.0 * np.abs(a[i] * b[i]) + np.abs(dp) + sum(np.abs(x) for x in dq)
        out.append(16.0 * pref * bracket)
        rel.append(np.abs(bracket) / np.maximum(size, _TINY))
    return np.stack(out), np.stack(rel)


@dataclass(frozen=True)
class TorsionReport:
    tau0: float
    coclosed: float
    tau3: InvariantForm | None
    H: InvariantForm | None
    dH: InvariantForm | None
    dH_support: frozenset[int]
    dH_orbital_support: frozenset[int]
    dH_max: float
    formula_factor: float
    formula_residual: float
    formula_bracket_max: float
    checks: tuple[CheckResult, ...]


def torsion_report(
    g: G2Structure,
    grid,
    *,
    profiles: ProfileSet | None = None,
    coclosed_tol: float = 1e-7,
    tau0_tol: float = 1e-10,
) -> TorsionReport:
    """``tau0``, and for coclosed input ``tau3 = *d phi``, ``H = -tau3`` and ``dH`` two ways.

    Route (a) differentiates ``H``; route (b) evaluates the closed-form
    coefficients (needs ``profiles``).  The two are compared through one
    least-squares scalar, which is reported, not asserted.
    """
    t = np.asarray(grid, dtype=float)
    dphi = d(g.phi)
    top = wedge(dphi, g.phi)
    tau0_form = g.star(top) * (1.0 / 7.0)
    tau0_vals = tau0_form.max_abs(t)
    scale = 1.0 + _orth_max(dphi, g, t)
    tau0 = float(np.max(tau0_vals / scale, initial=0.0))
    gsum = _grid_summary(t)
    checks = [CheckResult("tau0", "tau0 vanishes on the ansatz", tau0 <= tau0_tol, tau0, tau0_tol, gsum)]
    cc = coclosed_residual(g, t)
    nan = float("nan")
    if cc > coclosed_tol:
        return TorsionReport(
            tau0, cc, None, None, None, frozenset(), frozenset(), nan, nan, nan, nan, tuple(checks)
        )

    tau3 = g.star(dphi)
    H = -tau3
    dH = d(H)
    vals = dH.evaluate(t)
    dH_abs = dH.max_abs(t)
    ref = np.maximum(_orth_max(g.phi, g, t) * (1.0 + _orth_max(tau3, g, t)), _TINY)
    dH_max = float(np.max(_orth_max(dH, g, t) / ref, initial=0.0))
    support = frozenset(
        m for m, v in vals.items() if np.max(np.abs(v)) > 1e-9 * max(float(np.max(dH_abs)), _TINY)
    )
    factor = resid = bracket = nan
    if profiles is not None:
        rb, rel = _closed_form_flux(profiles, t)
        ra = np.stack([FLUX_MONOMIALS[i][0] * vals.get(FLUX_MONOMIALS[i][1], np.zeros_like(t)) for i in range(3)])
        bracket = float(np.max(rel))
        den = float(np.sum(rb * rb))
        if den > 0:
            factor = float(np.sum(ra * rb) / den)
            resid = float(np.linalg.norm(ra - factor * rb) / max(np.linalg.norm(ra), _TINY))
    # the closed-form coefficients only describe the part of dH along the orbits
    orbital = frozenset(m for m in support if not m & 1)
    extra = orbital - {m for _, m in FLUX_MONOMIALS}
    checks.append(
        CheckResult(
            "flux_support", "orbital part of dH lives on eta_jk^- ^ eta_jk^+", not extra,
            float(len(extra)), 0.0, gsum,
            {"orbital_support": sorted(orbital), "dt_support": sorted(support - orbital)},
        )
    )
    return TorsionReport(
        tau0, cc, tau3, H, dH, support, orbital, dH_max, factor, resid, bracket, tuple(checks)
    )


# -- compact obstruction -----------------------------------------------------------


@dataclass(frozen=True)
class CompactReport:
    eps: tuple[float, ...]
    B_end: tuple[float, ...]
    growth: tuple[float, ...]
    sumD_min_slope: float
    sumD_half: float
    sumD_end: float
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def verdict(self) -> str:
        if self.passed:
            return f"no compact extension: sum D(1-) = {self.sumD_end:.6g} > 0"
        return "inconclusive"


def compact_obstruction_demo(
    sys: CoclosedSystem | None = None,
    eps: Sequence[float] = (1e-1, 1e-2, 1e-3),
    *,
    points: int = 2001,
    growth_min: float = 10.0,
) -> CompactReport:
    """Integrate to ``L - eps`` and record monotone ``sum D`` and the blow-up of ``B``."""
    if sys is None:
        sys = CoclosedSystem.sine_profile(1.0)
    L = sys.L
    if not math.isfinite(L):
        raise ValueError("compact demo needs a finite interval length L")
    eps = tuple(sorted(float(e) for e in eps)[::-1])
    t_end = [L - e for e in eps]
    grid = np.union1d(np.linspace(0.0, t_end[-1], points), t_end)
    sol = solve(sys, grid=grid)
    slope = sol.Ddot.sum(axis=0)
    sumD = sol.D.sum(axis=0)
    B = sol.profiles().B
    B_end = tuple(float(abs(B[0](np.array(te)))) for te in t_end)
    growth = tuple(b1 / b0 for b0, b1 in zip(B_end[:-1], B_end[1:]))
    half = float(sol.D_at(np.array(0.5 * L)).sum())
    end = float(sumD[-1])
    gsum = _grid_summary(grid)
    checks = (
        CheckResult("sumD_increasing", "d(D1+D2+D3)/dt > 0", bool(np.all(slope[1:] > 0)),
                    float(np.min(slope[1:])), 0.0, gsum),
        CheckResult("sumD_positive_end", "sum D cannot vanish at the far end", bool(end > half > 0),
                    end, 0.0, gsum, {"sumD_half": half}),
        CheckResult("B_blowup", "B_i blow up at the far orbit",
                    bool(len(growth) > 0 and min(growth) >= growth_min),
                    float(min(growth) if growth else 0.0), growth_min, gsum,
                    {"eps": eps, "B1": B_end}),
    )
    return CompactReport(eps, B_end, growth, float(np.min(slope[1:])), half, end, checks)


# -- continuous dependence ------------------------------------------------------------


def continuity_ratio(sys: CoclosedSystem, delta: float = 1e-4, t_max: float = 1.0, points: int = 201) -> tuple[float, float, float]:
    """``(dist(delta), dist(delta/10), ratio)`` with ``dist`` the sup-norm change of ``D``."""
    grid = np.linspace(0.0, t_max, points)
    base = solve(sys, grid=grid).D

    def dist(dl: float) -> float:
        other = solve(sys.with_b0(sys.b0 * (1.0 + dl)), grid=grid).D
        return float(np.max(np.abs(other - base)))

    d1, d2 = dist(delta), dist(delta / 10.0)
    return d1, d2, d2 / d1


# -- harness ----------------------------------------------------------------------------


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("G2C_THREADS", "")))
    except ValueError:
        return min(8, os.cpu_count() or 1)


def run_checks(
    jobs: Sequence[tuple[str, Callable[[], CheckResult | Sequence[CheckResult]]]],
    *,
    threads: int | None = None,
    meta: Mapping[str, object] | None = None,
) -> VerificationReport:
    """Run independent check callables concurrently; order follows ``jobs``."""
    n = threads or thread_count()
    with ThreadPoolExecutor(max_workers=n) as ex:
        futures = [ex.submit(fn) for _, fn in jobs]
        out: list[CheckResult] = []
        for (name, _), fut in zip(jobs, futures):
            try:
                res = fut.result()
            except Exception as exc:  # a crashing check is a failing check
                res = CheckResult(name, "harness", False, math.inf, 0.0, details={"error": repr(exc)})
            out.extend([res] if isinstance(res, CheckResult) else res)
    return VerificationReport(tuple(out), dict(meta or {}))


def _profile_jobs(p: ProfileSet, g: G2Structure, t: np.ndarray, tol: float, torsion_free: bool):
    gs = _grid_summary(t)

    def cocl():
        r = coclosed_residual(g, t)
        return CheckResult("coclosed", "d psi = 0", r <= tol, r, tol, gs)

    def halfflat():
        r1, r2 = check_halfflat(g.su3, t)
        r = max(r1, r2)
        return CheckResult("half_flat", "d Omega1 = 0 and d(omega^2) = 0 on orbits", r <= 1e-12, r, 1e-12, gs)

    def torsion():
        rep = torsion_report(g, t, profiles=p, coclosed_tol=tol)
        extra = {"dH_max": rep.dH_max, "formula_factor": rep.formula_factor, "formula_residual": rep.formula_residual}
        return [CheckResult(c.name, c.anchor, c.passed, c.residual, c.tolerance, c.grid, {**c.details, **extra})
                for c in rep.checks]

    def closed():
        r = closed_residual(g, t)
        if torsion_free:
            return CheckResult("closed", "d phi = 0 (torsion-free)", r <= tol, r, tol, gs)
        return CheckResult("closed", "d phi (informational)", True, r, math.inf, gs)

    def boundary():
        return list(boundary_report(p, 0).checks)

    return [("coclosed", cocl), ("half_flat", halfflat), ("torsion", torsion),
            ("closed", closed), ("boundary", boundary)]


def verify_profiles(
    p: ProfileSet, grid=None, *, tol: float = 1e-7, torsion_free: bool = False,
    t_max: float = 5.0, threads: int | None = None,
) -> VerificationReport:
    """Checks that only need the six profile functions."""
    t = default_grid(t_max) if grid is None else np.asarray(grid, dtype=float)
    g = build_g2(p)
    return run_checks(_profile_jobs(p, g, t, tol, torsion_free), threads=threads,
                      meta={"label": p.label, "b0": p.b0, "grid": _grid_summary(t)})


def verify_solution(
    sol: DSolution, grid=None, *, tol: float = 1e-7, threads: int | None = None,
) -> VerificationReport:
    """Full suite for a solved system: profile checks plus series, positivity and consistency."""
    t = default_grid(sol.t_end) if grid is None else np.asarray(grid, dtype=float)
    p = sol.profiles()
    g = build_g2(p)
    gs = _grid_summary(t)

    def positivity():
        D = sol.D_at(t)
        m = float(np.min(D))
        return CheckResult("positivity", "D_i > 0", m > 0, m, 0.0, gs)

    def consistency():
        A, B = p.values(t)
        D = sol.D_at(t)
        r = 0.0
        for i, j, k in CYCLIC:
            r = max(r, float(np.max(np.abs(A[j] * B[j] * A[k] * B[k] - D[i]) / D[i])))
        return CheckResult("consistency", "D_i = A_j B_j A_k B_k", r <= 1e-9, r, 1e-9, gs)

    def monotone():
        s = sol.Ddot_at(t).sum(axis=0)
        m = float(np.min(s))
        return CheckResult("sumD_increasing", "d(D1+D2+D3)/dt > 0", m > 0, m, 0.0, gs)

    jobs = _profile_jobs(p, g, t, tol, False) + [
        ("positivity", positivity),
        ("consistency", consistency),
        ("sumD_increasing", monotone),
        ("parity", lambda: parity_fit(sol)),
        ("taylor", lambda: list(taylor_relations(sol))),
    ]
    meta = {"label": sol.system.label, "b0": sol.system.b0, "grid": gs, **sol.diagnostics}
    return run_checks(jobs, threads=threads, meta=meta)
