"""Invariant half-flat SU(3)-structures and the G2-structures they induce.

Everything is built from six profile functions ``A_i, B_i`` of ``t``; the
orbit metric is ``sum (2A_i)^2 eta_i+^2 + (2B_i)^2 eta_i-^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations

import numpy as np

from .exterior import (
    DT,
    EM,
    EP,
    CoframeScaling,
    InvariantForm,
    d_N,
    hodge_star,
    levi_civita,
    volume_form,
    wedge,
)
from .scalar import ScalarFn, T, constant, evaluate_many, sqrt

__all__ = [
    "ProfileSet",
    "SU3Structure",
    "G2Structure",
    "build_su3",
    "build_g2",
    "check_halfflat",
    "compatibility_residuals",
    "orientation_sign",
    "cone_profiles",
]


@dataclass(frozen=True)
class ProfileSet:
    """The six metric functions plus the common value ``b0 = B_i(0)``."""

    A: tuple[ScalarFn, ScalarFn, ScalarFn]
    B: tuple[ScalarFn, ScalarFn, ScalarFn]
    b0: float
    L: float = float("inf")
    label: str = ""

    def __post_init__(self):
        if len(self.A) != 3 or len(self.B) != 3:
            raise ValueError("ProfileSet needs exactly three A's and three B's")
        object.__setattr__(self, "A", tuple(self.A))
        object.__setattr__(self, "B", tuple(self.B))

    def values(self, t) -> tuple[np.ndarray, np.ndarray]:
        """``(A, B)`` sampled on ``t``, each of shape ``(3, *t.shape)``."""
        vals = evaluate_many([*self.A, *self.B], t)
        return np.stack(vals[:3]), np.stack(vals[3:])

    def check(self, t) -> None:
        """Raise ``ValueError`` if the ansatz degenerates somewhere on ``t``."""
        A, B = self.values(t)
        if np.any(~np.isfinite(A)) or np.any(~np.isfinite(B)):
            raise ValueError("profile values are not finite on the grid")
        if np.any(A <= 0):
            raise ValueError("A_i must be positive on the open interval")
        if self.b0 != 0 and np.any(np.sign(B) != np.sign(self.b0)):
            raise ValueError("all B_i must share the sign of b0")

    def scaled_B(self, factor: float, which: tuple[int, ...] = (0, 1, 2)) -> ProfileSet:
        B = tuple(b * factor if i in which else b for i, b in enumerate(self.B))
        return ProfileSet(self.A, B, self.b0, self.L, self.label + f"*B{factor}")


@dataclass(frozen=True)
class SU3Structure:
    omega: InvariantForm
    omega1: InvariantForm
    omega2: InvariantForm


@dataclass(frozen=True)
class G2Structure:
    phi: InvariantForm
    psi: InvariantForm
    scaling: CoframeScaling
    orientation: int = field(default=1)
    su3: SU3Structure | None = None

    def metric(self, t) -> np.ndarray:
        return self.scaling.metric_diagonal(t)

    def star(self, f: InvariantForm) -> InvariantForm:
        return hodge_star(f, self.scaling, self.orientation)

    @property
    def volume(self) -> InvariantForm:
        return volume_form(self.scaling, self.orientation)


def _eps_terms():
    for i, j, k in permutations(range(3)):
        yield i, j, k, levi_civita(i, j, k)


def build_su3(p: ProfileSet) -> SU3Structure:
    A, B = p.A, p.B
    omega = InvariantForm.zero(2)
    for i in range(3):
        omega = omega + InvariantForm.monomial((EM[i], EP[i]), 4.0 * A[i] * B[i])

    # full sum over permutations of (i, j, k)
    omega1 = InvariantForm.monomial(EM, 8.0 * B[0] * B[1] * B[2])
    omega2 = InvariantForm.monomial(EP, -8.0 * A[0] * A[1] * A[2])
    for i, j, k, eps in _eps_terms():
        omega1 = omega1 + InvariantForm.monomial(
            (EP[i], EP[j], EM[k]), -4.0 * eps * A[i] * A[j] * B[k]
        )
        omega2 = omega2 + InvariantForm.monomial(
            (EM[i], EM[j], EP[k]), 4.0 * eps * B[i] * B[j] * A[k]
        )
    return SU3Structure(omega, omega1, omega2)


@lru_cache(maxsize=1)
def orientation_sign() -> int:
    """Orientation making ``phi ^ psi = +7 vol``, fixed on the cone at ``t = 1``."""
    half_t = 0.5 * T
    cone = ProfileSet((half_t,) * 3, (half_t,) * 3, 0.0, label="cone")
    g = _assemble(cone, 1)
    top = wedge(g.phi, g.psi)
    vol = g.volume
    ratio = top.coefficient(0b1111111)(1.0) / vol.coefficient(0b1111111)(1.0)
    if not np.isclose(abs(ratio), 7.0, rtol=1e-12):
        raise RuntimeError(f"phi ^ psi / vol = {ratio}, expected +-7")
    return 1 if ratio > 0 else -1


def _assemble(p: ProfileSet, orient: int) -> G2Structure:
    s = build_su3(p)
    dt = InvariantForm.basis(DT)
    phi = wedge(dt, s.omega) + s.omega1
    psi = wedge(s.omega, s.omega) * 0.5 - wedge(dt, s.omega2)
    return G2Structure(phi, psi, CoframeScaling.from_profiles(p.A, p.B), orient, s)


def build_g2(p: ProfileSet) -> G2Structure:
    return _assemble(p, orientation_sign())


def compatibility_residuals(s: SU3Structure, t) -> tuple[float, float]:
    """Max coefficient of ``omega ^ Omega2`` and of ``Omega1 ^ Omega2 - (2/3) omega^3``,
    each relative to the size of the terms involved."""
    t = np.asarray(t, dtype=float)
    om2 = wedge(s.omega, s.omega)
    om3 = wedge(om2, s.omega)
    compat = wedge(s.omega, s.omega2)
    norm = wedge(s.omega1, s.omega2) - om3 * (2.0 / 3.0)
    w = s.omega.max_abs(t)
    scale_c = np.maximum(w * s.omega2.max_abs(t), 1e-300)
    scale_n = np.maximum(w**3, 1e-300)
    return (
        float(np.max(compat.max_abs(t) / scale_c)),
        float(np.max(norm.max_abs(t) / scale_n)),
    )


def check_halfflat(s: SU3Structure, t) -> tuple[float, float]:
    """Max-norm of ``d_N Omega1`` and ``d_N (omega^2)`` over the grid."""
    t = np.asarray(t, dtype=float)
    r1 = d_N(s.omega1).max_abs(t)
    r2 = d_N(wedge(s.omega, s.omega)).max_abs(t)
    return float(np.max(r1, initial=0.0)), float(np.max(r2, initial=0.0))


def cone_profiles(b0: float = 0.0) -> ProfileSet:
    """``A_i = t/2``, ``B_i = sign(b0) sqrt(t^2/4 + b0^2)`` (the cone when ``b0 = 0``)."""
    half_t = 0.5 * T
    sign = -1.0 if b0 < 0 else 1.0
    if b0 == 0.0:
        Bi = half_t
    else:
        Bi = sign * sqrt(0.25 * T * T + constant(b0 * b0))
    return ProfileSet((half_t,) * 3, (Bi,) * 3, float(b0), label=f"cone(b0={b0})")

