"""Sparse exterior algebra on the invariant coframe of ``I x SU(2)^2``.

The coframe is ``dt, e1+, e2+, e3+, e1-, e2-, e3-`` with codes 0..6.  A
monomial is a 7-bit mask; its wedge factors are always taken in ascending
code order, and any reordering sign lives in the coefficient.

Coefficients are :class:`~g2coclosed.scalar.ScalarFn` objects; monomial
signs are exact integers.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

from .scalar import MissingDerivativeError, ScalarFn, constant, evaluate_many

__all__ = [
    "DT",
    "EP",
    "EM",
    "BASIS_NAMES",
    "FULL_MASK",
    "DegreeError",
    "SingularMetricError",
    "InvariantForm",
    "CoframeScaling",
    "monomial_mask",
    "mask_indices",
    "mask_name",
    "merge_sign",
    "levi_civita",
    "wedge",
    "d_N",
    "d",
    "hodge_star",
    "volume_form",
    "structure_table",
]

DT = 0
EP = (1, 2, 3)
EM = (4, 5, 6)
BASIS_NAMES = ("dt", "e1+", "e2+", "e3+", "e1-", "e2-", "e3-")
FULL_MASK = 0b1111111


class DegreeError(ValueError):
    pass


class SingularMetricError(ValueError):
    pass


def mask_indices(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(7) if mask >> i & 1)


def mask_name(mask: int) -> str:
    if mask == 0:
        return "1"
    return "^".join(BASIS_NAMES[i] for i in mask_indices(mask))


def merge_sign(m1: int, m2: int) -> int:
    """Sign of ``e^{m1} ^ e^{m2}`` relative to ``e^{m1|m2}`` (0 if they overlap)."""
    if m1 & m2:
        return 0
    inversions = 0
    for i in mask_indices(m1):
        inversions += bin(m2 & ((1 << i) - 1)).count("1")
    return -1 if inversions & 1 else 1


def monomial_mask(indices: Sequence[int]) -> tuple[int, int]:
    """Canonicalise a wedge of coframe codes into ``(sign, mask)``."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, 0
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    mask = 0
    for i in idx:
        if not 0 <= i < 7:
            raise ValueError(f"basis code out of range: {i}")
        mask |= 1 << i
    return sign, mask


def levi_civita(i: int, j: int, k: int) -> int:
    if len({i, j, k}) < 3:
        return 0
    return 1 if (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1


# -- integer-coefficient forms used for the structure equations ------------

IntForm = dict  # mask -> int


def _iadd(acc: IntForm, mask: int, c: int) -> None:
    v = acc.get(mask, 0) + c
    if v:
        acc[mask] = v
    else:
        acc.pop(mask, None)


def _iwedge(f: Mapping[int, int], g: Mapping[int, int]) -> IntForm:
    out: IntForm = {}
    for m1, c1 in f.items():
        for m2, c2 in g.items():
            s = merge_sign(m1, m2)
            if s:
                _iadd(out, m1 | m2, s * c1 * c2)
    return out


def _generator_differential(code: int) -> IntForm:
    """``d`` of a single coframe element, with full summation over j, k."""
    out: IntForm = {}
    if code == DT:
        return out
    if code in EP:
        i = code - 1
        for j, k in permutations(range(3), 2):
            eps = levi_civita(i, j, k)
            if not eps:
                continue
            for a, b in ((EP[j], EP[k]), (EM[j], EM[k])):
                s, m = monomial_mask((a, b))
                _iadd(out, m, -eps * s)
        return out
    i = code - 4
    for j, k in permutations(range(3), 2):
        eps = levi_civita(i, j, k)
        if not eps:
            continue
        s, m = monomial_mask((EM[j], EP[k]))
        _iadd(out, m, -2 * eps * s)
    return out


@lru_cache(maxsize=None)
def _dn_monomial(mask: int) -> tuple[tuple[int, int], ...]:
    if mask == 0:
        return ()
    idx = mask_indices(mask)
    head = 1 << idx[0]
    rest = mask & ~head
    # d(a ^ rest) = da ^ rest - a ^ d(rest)  for a 1-form a
    out = _iwedge(_generator_differential(idx[0]), {rest: 1})
    for m, c in _iwedge({head: 1}, dict(_dn_monomial(rest))).items():
        _iadd(out, m, -c)
    return tuple(sorted(out.items()))


def structure_table() -> dict[int, dict[int, int]]:
    """``d_N`` of every coframe monomial as exact integer combinations."""
    return {m: dict(_dn_monomial(m)) for m in range(1 << 7)}


# -- forms ----------------------------------------------------------------


class InvariantForm:
    """Homogeneous invariant form: ``{mask: ScalarFn}`` plus its degree."""

    __slots__ = ("_terms", "degree")

    def __init__(self, terms: Mapping[int, ScalarFn | float], degree: int):
        if not 0 <= degree <= 7:
            raise DegreeError(f"degree {degree} outside 0..7")
        clean: dict[int, ScalarFn] = {}
        for mask, c in terms.items():
            if bin(mask).count("1") != degree:
                raise DegreeError(
                    f"monomial {mask_name(mask)} does not have degree {degree}"
                )
            c = c if isinstance(c, ScalarFn) else constant(float(c))
            if not c.is_zero:
                clean[mask] = c
        self._terms = clean
        self.degree = degree

    @classmethod
    def zero(cls, degree: int) -> InvariantForm:
        return cls({}, degree)

    @classmethod
    def monomial(cls, indices: Sequence[int], coeff: ScalarFn | float = 1.0) -> InvariantForm:
        sign, mask = monomial_mask(indices)
        if sign == 0:
            return cls.zero(len(indices))
        return cls({mask: coeff * sign if sign < 0 else coeff}, len(indices))

    @classmethod
    def basis(cls, code: int) -> InvariantForm:
        return cls({1 << code: 1.0}, 1)

    @classmethod
    def scalar(cls, f: ScalarFn | float) -> InvariantForm:
        return cls({0: f}, 0)

    @property
    def terms(self) -> Mapping[int, ScalarFn]:
        return dict(self._terms)

    def __iter__(self):
        return iter(sorted(self._terms.items()))

    def __len__(self):
        return len(self._terms)

    def coefficient(self, mask: int) -> ScalarFn:
        return self._terms.get(mask, constant(0.0))

    def _check_same_degree(self, other: InvariantForm) -> None:
        if self.degree != other.degree:
            raise DegreeError(f"cannot add forms of degree {self.degree} and {other.degree}")

    def __add__(self, other: InvariantForm) -> InvariantForm:
        self._check_same_degree(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out[m] + c if m in out else c
        return InvariantForm(out, self.degree)

    def __neg__(self) -> InvariantForm:
        return InvariantForm({m: -c for m, c in self._terms.items()}, self.degree)

    def __sub__(self, other: InvariantForm) -> InvariantForm:
        return self + (-other)

    def __mul__(self, f) -> InvariantForm:
        if isinstance(f, InvariantForm):
            return NotImplemented
        return InvariantForm({m: c * f for m, c in self._terms.items()}, self.degree)

    __rmul__ = __mul__

    def __xor__(self, other: InvariantForm) -> InvariantForm:
        return wedge(self, other)

    def map_coefficients(self, fn) -> InvariantForm:
        return InvariantForm({m: fn(m, c) for m, c in self._terms.items()}, self.degree)

    def evaluate(self, t) -> dict[int, np.ndarray]:
        masks = sorted(self._terms)
        vals = evaluate_many([self._terms[m] for m in masks], t)
        return dict(zip(masks, vals))

    def max_abs(self, t) -> np.ndarray:
        """Pointwise max-norm of the coefficient vector."""
        t = np.asarray(t, dtype=float)
        vals = self.evaluate(t)
        if not vals:
            return np.zeros(t.shape)
        return np.max(np.abs(np.stack(list(vals.values()))), axis=0)

    def support(self, t, rtol: float = 1e-9) -> set[int]:
        """Masks whose coefficient is not negligible on the grid ``t``."""
        vals = self.evaluate(t)
        if not vals:
            return set()
        mags = {m: float(np.max(np.abs(v))) for m, v in vals.items()}
        scale = max(mags.values())
        if scale == 0.0:
            return set()
        return {m for m, v in mags.items() if v > rtol * scale}

    def __repr__(self):
        body = " + ".join(f"{c!r}*{mask_name(m)}" for m, c in self)
        return f"InvariantForm(deg={self.degree}: {body or '0'})"


def wedge(f: InvariantForm, g: InvariantForm) -> InvariantForm:
    deg = f.degree + g.degree
    if deg > 7:
        raise DegreeError(f"wedge of degrees {f.degree}+{g.degree} exceeds 7")
    acc: dict[int, list[ScalarFn]] = {}
    for m1, c1 in f._terms.items():
        for m2, c2 in g._terms.items():
            s = merge_sign(m1, m2)
            if s:
                acc.setdefault(m1 | m2, []).append(c1 * c2 if s > 0 else -(c1 * c2))
    return InvariantForm({m: sum(cs[1:], cs[0]) for m, cs in acc.items()}, deg)


def wedge_all(forms: Iterable[InvariantForm]) -> InvariantForm:
    forms = list(forms)
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def d_N(f: InvariantForm) -> InvariantForm:
    """Exterior derivative along the orbit (coefficients held fixed)."""
    if f.degree >= 7:
        raise DegreeError("d_N of a top-degree form")
    acc: dict[int, list[ScalarFn]] = {}
    for m, c in f._terms.items():
        for m2, k in _dn_monomial(m):
            acc.setdefault(m2, []).append(c * k)
    return InvariantForm({m: sum(cs[1:], cs[0]) for m, cs in acc.items()}, f.degree + 1)


def d(f: InvariantForm) -> InvariantForm:
    """Full exterior derivative ``dt ^ d/dt + d_N``."""
    if f.degree >= 7:
        raise DegreeError("d of a top-degree form")
    dt_part: dict[int, ScalarFn] = {}
    for m, c in f._terms.items():
        try:
            dc = c.derivative()
        except MissingDerivativeError as exc:
            raise MissingDerivativeError(
                f"coefficient of {mask_name(m)} has no derivative ({exc})"
            ) from exc
        if dc.is_zero or m & 1:
            continue
        dt_part[m | 1] = dc  # dt sits in front, sign +1
    return InvariantForm(dt_part, f.degree + 1) + d_N(f)


@dataclass(frozen=True)
class CoframeScaling:
    """Orthonormalisation ``e0 = dt, e_i = a_i eta_i+, e_{i+3} = b_i eta_i-``.

    Entries may be plain numbers (one instant) or ScalarFn (the whole family).
    """

    a: tuple
    b: tuple

    def __post_init__(self):
        if len(self.a) != 3 or len(self.b) != 3:
            raise ValueError("CoframeScaling needs three a's and three b's")
        for v in (*self.a, *self.b):
            if not isinstance(v, ScalarFn) and float(v) == 0.0:
                raise SingularMetricError("zero entry in coframe scaling")

    @classmethod
    def from_profiles(cls, A: Sequence[ScalarFn], B: Sequence[ScalarFn]) -> CoframeScaling:
        return cls(tuple(2.0 * x for x in A), tuple(2.0 * x for x in B))

    def factors(self) -> tuple[ScalarFn, ...]:
        out = [constant(1.0)]
        for v in (*self.a, *self.b):
            out.append(v if isinstance(v, ScalarFn) else constant(float(v)))
        return tuple(out)

    def metric_diagonal(self, t) -> np.ndarray:
        """Diagonal of the metric in the eta coframe, shape ``(7, *t.shape)``."""
        vals = evaluate_many(self.factors(), t)
        return np.stack([v**2 for v in vals])


def _mask_scale(factors: Sequence[ScalarFn], mask: int) -> ScalarFn:
    out = constant(1.0)
    for i in mask_indices(mask):
        if i:
            out = out * factors[i]
    return out


def hodge_star(f: InvariantForm, s: CoframeScaling, orientation_sign: int) -> InvariantForm:
    """Hodge star of the diagonal metric; orientation ``sign * dt^e1^...^e6``."""
    if orientation_sign not in (1, -1):
        raise ValueError("orientation_sign must be +1 or -1")
    fac = s.factors()
    out: dict[int, ScalarFn] = {}
    for m, c in f._terms.items():
        comp = FULL_MASK & ~m
        sign = merge_sign(m, comp) * orientation_sign
        coef = c * _mask_scale(fac, comp) / _mask_scale(fac, m)
        out[comp] = coef if sign > 0 else -coef
    return InvariantForm(out, 7 - f.degree)


def volume_form(s: CoframeScaling, orientation_sign: int) -> InvariantForm:
    return hodge_star(InvariantForm.scalar(1.0), s, orientation_sign)
