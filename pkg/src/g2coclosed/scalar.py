"""Scalar coefficient functions of the radial coordinate ``t``.

A :class:`ScalarFn` is a small expression graph.  Leaves wrap vectorised
callables (polynomials, splines, solver interpolants); interior nodes are
sums, products and real powers.  Derivatives are built analytically and
lazily, so second derivatives (needed for ``d`` of a form whose
coefficients are themselves derivatives) come for free wherever the leaves
know their own derivative.

Evaluation memoises shared sub-expressions per call, which keeps deep
chain-rule trees cheap to evaluate on a grid.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "MissingDerivativeError",
    "ScalarFn",
    "constant",
    "polynomial",
    "odd_polynomial",
    "leaf",
    "sqrt",
    "sine",
    "tanh",
    "T",
    "evaluate_many",
]


class MissingDerivativeError(ValueError):
    """Raised when a leaf without a known derivative is differentiated."""


class ScalarFn:
    """Real function of ``t`` with an analytic derivative.

    Do not construct directly; use :func:`constant`, :func:`polynomial`,
    :func:`leaf` and arithmetic.
    """

    __slots__ = ("op", "args", "fn", "param", "tag", "_dspec", "_dcache")

    def __init__(self, op, args=(), fn=None, param=None, tag="", dspec=None):
        self.op = op
        self.args = tuple(args)
        self.fn = fn
        self.param = param
        self.tag = tag
        self._dspec = dspec
        self._dcache = None

    # -- evaluation -------------------------------------------------------

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self._ev(t, {})

    def deriv(self, t):
        """Value of the first derivative at ``t``."""
        return self.derivative()(t)

    def _ev(self, t, memo):
        key = id(self)
        hit = memo.get(key)
        if hit is not None:
            return hit
        op = self.op
        if op == "const":
            out = np.full(t.shape, self.param, dtype=float)
        elif op == "leaf":
            out = np.asarray(self.fn(t), dtype=float)
            if out.shape != t.shape:
                out = np.broadcast_to(out, t.shape).astype(float)
        elif op == "add":
            out = self.args[0]._ev(t, memo)
            for a in self.args[1:]:
                out = out + a._ev(t, memo)
        elif op == "mul":
            out = self.args[0]._ev(t, memo)
            for a in self.args[1:]:
                out = out * a._ev(t, memo)
        elif op == "pow":
            base = self.args[0]._ev(t, memo)
            p = self.param
            if p == 0.5:
                out = np.sqrt(base)
            elif p == -1.0:
                out = 1.0 / base
            elif float(p).is_integer() and p > 0:
                out = base ** int(p)
            else:
                out = base**p
        else:  # pragma: no cover
            raise RuntimeError(f"unknown op {op!r}")
        memo[key] = out
        return out

    # -- structure --------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.op == "const" and self.param == 0.0

    @property
    def constant_value(self) -> float | None:
        return self.param if self.op == "const" else None

    def derivative(self) -> ScalarFn:
        if self._dcache is None:
            self._dcache = self._build_derivative()
        return self._dcache

    def _build_derivative(self) -> ScalarFn:
        op = self.op
        if op == "const":
            return ZERO
        if op == "leaf":
            spec = self._dspec
            if spec is None:
                raise MissingDerivativeError(
                    f"no derivative known for {self.tag or 'anonymous leaf'}"
                )
            d = spec if isinstance(spec, ScalarFn) else spec()
            if not isinstance(d, ScalarFn):
                d = constant(float(d))
            return d
        if op == "add":
            return _sum(a.derivative() for a in self.args)
        if op == "mul":
            terms = []
            for i, a in enumerate(self.args):
                da = a.derivative()
                if da.is_zero:
                    continue
                rest = [b for j, b in enumerate(self.args) if j != i]
                terms.append(_product([da, *rest]))
            return _sum(terms)
        if op == "pow":
            (base,) = self.args
            p = self.param
            db = base.derivative()
            if db.is_zero:
                return ZERO
            return _product([constant(p), _power(base, p - 1.0), db])
        raise RuntimeError(f"unknown op {op!r}")  # pragma: no cover

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        return _sum([self, _lift(other)])

    __radd__ = __add__

    def __sub__(self, other):
        return _sum([self, -_lift(other)])

    def __rsub__(self, other):
        return _sum([_lift(other), -self])

    def __neg__(self):
        return _product([MINUS_ONE, self])

    def __mul__(self, other):
        return _product([self, _lift(other)])

    __rmul__ = __mul__

    def __truediv__(self, other):
        return _product([self, _power(_lift(other), -1.0)])

    def __rtruediv__(self, other):
        return _product([_lift(other), _power(self, -1.0)])

    def __pow__(self, p):
        return _power(self, float(p))

    def __repr__(self):
        if self.op == "const":
            return f"ScalarFn(const={self.param!r})"
        if self.op == "leaf":
            return f"ScalarFn(leaf={self.tag or '?'})"
        return f"ScalarFn({self.op}, {len(self.args)} args)"


def _lift(x) -> ScalarFn:
    if isinstance(x, ScalarFn):
        return x
    return constant(float(x))


def constant(c: float) -> ScalarFn:
    return ScalarFn("const", param=float(c), tag=repr(float(c)))


ZERO = constant(0.0)
ONE = constant(1.0)
MINUS_ONE = constant(-1.0)


def _sum(items: Iterable[ScalarFn]) -> ScalarFn:
    flat: list[ScalarFn] = []
    c = 0.0
    for it in items:
        it = _lift(it)
        if it.op == "const":
            c += it.param
        elif it.op == "add":
            for a in it.args:
                if a.op == "const":
                    c += a.param
                else:
                    flat.append(a)
        else:
            flat.append(it)
    if c != 0.0:
        flat.append(constant(c))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return ScalarFn("add", flat)


def _product(items: Iterable[ScalarFn]) -> ScalarFn:
    flat: list[ScalarFn] = []
    c = 1.0
    for it in items:
        it = _lift(it)
        if it.op == "const":
            c *= it.param
        elif it.op == "mul":
            for a in it.args:
                if a.op == "const":
                    c *= a.param
                else:
                    flat.append(a)
        else:
            flat.append(it)
    if c == 0.0:
        return ZERO
    if not flat:
        return constant(c)
    if c != 1.0:
        flat.insert(0, constant(c))
    if len(flat) == 1:
        return flat[0]
    return ScalarFn("mul", flat)


def _power(base: ScalarFn, p: float) -> ScalarFn:
    if p == 0.0:
        return ONE
    if p == 1.0:
        return base
    if base.op == "const":
        return constant(base.param**p)
    return ScalarFn("pow", [base], param=p)


def leaf(fn: Callable[[np.ndarray], np.ndarray], deriv=None, tag: str = "") -> ScalarFn:
    """Wrap a vectorised callable.

    ``deriv`` is a ScalarFn, a zero-argument callable returning one (so that
    mutually recursive definitions can be tied lazily), or ``None``.
    """
    return ScalarFn("leaf", fn=fn, tag=tag, dspec=deriv)


def polynomial(coeffs: Sequence[float], tag: str = "") -> ScalarFn:
    """Polynomial with ascending-power coefficients."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if c.size == 0:
        return ZERO
    if c.size == 1:
        return constant(c[0])
    rev = c[::-1].copy()
    dc = c[1:] * np.arange(1, c.size)
    return leaf(
        lambda t: np.polyval(rev, t),
        deriv=lambda: polynomial(dc),
        tag=tag or f"poly{list(c)}",
    )


def odd_polynomial(odd_coeffs: Sequence[float], tag: str = "") -> ScalarFn:
    """Odd polynomial ``c0 t + c1 t^3 + c2 t^5 + ...``."""
    full = np.zeros(2 * len(odd_coeffs))
    full[1::2] = odd_coeffs
    return polynomial(full, tag=tag or f"oddpoly{list(odd_coeffs)}")


def sqrt(f: ScalarFn) -> ScalarFn:
    return _power(_lift(f), 0.5)


def sine(amplitude: float, k: float, phase: float = 0.0) -> ScalarFn:
    """``amplitude * sin(k t + phase)`` with derivatives of all orders."""
    return leaf(
        lambda t: amplitude * np.sin(k * t + phase),
        deriv=lambda: sine(amplitude * k, k, phase + math.pi / 2),
        tag=f"{amplitude}*sin({k}t+{phase})",
    )


def tanh() -> ScalarFn:
    th = leaf(np.tanh, tag="tanh")
    th._dspec = lambda: 1.0 - th * th
    return th


def evaluate_many(fns: Sequence[ScalarFn], t) -> list[np.ndarray]:
    """Evaluate several functions on one grid, sharing common sub-expressions."""
    t = np.asarray(t, dtype=float)
    memo: dict = {}
    return [f._ev(t, memo) for f in fns]


T = polynomial([0.0, 1.0], tag="t")
