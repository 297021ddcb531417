"""Reference implementations that share no code with the package."""

from __future__ import annotations

from itertools import combinations

import numpy as np
import sympy as sp

# -- coclosed system: symbolic series and fixed-step RK4 ---------------------


def sympy_series(a_odd, b0, order=12):
    """Even coefficients ``[d_0, ..., d_order]`` of each ``D_i`` from sympy's linear solve."""
    t = sp.symbols("t")
    A = [sum(sp.Rational(c) * t ** (2 * n + 1) for n, c in enumerate(coeffs)) for coeffs in a_odd]
    unknowns = [[sp.Symbol(f"d{i}_{p}") for p in range(4, order + 1, 2)] for i in range(3)]
    D = [sp.Rational(b0) ** 2 / 4 * t**2 + sum(u * t ** (2 * k + 4) for k, u in enumerate(us)) for us in unknowns]
    P = A[0] * A[1] * A[2]
    eqs = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        expr = sp.expand(P * sp.diff(D[i], t) - P**2 + A[i] ** 2 * D[i] - A[j] ** 2 * D[j] - A[k] ** 2 * D[k])
        poly = sp.Poly(expr, t)
        for n in range(5, order + 3):
            eqs.append(poly.coeff_monomial(t**n))
    flat = [u for us in unknowns for u in us]
    sol = sp.solve([e for e in eqs if e != 0], flat, dict=True)[0]
    out = []
    for i in range(3):
        row = [sp.Integer(0)] * (order + 1)
        row[2] = sp.Rational(b0) ** 2 / 4
        for k, u in enumerate(unknowns[i]):
            row[2 * k + 4] = sol.get(u, sp.Integer(0))
        out.append(row)
    return out


def rk4_D(a_odd, b0, t_end=1.0, t0=0.05, h=1e-4, order=12):
    """Series up to ``t0``, then classical RK4 with step ``h`` on ``D`` itself."""
    series = sympy_series(a_odd, b0, order)
    c = np.array([[float(x) for x in row] for row in series])
    y = np.array([np.polyval(row[::-1], t0) for row in c])
    polys = [np.array(coeffs_odd_to_full(cs)[::-1]) for cs in a_odd]

    def f(t, D):
        A = np.array([np.polyval(p, t) for p in polys])
        P = A.prod()
        out = np.empty(3)
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            out[i] = P + (-A[i] ** 2 * D[i] + A[j] ** 2 * D[j] + A[k] ** 2 * D[k]) / P
        return out

    n = int(round((t_end - t0) / h))
    t = t0
    for _ in range(n):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (_ + 1) * h
    return y


def coeffs_odd_to_full(odd):
    full = [0.0] * (2 * len(odd))
    full[1::2] = odd
    return full


# -- dense exterior algebra on R^7 (tuples of indices) ---------------------------


def _sort_sign(idx):
    idx = list(idx)
    if len(set(idx)) < len(idx):
        return 0, ()
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


def dense_wedge(f, g):
    out = {}
    for I, a in f.items():
        for J, b in g.items():
            s, K = _sort_sign(I + J)
            if s:
                out[K] = out.get(K, 0.0) + s * a * b
    return out


def dense_interior(v, f):
    """``iota_{e_v} f`` for a basis vector ``e_v``."""
    out = {}
    for I, a in f.items():
        if v in I:
            pos = I.index(v)
            K = I[:pos] + I[pos + 1:]
            out[K] = out.get(K, 0.0) + (-1) ** pos * a
    return out


def metric_from_phi(phi):
    """Metric and orientation sign induced by a 3-form on R^7.

    ``B_ij vol = (1/6) i_i phi ^ i_j phi ^ phi`` and ``g = B / det(B)^(1/9)``.
    """
    top = tuple(range(7))
    B = np.zeros((7, 7))
    for i in range(7):
        for j in range(7):
            w = dense_wedge(dense_wedge(dense_interior(i, phi), dense_interior(j, phi)), phi)
            B[i, j] = w.get(top, 0.0) / 6.0
    det = np.linalg.det(B)
    return B / np.cbrt(np.cbrt(det)), float(np.sign(det))


def dense_inner(f, g, diag):
    """Metric inner product of two forms when ``g = diag(diag)`` in the coframe."""
    total = 0.0
    for I, a in f.items():
        if I in g:
            w = 1.0
            for i in I:
                w /= diag[i]
            total += a * g[I] * w
    return total


def all_monomials(degree):
    return list(combinations(range(7), degree))


# -- Maurer-Cartan structure constants of su(2) + su(2) ------------------------------


def eps3(i, j, k):
    return (i - j) * (j - k) * (k - i) / 2


def bracket_constants():
    """``c[a, b, c]`` with ``[T_b, T_c] = sum_a c[a, b, c] T_a``; codes 1..6 (0 unused)."""
    c = np.zeros((7, 7, 7))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                e = eps3(i, j, k)
                if not e:
                    continue
                c[1 + k, 1 + i, 1 + j] += 2 * e  # [T+, T+] -> T+
                c[1 + k, 4 + i, 4 + j] += 2 * e  # [T-, T-] -> T+
                c[4 + k, 1 + i, 4 + j] += 2 * e  # [T+, T-] -> T-
                c[4 + k, 4 + j, 1 + i] -= 2 * e
    return c


def dense_d(sample, t, h=1e-5):
    """``d`` of a t-dependent invariant form given as ``sample(t) -> {idx: value}``.

    The t-derivative is a central difference; the orbit part uses the
    Maurer-Cartan constants directly, extended as an antiderivation.
    """
    c = bracket_constants()
    out = {}
    plus, minus, here = sample(t + h), sample(t - h), sample(t)
    for idx in set(plus) | set(minus):
        if 0 not in idx:
            key = (0,) + idx
            out[key] = out.get(key, 0.0) + (plus.get(idx, 0.0) - minus.get(idx, 0.0)) / (2 * h)
    for idx, v in here.items():
        for pos, a in enumerate(idx):
            if a == 0:
                continue
            for b in range(1, 7):
                for cc in range(b + 1, 7):
                    k = -c[a, b, cc]
                    if not k:
                        continue
                    s, key = _sort_sign(idx[:pos] + (b, cc) + idx[pos + 1:])
                    if s:
                        out[key] = out.get(key, 0.0) + (-1) ** pos * s * k * v
    return out
