"""Polynomial helpers shared across modules.

Coefficients are stored in ascending order: p[i] multiplies lambda**i.
The generic routines (`poly_mul`, `poly_eval`, `poly_der`) work for any
number type that supports + and * (floats, Fractions), which the exact
rational rank mode relies on.  Root finding is float only.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as npoly


def poly_mul(p, q):
    """Product of two polynomials; preserves the coefficient number type."""
    out = [0] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        for j, qj in enumerate(q):
            out[i + j] = out[i + j] + pi * qj
    return out


def poly_eval(p, x):
    """Horner evaluation; preserves the coefficient number type."""
    acc = 0 * x
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_der(p):
    return [i * c for i, c in enumerate(p)][1:] or [0 * p[0]]


def linear_product(constants, slopes):
    """Expanded product of linear factors (constants[i] + slopes[i] * lambda)."""
    coeffs = [1]
    for c, s in zip(constants, slopes):
        coeffs = poly_mul(coeffs, [c, s])
    return coeffs


# ------------------------------------------------------------ float roots

def companion_roots(coeffs) -> np.ndarray:
    """All complex roots of a float polynomial (companion-matrix method)."""
    c = np.asarray(coeffs, dtype=float)
    return npoly.polyroots(c)


def newton_polish(coeffs, x0: float, steps: int = 3) -> float:
    """A few guarded Newton steps on a float polynomial."""
    der = poly_der(list(coeffs))
    x = float(x0)
    fx = abs(poly_eval(coeffs, x))
    for _ in range(steps):
        dfx = poly_eval(der, x)
        if dfx == 0.0:
            break
        x_new = x - poly_eval(coeffs, x) / dfx
        f_new = abs(poly_eval(coeffs, x_new))
        if not np.isfinite(x_new) or f_new > fx:
            break
        x, fx = x_new, f_new
    return x


def bisect_root(f, lo: float, hi: float, iters: int = 200) -> float:
    """Bisection on [lo, hi]; requires a sign change at the endpoints."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("no sign change on bracket")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        if hi - lo <= 1e-15 * max(1.0, abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)


def cauchy_root_bound(coeffs) -> float:
    """Upper bound on the absolute value of all roots."""
    c = np.asarray(coeffs, dtype=float)
    lead = c[-1]
    if lead == 0.0:
        raise ValueError("leading coefficient is zero")
    return 1.0 + float(np.max(np.abs(c[:-1] / lead))) if len(c) > 1 else 1.0
