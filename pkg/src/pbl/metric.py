"""Pseudo-Euclidean linear algebra.

The scalar product of signature (k, l) on R^d, d = k + l, is

    <x, y> = x_1 y_1 + ... + x_k y_k - x_{k+1} y_{k+1} - ... - x_d y_d.

Lines are space-, time- or light-like according to the sign of <v, v> for a
direction vector v.  The sign test is scale invariant: |<v, v>| is compared
against ``tol`` times the squared Euclidean norm of v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import LightLikeNormal

#: Scale-invariant threshold below which <v, v> counts as zero.
LIGHT_TOL = 1e-10


class LineType(Enum):
    SPACE_LIKE = "space-like"
    TIME_LIKE = "time-like"
    LIGHT_LIKE = "light-like"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Signature:
    """Signature (k, l): k plus signs followed by l minus signs."""

    k: int
    l: int

    def __post_init__(self) -> None:
        if self.k < 1 or self.l < 1:
            raise ValueError(f"signature needs k >= 1 and l >= 1, got ({self.k}, {self.l})")

    @property
    def d(self) -> int:
        return self.k + self.l

    @property
    def eps(self) -> np.ndarray:
        """Diagonal of the metric matrix: k ones followed by l minus ones."""
        e = np.ones(self.d)
        e[self.k:] = -1.0
        return e


@dataclass(frozen=True)
class MDistance:
    """Distance whose square may be negative: magnitude >= 0 plus a flag.

    ``imaginary=False`` encodes the real value ``magnitude``;
    ``imaginary=True`` encodes ``magnitude * i``.  Zero is reported real.
    """

    magnitude: float
    imaginary: bool


def _as_vector(x, d: int) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (d,):
        raise ValueError(f"expected a {d}-vector, got shape {v.shape}")
    return v


def dot(x, y, sig: Signature) -> float:
    """Pseudo-Euclidean scalar product of x and y."""
    xv = _as_vector(x, sig.d)
    yv = _as_vector(y, sig.d)
    return float(np.dot(sig.eps * xv, yv))


def sq_norm(x, sig: Signature) -> float:
    """<x, x>; may be negative."""
    return dot(x, x, sig)


def line_type(v, sig: Signature, tol: float = LIGHT_TOL) -> LineType:
    """Classify a direction vector as space-, time- or light-like."""
    vv = _as_vector(v, sig.d)
    e2 = float(np.dot(vv, vv))
    if e2 == 0.0:
        raise ValueError("zero vector has no line type")
    s = dot(vv, vv, sig)
    if abs(s) <= tol * e2:
        return LineType.LIGHT_LIKE
    return LineType.SPACE_LIKE if s > 0 else LineType.TIME_LIKE


def pseudo_normal(w, sig: Signature) -> np.ndarray:
    """Pseudo-Euclidean normal of the hyperplane {x : w . x = const}.

    If w is the Euclidean normal, the metric-orthogonal direction is E w,
    with E the diagonal metric matrix.
    """
    return sig.eps * _as_vector(w, sig.d)


def reflect_direction(v, n, sig: Signature, tol: float = LIGHT_TOL) -> np.ndarray:
    """Billiard reflection of direction v off a hyperplane with pseudo-normal n.

        v' = v - 2 (<v, n> / <n, n>) n

    Raises ``LightLikeNormal`` when <n, n> vanishes (scale-invariantly), in
    which case the reflection is not defined.
    """
    vv = _as_vector(v, sig.d)
    nn = _as_vector(n, sig.d)
    n2 = dot(nn, nn, sig)
    e2 = float(np.dot(nn, nn))
    if e2 == 0.0 or abs(n2) <= tol * e2:
        raise LightLikeNormal("normal is light-like; reflection undefined")
    return vv - (2.0 * dot(vv, nn, sig) / n2) * nn


def pseudo_cross(x, y) -> np.ndarray:
    """Pseudo-cross product in signature (2, 1).

    Componentwise: (x2 y3 - x3 y2,  x3 y1 - x1 y3,  -(x1 y2 - x2 y1)).
    The result is metric-orthogonal to both arguments.
    """
    xv = _as_vector(x, 3)
    yv = _as_vector(y, 3)
    return np.array([
        xv[1] * yv[2] - xv[2] * yv[1],
        xv[2] * yv[0] - xv[0] * yv[2],
        -(xv[0] * yv[1] - xv[1] * yv[0]),
    ])


def mdistance(x, y, sig: Signature) -> MDistance:
    """Distance between points x and y; imaginary when <x-y, x-y> < 0."""
    diff = _as_vector(x, sig.d) - _as_vector(y, sig.d)
    s = dot(diff, diff, sig)
    if s >= 0.0:
        return MDistance(math.sqrt(s), False)
    return MDistance(math.sqrt(-s), True)
