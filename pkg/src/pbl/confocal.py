"""Confocal families of quadrics in pseudo-Euclidean space.

A family with signature (k, l) and parameters a_1 > ... > a_k > 0,
0 < a_{k+1} < ... < a_d is the pencil

    Q_lambda :  sum_i  x_i^2 / (a_i - eps_i lambda)  =  1,

with eps_i = +1 for i <= k and -1 for i > k.  Q_0 is an ellipsoid, the
reference billiard table.  Degenerate members occur at lambda = eps_i a_i
(coordinate hyperplanes) and at lambda = infinity (the hyperplane at
infinity, tangent to every light-like line).

This module computes generalized Jacobi coordinates (the pencil members
through a point), the caustic parameters of a line (the pencil members
tangent to it), the associated first integrals, and the interlacing
structure that caustics satisfy relative to the degenerate parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._poly import (
    bisect_root,
    cauchy_root_bound,
    companion_roots,
    linear_product,
    newton_polish,
    poly_eval,
    poly_mul,
)
from .errors import (
    AmbiguousSign,
    DegenerateParameter,
    NoIntersection,
    RootIsolationError,
)
from .metric import LIGHT_TOL, LineType, Signature, dot, line_type

INF = math.inf

#: Roots closer than this (times a_1 + a_d) are reported as a multiple root.
MULTIPLE_ROOT_TOL = 1e-9

#: Relative tolerance for treating the parameter of a pencil member as
#: degenerate (equal to some eps_i a_i).
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class ConfocalFamily:
    """A confocal pencil: signature plus the axis parameters a_1..a_d.

    Axis values may be floats or exact ``fractions.Fraction`` values; the
    latter are preserved so that the rational closure tests can work
    exactly.  All geometric routines coerce to float.
    """

    sig: Signature
    axes: tuple

    def __post_init__(self) -> None:
        k, l = self.sig.k, self.sig.l
        if len(self.axes) != k + l:
            raise ValueError(f"expected {k + l} axis values, got {len(self.axes)}")
        if any(a <= 0 for a in self.axes):
            raise ValueError("axis parameters must be positive")
        pos = self.axes[:k]
        neg = self.axes[k:]
        if any(pos[i] <= pos[i + 1] for i in range(len(pos) - 1)):
            raise ValueError("need a_1 > ... > a_k for the positive block")
        if any(neg[i] >= neg[i + 1] for i in range(len(neg) - 1)):
            raise ValueError("need a_{k+1} < ... < a_d for the negative block")

    @property
    def d(self) -> int:
        return self.sig.d

    @property
    def k(self) -> int:
        return self.sig.k

    @property
    def l(self) -> int:
        return self.sig.l

    @property
    def eps(self) -> np.ndarray:
        return self.sig.eps

    @property
    def eps_exact(self) -> tuple:
        """Metric signs as plain ints, for exact rational arithmetic."""
        return tuple([1] * self.k + [-1] * self.l)

    @property
    def axes_f(self) -> np.ndarray:
        return np.asarray([float(a) for a in self.axes])

    @property
    def signed_axes(self) -> np.ndarray:
        """eps_i a_i in index order; strictly decreasing."""
        return self.eps * self.axes_f

    @property
    def scale(self) -> float:
        """a_1 + a_d, the natural length-squared scale of the family."""
        return float(self.axes[0]) + float(self.axes[-1])

    def denominators(self, lam: float) -> np.ndarray:
        return self.axes_f - self.eps * lam

    def is_degenerate_parameter(self, lam: float, tol: float = DEGENERATE_TOL) -> bool:
        if not math.isfinite(lam):
            return True
        return bool(np.min(np.abs(self.signed_axes - lam)) <= tol * self.scale)


@dataclass
class Line:
    """An affine line base + t * direction."""

    base: np.ndarray
    direction: np.ndarray

    def __init__(self, base, direction):
        self.base = np.asarray(base, dtype=float)
        self.direction = np.asarray(direction, dtype=float)
        if self.base.shape != self.direction.shape or self.base.ndim != 1:
            raise ValueError("base and direction must be vectors of equal length")
        if not np.any(self.direction):
            raise ValueError("direction must be nonzero")

    def point(self, t: float) -> np.ndarray:
        return self.base + t * self.direction


@dataclass(frozen=True)
class CausticSet:
    """Tangency parameters of a line, sorted ascending, math.inf last.

    Multiplicities are encoded by repetition.
    """

    params: tuple

    def __post_init__(self) -> None:
        finite = [p for p in self.params if math.isfinite(p)]
        infinite = [p for p in self.params if not math.isfinite(p)]
        ordered = tuple(sorted(finite)) + tuple(infinite)
        object.__setattr__(self, "params", ordered)

    @property
    def finite(self) -> tuple:
        return tuple(p for p in self.params if math.isfinite(p))

    @property
    def has_infinite(self) -> bool:
        return any(not math.isfinite(p) for p in self.params)

    def __iter__(self):
        return iter(self.params)

    def __len__(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class GeneralizedJacobi:
    """Solutions of the pencil equation through a point.

    ``real_roots`` is sorted ascending, repetitions mark multiple roots;
    ``complex_pair`` is (re, im), im > 0, for the conjugate pair when only
    d - 2 solutions are real.
    """

    real_roots: tuple
    complex_pair: tuple | None

    @property
    def count(self) -> int:
        return len(self.real_roots) + (2 if self.complex_pair else 0)

    def is_simple_real(self, tol: float) -> bool:
        if self.complex_pair is not None:
            return False
        r = self.real_roots
        return all(r[i + 1] - r[i] > tol for i in range(len(r) - 1))


# ----------------------------------------------------------------- basics


def evaluate_quadric(fam: ConfocalFamily, lam: float, x) -> float:
    """Value of sum x_i^2/(a_i - eps_i lambda) - 1 at the point x."""
    if fam.is_degenerate_parameter(lam):
        raise DegenerateParameter(f"lambda = {lam} is a degenerate member")
    xv = np.asarray(x, dtype=float)
    if xv.shape != (fam.d,):
        raise ValueError(f"expected a {fam.d}-vector")
    return float(np.sum(xv * xv / fam.denominators(lam)) - 1.0)


def integrals_F(fam: ConfocalFamily, x, v) -> np.ndarray:
    """The d first integrals F_i of the billiard within Q_0.

        F_i = eps_i v_i^2 + sum_{j != i} (x_i v_j - x_j v_i)^2
                                         / (eps_j a_i - eps_i a_j)

    They are invariant under sliding x along the line and under reflection
    off Q_0, and they sum to <v, v>.
    """
    xv = np.asarray(x, dtype=float)
    vv = np.asarray(v, dtype=float)
    d = fam.d
    if xv.shape != (d,) or vv.shape != (d,):
        raise ValueError(f"expected {d}-vectors")
    eps = fam.eps
    a = fam.axes_f
    out = np.empty(d)
    for i in range(d):
        s = eps[i] * vv[i] ** 2
        for j in range(d):
            if j == i:
                continue
            s += (xv[i] * vv[j] - xv[j] * vv[i]) ** 2 / (eps[j] * a[i] - eps[i] * a[j])
        out[i] = s
    return out


def jacobi_polynomial(fam: ConfocalFamily, x) -> list:
    """Pencil equation through x, denominators cleared; ascending, degree d."""
    xv = np.asarray(x, dtype=float)
    a = fam.axes_f
    eps = fam.eps
    d = fam.d
    coeffs = linear_product(a, -eps)
    for i in range(d):
        if xv[i] == 0.0:
            continue
        others = linear_product(np.delete(a, i), -np.delete(eps, i))
        term = [xv[i] ** 2 * c for c in others]
        coeffs = [c - t for c, t in zip(coeffs, term + [0.0] * (len(coeffs) - len(term)))]
    return coeffs


def tangency_polynomial(fam: ConfocalFamily, x, v) -> list:
    """Numerator polynomial of the tangency condition for the line (x, v).

    Clearing denominators in sum_i eps_i F_i / (a_i - eps_i lambda) = 0 and
    normalising by (-1)^(k-1) gives a polynomial of degree d - 1 whose
    leading coefficient equals <v, v>; its roots are the caustic parameters
    (the leading coefficient vanishes for light-like lines, where one
    caustic escapes to infinity).
    """
    F = integrals_F(fam, x, v)
    a = fam.axes_f
    eps = fam.eps
    d = fam.d
    coeffs = [0.0] * d
    for i in range(d):
        others = linear_product(np.delete(a, i), -np.delete(eps, i))
        w = eps[i] * F[i]
        for j, c in enumerate(others):
            coeffs[j] += w * c
    sign = -1.0 if fam.k % 2 == 0 else 1.0
    return [sign * c for c in coeffs]


# ------------------------------------------------------ jacobi coordinates


def jacobi_coordinates(
    fam: ConfocalFamily, x, mult_tol: float = MULTIPLE_ROOT_TOL
) -> GeneralizedJacobi:
    """Generalized Jacobi coordinates of x: all pencil members through x.

    Either all d solutions are real, or d - 2 are real plus one conjugate
    complex pair.  Real roots closer than ``mult_tol * (a_1 + a_d)`` are
    collapsed into a multiple root.
    """
    coeffs = jacobi_polynomial(fam, x)
    roots = companion_roots(coeffs)
    scale = fam.scale
    by_imag = sorted(roots, key=lambda z: abs(z.imag))
    real_part = list(by_imag[:-2]) if len(by_imag) > 2 else []
    tail = list(by_imag[-2:]) if len(by_imag) >= 2 else list(by_imag)

    def is_real(z) -> bool:
        return abs(z.imag) <= 1e-9 * max(scale, abs(z))

    complex_pair = None
    if len(tail) == 2 and not (is_real(tail[0]) and is_real(tail[1])):
        re = 0.5 * (tail[0].real + tail[1].real)
        im = 0.5 * (abs(tail[0].imag) + abs(tail[1].imag))
        complex_pair = (re, im)
    else:
        real_part.extend(tail)

    polished = sorted(newton_polish(coeffs, z.real) for z in real_part)
    real_roots: list[float] = []
    i = 0
    while i < len(polished):
        j = i
        while j + 1 < len(polished) and polished[j + 1] - polished[i] <= mult_tol * scale:
            j += 1
        cluster = polished[i : j + 1]
        centre = sum(cluster) / len(cluster)
        real_roots.extend([centre] * len(cluster))
        i = j + 1
    return GeneralizedJacobi(tuple(real_roots), complex_pair)


# -------------------------------------------------------------- caustics


def _chord_interval(fam: ConfocalFamily, line: Line):
    """Parameters (t1, t2) of the intersection with Q_0, or NoIntersection."""
    inv = 1.0 / fam.axes_f
    x, v = line.base, line.direction
    q2 = float(np.sum(v * v * inv))
    q1 = float(np.sum(x * v * inv))
    q0 = float(np.sum(x * x * inv) - 1.0)
    disc = q1 * q1 - q2 * q0
    scale = q1 * q1 + abs(q2 * q0) + 1e-300
    if disc < -1e-12 * scale:
        raise NoIntersection("line does not meet the reference ellipsoid")
    rad = math.sqrt(max(disc, 0.0))
    return (-q1 - rad) / q2, (-q1 + rad) / q2


class _BracketFailure(Exception):
    """Internal: structured bracketing not applicable, use the fallback."""


def _zeta_breakpoints(fam: ConfocalFamily, v: np.ndarray, is_light: bool) -> list:
    """Roots of R(lambda) = sum v_i^2 prod_{j != i}(a_j - eps_j lambda).

    They separate the caustic roots.  One sits in every gap between
    consecutive degenerate parameters of the same sign block, plus an
    outer root below -a_d (space-like) or above a_1 (time-like).
    Requires all v_i nonzero; otherwise roots collide with the gap
    endpoints and the caller must fall back to the companion matrix.
    """
    v2 = v * v
    if np.min(v2) <= 1e-22 * np.max(v2):
        raise _BracketFailure
    a = fam.axes_f
    eps = fam.eps
    d, k = fam.d, fam.k
    s = fam.signed_axes
    coeffs = [0.0] * d
    for i in range(d):
        others = linear_product(np.delete(a, i), -np.delete(eps, i))
        for j, c in enumerate(others):
            coeffs[j] += v2[i] * c

    def R(lam: float) -> float:
        return poly_eval(coeffs, lam)

    gaps = [(s[i + 1], s[i]) for i in range(0, k - 1)]
    gaps += [(s[i + 1], s[i]) for i in range(k, d - 1)]
    zetas = []
    for lo, hi in gaps:
        try:
            zetas.append(bisect_root(R, lo, hi))
        except ValueError as exc:
            raise _BracketFailure from exc
    if not is_light:
        bound = cauchy_root_bound(coeffs) + 1.0
        vv = float(np.sum(eps * v2))
        lo, hi = (min(-bound, s[-1] - 1.0), s[-1]) if vv > 0 else (s[0], max(bound, s[0] + 1.0))
        try:
            zetas.append(bisect_root(R, lo, hi))
        except ValueError as exc:
            raise _BracketFailure from exc
    return zetas


def _structured_roots(fam: ConfocalFamily, v: np.ndarray, pc: list, is_light: bool) -> list:
    """Bracketed bisection for the tangency roots.

    Between consecutive breakpoints (the zeta separators and 0) the
    tangency discriminant is positive at both ends and flips sign across
    the single degenerate parameter inside, so the cleared polynomial has
    a guaranteed sign change either left or right of that pole.
    """
    zetas = _zeta_breakpoints(fam, v, is_light)
    breakpoints = sorted(zetas + [0.0])
    s = fam.signed_axes
    scale_p = max(abs(c) for c in pc) + 1e-300
    roots = []
    for u, w in zip(breakpoints[:-1], breakpoints[1:]):
        poles = [si for si in s if u < si < w]
        if len(poles) != 1:
            raise _BracketFailure
        pole = poles[0]
        fu = poly_eval(pc, u)
        fp = poly_eval(pc, pole)
        fw = poly_eval(pc, w)
        if abs(fp) <= 1e-13 * scale_p:
            roots.append(pole)
        elif (fu > 0) != (fp > 0):
            roots.append(bisect_root(lambda t: poly_eval(pc, t), u, pole))
        elif (fp > 0) != (fw > 0):
            roots.append(bisect_root(lambda t: poly_eval(pc, t), pole, w))
        else:
            raise _BracketFailure
    return roots


def _fallback_roots(fam: ConfocalFamily, pc: list, expected: int) -> list:
    """Companion-matrix roots with a Newton polish; chords have real roots."""
    roots = companion_roots(pc)
    scale = fam.scale
    real = []
    for z in roots:
        if abs(z.imag) <= 1e-6 * max(scale, abs(z)):
            real.append(newton_polish(pc, z.real))
        else:
            raise RootIsolationError(
                f"complex tangency root {z}; the line is too degenerate to isolate caustics"
            )
    if len(real) != expected:
        raise RootIsolationError(f"expected {expected} tangency roots, found {len(real)}")
    return real


def caustics(fam: ConfocalFamily, line: Line, tol: float = LIGHT_TOL) -> CausticSet:
    """Caustic parameters of the line: pencil members tangent to it.

    The line must meet the reference ellipsoid.  A non-light-like line has
    d - 1 finite caustics; a light-like line has d - 2 finite ones plus the
    hyperplane at infinity, reported as math.inf.
    """
    _chord_interval(fam, line)
    x, v = line.base, line.direction
    vv = dot(v, v, fam.sig)
    is_light = abs(vv) <= tol * float(np.dot(v, v))
    pc = tangency_polynomial(fam, x, v)
    if is_light:
        pc = pc[:-1]
    expected = fam.d - 2 if is_light else fam.d - 1
    try:
        roots = _structured_roots(fam, v, pc, is_light)
    except _BracketFailure:
        roots = _fallback_roots(fam, pc, expected)
    if len(roots) != expected:
        roots = _fallback_roots(fam, pc, expected)
    params = tuple(sorted(roots)) + ((INF,) if is_light else ())
    return CausticSet(params)


def trajectory_type_from_caustics(
    fam: ConfocalFamily, caustic_set: CausticSet
) -> LineType:
    """Line type read off the caustics alone.

    Infinity among the caustics means light-like; otherwise the sign of
    (-1)^l * prod(alpha_i) decides: positive space-like, negative
    time-like.  A zero caustic parameter (line tangent to Q_0) leaves the
    sign ambiguous.
    """
    params = tuple(caustic_set)
    if len(params) != fam.d - 1:
        raise ValueError(f"expected {fam.d - 1} caustic parameters, got {len(params)}")
    if any(not math.isfinite(p) for p in params):
        return LineType.LIGHT_LIKE
    scale = fam.scale
    if any(abs(p) <= 1e-12 * scale for p in params):
        raise AmbiguousSign("a caustic parameter is zero; sign rule undecided")
    negatives = sum(1 for p in params if p < 0)
    sign = (-1) ** (fam.l + negatives)
    return LineType.SPACE_LIKE if sign > 0 else LineType.TIME_LIKE


# ------------------------------------------------------------ interlacing


@dataclass(frozen=True)
class InterlacingReport:
    """Merged degenerate parameters and caustics, with the pairing checks.

    ``b`` holds the positive merged values ascending (b_1 <= ... <= b_p,
    math.inf allowed last), ``c`` the negative ones in decreasing value
    order (c_1 closest to zero).  Caustic positions are 1-based indices
    into those tuples.  ``checks`` records each clause of the interlacing
    statement for the detected line type.
    """

    line_type: LineType
    b: tuple
    c: tuple
    positive_caustic_positions: tuple
    negative_caustic_positions: tuple
    checks: dict
    passed: bool


def _position_range(value: float, others: list, tol: float) -> set:
    """Possible 1-based sorted positions of `value` among `others` + itself."""
    lo = 1 + sum(1 for o in others if o < value - tol)
    hi = 1 + sum(1 for o in others if o <= value + tol)
    return set(range(lo, hi + 1))


def interlacing_checks(fam: ConfocalFamily, params, ltype: LineType):
    """Interlacing clauses for raw caustic parameters and a line type.

    Returns (checks, b, c, positive_positions, negative_positions); see
    InterlacingReport for the meaning of the pieces.
    """
    k, l = fam.k, fam.l
    s = fam.signed_axes
    pos_poles = [si for si in s if si > 0]
    neg_poles = [si for si in s if si < 0]
    finite = [p for p in params if math.isfinite(p)]
    pos_caustics = sorted(p for p in finite if p > 0)
    neg_caustics = sorted((p for p in finite if p < 0), reverse=True)
    inf_count = sum(1 for p in params if not math.isfinite(p))

    b = sorted(pos_poles + pos_caustics) + [INF] * inf_count
    c = sorted(neg_poles + list(neg_caustics), reverse=True)
    tie_tol = 1e-9 * fam.scale

    if ltype is LineType.SPACE_LIKE:
        exp_p, exp_q = 2 * k - 1, 2 * l
        n_pos_pairs, n_neg_pairs = k - 1, l
        anchor = len(b) == exp_p and abs(b[-1] - s[0]) <= tie_tol
    elif ltype is LineType.TIME_LIKE:
        exp_p, exp_q = 2 * k, 2 * l - 1
        n_pos_pairs, n_neg_pairs = k, l - 1
        anchor = len(c) == exp_q and abs(c[-1] - s[-1]) <= tie_tol
    else:
        exp_p, exp_q = 2 * k, 2 * l - 1
        n_pos_pairs, n_neg_pairs = k - 1, l - 1
        anchor = (
            len(b) == exp_p
            and not math.isfinite(b[-1])
            and abs(b[-2] - s[0]) <= tie_tol
        )

    checks = {
        "count_p": len(b) == exp_p,
        "count_q": len(c) == exp_q,
        "anchor": bool(anchor),
    }

    pos_positions = []
    ok_pos = len(pos_caustics) == n_pos_pairs
    if ok_pos:
        for i, alpha in enumerate(pos_caustics, start=1):
            others = (pos_poles + [x for x in pos_caustics if x is not alpha]
                      + [INF] * inf_count)
            rng = _position_range(alpha, others, tie_tol)
            pos_positions.append(min(rng & {2 * i - 1, 2 * i}, default=min(rng)))
            ok_pos = ok_pos and bool(rng & {2 * i - 1, 2 * i})
    checks["positive_pairs"] = ok_pos

    neg_positions = []
    ok_neg = len(neg_caustics) == n_neg_pairs
    if ok_neg:
        for j, alpha in enumerate(neg_caustics, start=1):
            others = neg_poles + [x for x in neg_caustics if x is not alpha]
            lo = 1 + sum(1 for o in others if o > alpha + tie_tol)
            hi = 1 + sum(1 for o in others if o >= alpha - tie_tol)
            rng = set(range(lo, hi + 1))
            neg_positions.append(min(rng & {2 * j - 1, 2 * j}, default=min(rng)))
            ok_neg = ok_neg and bool(rng & {2 * j - 1, 2 * j})
    checks["negative_pairs"] = ok_neg
    return checks, tuple(b), tuple(c), tuple(pos_positions), tuple(neg_positions)


def interlacing_report(fam: ConfocalFamily, line: Line, tol: float = LIGHT_TOL) -> InterlacingReport:
    """Verify the interlacing of caustics and degenerate parameters."""
    cs = caustics(fam, line, tol)
    ltype = line_type(line.direction, fam.sig, tol)
    checks, b, c, pos_positions, neg_positions = interlacing_checks(fam, tuple(cs), ltype)
    return InterlacingReport(
        line_type=ltype,
        b=b,
        c=c,
        positive_caustic_positions=pos_positions,
        negative_caustic_positions=neg_positions,
        checks=checks,
        passed=all(checks.values()),
    )
