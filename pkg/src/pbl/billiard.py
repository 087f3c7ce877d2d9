"""Billiard dynamics inside the reference ellipsoid of a confocal family.

A trajectory is a polygonal line inside Q_0 whose direction reflects at
the boundary with respect to the pseudo-Euclidean metric.  Where the
boundary normal is light-like the reflection degenerates to v -> -v,
which counts as two reflections.  All segment lines of one trajectory
share the caustic set and the first integrals F_i, which this module
tracks to quantify numerical drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .confocal import (
    CausticSet,
    ConfocalFamily,
    INF,
    Line,
    caustics,
    evaluate_quadric,
    integrals_F,
    interlacing_checks,
    tangency_polynomial,
)
from .errors import (
    InadmissibleCaustics,
    LightLikeNormal,
    NoSolution,
    NotPlanarLightLike,
    NumericalStall,
    PointNotOnBoundary,
)
from .metric import LIGHT_TOL, LineType, Signature, dot, line_type, pseudo_normal

#: Chord parameters below this are treated as a stalled trajectory.
STALL_TOL = 1e-12

#: Acceptable residual of Q_0 for a point claimed to be on the boundary.
BOUNDARY_TOL = 1e-8


def line_quadric_intersections(fam: ConfocalFamily, lam: float, line: Line) -> list:
    """Parameters t of the intersections of the line with Q_lambda.

    Returns 0, 1 (tangency, double root) or 2 values, ascending.
    """
    den = fam.denominators(lam)
    if fam.is_degenerate_parameter(lam):
        from .errors import DegenerateParameter

        raise DegenerateParameter(f"lambda = {lam} is a degenerate member")
    x, v = line.base, line.direction
    q2 = float(np.sum(v * v / den))
    q1 = float(np.sum(x * v / den))
    q0 = float(np.sum(x * x / den) - 1.0)
    scale = abs(q2) + abs(q1) + abs(q0)
    if abs(q2) <= 1e-14 * scale:
        if abs(q1) <= 1e-14 * scale:
            return []
        return [-q0 / (2.0 * q1)]
    disc = q1 * q1 - q2 * q0
    # scale from the coefficients, not their product: a tangency has both
    # q1 and q0 near zero and the product would vanish with the residual
    dscale = q1 * q1 + abs(q2) * (1.0 + abs(q0)) + 1e-300
    if disc < -1e-12 * dscale:
        return []
    if disc <= 1e-12 * dscale:
        return [-q1 / q2]
    rad = math.sqrt(disc)
    roots = sorted([(-q1 - rad) / q2, (-q1 + rad) / q2])
    return roots


def boundary_normal(fam: ConfocalFamily, p) -> np.ndarray:
    """Pseudo-normal of Q_0 at a boundary point p."""
    pv = np.asarray(p, dtype=float)
    return pseudo_normal(pv / fam.axes_f, fam.sig)


def reflect_at_boundary(fam: ConfocalFamily, p, v, tol: float = LIGHT_TOL):
    """Reflect direction v at the boundary point p of Q_0.

    Returns (v_out, double_flag).  At points with light-like normal the
    map degenerates to v -> -v, flagged as a double reflection.
    """
    pv = np.asarray(p, dtype=float)
    vv = np.asarray(v, dtype=float)
    res = evaluate_quadric(fam, 0.0, pv)
    if abs(res) > BOUNDARY_TOL:
        raise PointNotOnBoundary(f"Q_0 residual {res} too large at {pv}")
    n = boundary_normal(fam, pv)
    n2 = dot(n, n, fam.sig)
    if abs(n2) <= tol * float(np.dot(n, n)):
        return -vv, True
    return vv - (2.0 * dot(vv, n, fam.sig) / n2) * n, False


@dataclass
class Bounce:
    point: np.ndarray
    v_in: np.ndarray
    v_out: np.ndarray
    double: bool
    reflections: int  # cumulative reflection count after this bounce


@dataclass
class Trajectory:
    family: ConfocalFamily
    start_point: np.ndarray
    start_direction: np.ndarray
    bounces: list
    caustic_set: CausticSet
    line_type: LineType
    invariant_drift: float
    caustic_drift: float
    reflections: int


def _next_chord_parameter(fam: ConfocalFamily, x: np.ndarray, v: np.ndarray) -> float:
    den = fam.axes_f
    q2 = float(np.sum(v * v / den))
    q1 = float(np.sum(x * v / den))
    q0 = float(np.sum(x * x / den) - 1.0)
    disc = q1 * q1 - q2 * q0
    if disc <= 0.0:
        raise NumericalStall("tangent or exterior chord")
    t = (-q1 + math.sqrt(disc)) / q2
    if t * math.sqrt(float(np.dot(v, v))) <= STALL_TOL * math.sqrt(fam.scale):
        raise NumericalStall("chord length below 1e-12")
    return t


def _snap_to_boundary(fam: ConfocalFamily, x: np.ndarray, v: np.ndarray, t: float) -> np.ndarray:
    """One Newton step along the chord pulls the hit point back onto Q_0."""
    den = fam.axes_f
    p = x + t * v
    g = float(np.sum(p * p / den) - 1.0)
    dg = float(2.0 * np.sum(p * v / den))
    if dg != 0.0:
        t = t - g / dg
        p = x + t * v
    return p


def trace(fam: ConfocalFamily, start, direction, n_reflections: int,
          tol: float = LIGHT_TOL) -> Trajectory:
    """Trace the billiard flow until n_reflections have occurred.

    The start point must lie inside Q_0, or on it with an inward
    direction.  Double reflections advance the counter by two.  The
    returned trajectory records per-bounce data, the caustic set of the
    initial segment, and the worst relative drift of the first integrals
    (``invariant_drift``) and of the per-segment caustics
    (``caustic_drift``) along the way.
    """
    x = np.asarray(start, dtype=float).copy()
    v = np.asarray(direction, dtype=float).copy()
    if n_reflections < 1:
        raise ValueError("need at least one reflection")
    res = evaluate_quadric(fam, 0.0, x)
    if res > BOUNDARY_TOL:
        raise ValueError("start point lies outside the reference ellipsoid")
    if abs(res) <= BOUNDARY_TOL:
        inward = float(np.sum(x * v / fam.axes_f))
        if inward >= 0.0:
            raise ValueError("start on the boundary needs an inward direction")

    ltype = line_type(v, fam.sig, tol)
    cs0 = caustics(fam, Line(x, v), tol)
    ref_finite = np.array(cs0.finite)

    bounces: list[Bounce] = []
    refl = 0
    F0 = None
    vv0 = None
    fscale = 1.0
    drift = 0.0
    cdrift = 0.0
    while refl < n_reflections:
        t = _next_chord_parameter(fam, x, v)
        p = _snap_to_boundary(fam, x, v, t)
        v_out, double = reflect_at_boundary(fam, p, v, tol)
        refl += 2 if double else 1
        bounces.append(Bounce(p, v.copy(), v_out, double, refl))
        if F0 is None:
            F0 = integrals_F(fam, p, v)
            vv0 = dot(v, v, fam.sig)
            fscale = max(float(np.max(np.abs(F0))), abs(vv0), 1e-300)
        F = integrals_F(fam, p, v_out)
        vv = dot(v_out, v_out, fam.sig)
        drift = max(drift, float(np.max(np.abs(F - F0))) / fscale, abs(vv - vv0) / fscale)
        cs = caustics(fam, Line(p, v_out), tol)
        if len(cs.finite) == len(ref_finite):
            seg = np.array(cs.finite)
            rel = np.abs(seg - ref_finite) / np.maximum(1.0, np.abs(ref_finite))
            cdrift = max(cdrift, float(np.max(rel)) if rel.size else 0.0)
        else:
            cdrift = math.inf
        x, v = p, v_out
    return Trajectory(
        family=fam,
        start_point=np.asarray(start, dtype=float),
        start_direction=np.asarray(direction, dtype=float),
        bounces=bounces,
        caustic_set=cs0,
        line_type=ltype,
        invariant_drift=drift,
        caustic_drift=cdrift,
        reflections=refl,
    )


@dataclass(frozen=True)
class ClosureReport:
    closed: bool
    period: int | None
    position_error: float
    direction_error: float
    bounce_index: int | None


def closure_test(traj: Trajectory, tol: float = 1e-6) -> ClosureReport:
    """Detect whether the trajectory revisits its first bounce state.

    Compares position and outgoing direction of every later bounce with
    bounce 0; the period is counted in reflections (doubles count twice).
    """
    if not traj.bounces:
        raise ValueError("trajectory has no bounces")
    b0 = traj.bounces[0]
    d0 = b0.v_out / np.linalg.norm(b0.v_out)
    best = (math.inf, math.inf, None)
    for j in range(1, len(traj.bounces)):
        bj = traj.bounces[j]
        pos = float(np.linalg.norm(bj.point - b0.point))
        dj = bj.v_out / np.linalg.norm(bj.v_out)
        dirr = float(np.linalg.norm(dj - d0))
        if pos <= tol and dirr <= tol:
            return ClosureReport(True, bj.reflections - b0.reflections, pos, dirr, j)
        if pos + dirr < best[0] + best[1]:
            best = (pos, dirr, j)
    return ClosureReport(False, None, best[0], best[1], best[2])


def arc_hit_counts(traj: Trajectory) -> tuple[int, int]:
    """Bounce counts on one arc of each opposite-arc pair of a planar table.

    The four boundary points with light-like tangents (|ay| = |bx|) split
    the ellipse into two pairs of opposite arcs.  Counts hits on the arc
    through (0, sqrt(b)) first, then on the arc through (sqrt(a), 0); for
    an n-periodic light-like trajectory with winding number k these come
    out (k, n/2 - k): the flatter arcs collect the larger share as the
    table elongates.
    """
    fam = traj.family
    if fam.d != 2:
        raise NotPlanarLightLike("arc counting requires a planar family")
    if traj.line_type is not LineType.LIGHT_LIKE:
        raise NotPlanarLightLike("arc counting requires a light-like trajectory")
    a, b = fam.axes_f
    hits_x = hits_y = 0
    for bounce in traj.bounces:
        x, y = bounce.point
        qx, qy = x * x / (a * a), y * y / (b * b)
        if qx > qy and x > 0:
            hits_x += 1
        elif qy > qx and y > 0:
            hits_y += 1
    return hits_y, hits_x


def rectangle_ratio(a: float, b: float) -> float:
    """Side ratio of the rectangle equivalent to the planar light-like flow.

        pi / (2 arctan sqrt(a/b)) - 1
    """
    if a <= 0 or b <= 0:
        raise ValueError("axis parameters must be positive")
    return math.pi / (2.0 * math.atan(math.sqrt(float(a) / float(b)))) - 1.0


# ---------------------------------------------------- direction construction


def _tangency_residual(fam: ConfocalFamily, x, v, alpha: float) -> tuple[float, float]:
    """Tangency discriminant of the line (x, v) against Q_alpha, with scale."""
    den = fam.denominators(alpha)
    xv = np.asarray(x, dtype=float)
    vv = np.asarray(v, dtype=float)
    axv = float(np.sum(xv * vv / den))
    avv = float(np.sum(vv * vv / den))
    K = float(np.sum(xv * xv / den) - 1.0)
    val = axv * axv - avv * K
    scale = axv * axv + abs(avv * K) + 1e-30
    return val, scale


def _canonical_direction(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    for comp in v:
        if abs(comp) > 1e-12:
            return v if comp > 0 else -v
    return v


def _admissible(fam: ConfocalFamily, params: tuple) -> None:
    finite = [p for p in params if math.isfinite(p)]
    n_inf = len(params) - len(finite)
    n_pos = sum(1 for p in finite if p > 0)
    n_neg = sum(1 for p in finite if p < 0)
    k, l = fam.k, fam.l
    if n_inf > 1 or any(abs(p) <= 1e-12 * fam.scale for p in finite):
        raise InadmissibleCaustics("degenerate caustic parameters")
    if n_inf == 1:
        ltype = LineType.LIGHT_LIKE
        ok = n_pos == k - 1 and n_neg == l - 1
    elif (-1) ** (l + n_neg) > 0:
        ltype = LineType.SPACE_LIKE
        ok = n_pos == k - 1 and n_neg == l
    else:
        ltype = LineType.TIME_LIKE
        ok = n_pos == k and n_neg == l - 1
    if ok:
        checks, *_ = interlacing_checks(fam, params, ltype)
        ok = all(checks.values())
    if not ok:
        raise InadmissibleCaustics(f"caustics {params} violate the interlacing pattern")


def _plane_directions(fam: ConfocalFamily, x, alpha: float) -> list:
    """Closed-form tangent directions from x to the conic Q_alpha."""
    den = fam.denominators(alpha)
    xv = np.asarray(x, dtype=float)
    u = xv / den
    K = float(np.sum(xv * xv / den) - 1.0)
    # v^T M v = 0 with M = u u^T - K diag(1/den)
    m11 = u[0] * u[0] - K / den[0]
    m12 = u[0] * u[1]
    m22 = u[1] * u[1] - K / den[1]
    scale = abs(m11) + abs(m12) + abs(m22)
    if scale == 0.0:
        raise NoSolution("tangency condition vanished identically")
    dirs = []
    if abs(m11) >= abs(m22):
        disc = m12 * m12 - m11 * m22
        if disc < -1e-14 * scale * scale:
            raise NoSolution("no real tangent direction from this point")
        rad = math.sqrt(max(disc, 0.0))
        for sgn in (+1.0, -1.0):
            s = (-m12 + sgn * rad) / m11
            dirs.append(np.array([s, 1.0]))
    else:
        disc = m12 * m12 - m11 * m22
        if disc < -1e-14 * scale * scale:
            raise NoSolution("no real tangent direction from this point")
        rad = math.sqrt(max(disc, 0.0))
        for sgn in (+1.0, -1.0):
            s = (-m12 + sgn * rad) / m22
            dirs.append(np.array([1.0, s]))
    return dirs


def direction_with_caustics(fam: ConfocalFamily, x, target, seed: int = 0,
                            restarts: int = 48, iters: int = 80) -> list:
    """Directions v through x whose line has the target caustic set.

    Planar families are solved in closed form (the tangency condition is
    a homogeneous quadratic in v); higher dimensions run a damped Newton
    iteration with seeded random restarts on the simultaneous tangency
    system.  Directions are unit length with a canonical sign.
    """
    params = tuple(target) if not isinstance(target, CausticSet) else target.params
    if len(params) != fam.d - 1:
        raise ValueError(f"expected {fam.d - 1} caustic parameters")
    _admissible(fam, params)
    xv = np.asarray(x, dtype=float)
    finite = [p for p in params if math.isfinite(p)]
    want_light = any(not math.isfinite(p) for p in params)

    if fam.d == 2:
        if want_light:
            dirs = [np.array([1.0, 1.0]), np.array([1.0, -1.0])]
        else:
            dirs = _plane_directions(fam, xv, finite[0])
        out = []
        for v in dirs:
            v = _canonical_direction(v)
            if not any(np.linalg.norm(v - w) <= 1e-9 for w in out):
                out.append(v)
        for v in out:
            for alpha in finite:
                val, scale = _tangency_residual(fam, xv, v, alpha)
                if abs(val) > 1e-9 * scale:
                    raise NoSolution("closed-form direction failed residual check")
        return out

    rng = np.random.default_rng(seed)
    eps = fam.eps
    dens = [fam.denominators(alpha) for alpha in finite]

    def residual(v: np.ndarray) -> np.ndarray:
        g = []
        for den in dens:
            axv = float(np.sum(xv * v / den))
            avv = float(np.sum(v * v / den))
            K = float(np.sum(xv * xv / den) - 1.0)
            g.append(axv * axv - avv * K)
        if want_light:
            g.append(float(np.sum(eps * v * v)))
        g.append(float(np.dot(v, v)) - 1.0)
        return np.array(g)

    def jacobian(v: np.ndarray) -> np.ndarray:
        rows = []
        for den in dens:
            axv = float(np.sum(xv * v / den))
            K = float(np.sum(xv * xv / den) - 1.0)
            rows.append(2.0 * axv * (xv / den) - 2.0 * K * (v / den))
        if want_light:
            rows.append(2.0 * eps * v)
        rows.append(2.0 * v)
        return np.array(rows)

    solutions: list[np.ndarray] = []
    for _ in range(restarts):
        v = rng.normal(size=fam.d)
        v /= np.linalg.norm(v)
        ok = False
        for _ in range(iters):
            g = residual(v)
            gn = float(np.linalg.norm(g))
            if gn <= 1e-13:
                ok = True
                break
            J = jacobian(v)
            try:
                step = np.linalg.solve(J, -g)
            except np.linalg.LinAlgError:
                step, *_ = np.linalg.lstsq(J, -g, rcond=None)
            damp = 1.0
            improved = False
            while damp > 1e-6:
                v_new = v + damp * step
                if np.linalg.norm(residual(v_new)) < gn:
                    v = v_new
                    improved = True
                    break
                damp *= 0.5
            if not improved:
                break
        if not ok:
            continue
        v = _canonical_direction(v)
        bad = False
        for alpha in finite:
            val, scale = _tangency_residual(fam, xv, v, alpha)
            if abs(val) > 1e-9 * scale:
                bad = True
        if bad:
            continue
        if not any(np.linalg.norm(v - w) <= 1e-7 for w in solutions):
            solutions.append(v)
    if not solutions:
        raise NoSolution("no direction found within the restart budget")
    return solutions


def random_boundary_point(fam: ConfocalFamily, rng: np.random.Generator) -> np.ndarray:
    """A uniform-ish random point of the reference ellipsoid Q_0."""
    while True:
        u = rng.normal(size=fam.d)
        q = float(np.sum(u * u / fam.axes_f))
        if q > 0:
            return u / math.sqrt(q)


def inward_direction(fam: ConfocalFamily, p, v) -> np.ndarray:
    """Flip v if needed so it points into the ellipsoid at boundary point p."""
    pv = np.asarray(p, dtype=float)
    vv = np.asarray(v, dtype=float)
    s = float(np.sum(pv * vv / fam.axes_f))
    if s == 0.0:
        raise NoSolution("direction is tangent to the boundary")
    return vv if s < 0 else -vv


# ----------------------------------------------------------- serialization


def trajectory_to_dict(traj: Trajectory) -> dict:
    """JSON-ready dictionary; infinite caustics are the string "inf"."""
    return {
        "signature": [traj.family.k, traj.family.l],
        "axes": [float(a) for a in traj.family.axes],
        "caustics": ["inf" if not math.isfinite(p) else p for p in traj.caustic_set],
        "lineType": traj.line_type.value,
        "bounces": [
            {
                "p": [float(c) for c in b.point],
                "vin": [float(c) for c in b.v_in],
                "vout": [float(c) for c in b.v_out],
                "double": b.double,
            }
            for b in traj.bounces
        ],
        "drift": traj.invariant_drift,
    }


def trajectory_from_dict(data: dict) -> Trajectory:
    """Rebuild a trajectory (family, bounces, caustics) from its dict form."""
    sig = Signature(*[int(s) for s in data["signature"]])
    fam = ConfocalFamily(sig, tuple(float(a) for a in data["axes"]))
    params = tuple(INF if c == "inf" else float(c) for c in data["caustics"])
    bounces = []
    refl = 0
    for raw in data["bounces"]:
        refl += 2 if raw["double"] else 1
        bounces.append(
            Bounce(
                np.asarray(raw["p"], dtype=float),
                np.asarray(raw["vin"], dtype=float),
                np.asarray(raw["vout"], dtype=float),
                bool(raw["double"]),
                refl,
            )
        )
    ltype = LineType(data["lineType"])
    start = bounces[0].point if bounces else np.zeros(fam.d)
    sdir = bounces[0].v_in if bounces else np.zeros(fam.d)
    return Trajectory(
        family=fam,
        start_point=start,
        start_direction=sdir,
        bounces=bounces,
        caustic_set=CausticSet(params),
        line_type=ltype,
        invariant_drift=float(data["drift"]),
        caustic_drift=math.nan,
        reflections=refl,
    )


def recompute_drift(traj: Trajectory) -> float:
    """Invariant drift recomputed from the recorded bounces alone."""
    fam = traj.family
    if not traj.bounces:
        raise ValueError("trajectory has no bounces")
    b0 = traj.bounces[0]
    F0 = integrals_F(fam, b0.point, b0.v_in)
    vv0 = dot(b0.v_in, b0.v_in, fam.sig)
    fscale = max(float(np.max(np.abs(F0))), abs(vv0), 1e-300)
    drift = 0.0
    for b in traj.bounces:
        F = integrals_F(fam, b.point, b.v_out)
        vv = dot(b.v_out, b.v_out, fam.sig)
        drift = max(drift, float(np.max(np.abs(F - F0))) / fscale, abs(vv - vv0) / fscale)
    return drift
