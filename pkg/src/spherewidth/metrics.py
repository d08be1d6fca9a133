"""Width, thickness, diameter and the constant-width / constant-diameter checkers.

Width determined by a supporting hemisphere H(k) is reduced to one
constrained problem: minimize <k, m> over unit vectors m of the dual region
(centers of hemispheres containing the body).  The optimum m is the center
of the second hemisphere of the narrowest lune and the width is
``pi - dist(k, m)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bodies import (
    BallBody,
    GeometryError,
    PolytopeBody,
    interior_margin,
    nonneg_lstsq,
    sample_boundary,
    support_margin,
    supporting_center,
)
from .sphere_core import (
    TOL_GEO,
    Hemisphere,
    Lune,
    along,
    cap_sample,
    dist,
    exp_map,
    geodesic_point,
    make_lune,
    normalize,
    orthonormal_complement,
)

BOUNDARY_TOL = 1e-6
WIDTH_TOL = 1e-6
CHECK_TOL = 1e-3
HALF_PI = np.pi / 2


class NotSupporting(GeometryError):
    pass


class NotConverged(ArithmeticError):
    pass


class NotADiameterPair(GeometryError):
    pass


class WidthNotAboveHalfPi(GeometryError):
    pass


class NotOnBoundary(GeometryError):
    pass


class CenterConditionFailed(GeometryError):
    pass


@dataclass
class WidthReport:
    value: float
    witness_m: np.ndarray
    lune: Lune
    converged: bool = True
    residual: float = 0.0

    @property
    def k(self):
        return self.lune.g.center

    def to_dict(self):
        return {
            "value": self.value,
            "k": self.k.tolist(),
            "witness_m": self.witness_m.tolist(),
            "c_gh": self.lune.c_gh.tolist(),
            "c_hg": self.lune.c_hg.tolist(),
            "converged": self.converged,
            "residual": self.residual,
        }


@dataclass
class ConstancyReport:
    mode: str
    w_min: float
    w_max: float
    spread: float
    samples: int
    passed: bool
    tol: float
    value: float
    witnesses: list = field(default_factory=list)

    def to_dict(self):
        return {
            "mode": self.mode, "w_min": self.w_min, "w_max": self.w_max,
            "spread": self.spread, "samples": self.samples, "pass": self.passed,
            "tol": self.tol, "value": self.value, "witnesses": self.witnesses,
        }


@dataclass
class StrictConvexityReport:
    passed: bool
    trials: int
    min_margin: float
    tol: float
    worst_pair: list

    def to_dict(self):
        return {"pass": self.passed, "trials": self.trials, "min_margin": self.min_margin,
                "tol": self.tol, "worst_pair": self.worst_pair}


def _lexmin(points):
    pts = np.unique(np.round(np.asarray(points), 15), axis=0)
    order = np.lexsort(pts.T[::-1])
    return pts[order[0]]


# ---------------------------------------------------------------- dual problem

def _min_over_dual(c, k, n_starts=32, seed=0, all_ties=False):
    """min <k, m> over the dual region; returns (value, witnesses, converged, residual)."""
    if isinstance(c, BallBody):
        rad = HALF_PI - c.radius
        off = dist(k, c.center)
        if off < 1e-15:
            from .sphere_core import random_tangents
            u = random_tangents(np.random.default_rng(seed), c.center)
            m = exp_map(c.center, u, rad)
        else:
            m = along(k, c.center, off + rad)
        return float(np.cos(min(off + rad, np.pi))), m[None, :], True, 0.0
    dual = c._dual
    if dual.complex is not None:
        val, pts = dual.complex.min_linear(k)
        pts = np.unique(np.round(pts, 14), axis=0)
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        return val, pts, True, 0.0
    val, m, conv, res = _min_over_dual_iterative(c, k, n_starts=n_starts, seed=seed)
    return val, m[None, :], conv, res


def _min_over_dual_iterative(c, k, n_starts=32, seed=0, step_tol=1e-10, max_iter=4000):
    """Multi-start projected descent of <k, m> on the dual cone intersected with S^d.

    Each iterate is ``normalize(P_D(m - eta k))`` where ``P_D`` is the
    Euclidean projection onto the dual cone (Moreau decomposition with an
    NNLS projection onto the primal cone).
    """
    dual = c._dual
    k = np.asarray(k, dtype=float)
    starts = np.vstack([dual.center[None, :], dual.sample_boundary(n_starts - 1, seed)])
    best = (np.inf, None, False, np.inf)
    for m in starts:
        eta = 1.0
        converged = False
        step = np.inf
        for _ in range(max_iter):
            y = dual.project(m - eta * k)
            ny = np.linalg.norm(y)
            if ny < 1e-14:
                eta *= 0.5
                continue
            new = y / ny
            step = np.linalg.norm(new - m)
            m = new
            if step < step_tol:
                converged = True
                break
        val = float(m @ k)
        if val < best[0] - 1e-13 or (abs(val - best[0]) <= 1e-13 and converged and not best[2]):
            best = (val, m, converged, step)
    return best


def _min_over_primal(c, p):
    """min <p, x> over the body; returns (value, minimizers)."""
    if isinstance(c, BallBody):
        off = dist(p, c.center)
        if off < 1e-15:
            raise GeometryError("farthest point from the ball center is not unique")
        q = along(p, c.center, off + c.radius)
        return float(np.cos(min(off + c.radius, np.pi))), q[None, :]
    if c.complex is not None:
        val, pts = c.complex.min_linear(p)
        return val, pts
    return _min_over_cone_nnls(c.vertices, p)


def _min_over_cone_nnls(vertices, p):
    """Exact min of <p, x> over the cone hull on the sphere, any dimension.

    If the projection of -p onto the cone is non-zero, its direction is the
    minimizer (the value is negative); otherwise <p, .> >= 0 on the cone and
    the minimum sits at a generator.
    """
    lam = nonneg_lstsq(vertices.T, -np.asarray(p, dtype=float))
    y = vertices.T @ lam
    ny = np.linalg.norm(y)
    if ny > 1e-12:
        return -float(ny), (y / ny)[None, :]
    vals = vertices @ p
    return float(vals.min()), vertices[[int(np.argmin(vals))]]


# ---------------------------------------------------------------- width

def width_at(c, k, support_tol=TOL_GEO, n_starts=32, seed=0):
    """Width of ``c`` determined by the supporting hemisphere H(k)."""
    k = normalize(k)
    margin = support_margin(c, k)
    if abs(margin) > support_tol:
        raise NotSupporting(f"H(k) does not support the body (margin {margin:.3e})")
    _, ms, conv, res = _min_over_dual(c, k, n_starts=n_starts, seed=seed)
    m = _lexmin(ms) if len(ms) > 1 else ms[0]
    m = normalize(m)
    lune = make_lune(Hemisphere(k), Hemisphere(m))
    return WidthReport(lune.thickness, m, lune, conv, float(res))


def thickness(c, n_starts=32, seed=0):
    """Smallest width over all supporting hemispheres.

    Since width_K = pi - max_{m in D} |km| for k on the boundary of the dual
    region D, the thickness equals ``pi - diam(D)``; for d <= 3 the dual
    diameter is computed exactly, otherwise by alternating ascent from
    ``n_starts`` seeded supporting directions.
    """
    if isinstance(c, BallBody):
        u = orthonormal_complement([c.center], c.dim)[0]
        rad = HALF_PI - c.radius
        k, m = exp_map(c.center, u, rad), exp_map(c.center, -u, rad)
        lune = make_lune(k, m)
        return WidthReport(2 * c.radius, m, lune, True, 0.0)
    dual = c._dual
    if dual.complex is not None:
        _, k, m = dual.complex.diameter()
        lune = make_lune(normalize(k), normalize(m))
        return WidthReport(lune.thickness, lune.h.center, lune, True, 0.0)
    best = None
    all_conv = True
    for k in dual.sample_boundary(n_starts, seed):
        conv = True
        for _ in range(50):
            val, m, cv, _ = _min_over_dual_iterative(c, k, n_starts=8, seed=seed)
            val2, k2, cv2, _ = _min_over_dual_iterative(c, m, n_starts=8, seed=seed)
            conv = conv and cv and cv2
            if val2 >= val - 1e-12:
                break
            k = k2
        if best is None or val < best[0]:
            best = (val, k, m, conv)
        all_conv = all_conv and conv
    _, k, m, conv = best
    lune = make_lune(normalize(k), normalize(m))
    return WidthReport(lune.thickness, lune.h.center, lune, conv, 0.0)


# ---------------------------------------------------------------- diameter

def diameter(c):
    """Diameter with a realizing pair ``(value, p, q)``.

    Polytopes with d <= 3 are exact over all simplex pairs of the boundary
    (above pi/2 a diameter need not be realized at vertices); d >= 4 uses
    vertex pairs refined by alternating farthest-point steps.
    """
    if isinstance(c, BallBody):
        u = orthonormal_complement([c.center], c.dim)[0]
        return 2 * c.radius, exp_map(c.center, u, c.radius), exp_map(c.center, -u, c.radius)
    if c.complex is not None:
        return c.complex.diameter()
    v = c.vertices
    g = v @ v.T
    i, j = np.unravel_index(np.argmin(g), g.shape)
    p, q = v[i], v[j]
    best = dist(p, q)
    if best > HALF_PI:
        for _ in range(100):
            _, qs = _min_over_cone_nnls(v, p)
            _, ps = _min_over_cone_nnls(v, qs[0])
            new = dist(ps[0], qs[0])
            if new <= best + 1e-15:
                break
            p, q, best = ps[0], qs[0], new
    return best, p, q


def on_boundary(c, p, tol=BOUNDARY_TOL):
    return abs(interior_margin(c, p)) <= tol


def _require_boundary(c, p, tol):
    margin = interior_margin(c, p)
    if abs(margin) > tol:
        raise NotOnBoundary(f"point is not on the boundary (margin {margin:.3e})")


def farthest_partner(c, p, tol=BOUNDARY_TOL):
    """Point ``q`` of ``c`` farthest from the boundary point ``p``; returns (q, |pq|)."""
    p = normalize(p)
    _require_boundary(c, p, tol)
    _, qs = _min_over_primal(c, p)
    d = dist(p, qs)
    q = qs[int(np.argmax(d))]
    return q, dist(p, q)


def orthogonal_diameter_support(c, p, q, tol=TOL_GEO):
    """Hemisphere orthogonal to the arc pq at p and containing q."""
    p, q = normalize(p), normalize(q)
    delta, _, _ = diameter(c)
    if dist(p, q) < delta - tol:
        raise NotADiameterPair(f"|pq| = {dist(p, q):.12f} < diameter {delta:.12f}")
    return Hemisphere(along(p, q, HALF_PI))


def _supporting_center_at(c, p):
    """Center of a hemisphere supporting ``c`` at ``p``.

    Tries the hemisphere orthogonal to the arc from p to its farthest point
    first (the unique choice on bodies of constant width above pi/2, where
    it is exact even for sampled polytopes), then falls back to an LP normal.
    """
    if isinstance(c, BallBody):
        return along(p, c.center, HALF_PI)
    _, qs = _min_over_primal(c, p)
    q = qs[int(np.argmax(dist(p, qs)))]
    k = along(p, q, HALF_PI)
    if support_margin(c, k) >= -TOL_GEO:
        return k
    return supporting_center(c, p)


def inscribed_ball_at(c, p, w, tol=BOUNDARY_TOL, verify=None, samples=1000, seed=0):
    """Ball of radius ``w - pi/2`` touching ``c`` from inside at ``p``.

    Returns ``(center, radius)``.  With ``verify`` set, ``samples`` points of
    the ball are checked and any interior margin below ``-verify`` raises.
    """
    if w <= HALF_PI:
        raise WidthNotAboveHalfPi("touching ball needs constant width above pi/2")
    p = normalize(p)
    _require_boundary(c, p, tol)
    k = _supporting_center_at(c, p)
    radius = w - HALF_PI
    center = along(p, k, radius)
    if verify is not None:
        m = ball_containment_margin(c, center, radius, samples, seed)
        if m < -verify:
            raise GeometryError(f"inscribed ball leaves the body (margin {m:.3e})")
    return center, radius


def ball_containment_margin(c, center, radius, samples=1000, seed=0):
    """Smallest interior margin of ``c`` over sampled points of B_radius(center)."""
    rng = np.random.default_rng(seed)
    pts = cap_sample(rng, center, radius, samples)
    if isinstance(c, PolytopeBody) and c._dual.generators is not None:
        return float((pts @ c._dual.generators.T).min())
    return min(interior_margin(c, x) for x in pts)


def width_lune_at(c, p, w, tol=BOUNDARY_TOL, width_tol=WIDTH_TOL, center_tol=WIDTH_TOL):
    """Lune containing ``c``, of thickness ``w``, with ``p`` the center of one
    bounding half-great-sphere.

    The first hemisphere K = H(k) supports ``c`` at ``p``; the candidate
    second hemisphere is the one at distance pi - w from k in the direction
    of p, followed by the narrowest-lune witnesses of width_at(k).
    """
    p = normalize(p)
    _require_boundary(c, p, tol)
    k = _supporting_center_at(c, p)
    margin_k = support_margin(c, k)
    if abs(margin_k) > width_tol:
        raise CenterConditionFailed(f"no supporting hemisphere found at p (margin {margin_k:.3e})")
    best_val, ms, _, _ = _min_over_dual(c, k)
    narrowest = np.pi - float(np.arccos(np.clip(best_val, -1, 1)))
    cands = [np.cos(np.pi - w) * k + np.sin(np.pi - w) * p] + list(ms)
    failures = []
    for m in cands:
        m = normalize(m)
        try:
            lune = make_lune(k, m)
        except GeometryError:
            continue
        sm = support_margin(c, m)
        off = dist(p, lune.c_gh)
        if (sm >= -width_tol and abs(lune.thickness - w) <= width_tol
                and abs(narrowest - w) <= width_tol and off <= center_tol):
            return lune
        failures.append((sm, lune.thickness, off))
    raise CenterConditionFailed(
        f"no lune of thickness {w} centered at p (narrowest {narrowest:.9f}; tried {failures[:3]})")


# ---------------------------------------------------------------- checkers

def supporting_directions(c, n, seed):
    return c._dual.sample_boundary(n, seed)


def check_constant_width(c, n=1000, tol=CHECK_TOL, seed=0):
    ks = supporting_directions(c, n, seed)
    vals, recs = [], []
    for i, k in enumerate(ks):
        rep = width_at(c, k, support_tol=max(TOL_GEO, 1e-8))
        vals.append(rep.value)
        recs.append(rep)
    vals = np.array(vals)
    if not len(vals):
        return ConstancyReport("width", np.nan, np.nan, 0.0, 0, True, tol, np.nan, [])
    lo, hi = int(np.argmin(vals)), int(np.argmax(vals))
    wit = []
    for tag, i in (("min", lo), ("max", hi)):
        r = recs[i]
        wit.append({"which": tag, "index": i, "k": r.k.tolist(), "witness_m": r.witness_m.tolist(),
                    "value": r.value, "converged": r.converged})
    for i, r in enumerate(recs):
        if not r.converged:
            wit.append({"which": "not_converged", "index": i, "k": r.k.tolist(), "residual": r.residual})
    spread = float(vals.max() - vals.min())
    return ConstancyReport("width", float(vals.min()), float(vals.max()), spread, len(vals),
                           spread <= tol, tol, float(np.median(vals)), wit)


def check_constant_diameter(c, n=200, tol=CHECK_TOL, seed=0):
    delta, p, q = diameter(c)
    pts = sample_boundary(c, n, seed)
    far = []
    for x in pts:
        _, qs = _min_over_primal(c, x)
        far.append(float(dist(x, qs).max()))
    far = np.array(far)
    worst = int(np.argmin(far)) if len(far) else 0
    spread = float(max(delta - far.min(), far.max() - delta, 0.0)) if len(far) else 0.0
    wit = [{"which": "diameter_pair", "p": np.asarray(p).tolist(), "q": np.asarray(q).tolist(), "value": delta}]
    if len(far):
        wit.append({"which": "worst_point", "index": worst, "p": pts[worst].tolist(), "value": float(far[worst])})
    return ConstancyReport("diameter", float(far.min()) if len(far) else delta,
                           float(max(far.max(), delta)) if len(far) else delta,
                           spread, len(far), spread <= tol, tol, float(delta), wit)


def check_strict_convexity(c, trials=1000, tol=1e-12, seed=0):
    """Midpoints of random boundary pairs must lie strictly inside."""
    model = c if isinstance(c, BallBody) else c.exact
    if model is None:
        from .bodies import NoBoundarySampler
        raise NoBoundarySampler("strict convexity needs an exact boundary sampler")
    rng = np.random.default_rng(seed)
    margins, pairs = [], []
    while len(margins) < trials:
        xs = model.sample(trials - len(margins), rng)
        ys = model.sample(len(xs), rng)
        for x, y in zip(xs, ys):
            d = dist(x, y)
            if d < 1e-6:
                continue
            mid = geodesic_point(x, y, 0.5)
            mm = model.margin(mid) if hasattr(model, "margin") else None
            if mm is None:
                mm = interior_margin(c, mid)
            margins.append(mm)
            pairs.append((x, y))
    margins = np.array(margins)
    i = int(np.argmin(margins))
    return StrictConvexityReport(bool(margins.min() > tol), trials, float(margins.min()), tol,
                                 [pairs[i][0].tolist(), pairs[i][1].tolist()])
