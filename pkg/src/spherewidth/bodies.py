"""Convex bodies on S^d: cone-hull polytopes and the analytic ball.

The single feasibility primitive is non-negative least squares on the
generator matrix: ``x`` lies in conv(V) iff it is a non-negative
combination of the vertices, and when it is not, the NNLS residual is the
center of a hemisphere separating ``x`` from the body.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.optimize import linprog, lsq_linear, nnls
from scipy.spatial import cKDTree
from scipy.stats import norm as _normal, qmc

from ._cone import ConeComplex, dedup_rows
from .sphere_core import (
    TOL_GEO,
    AngleOutOfRange,
    DimensionMismatch,
    GeometryError,
    Hemisphere,
    cap_sample,
    dist,
    exp_map,
    normalize,
    normalize_rows,
    orthonormal_complement,
    tangent_toward,
    unit_point,
)

EXACT_MAX_DIM = 3


class AntipodalPair(GeometryError):
    pass


class NotInOpenHemisphere(GeometryError):
    pass


class NotFullDimensional(GeometryError):
    pass


class PointIsInside(GeometryError):
    pass


class PointIsOutside(GeometryError):
    pass


class NoBoundarySampler(GeometryError):
    pass


def _check_point(c, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (c.dim + 1,):
        raise DimensionMismatch(f"point must have {c.dim + 1} coordinates")
    return x


def _deepest_center(vertices):
    """Center m maximizing min_i <m, v_i> over the box |m|_inf <= 1.

    Returns ``(m / |m|, depth)``; a positive depth certifies the vertices
    lie in the open hemisphere H(m).
    """
    n, D = vertices.shape
    c = np.zeros(D + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-vertices, np.ones((n, 1))])
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(n),
                  bounds=[(-1.0, 1.0)] * D + [(None, 1.0)], method="highs")
    if res.status != 0:
        raise GeometryError(f"hemisphere LP failed: {res.message}")
    m = res.x[:D]
    if np.linalg.norm(m) == 0:
        return m, 0.0
    m = m / np.linalg.norm(m)
    return m, float((vertices @ m).min())


@dataclass(eq=False)
class PolytopeBody:
    """conv(vertices) on S^dim: the unit-sphere trace of a salient cone.

    ``exact`` optionally carries the analytic boundary model of the body the
    vertices were sampled from; ``constructor`` the recipe that built it.
    """

    dim: int
    vertices: np.ndarray
    constructor: Optional[dict] = None
    exact: Optional[object] = field(default=None, repr=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != self.dim + 1:
            raise DimensionMismatch(f"vertices must be an (n, {self.dim + 1}) array")
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise GeometryError("vertices must be unit vectors")
        # rows already unit to rounding are kept bit-exact so that stored bodies round-trip
        off = np.abs(norms - 1.0) > 4 * np.finfo(float).eps
        v[off] /= norms[off, None]
        v.setflags(write=False)
        self.vertices = v
        # antipodal pairs: chordal |u + v| small
        if len(v) > 1:
            d, _ = cKDTree(v).query(-v, k=1)
            if d.min() <= 2 * np.sin(TOL_GEO / 2):
                raise AntipodalPair("body contains a pair of antipodes")
        if np.linalg.matrix_rank(v, tol=TOL_GEO) < self.dim + 1:
            raise NotFullDimensional("vertices do not span R^{d+1}; body has empty interior")
        m, depth = _deepest_center(v)
        if depth <= TOL_GEO:
            raise NotInOpenHemisphere("vertices are not contained in an open hemisphere")
        self.hemisphere_center = m
        self.depth = depth
        self._complex = None
        if self.dim <= EXACT_MAX_DIM:
            self._complex = ConeComplex(v, m)
        self._dual = DualRegion(self)

    kind = "polytope"

    @property
    def complex(self):
        return self._complex

    @property
    def interior_point(self):
        return normalize(self.vertices.sum(axis=0))

    @property
    def facet_normals(self):
        if self._dual.generators is None:
            raise GeometryError("facet normals are only computed for d <= 3")
        return self._dual.generators


@dataclass(eq=False)
class BallBody:
    """Closed spherical ball B_radius(center), radius in (0, pi/2)."""

    center: np.ndarray
    radius: float
    constructor: Optional[dict] = None

    kind = "ball"

    def __post_init__(self):
        self.center = unit_point(self.center)
        if not 0.0 < self.radius < np.pi / 2:
            raise AngleOutOfRange("ball radius must lie in (0, pi/2)")
        self.radius = float(self.radius)
        self._dual = DualRegion(self)

    @property
    def dim(self):
        return self.center.size - 1

    @property
    def exact(self):
        return self

    @property
    def interior_point(self):
        return self.center

    def support_margin(self, m):
        return float(np.cos(min(dist(m, self.center) + self.radius, np.pi)))

    def margin(self, x):
        """Smallest <m, x> over supporting hemispheres H(m); > 0 inside."""
        return float(np.cos(min(dist(x, self.center) + np.pi / 2 - self.radius, np.pi)))

    def sample(self, n, rng):
        u = _tangents(rng, self.center, n)
        return normalize_rows(np.cos(self.radius) * self.center + np.sin(self.radius) * u)


SphericalBody = Union[PolytopeBody, BallBody]


def _tangents(rng, base, n):
    z = rng.standard_normal((n, base.size))
    z -= np.outer(z @ base, base)
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def polytope_from_points(dim, points, constructor=None, exact=None):
    """Build conv(points) after merging points closer than ``TOL_GEO``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise GeometryError("need at least one point")
    if pts.shape[1] != dim + 1:
        raise DimensionMismatch(f"points must have {dim + 1} coordinates")
    pts, _ = dedup_rows(pts, TOL_GEO)
    return PolytopeBody(dim, pts, constructor=constructor, exact=exact)


def nonneg_lstsq(a, b, kkt_tol=1e-12):
    """argmin |a lam - b| over lam >= 0.

    scipy's active-set ``nnls`` occasionally stops at a non-optimal point;
    its answer is kept only when the KKT conditions certify it, otherwise
    the bounded-variable solver is used.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lam, _ = nnls(a, b)
    g = a.T @ (b - a @ lam)
    scale = kkt_tol * max(1.0, np.abs(b).max())
    if g.max() <= scale and np.all(np.abs(g[lam > 0]) <= scale):
        return lam
    return lsq_linear(a, b, bounds=(0.0, np.inf), method="bvls", tol=1e-15).x


def cone_residual(vertices, x):
    """NNLS fit of ``x`` by non-negative combinations of ``vertices``.

    Returns ``(weights, residual_vector)``.
    """
    lam = nonneg_lstsq(np.asarray(vertices, dtype=float).T, x)
    return lam, x - vertices.T @ lam


def contains(c, x, tol=TOL_GEO):
    x = _check_point(c, x)
    if isinstance(c, BallBody):
        return dist(x, c.center) <= c.radius + tol
    _, r = cone_residual(c.vertices, x)
    return bool(np.linalg.norm(r) <= tol)


def separate(c, x, tol=TOL_GEO):
    """Hemisphere containing the polytope ``c`` but not ``x``."""
    x = _check_point(c, x)
    _, r = cone_residual(c.vertices, x)
    if np.linalg.norm(r) <= tol:
        raise PointIsInside("point belongs to the body; no separating hemisphere")
    return Hemisphere(-r / np.linalg.norm(r))


def support_margin(c, m):
    """min over the body of <m, x>: >= 0 iff H(m) contains it, 0 iff H(m) supports it."""
    m = _check_point(c, m)
    if isinstance(c, BallBody):
        return c.support_margin(m)
    return float((c.vertices @ m).min())


def supporting_center(c, p, tol=TOL_GEO):
    """Center of a hemisphere supporting ``c`` at the boundary point ``p``.

    Balls: the direction from p toward the center.  Polytopes: a vertex of
    the LP {V m >= 0, <p, m> <= 0, |m|_inf <= 1} maximizing <m, sum(V)>,
    which is non-zero exactly when p is not interior.
    """
    p = _check_point(c, p)
    if isinstance(c, BallBody):
        return tangent_toward(p, c.center) if dist(p, c.center) > 0 else None
    v = c.vertices
    D = c.dim + 1
    res = linprog(-v.sum(axis=0), A_ub=np.vstack([-v, p]), b_ub=np.zeros(len(v) + 1),
                  bounds=[(-1.0, 1.0)] * D, method="highs")
    if res.status != 0 or np.linalg.norm(res.x) <= tol:
        raise PointIsInside("no supporting hemisphere through the point")
    m = normalize(res.x)
    if abs(m @ p) > np.sqrt(tol):
        raise PointIsInside("no supporting hemisphere through the point")
    return m


def extreme_points(c):
    """Vertices not in the hull of the others (qhull for d <= 3, NNLS above)."""
    if c.complex is not None:
        return c.complex.vertices.copy()
    v = c.vertices
    keep = []
    for i in range(len(v)):
        others = np.delete(v, i, axis=0)
        _, r = cone_residual(others, v[i])
        if np.linalg.norm(r) > TOL_GEO:
            keep.append(i)
    return v[keep]


def caratheodory(c, x, tol=TOL_GEO):
    """At most d+1 extreme points of ``c`` whose hull contains ``x``.

    Recursive: pick an extreme point e, push the ray from e through x to the
    boundary point f, and recurse into the face that carries f.
    """
    x = _check_point(c, x)
    if isinstance(c, BallBody):
        raise GeometryError("Caratheodory decomposition needs a polytope")
    if not contains(c, x, tol):
        raise PointIsOutside("point is not in the body")
    pts = extreme_points(c)
    out = _carath(pts, x, tol)
    # prune zero-weight members
    lam, _ = cone_residual(out, x)
    return out[lam > 1e-14] if (lam > 1e-14).any() else out[:1]


def _carath(pts, x, tol):
    if len(pts) == 1:
        return pts
    hit = np.linalg.norm(pts - x / np.linalg.norm(x), axis=1)
    if hit.min() <= tol:
        return pts[[int(np.argmin(hit))]]
    if np.linalg.matrix_rank(pts, tol=1e-10) == 1:
        return pts[:1]
    e_i = int(np.argmin(pts @ x))
    e = pts[e_i]
    # max s  s.t.  x - s e = P^T lam,  lam >= 0
    n, D = pts.shape
    cost = np.zeros(n + 1)
    cost[0] = -1.0
    a_eq = np.hstack([e[:, None], pts.T])
    res = linprog(cost, A_eq=a_eq, b_eq=x, bounds=[(0, None)] * (n + 1), method="highs",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise GeometryError(f"Caratheodory LP failed: {res.message}")
    s, lam = res.x[0], res.x[1:]
    support = lam > 1e-12 * max(1.0, lam.max())
    f = pts[support].T @ lam[support]
    face = pts[support]
    if np.linalg.matrix_rank(face, tol=1e-10) >= np.linalg.matrix_rank(pts, tol=1e-10):
        # numerically the ray did not reach a lower face; fall back to the LP basis
        return face if s <= 1e-12 else np.vstack([e, face])
    sub = _carath(face, f, tol)
    return sub if s <= 1e-12 else np.vstack([e[None, :], sub])


class DualRegion:
    """Centers of hemispheres containing a body: {m : support_margin(c, m) >= 0}.

    For polytopes with d <= 3 the region is itself a spherical polytope whose
    generators are the inward facet normals; for balls it is the cap
    B_{pi/2 - rho}(center).  In every case it offers a membership predicate
    and a seeded low-discrepancy boundary sampler.
    """

    def __init__(self, body):
        self.body = body
        self.dim = body.dim
        if isinstance(body, BallBody):
            self.kind = "cap"
            self.center = body.center
            self.radius = np.pi / 2 - body.radius
            self.generators = None
            self.complex = None
            return
        self.kind = "polytope"
        self.center = body.hemisphere_center
        self.generators = None
        self.complex = None
        if body.complex is not None:
            self.generators = body.complex.unique_facet_normals()
            self.complex = ConeComplex(self.generators, body.interior_point)

    def margin(self, m):
        return support_margin(self.body, m)

    def contains(self, m, tol=TOL_GEO):
        return self.margin(m) >= -tol

    def boundary_point(self, u):
        """Boundary point hit by the geodesic ray from ``center`` along tangent ``u``."""
        u = np.asarray(u, dtype=float)
        if self.kind == "cap":
            return exp_map(self.center, u, self.radius)
        v = self.body.vertices
        a = v @ self.center
        b = v @ u
        t = np.arctan2(a, -b).min()
        return normalize(np.cos(t) * self.center + np.sin(t) * u)

    def sample_boundary(self, n, seed):
        """``n`` supporting-hemisphere centers from a scrambled Halton sequence."""
        dirs = halton_directions(self.dim, n, seed, self.center)
        return np.array([self.boundary_point(u) for u in dirs]).reshape(n, self.dim + 1)

    def project(self, y):
        """Euclidean projection of ``y`` onto the cone {m : V m >= 0}."""
        if self.kind == "cap":
            raise GeometryError("projection is only used for polytope dual regions")
        v = self.body.vertices
        lam = nonneg_lstsq(v.T, -y)
        return y + v.T @ lam   # Moreau: y - P_polar(y), polar = -cone(V)


def halton_directions(dim, n, seed, base):
    """``n`` unit tangent vectors at ``base`` from a scrambled Halton set."""
    if n <= 0:
        return np.empty((0, dim + 1))
    basis = orthonormal_complement([base], dim)     # (d, D)
    if dim == 2:
        h = qmc.Halton(1, scramble=True, seed=seed).random(n)[:, 0]
        z = np.column_stack([np.cos(2 * np.pi * h), np.sin(2 * np.pi * h)])
    else:
        h = qmc.Halton(dim, scramble=True, seed=seed).random(n)
        z = _normal.ppf(np.clip(h, 1e-12, 1 - 1e-12))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z @ basis


def dual_region(c):
    return c._dual


def interior_margin(c, x):
    """min over supporting hemispheres H(m) of <m, x>: > 0 inside, < 0 outside.

    Exact for balls and for polytopes with d <= 3 (minimum over the dual
    polytope); for d >= 4 it returns the NNLS-based value when ``x`` is
    outside and the vertex bound of the dual cone otherwise.
    """
    x = _check_point(c, x)
    if isinstance(c, BallBody):
        return c.margin(x)
    dr = c._dual
    if dr.complex is not None:
        return float((dr.generators @ x).min())
    from .metrics import _min_over_dual_iterative
    val, _, _, _ = _min_over_dual_iterative(c, x, n_starts=8, seed=0)
    return val


def sample_in_body(c, n, rng):
    """Random points of the body (balls uniform; polytopes random cone combinations)."""
    if isinstance(c, BallBody):
        return cap_sample(rng, c.center, c.radius, n)
    w = rng.dirichlet(np.full(len(c.vertices), 0.5), size=n)
    return normalize_rows(w @ c.vertices)


def sample_boundary(c, n, seed):
    """Seeded boundary points of the body itself (not of an exact model)."""
    rng = np.random.default_rng(seed)
    if isinstance(c, BallBody):
        return c.sample(n, rng)
    if c.complex is None:
        return _boundary_by_bisection(c, n, rng)
    faces = c.complex.faces[c.dim]
    g = faces.gens
    # Euclidean simplex volume of the facet simplices as sampling weight
    e = g[:, 1:, :] - g[:, :1, :]
    gram = e @ np.swapaxes(e, 1, 2)
    area = np.sqrt(np.clip(np.linalg.det(gram), 0, None))
    p = area / area.sum() if area.sum() > 0 else None
    pick = rng.choice(len(g), size=n, p=p)
    w = rng.dirichlet(np.ones(g.shape[1]), size=n)
    return normalize_rows(np.einsum("nr,nrd->nd", w, g[pick]))


def _boundary_by_bisection(c, n, rng):
    x0 = c.interior_point
    out = []
    for u in _tangents(rng, x0, n):
        lo, hi = 0.0, np.pi / 2
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if contains(c, exp_map(x0, u, mid)):
                lo = mid
            else:
                hi = mid
        out.append(exp_map(x0, u, lo))
    return np.array(out)
