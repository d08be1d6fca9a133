"""Points, geodesics, hemispheres and lunes on the unit sphere S^d.

Points are plain ``numpy`` arrays of length ``d + 1`` with unit Euclidean
norm; angles are floats in radians.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

EPS_UNIT = 1e-12
TOL_GEO = 1e-9


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class DimensionMismatch(GeometryError):
    pass


class DegenerateArc(GeometryError):
    pass


class EqualHemispheres(GeometryError):
    pass


class OppositeHemispheres(GeometryError):
    pass


class NotACorner(GeometryError):
    pass


class AngleOutOfRange(GeometryError):
    pass


def normalize(x):
    x = np.asarray(x, dtype=float)
    n = np.linalg.norm(x)
    if n == 0.0 or not np.isfinite(n):
        raise GeometryError("cannot normalize a zero or non-finite vector")
    return x / n


def unit_point(coords, dim=None):
    """Validate ``coords`` as a point of S^dim and return it as an array.

    The input must already have unit norm within ``EPS_UNIT``; it is
    re-normalized on the way out so that downstream predicates see an
    exactly unit vector.
    """
    x = np.array(coords, dtype=float).reshape(-1)
    if x.size < 3:
        raise GeometryError("points need at least 3 coordinates (d >= 2)")
    if dim is not None and x.size != dim + 1:
        raise DimensionMismatch(f"expected {dim + 1} coordinates, got {x.size}")
    if abs(np.linalg.norm(x) - 1.0) > EPS_UNIT:
        raise GeometryError(f"point is not on the unit sphere (norm {np.linalg.norm(x)!r})")
    return x / np.linalg.norm(x)


def basis_vector(dim, i):
    e = np.zeros(dim + 1)
    e[i] = 1.0
    return e


def antipode(x):
    return -np.asarray(x, dtype=float)


def _check_same_dim(a, b):
    if np.shape(a)[-1] != np.shape(b)[-1]:
        raise DimensionMismatch(f"dimension mismatch: {np.shape(a)[-1]} vs {np.shape(b)[-1]}")


def dist(a, b):
    """Spherical distance of ``a`` and ``b`` (broadcasts over leading axes).

    Uses ``2 atan2(|a - b|, |a + b|)``, which equals ``arccos<a, b>`` but
    keeps full precision near 0 and pi.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_same_dim(a, b)
    d = 2.0 * np.arctan2(np.linalg.norm(a - b, axis=-1), np.linalg.norm(a + b, axis=-1))
    return float(d) if np.ndim(d) == 0 else d


def tangent_toward(a, b):
    """Unit tangent vector at ``a`` pointing along the arc toward ``b``."""
    a = np.asarray(a, dtype=float)
    t = np.asarray(b, dtype=float) - np.dot(a, b) * a
    n = np.linalg.norm(t)
    if n < EPS_UNIT:
        raise DegenerateArc("tangent direction undefined for equal or antipodal points")
    return t / n


def exp_map(a, u, s):
    """Point at distance ``s`` from ``a`` along the unit tangent ``u``."""
    return normalize(np.cos(s) * np.asarray(a, dtype=float) + np.sin(s) * np.asarray(u, dtype=float))


def along(a, b, s):
    """Point at distance ``s`` from ``a`` on the great circle through ``a``
    and ``b``, heading toward ``b`` (``s`` may exceed ``|ab|``)."""
    return exp_map(a, tangent_toward(a, b), s)


def geodesic_point(a, b, t):
    """Point of the arc ``ab`` at fraction ``t`` of its length."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_same_dim(a, b)
    if not 0.0 <= t <= 1.0:
        raise GeometryError("t must lie in [0, 1]")
    theta = dist(a, b)
    if theta < TOL_GEO or theta > np.pi - TOL_GEO:
        raise DegenerateArc("arc endpoints are equal or antipodal")
    s = np.sin(theta)
    return normalize((np.sin((1.0 - t) * theta) * a + np.sin(t * theta) * b) / s)


def ball_in_hemisphere(o, rho, m):
    """True iff the ball of radius ``rho`` about ``o`` lies in H(m)."""
    if not 0.0 < rho < np.pi / 2:
        raise AngleOutOfRange("rho must lie in (0, pi/2)")
    return dist(o, m) <= np.pi / 2 - rho + TOL_GEO


def orthonormal_complement(vectors, dim):
    """Orthonormal basis (as rows) of the complement of span(vectors) in R^{dim+1}."""
    v = np.atleast_2d(np.asarray(vectors, dtype=float))
    _, s, vt = np.linalg.svd(v, full_matrices=True)
    rank = int(np.sum(s > 1e-12 * max(1.0, s[0])))
    return vt[rank:]


@dataclass(frozen=True)
class Hemisphere:
    """Closed hemisphere H(center) = {x : <center, x> >= 0}."""

    center: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", unit_point(self.center))

    @property
    def dim(self):
        return self.center.size - 1

    def contains(self, x, tol=TOL_GEO):
        return float(np.dot(self.center, x)) >= -tol


@dataclass(frozen=True)
class Lune:
    """Intersection of two distinct, non-opposite hemispheres ``g`` and ``h``.

    ``c_gh`` is the center of the bounding half-great-sphere lying on
    bd(g) (inside h), ``c_hg`` the one lying on bd(h).
    """

    g: Hemisphere
    h: Hemisphere
    thickness: float = field(init=False)
    c_gh: np.ndarray = field(init=False, repr=False)
    c_hg: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        gc, hc = self.g.center, self.h.center
        _check_same_dim(gc, hc)
        if dist(gc, hc) <= TOL_GEO:
            raise EqualHemispheres("lune needs two different hemispheres")
        if dist(gc, -hc) <= TOL_GEO:
            raise OppositeHemispheres("lune needs two non-opposite hemispheres")
        t = float(np.dot(gc, hc))
        object.__setattr__(self, "c_gh", normalize(hc - t * gc))
        object.__setattr__(self, "c_hg", normalize(gc - t * hc))
        object.__setattr__(self, "thickness", np.pi - dist(gc, hc))

    @property
    def dim(self):
        return self.g.dim

    def corner_basis(self):
        """Orthonormal rows spanning the subspace whose unit sphere is the corner set."""
        return orthonormal_complement([self.g.center, self.h.center], self.dim)

    def sample_corners(self, n, rng):
        """``n`` random corners (uniform on the corner great (d-2)-sphere)."""
        basis = self.corner_basis()
        z = rng.standard_normal((n, basis.shape[0]))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        return z @ basis

    def corners(self):
        """Both corners on S^2; raises for d > 2 where the set is continuous."""
        if self.dim != 2:
            raise GeometryError("corner set is continuous for d > 2; use corner_basis()")
        r = self.corner_basis()[0]
        return np.array([r, -r])


def make_lune(g, h):
    if not isinstance(g, Hemisphere):
        g = Hemisphere(g)
    if not isinstance(h, Hemisphere):
        h = Hemisphere(h)
    return Lune(g, h)


def lune_thickness(lune):
    return lune.thickness


def is_corner(lune, r, tol=TOL_GEO):
    return (abs(np.dot(lune.g.center, r)) <= tol and abs(np.dot(lune.h.center, r)) <= tol)


def corner_angle(lune, r):
    """Non-oriented angle at the corner ``r`` between the tangent directions
    toward ``c_gh`` and ``c_hg``."""
    r = np.asarray(r, dtype=float)
    _check_same_dim(r, lune.g.center)
    if not is_corner(lune, r):
        raise NotACorner("point does not lie on both bounding great spheres")
    u = tangent_toward(r, lune.c_gh)
    v = tangent_toward(r, lune.c_hg)
    return float(np.arctan2(np.linalg.norm(u - v), np.linalg.norm(u + v)) * 2.0)


def lune_contains(lune, x, tol=TOL_GEO):
    x = np.asarray(x, dtype=float)
    _check_same_dim(x, lune.g.center)
    return bool(np.dot(lune.g.center, x) >= -tol and np.dot(lune.h.center, x) >= -tol)


def random_points(rng, n, dim):
    """``n`` uniform random points on S^dim."""
    z = rng.standard_normal((n, dim + 1))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_tangents(rng, base, n=None):
    """Uniform random unit tangent vectors at ``base`` (one per row if n given)."""
    base = np.asarray(base, dtype=float)
    z = rng.standard_normal((1 if n is None else n, base.size))
    z -= np.outer(z @ base, base)
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z[0] if n is None else z


def cap_sample(rng, center, radius, n):
    """``n`` points uniform (w.r.t. surface measure) in the cap B_radius(center).

    Uses rejection on the polar angle density ``sin^{d-1}``, exact for every d.
    """
    center = np.asarray(center, dtype=float)
    dim = center.size - 1
    smax = np.sin(min(radius, np.pi / 2)) ** (dim - 1)
    angles = []
    need = n
    while need > 0:
        t = rng.uniform(0.0, radius, size=2 * need + 8)
        keep = rng.uniform(0.0, smax, size=t.size) <= np.sin(t) ** (dim - 1)
        angles.append(t[keep][:need])
        need -= angles[-1].size
    out = np.concatenate(angles)
    u = random_tangents(rng, center, n)
    return normalize_rows(np.cos(out)[:, None] * center + np.sin(out)[:, None] * u)


def normalize_rows(x):
    x = np.asarray(x, dtype=float)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def random_rotation(rng, dim):
    """Haar-random orthogonal (d+1)x(d+1) matrix with determinant +1."""
    q, r = np.linalg.qr(rng.standard_normal((dim + 1, dim + 1)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
