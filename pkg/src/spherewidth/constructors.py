"""Example bodies: balls, orthants, Reuleaux odd-gons, the S^3 body of
constant width kappa + 2 sigma, random polytopes and perturbations.

Sampled constructors return a :class:`PolytopeBody` whose ``exact``
attribute is the analytic boundary model, so checkers that need the true
boundary do not inherit sampling error.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import bisect
from scipy.stats import qmc

from .bodies import (
    BallBody,
    NotFullDimensional,
    PolytopeBody,
    polytope_from_points,
)
from .sphere_core import (
    GeometryError,
    along,
    basis_vector,
    cap_sample,
    dist,
    normalize,
    normalize_rows,
    random_rotation,
    tangent_toward,
    unit_point,
)


class RadiusOutOfRange(GeometryError):
    pass


class DimensionTooSmall(GeometryError):
    pass


class EvenN(GeometryError):
    pass


class WidthOutOfRange(GeometryError):
    pass


class NoSolution(GeometryError):
    pass


class KappaOutOfRange(GeometryError):
    pass


class SigmaOutOfRange(GeometryError):
    pass


class TooFewPoints(GeometryError):
    pass


class InvariantViolation(GeometryError):
    pass


def spec(kind, dim, params, seed=None):
    return {"kind": kind, "dim": dim, "params": params, "seed": seed}


# ---------------------------------------------------------------- ball / orthant

def ball_body(center, rho):
    center = unit_point(center)
    if not 0.0 < rho < np.pi / 2:
        raise RadiusOutOfRange("ball radius must lie in (0, pi/2)")
    return BallBody(center, rho, constructor=spec("ball", center.size - 1,
                                                  {"center": center.tolist(), "rho": float(rho)}))


class OrthantModel:
    """{x : x_i >= 0 for all i}; boundary = points with some zero coordinate."""

    def __init__(self, dim):
        self.dim = dim

    def sample(self, n, rng):
        x = np.abs(rng.standard_normal((n, self.dim + 1)))
        x[np.arange(n), rng.integers(0, self.dim + 1, n)] = 0.0
        return normalize_rows(x)

    def margin(self, x):
        return float(np.min(x))


def orthant_body(d):
    if d < 2:
        raise DimensionTooSmall("orthant body needs d >= 2")
    return PolytopeBody(d, np.eye(d + 1), constructor=spec("orthant", d, {}), exact=OrthantModel(d))


# ---------------------------------------------------------------- Reuleaux

def regular_polygon(n, r):
    """Vertices of the regular spherical n-gon of circumradius r about e_3."""
    th = 2 * np.pi * np.arange(n) / n
    return np.column_stack([np.sin(r) * np.cos(th), np.sin(r) * np.sin(th), np.full(n, np.cos(r))])


def reuleaux_circumradius(n, w, extended=False):
    """Circumradius of the regular n-gon whose (n-1)/2-offset vertices are at distance w.

    Bisection on the spherical law of cosines
    ``cos w = cos^2 r + sin^2 r cos(2 pi s / n)``, s = (n-1)/2.
    """
    s = (n - 1) // 2
    phi = 2 * np.pi * s / n

    def gap(r):
        c = np.cos(r) ** 2 + np.sin(r) ** 2 * np.cos(phi)
        return np.arccos(np.clip(c, -1, 1)) - w

    hi = np.pi / 2 if extended else np.pi / 2 - 1e-15
    if gap(1e-12) > 0 or gap(hi) < 0:
        raise NoSolution(f"no circumradius gives opposite distance {w}")
    return bisect(gap, 1e-12, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


class ReuleauxModel:
    """Spherical Reuleaux odd-gon: boundary arcs of radius w about opposite vertices."""

    def __init__(self, vertices, w, rotation):
        self.vertices = vertices
        self.w = w
        self.rotation = rotation
        n = len(vertices)
        s = (n - 1) // 2
        self.arcs = []
        for j in range(n):
            cj = vertices[j]
            a, b = vertices[(j + s) % n], vertices[(j + s + 1) % n]
            ua, ub = tangent_toward(cj, a), tangent_toward(cj, b)
            ang = np.arctan2(np.linalg.norm(ua - ub), np.linalg.norm(ua + ub)) * 2
            self.arcs.append((cj, ua, ub, ang))

    def arc_points(self, j, t):
        cj, ua, ub, ang = self.arcs[j]
        t = np.atleast_1d(t)
        u = (np.sin((1 - t) * ang)[:, None] * ua + np.sin(t * ang)[:, None] * ub) / np.sin(ang)
        u = normalize_rows(u)
        return normalize_rows(np.cos(self.w) * cj + np.sin(self.w) * u)

    def sample(self, n, rng):
        j = rng.integers(0, len(self.arcs), n)
        t = rng.uniform(0, 1, n)
        return np.vstack([self.arc_points(jj, np.array([tt])) for jj, tt in zip(j, t)]) if n else np.empty((0, 3))

    def margin(self, x):
        # the odd-gon is the intersection of the balls B_w(vertex)
        return float(np.min(np.sin(self.w - dist(self.vertices, np.asarray(x)))))


def _slerp_dirs(ua, ub, t):
    ang = 2 * np.arctan2(np.linalg.norm(ua - ub), np.linalg.norm(ua + ub))
    t = np.atleast_1d(t)
    return normalize_rows((np.sin((1 - t) * ang)[:, None] * ua + np.sin(t * ang)[:, None] * ub) / np.sin(ang))


class WideReuleauxModel:
    """Reuleaux-type odd-gon of width w > pi/2.

    It is the outer parallel body, at distance eps = w - pi/2, of the
    Reuleaux odd-gon of width pi - w.  The boundary consists of n caps of
    radius eps about the base vertices joined by n great-circle arcs.
    """

    def __init__(self, vertices, w, rotation):
        self.base = ReuleauxModel(vertices, np.pi - w, rotation)
        self.vertices = vertices
        self.w = w
        self.eps = w - np.pi / 2
        self.rotation = rotation
        n = len(vertices)
        s = (n - 1) // 2
        # piece 2j: great arc of tangents at v_j; piece 2j+1: cap about v_j
        self.pieces = []
        for j in range(n):
            cj, ua, ub, ang = self.base.arcs[j]
            self.pieces.append(("arc", cj, ua, ub, ang))
            da = -tangent_toward(cj, vertices[(j - s) % n])
            db = -tangent_toward(cj, vertices[(j - s - 1) % n])
            cang = 2 * np.arctan2(np.linalg.norm(da - db), np.linalg.norm(da + db))
            self.pieces.append(("cap", cj, da, db, cang))
        self.lengths = np.array([a if kind == "arc" else np.sin(self.eps) * a
                                 for kind, _, _, _, a in self.pieces])

    def piece_points(self, i, t):
        kind, c, ua, ub, _ = self.pieces[i]
        u = _slerp_dirs(ua, ub, t)
        if kind == "arc":
            return u
        return normalize_rows(np.cos(self.eps) * c + np.sin(self.eps) * u)

    def sample(self, n, rng):
        if not n:
            return np.empty((0, 3))
        i = rng.choice(len(self.pieces), size=n, p=self.lengths / self.lengths.sum())
        t = rng.uniform(0, 1, n)
        return np.vstack([self.piece_points(ii, tt) for ii, tt in zip(i, t)])

    def distance_to_base(self, x):
        x = np.asarray(x, dtype=float)
        if self.base.margin(x) >= 0:
            return 0.0
        best = float(dist(self.vertices, x).min())
        for c, ua, ub, _ in self.base.arcs:
            ux = tangent_toward(c, x)
            coef, *_ = np.linalg.lstsq(np.column_stack([ua, ub]), ux, rcond=None)
            if coef.min() >= 0:
                best = min(best, abs(float(dist(c, x)) - self.base.w))
        return best

    def margin(self, x):
        return float(np.sin(self.eps - self.distance_to_base(x)))


def reuleaux_odd_gon(n, w, samples, seed=0, extended=False):
    if n % 2 == 0:
        raise EvenN("Reuleaux polygons need an odd number of vertices")
    if n < 3:
        raise GeometryError("need n >= 3")
    upper = np.pi if extended else np.pi / 2
    if not 0.0 < w < upper:
        raise WidthOutOfRange(f"w must lie in (0, {upper:.6f})")
    if samples < n:
        raise GeometryError("samples must be at least n")
    rot = random_rotation(np.random.default_rng(seed), 2)
    if w > np.pi / 2:
        verts = regular_polygon(n, reuleaux_circumradius(n, np.pi - w)) @ rot.T
        model = WideReuleauxModel(verts, w, rot)
        per = np.maximum(1, np.round(samples * model.lengths / model.lengths.sum()).astype(int))
        pts = [model.piece_points(i, (np.arange(m) + 0.5) / m) for i, m in enumerate(per)]
        pts = np.vstack([model.piece_points(i, np.array([0.0])) for i in range(len(per))] + pts)
    else:
        verts = regular_polygon(n, reuleaux_circumradius(n, w, extended)) @ rot.T
        model = ReuleauxModel(verts, w, rot)
        per = np.diff(np.linspace(0, samples, n + 1).round().astype(int))
        pts = [verts]
        for j in range(n):
            m = per[j]
            t = (np.arange(m) + 0.5) / m
            pts.append(model.arc_points(j, t))
        pts = np.vstack(pts)
    body = polytope_from_points(2, pts, constructor=spec("reuleaux", 2, {"n": n, "w": float(w),
                                "samples": samples, "extended": bool(extended)}, seed), exact=model)
    return body


# ---------------------------------------------------------------- S^3 example

class ExampleS3Model:
    """Analytic pieces of the S^3 body of constant width kappa + 2 sigma.

    Coordinates before rotation: circle X about the pole e4 in the e1 e2
    directions, apex y in the e3 e4 plane.  Pieces are parametrized on
    [0,1]^2 and each C-piece point is paired with the D-piece point through
    the same x (and A+ with B+ through y) at distance kappa + 2 sigma.
    """

    def __init__(self, kappa, sigma, rotation):
        self.kappa, self.sigma = kappa, sigma
        self.w = kappa + 2 * sigma
        self.rotation = rotation
        e1, e2, e3, e4 = np.eye(4)
        self.e = (e1, e2, e3, e4)
        cos_alpha = np.cos(kappa) / np.cos(kappa / 2)
        alpha = np.arccos(cos_alpha)
        self.y = np.cos(alpha) * e4 + np.sin(alpha) * e3
        self.axis = tangent_toward(self.y, e4)          # at y toward the center of X
        self.beta = np.arcsin(np.sin(kappa / 2) / np.sin(kappa))
        w1, w2 = self.axis, None
        # orthonormal tangent frame at y: axis, e1, e2
        self.frame = (self.axis, e1, e2)

    # raw (unrotated) geometry ---------------------------------------------
    def x_of(self, phi):
        e1, e2, _, e4 = self.e
        h = self.kappa / 2
        return np.cos(h) * e4 + np.sin(h) * (np.cos(phi) * e1 + np.sin(phi) * e2)

    def _cap_dirs(self, s, t):
        """Tangent directions at y within angle beta of the axis (area-uniform in s)."""
        ang = np.arccos(1 - s * (1 - np.cos(self.beta)))
        az = 2 * np.pi * t
        ax, e1, e2 = self.frame
        return (np.cos(ang)[:, None] * ax + np.sin(ang)[:, None] *
                (np.cos(az)[:, None] * e1 + np.sin(az)[:, None] * e2))

    def caps(self, s, t):
        """Paired points of B+ (toward X) and A+ (away from X)."""
        u = self._cap_dirs(s, t)
        y = self.y
        b_plus = np.cos(self.kappa + self.sigma) * y + np.sin(self.kappa + self.sigma) * u
        a_plus = np.cos(self.sigma) * y - np.sin(self.sigma) * u
        return normalize_rows(b_plus), normalize_rows(a_plus)

    def pieces(self, phi, t):
        """Paired points of C_x and D_x for x = x(phi), t in [0, 1] along the arc."""
        out_c, out_d = [], []
        for ph, tt in zip(np.atleast_1d(phi), np.atleast_1d(t)):
            x = self.x_of(ph)
            xp = self.x_of(ph + np.pi)
            ub = -tangent_toward(x, self.y)      # toward b
            ud = -tangent_toward(x, xp)          # toward d
            ang = np.arctan2(np.linalg.norm(ub - ud), np.linalg.norm(ub + ud)) * 2
            u = normalize((np.sin((1 - tt) * ang) * ub + np.sin(tt * ang) * ud) / np.sin(ang))
            out_c.append(np.cos(self.sigma) * x + np.sin(self.sigma) * u)
            out_d.append(np.cos(self.kappa + self.sigma) * x - np.sin(self.kappa + self.sigma) * u)
        return normalize_rows(np.array(out_c)), normalize_rows(np.array(out_d))

    def landmarks(self, phi):
        """(x, a, b, d, d') for each phi, unrotated."""
        out = []
        for ph in np.atleast_1d(phi):
            x, xp = self.x_of(ph), self.x_of(ph + np.pi)
            a = along(x, self.y, self.kappa + self.sigma)
            b = along(self.y, x, self.kappa + self.sigma)
            d = along(xp, x, self.kappa + self.sigma)
            dp = along(x, xp, self.kappa + self.sigma)
            out.append((x, a, b, d, dp))
        return out

    # rotated sampling ------------------------------------------------------
    def rotate(self, pts):
        return np.asarray(pts) @ self.rotation.T

    def piece_areas(self):
        """Rough areas of (caps pair, C/D pair) for sample allocation."""
        g = 24
        s = (np.arange(g) + 0.5) / g
        S, T = np.meshgrid(s, s, indexing="ij")
        h = 1e-5

        def area(f):
            p = f(S.ravel(), T.ravel())
            ps = f(S.ravel() + h, T.ravel())
            pt = f(S.ravel(), T.ravel() + h)
            a = np.linalg.norm(np.einsum("ni,nj->nij", (ps - p) / h, (pt - p) / h)
                               - np.einsum("ni,nj->nij", (pt - p) / h, (ps - p) / h), axis=(1, 2)) / np.sqrt(2)
            return a.mean()

        cap_b = area(lambda s, t: self.caps(s, t)[0])
        cap_a = area(lambda s, t: self.caps(s, t)[1])
        pc = area(lambda s, t: self.pieces(2 * np.pi * s, t)[0] if True else None)
        pd = area(lambda s, t: self.pieces(2 * np.pi * s, t)[1])
        return cap_a + cap_b, pc + pd

    def sample_pairs(self, n, points):
        """``n`` paired boundary points from the parameter ``points`` in [0,1]^3.

        The first coordinate picks the piece family (caps or C/D), the other
        two are its parameters.
        """
        caps_area, cd_area = self._areas
        frac = caps_area / (caps_area + cd_area)
        sel = points[:, 0] < frac
        u = points[:, 1]
        v = points[:, 2]
        out1, out2 = [], []
        if sel.any():
            b, a = self.caps(u[sel], v[sel])
            out1.append(b)
            out2.append(a)
        if (~sel).any():
            c, d = self.pieces(2 * np.pi * v[~sel], u[~sel])
            out1.append(c)
            out2.append(d)
        return self.rotate(np.vstack(out1)), self.rotate(np.vstack(out2))

    def sample(self, n, rng):
        pts = rng.uniform(size=(n, 3))
        p, q = self.sample_pairs(n, pts)
        take = rng.integers(0, 2, n).astype(bool)
        return np.where(take[:, None], p, q)

    def margin(self, x):
        return None


def example_s3_body(kappa, sigma, samples, seed=0):
    if not 0.0 < kappa < np.pi / 2:
        raise KappaOutOfRange("kappa must lie in (0, pi/2)")
    if not 0.0 < sigma <= np.pi / 2 - kappa + 1e-15:
        raise SigmaOutOfRange(f"sigma must lie in (0, pi/2 - kappa] = (0, {np.pi / 2 - kappa:.6f}]")
    rng = np.random.default_rng(seed)
    rot = random_rotation(rng, 3)
    model = ExampleS3Model(kappa, sigma, rot)
    model._areas = model.piece_areas()
    # boundary curves: circles A and B, the d-curve, plus the two poles of the caps
    n_curve = max(16, samples // 16)
    phi = 2 * np.pi * (np.arange(n_curve) + 0.5) / n_curve
    marks = model.landmarks(phi)
    curves = np.array([[a, b, d] for (_, a, b, d, _) in marks]).reshape(-1, 4)
    poles = np.array([model.caps(np.array([0.0]), np.array([0.0]))[i][0] for i in (0, 1)])
    fixed = model.rotate(np.vstack([curves, poles]))
    n_pairs = max(1, (samples - len(fixed)) // 2)
    h = qmc.Halton(3, scramble=True, seed=rng).random(n_pairs)
    p, q = model.sample_pairs(n_pairs, h)
    pts = np.vstack([fixed, p, q])
    return polytope_from_points(3, pts, constructor=spec("example_s3", 3, {
        "kappa": float(kappa), "sigma": float(sigma), "samples": samples}, seed), exact=model)


# ---------------------------------------------------------------- random / perturb

def random_body(d, n_points, spread, seed=0):
    if d < 2:
        raise DimensionTooSmall("need d >= 2")
    if n_points < d + 2:
        raise TooFewPoints(f"need at least d + 2 = {d + 2} points")
    if not 0.0 < spread < np.pi / 2:
        raise GeometryError("spread must lie in (0, pi/2)")
    rng = np.random.default_rng(seed)
    center = normalize(rng.standard_normal(d + 1))
    for _ in range(100):
        pts = cap_sample(rng, center, spread, n_points)
        try:
            return polytope_from_points(d, pts, constructor=spec("random", d, {
                "n_points": n_points, "spread": float(spread)}, seed))
        except NotFullDimensional:
            continue
    raise GeometryError("could not draw a full-dimensional random body")


def perturb(c, eps, seed=0):
    if not 0.0 <= eps < np.pi / 4:
        raise GeometryError("eps must lie in [0, pi/4)")
    rng = np.random.default_rng(seed)
    v = c.vertices
    z = rng.standard_normal(v.shape)
    z -= np.einsum("nd,nd->n", z, v)[:, None] * v
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    mag = eps * rng.uniform(0, 1, len(v)) ** (1.0 / max(1, c.dim))
    new = normalize_rows(np.cos(mag)[:, None] * v + np.sin(mag)[:, None] * z) if eps > 0 else v.copy()
    try:
        return PolytopeBody(c.dim, new, constructor=spec("perturb", c.dim, {
            "base": c.constructor, "eps": float(eps)}, seed))
    except GeometryError as exc:
        raise InvariantViolation(str(exc)) from exc


def build(spec_dict):
    """Rebuild a body from a constructor spec dictionary."""
    kind = spec_dict["kind"]
    p = spec_dict.get("params", {})
    seed = spec_dict.get("seed") or 0
    dim = spec_dict.get("dim")
    if kind == "ball":
        return ball_body(np.asarray(p["center"], dtype=float), p["rho"])
    if kind == "orthant":
        return orthant_body(dim)
    if kind == "reuleaux":
        return reuleaux_odd_gon(p["n"], p["w"], p["samples"], seed, p.get("extended", False))
    if kind == "example_s3":
        return example_s3_body(p["kappa"], p["sigma"], p["samples"], seed)
    if kind == "random":
        return random_body(dim, p["n_points"], p["spread"], seed)
    if kind == "perturb":
        return perturb(build(p["base"]), p["eps"], seed)
    if kind == "ball_intersection":
        from .harness.search import ball_intersection_body
        return ball_intersection_body(np.asarray(p["centers"]), p["w"], p["samples"], seed)
    raise GeometryError(f"unknown constructor kind {kind!r}")
