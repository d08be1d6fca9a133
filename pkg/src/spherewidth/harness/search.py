"""Evidence gathering for the open constant-diameter question below pi/2.

Candidates are intersections of balls of radius w centered at perturbed
odd-gon vertex sets on S^2 and S^3, realized as dense polytopes whose
vertices lie exactly on the analytic boundary.  Candidates passing the
constant-diameter checker are recorded with their constant-width spread;
nothing is asserted about the outcome.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import metrics
from ..bodies import halton_directions, polytope_from_points
from ..constructors import regular_polygon, reuleaux_circumradius
from ..sphere_core import (
    GeometryError,
    dist,
    normalize,
    normalize_rows,
    orthonormal_complement,
    random_rotation,
)


class WOutOfRange(GeometryError):
    pass


class BallIntersectionModel:
    """Exact boundary of the intersection of the balls B_w(centers[j])."""

    def __init__(self, centers, w):
        self.centers = np.asarray(centers, dtype=float)
        self.w = w
        self.origin = normalize(self.centers.sum(axis=0))
        if (self.centers @ self.origin).min() <= np.cos(w):
            raise GeometryError("ball intersection has no interior around the centroid")

    def ray_exit(self, u):
        """Boundary points along the geodesic rays from ``origin`` with tangents ``u``."""
        u = np.atleast_2d(u)
        a = self.centers @ self.origin                   # (k,)
        b = u @ self.centers.T                           # (n, k)
        r = np.hypot(a[None, :], b)
        t = np.arctan2(b, a[None, :]) + np.arccos(np.clip(np.cos(self.w) / r, -1, 1))
        t = t.min(axis=1)
        return normalize_rows(np.cos(t)[:, None] * self.origin + np.sin(t)[:, None] * u)

    def sample(self, n, rng):
        dim = self.centers.shape[1] - 1
        z = rng.standard_normal((n, dim + 1))
        z -= (z @ self.origin)[:, None] * self.origin
        return self.ray_exit(normalize_rows(z))

    def margin(self, x):
        return float(np.min(np.sin(self.w - dist(self.centers, np.asarray(x)))))

    def ridges(self, per_circle):
        """Boundary points where two ball boundaries meet (the corners of the body)."""
        c, cw = self.centers, np.cos(self.w)
        dim = c.shape[1] - 1
        out = []
        for i in range(len(c)):
            for j in range(i + 1, len(c)):
                z0 = cw * (c[i] + c[j]) / (1.0 + c[i] @ c[j])
                h2 = 1.0 - z0 @ z0
                if h2 <= 0:
                    continue
                basis = orthonormal_complement([c[i], c[j]], dim)
                if dim == 2:
                    dirs = np.vstack([basis, -basis])
                else:
                    t = 2 * np.pi * np.arange(per_circle) / per_circle
                    dirs = np.cos(t)[:, None] * basis[0] + np.sin(t)[:, None] * basis[1]
                pts = normalize_rows(z0 + np.sqrt(h2) * dirs)
                keep = (pts @ c.T).min(axis=1) >= cw - 1e-12
                out.append(pts[keep])
        return np.vstack(out) if out else np.empty((0, dim + 1))


def ball_intersection_body(centers, w, samples, seed=0):
    model = BallIntersectionModel(centers, w)
    dim = model.centers.shape[1] - 1
    pts = model.ray_exit(halton_directions(dim, samples, seed, model.origin))
    pts = np.vstack([model.ridges(max(8, int(np.sqrt(samples)))), pts])
    spec = {"kind": "ball_intersection", "dim": dim,
            "params": {"centers": model.centers.tolist(), "w": float(w), "samples": int(samples)},
            "seed": seed}
    return polytope_from_points(dim, pts, constructor=spec, exact=model)


def regular_simplex(w):
    """Four points of S^3 at pairwise distance w about the pole e_4."""
    t = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / np.sqrt(3)
    r = np.arcsin(np.sqrt(0.75 * (1 - np.cos(w))))
    return np.hstack([np.sin(r) * t, np.full((4, 1), np.cos(r))])


def perturbed_odd_gon(rng, w):
    """Centers of a candidate: a regular odd-gon on S^2 (opposite distance w)
    or a regular simplex on S^3 (pairwise distance w), jittered."""
    dim = int(rng.choice([2, 3]))
    eps = 0.0 if rng.uniform() < 0.2 else float(10 ** rng.uniform(-4, -1))
    if dim == 2:
        n = int(rng.choice([3, 5, 7]))
        v = regular_polygon(n, reuleaux_circumradius(n, w))
    else:
        n = 4
        v = regular_simplex(w)
    z = rng.standard_normal(v.shape)
    z -= np.einsum("nd,nd->n", z, v)[:, None] * v
    v = normalize_rows(v + eps * z / np.linalg.norm(z, axis=1, keepdims=True))
    v = v @ random_rotation(rng, dim).T
    return dim, n, eps, v


FAMILIES = {"perturbed_odd_gon": perturbed_odd_gon}


@dataclass
class SearchRecord:
    candidate: dict
    diam_report: dict
    width_report: dict
    gap: float
    trial: int

    def to_dict(self):
        return {"trial": self.trial, "gap": self.gap, "candidate": self.candidate,
                "diam_report": self.diam_report, "width_report": self.width_report}


def search_gap(w, trials, seed=0, out=None, family="perturbed_odd_gon", tol=metrics.CHECK_TOL,
               samples=(400, 1500), n_check=(200, 100)):
    """Constant-diameter candidates with their constant-width spread, largest gap first."""
    if not 0.0 < w < np.pi / 2:
        raise WOutOfRange(
            "w must lie in (0, pi/2): for w >= pi/2 constant diameter already implies constant width")
    make = FAMILIES[family]
    records = []
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        dim, n, eps, centers = make(rng, w)
        try:
            body = ball_intersection_body(centers, w, samples[dim - 2], seed=int(rng.integers(2**31)))
        except GeometryError:
            continue
        cd = metrics.check_constant_diameter(body, n=n_check[1], tol=tol, seed=i)
        if not cd.passed:
            continue
        cw = metrics.check_constant_width(body, n=n_check[0], tol=tol, seed=i)
        cand = dict(body.constructor)
        cand["params"] = dict(cand["params"], n=n, eps=eps)
        records.append(SearchRecord(cand, cd.to_dict(), cw.to_dict(), float(cw.spread), i))
    records.sort(key=lambda r: (-r.gap, r.trial))
    if out is not None:
        Path(out).write_text(json.dumps([r.to_dict() for r in records], sort_keys=True, indent=1) + "\n")
    return records
