"""Face structure of a salient polyhedral cone, for exact optimization.

A spherical polytope conv(G) is the unit-sphere trace of the cone generated
by the rows of G.  Its boundary is triangulated through the gnomonic
projection about an interior direction ``center`` (qhull in R^d), and every
simplex of that triangulation (vertices, edges, triangles, ...) is kept
together with an orthonormal basis of its linear span.  Minimizing a linear
functional <k, x> over conv(G) then reduces to comparing the closed-form
critical point of each simplex: on the great subsphere spanned by a simplex
the minimum of <k, .> is ``-P k / |P k|``, which counts only when it falls
inside the simplex.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy.spatial import ConvexHull, cKDTree

from .sphere_core import GeometryError, orthonormal_complement

BARY_TOL = 1e-11


def dedup_rows(points, tol):
    """Drop rows closer than ``tol`` (chordal) to an earlier row; order kept."""
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        return points.copy(), np.arange(len(points))
    tree = cKDTree(points)
    pairs = tree.query_pairs(tol, output_type="ndarray")
    drop = np.zeros(len(points), dtype=bool)
    if len(pairs):
        pairs = np.sort(pairs, axis=1)
        pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
        for i, j in pairs:
            if not drop[i]:
                drop[j] = True
    keep = np.flatnonzero(~drop)
    return points[keep], keep


class _Faces:
    """All simplices of one size ``r`` with precomputed span geometry."""

    def __init__(self, gens, idx):
        self.idx = idx
        self.r = idx.shape[1]
        g = gens[idx]                                   # (n, r, D)
        q, _ = np.linalg.qr(np.swapaxes(g, 1, 2))      # (n, D, r)
        self.q = q
        # barycentric coordinates: lam = inv(G G^T) G x; for x = q c this is a c
        gram = g @ np.swapaxes(g, 1, 2)
        self.a = np.linalg.solve(gram, g @ q)           # (n, r, r)
        self.gens = g
        centers = g.sum(axis=1)
        centers /= np.linalg.norm(centers, axis=1, keepdims=True)
        self.centers = centers
        cosr = np.einsum("nrd,nd->nr", g, centers).min(axis=1)
        self.radii = np.arccos(np.clip(cosr, -1.0, 1.0))

    def critical(self, k):
        """Per-simplex minimizer of <k, .> on its span; returns (values, points, feasible)."""
        c = np.einsum("ndr,d->nr", self.q, k)
        norm = np.linalg.norm(c, axis=1)
        ok = norm > 1e-14
        safe = np.where(ok, norm, 1.0)
        lam = -np.einsum("nij,nj->ni", self.a, c) / safe[:, None]
        feas = ok & (lam.min(axis=1) >= -BARY_TOL * np.abs(lam).max(axis=1))
        pts = -np.einsum("ndr,nr->nd", self.q, c) / safe[:, None]
        return -norm, pts, feas

    def contains_pts(self, idx, pts):
        lam = np.einsum("nij,nj->ni", self.a[idx], np.einsum("ndr,nd->nr", self.q[idx], pts))
        return lam.min(axis=1) >= -BARY_TOL * np.abs(lam).max(axis=1)


class ConeComplex:
    """Triangulated boundary of the spherical polytope conv(gens).

    Parameters
    ----------
    gens : (n, d+1) array of unit vectors spanning R^{d+1}.
    center : unit vector with ``<center, g> > 0`` for every generator.
    """

    def __init__(self, gens, center):
        gens = np.asarray(gens, dtype=float)
        self.dim = gens.shape[1] - 1
        self.center = np.asarray(center, dtype=float)
        heights = gens @ self.center
        if heights.min() <= 0:
            raise GeometryError("generators are not inside the open hemisphere of center")
        basis = orthonormal_complement([self.center], self.dim)   # (d, D)
        y = (gens @ basis.T) / heights[:, None]
        try:
            hull = ConvexHull(y)
        except Exception as exc:   # qhull raises QhullError on flat input
            raise GeometryError(f"hull is not full-dimensional: {exc}") from exc
        self.hull = hull
        verts = np.array(sorted(hull.vertices))
        self.vertex_index = verts
        self.gens = gens
        simplices = np.sort(hull.simplices, axis=1)
        # inward cone normals of the facets: a.y + b <= 0 inside
        a, b = hull.equations[:, :-1], hull.equations[:, -1]
        normals = -(a @ basis + b[:, None] * self.center[None, :])
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        self.facet_normals = normals
        self.facets = simplices
        self.faces = {1: _Faces(gens, verts[:, None])}
        for r in range(2, self.dim + 1):
            subs = set()
            for s in simplices:
                subs.update(combinations(s, r))
            idx = np.array(sorted(subs), dtype=int)
            self.faces[r] = _Faces(gens, idx)

    @property
    def vertices(self):
        return self.gens[self.vertex_index]

    def unique_facet_normals(self, tol=1e-10):
        n, _ = dedup_rows(self.facet_normals, tol)
        return n

    def min_linear(self, k, tie=1e-12):
        """Minimum of <k, x> over conv(gens) on the sphere.

        Returns ``(value, points)`` where ``points`` holds every minimizer
        found within ``tie`` of the optimum (one per simplex).
        """
        k = np.asarray(k, dtype=float)
        vals, pts = [], []
        f1 = self.faces[1]
        vals.append(f1.gens[:, 0] @ k)
        pts.append(f1.gens[:, 0])
        for r in range(2, self.dim + 1):
            v, p, ok = self.faces[r].critical(k)
            vals.append(v[ok])
            pts.append(p[ok])
        vals = np.concatenate(vals)
        pts = np.concatenate(pts)
        best = vals.min()
        sel = vals <= best + tie
        return float(best), pts[sel]

    def diameter(self, lower=0.0, chunk=1 << 18):
        """Exact max spherical distance over conv(gens).

        Above pi/2 the maximum may sit inside faces, so every pair of
        simplices is a candidate.  For unit generators f_i of F and g_j of G
        with caps of radius r_F, r_G, any x in F and y in G satisfy
        ``<x, y> >= min <f_i, g_j> / (cos r_F cos r_G)`` when that minimum is
        negative, so only face pairs containing a nearly diametral vertex
        pair need the exact critical-pair computation.
        """
        verts = self.vertices
        vidx = self.vertex_index
        best_dot, pair = np.inf, None
        for i0 in range(0, len(verts), 2048):
            g = verts[i0:i0 + 2048] @ verts.T
            j = np.unravel_index(np.argmin(g), g.shape)
            if g[j] < best_dot:
                best_dot = g[j]
                pair = (verts[i0 + j[0]], verts[j[1]])
        best_dot = min(best_dot, np.cos(max(lower, 0.0)))
        if best_dot >= 0:
            # the farthest point from any point is a vertex
            return float(np.arccos(np.clip(best_dot, -1.0, 1.0))), pair[0], pair[1]
        groups = [self.faces[r] for r in range(1, self.dim + 1)]
        # global face ids and vertex -> incident faces
        pos = np.full(len(self.gens), -1)
        pos[vidx] = np.arange(len(vidx))
        owner, local, inc_v, inc_f = [], [], [], []
        off = 0
        for r, f in enumerate(groups):
            n = len(f.idx)
            owner.append(np.full(n, r))
            local.append(np.arange(n))
            inc_v.append(pos[f.idx].ravel())
            inc_f.append(np.repeat(np.arange(off, off + n), f.r))
            off += n
        owner, local = np.concatenate(owner), np.concatenate(local)
        inc_v, inc_f = np.concatenate(inc_v), np.concatenate(inc_f)
        rad = np.concatenate([f.radii for f in groups])
        order = np.argsort(inc_v, kind="stable")
        inc_v, inc_f = inc_v[order], inc_f[order]
        start = np.searchsorted(inc_v, np.arange(len(vidx) + 1))
        cos_r = np.cos(rad)
        vcos = np.minimum.reduceat(cos_r[inc_f], start[:-1])     # worst incident cap
        # candidate vertex pairs: <u, v> < best_dot * cos R_u * cos R_v
        tree = cKDTree(verts)
        thr = best_dot * vcos * vcos.min()
        cand = tree.query_ball_point(-verts, np.sqrt(np.maximum(2 + 2 * thr, 0)) + 1e-12)
        ui = np.repeat(np.arange(len(verts)), [len(c) for c in cand])
        vi = np.concatenate([np.asarray(c, dtype=int) for c in cand])
        dots = np.einsum("nd,nd->n", verts[ui], verts[vi])
        keep = dots < best_dot * vcos[ui] * vcos[vi]
        ui, vi = ui[keep], vi[keep]
        # expand to face pairs
        nu, nv = np.diff(start)[ui], np.diff(start)[vi]
        rep = nu * nv
        pu = np.repeat(np.arange(len(ui)), rep)
        k = np.arange(rep.sum()) - np.repeat(np.cumsum(rep) - rep, rep)
        fa = inc_f[start[ui[pu]] + k // nv[pu]]
        fb = inc_f[start[vi[pu]] + k % nv[pu]]
        lo, hi = np.minimum(fa, fb), np.maximum(fa, fb)
        code = np.unique(lo.astype(np.int64) * off + hi)
        fa, fb = code // off, code % off
        for s0 in range(0, len(fa), chunk):
            a, b = fa[s0:s0 + chunk], fb[s0:s0 + chunk]
            bound = _min_vertex_dot(groups, owner, local, a, b)
            keep = bound < best_dot * cos_r[a] * cos_r[b] + 1e-15
            a, b = a[keep], b[keep]
            for ri in range(len(groups)):
                for rj in range(len(groups)):
                    m = (owner[a] == ri) & (owner[b] == rj)
                    if not m.any():
                        continue
                    val, p, q = _pair_critical(groups[ri], local[a[m]], groups[rj], local[b[m]])
                    if val.size and val.min() < best_dot:
                        t = int(np.argmin(val))
                        best_dot = val[t]
                        pair = (p[t], q[t])
        return float(np.arccos(np.clip(best_dot, -1.0, 1.0))), pair[0], pair[1]


def _min_vertex_dot(groups, owner, local, a, b):
    out = np.empty(len(a))
    for ri, fi in enumerate(groups):
        for rj, fj in enumerate(groups):
            m = (owner[a] == ri) & (owner[b] == rj)
            if m.any():
                ga, gb = fi.gens[local[a[m]]], fj.gens[local[b[m]]]
                out[m] = np.einsum("nid,njd->nij", ga, gb).min(axis=(1, 2))
    return out


def _pair_critical(fi, li, fj, lj, chunk=200000):
    vals, ps, qs = [], [], []
    for s in range(0, len(li), chunk):
        a, b = li[s:s + chunk], lj[s:s + chunk]
        qa, qb = fi.q[a], fj.q[b]
        m = np.swapaxes(qa, 1, 2) @ qb
        u, sv, vt = np.linalg.svd(m)
        p = np.einsum("ndr,nr->nd", qa, u[:, :, 0])
        q = -np.einsum("ndr,nr->nd", qb, vt[:, 0, :])
        for sign in (1.0, -1.0):
            pp, qq = sign * p, sign * q
            ok = fi.contains_pts(a, pp) & fj.contains_pts(b, qq)
            if ok.any():
                vals.append(-sv[ok, 0])
                ps.append(pp[ok])
                qs.append(qq[ok])
    if not vals:
        return np.empty(0), None, None
    return np.concatenate(vals), np.concatenate(ps), np.concatenate(qs)
