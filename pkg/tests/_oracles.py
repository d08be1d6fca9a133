"""Independent reference computations used by the tests.

None of these share code paths with the package's exact algorithms: they
enumerate vertex subsets combinatorially, sample densely, or use closed
forms.
"""
from itertools import combinations

import numpy as np


def null_directions(rows):
    """Unit vectors orthogonal to every row (both signs), via SVD."""
    rows = np.atleast_2d(rows)
    _, s, vt = np.linalg.svd(rows)
    rank = int((s > 1e-12 * max(1.0, s[0])).sum())
    if vt.shape[0] - rank != 1:
        return np.empty((0, rows.shape[1]))
    v = vt[-1]
    return np.array([v, -v])


def dual_vertices(vertices, tol=1e-12):
    """Vertices of {m : V m >= 0} on the sphere, by brute force over d-subsets."""
    vertices = np.asarray(vertices, dtype=float)
    D = vertices.shape[1]
    out = []
    for sub in combinations(range(len(vertices)), D - 1):
        for m in null_directions(vertices[list(sub)]):
            if (vertices @ m).min() >= -tol:
                out.append(m)
    return np.array(out)


def projected_candidates(vertices, k, tol=1e-12):
    """Minimizers of <k, m> on every great subsphere {m : <m, v> = 0, v in S}
    for subsets S of size 1 .. d-1, kept when feasible for the dual cone."""
    vertices = np.asarray(vertices, dtype=float)
    D = vertices.shape[1]
    out = []
    for size in range(1, D - 1):
        for sub in combinations(range(len(vertices)), size):
            a = vertices[list(sub)]
            q, _ = np.linalg.qr(a.T)
            pk = k - q @ (q.T @ k)
            n = np.linalg.norm(pk)
            if n < 1e-14:
                continue
            m = -pk / n
            if (vertices @ m).min() >= -tol:
                out.append(m)
    return np.array(out).reshape(-1, D)


def width_bruteforce(vertices, k, n_samples, rng):
    """Width at H(k) of conv(vertices): pi - arccos(min <k, m>) over the dual region.

    Candidates: every dual vertex, the closed-form critical point of every
    face-spanning great subsphere, ``n_samples`` feasible points on arcs
    between dual vertices and in random combinations of them.
    Returns ``(width, width_from_samples_only)``.
    """
    dv = dual_vertices(vertices)
    pc = projected_candidates(vertices, k)
    n_arc = n_samples // 2
    i = rng.integers(len(dv), size=n_arc)
    j = rng.integers(len(dv), size=n_arc)
    t = rng.uniform(size=(n_arc, 1))
    arcs = (1 - t) * dv[i] + t * dv[j]
    w = rng.dirichlet(np.full(len(dv), 0.3), size=n_samples - n_arc)
    mix = w @ dv
    samples = np.vstack([arcs, mix])
    norms = np.linalg.norm(samples, axis=1)
    samples = samples[norms > 1e-9] / norms[norms > 1e-9, None]
    samp_min = (samples @ k).min()
    best = min(samp_min, (dv @ k).min(), (pc @ k).min() if len(pc) else np.inf)
    to_width = lambda v: np.pi - np.arccos(np.clip(v, -1, 1))
    return to_width(best), to_width(samp_min)


def reuleaux_circumradius(n, w):
    """Closed form of the regular n-gon circumradius with offset-(n-1)/2 distance w."""
    s = (n - 1) // 2
    return np.arcsin(np.sqrt((1 - np.cos(w)) / (1 - np.cos(2 * np.pi * s / n))))


def farthest_on_polytope_sampled(vertices, p, n, rng):
    """Max distance from p over dense random points of conv(vertices)."""
    w = rng.dirichlet(np.full(len(vertices), 0.2), size=n)
    x = w @ vertices
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    x = np.vstack([x, vertices])
    return float(np.arccos(np.clip(x @ p, -1, 1)).max())


def diameter_sampled(vertices, n, rng):
    """Lower bound on the diameter from dense random pairs on edges and faces."""
    v = np.asarray(vertices, dtype=float)
    a = rng.dirichlet(np.full(len(v), 0.15), size=n) @ v
    b = rng.dirichlet(np.full(len(v), 0.15), size=n) @ v
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    pts = np.vstack([a, b, v])
    best = -1.0
    for s in range(0, len(pts), 2000):
        best = max(best, float(np.arccos(np.clip(pts[s:s + 2000] @ pts.T, -1, 1)).max()))
    return best
