"""Seeded property suites, one per geometric invariant.

Every trial ``i`` of a run with seed ``s`` draws from
``np.random.default_rng([s, i])``, so trials are independent of execution
order and any failure record can be replayed on its own.
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .. import metrics
from ..bodies import (
    BallBody,
    caratheodory,
    cone_residual,
    contains,
    extreme_points,
    interior_margin,
    sample_boundary,
    sample_in_body,
    separate,
    support_margin,
    supporting_center,
)
from ..constructors import build, random_body
from ..sphere_core import (
    GeometryError,
    along,
    cap_sample,
    dist,
    exp_map,
    geodesic_point,
    lune_contains,
    make_lune,
    normalize,
    normalize_rows,
    orthonormal_complement,
    random_points,
    random_tangents,
)

HALF_PI = np.pi / 2

# body tolerance by constructor kind: exact bodies vs sampled ones
KIND_TOL = {"ball": 1e-9, "orthant": 1e-9, "reuleaux": 1e-3, "example_s3": 5e-2}


class UnknownSuite(ValueError):
    pass


@dataclass
class SuiteResult:
    suite: str
    trials: int
    passes: int
    failures: list = field(default_factory=list)
    wall_time: float = 0.0
    seed: int = 0
    tol: float = 0.0

    def to_dict(self, meta=True):
        out = asdict(self)
        if not meta:
            out.pop("wall_time")
        return out


# ---------------------------------------------------------------- constant-width set

def _e(dim, i):
    v = np.zeros(dim + 1)
    v[i] = 1.0
    return v.tolist()


CONSTANT_WIDTH_SET = (
    ({"kind": "ball", "dim": 2, "params": {"center": _e(2, 0), "rho": 0.5}, "seed": 0}, 1.0),
    ({"kind": "ball", "dim": 3, "params": {"center": _e(3, 0), "rho": 0.5}, "seed": 0}, 1.0),
    ({"kind": "orthant", "dim": 2, "params": {}, "seed": 0}, HALF_PI),
    ({"kind": "orthant", "dim": 3, "params": {}, "seed": 0}, HALF_PI),
    ({"kind": "reuleaux", "dim": 2, "params": {"n": 3, "w": 1.0, "samples": 2000}, "seed": 0}, 1.0),
    ({"kind": "reuleaux", "dim": 2, "params": {"n": 3, "w": 0.8, "samples": 2000}, "seed": 0}, 0.8),
    ({"kind": "reuleaux", "dim": 2, "params": {"n": 5, "w": 1.0, "samples": 2000}, "seed": 0}, 1.0),
    ({"kind": "reuleaux", "dim": 2, "params": {"n": 5, "w": 0.8, "samples": 2000}, "seed": 0}, 0.8),
    ({"kind": "example_s3", "dim": 3, "params": {"kappa": 1.0, "sigma": 0.35, "samples": 5000},
      "seed": 0}, 1.7),
)

CHECK_DIRECTIONS = 500
CHECK_POINTS = 200


def _key(spec):
    import json
    return json.dumps(spec, sort_keys=True)


@lru_cache(maxsize=None)
def _cached(key):
    import json
    return build(json.loads(key))


def cached_body(spec):
    """Constructor output, built once per process (bodies are immutable)."""
    return _cached(_key(spec))


def kind_tol(spec, tol):
    return max(tol, KIND_TOL.get(spec["kind"], 0.0))


# ---------------------------------------------------------------- trials
# each returns (ok, residual, inputs)

def _random_polytope(rng, dims=(2, 3), spread=(0.3, 1.3), n=(6, 30)):
    d = int(rng.choice(dims))
    spec = {"kind": "random", "dim": d,
            "params": {"n_points": int(rng.integers(n[0], n[1] + 1)),
                       "spread": float(rng.uniform(*spread))},
            "seed": int(rng.integers(2**31))}
    return spec, build(spec)


def trial_lemma1(rng, tol):
    """conv(V) equals the intersection of the hemispheres containing V."""
    spec, c = _random_polytope(rng)
    inside = sample_in_body(c, 50, rng)
    near = cap_sample(rng, c.hemisphere_center, 1.5, 50)
    worst = 0.0
    for x in np.vstack([inside, near]):
        min_facet = float((c.facet_normals @ x).min())
        if contains(c, x, tol):
            # no hemisphere containing c may exclude x
            worst = max(worst, -min_facet)
        else:
            m = separate(c, x, tol).center
            worst = max(worst, -support_margin(c, m), float(m @ x) + tol if m @ x >= 0 else 0.0,
                        max(0.0, min_facet - tol) if min_facet > tol else 0.0)
    return worst <= tol, worst, {"body": spec}


def trial_lemma2(rng, tol):
    """A hemisphere supporting at a relative-interior point of T contains T in its boundary."""
    spec, c = _random_polytope(rng)
    r = int(rng.integers(1, c.dim + 1))
    faces = c.complex.faces[r]
    j = int(rng.integers(len(faces.idx)))
    t = faces.gens[j]
    p = normalize(rng.dirichlet(np.ones(r)) @ t)
    m = supporting_center(c, p)
    res = max(float(np.abs(t @ m).max()), -support_margin(c, m))
    return res <= tol, res, {"body": spec, "face_size": r, "face": j}


def random_lune(rng, dim, thickness=None):
    g = random_points(rng, 1, dim)[0]
    th = rng.uniform(0.05, np.pi - 0.05) if thickness is None else thickness
    h = exp_map(g, random_tangents(rng, g), np.pi - th)
    return make_lune(g, h)


def trial_lemma3(rng, tol):
    """Lune points at distance pi/2 from the center of M/K are corners (thickness < pi/2)."""
    dim = int(rng.integers(2, 5))
    lune = random_lune(rng, dim, thickness=rng.uniform(0.05, HALF_PI - 1e-3))
    b = lune.c_hg
    corners = lune.sample_corners(32, rng)
    eps = 10.0 ** rng.uniform(-12, 0, len(corners))
    worst, hits = 0.0, 0
    for r, e in zip(corners, eps):
        basis = orthonormal_complement([r, b], dim)
        u = rng.standard_normal(len(basis)) @ basis
        x = normalize(r + e * u / np.linalg.norm(u))
        x = normalize(x - (x @ b) * b)
        if lune_contains(lune, x, 1e-9):
            hits += 1
            worst = max(worst, abs(x @ lune.g.center), abs(x @ lune.h.center))
    return worst <= tol, worst, {"dim": dim, "hits": hits}


def lemma4_instance(rng, dim=None, max_tries=200):
    """(o, mu, x1, x2, x, m, x') with |x1' m|, |x2' m| <= pi/2 - mu.

    x1, x2 lie on the great sphere at distance pi/2 from o with
    |x1 x2| < pi - mu; x is a point of the arc x1 x2 and primes denote the
    point at distance mu from the unprimed point toward o.
    """
    dim = int(rng.integers(2, 5)) if dim is None else dim
    for _ in range(max_tries):
        o = random_points(rng, 1, dim)[0]
        mu = rng.uniform(0.01, HALF_PI - 0.01)
        x1 = exp_map(o, random_tangents(rng, o), HALF_PI)
        # x2 on the same great sphere, at a distance below pi - mu
        basis = orthonormal_complement([o, x1], dim)
        u = normalize(rng.standard_normal(len(basis)) @ basis)
        x2 = exp_map(x1, u, rng.uniform(0.0, np.pi - mu))
        x = geodesic_point(x1, x2, rng.uniform())
        x1p, x2p, xp = (np.cos(mu) * y + np.sin(mu) * o for y in (x1, x2, x))
        lim = HALF_PI - mu
        if x1p @ x2p < np.cos(2 * lim):
            continue
        if rng.uniform() < 0.5:
            cand = cap_sample(rng, x1p, lim, 64)
        else:
            # bias toward the boundary of the admissible lens
            t = rng.uniform(size=(64, 1))
            mids = normalize_rows((1 - t) * x1p + t * x2p)
            z = rng.standard_normal((64, dim + 1))
            z -= np.einsum("nd,nd->n", z, mids)[:, None] * mids
            z = normalize_rows(z)
            r = rng.uniform(0, lim, (64, 1))
            cand = np.cos(r) * mids + np.sin(r) * z
        ok = (cand @ x1p >= np.cos(lim)) & (cand @ x2p >= np.cos(lim))
        if ok.any():
            m = cand[int(np.argmax(ok))]
            return o, mu, x1, x2, x, m, xp
    raise GeometryError("no admissible instance found")


def trial_lemma4(rng, tol):
    o, mu, x1, x2, x, m, xp = lemma4_instance(rng)
    res = float(dist(xp, m) - (HALF_PI - mu))
    return res <= tol, max(res, 0.0), {"mu": mu}


def trial_lemma5(rng, tol):
    spec, c = _random_polytope(rng)
    x = sample_in_body(c, 1, rng)[0]
    s = caratheodory(c, x, tol)
    ext = extreme_points(c)
    _, r = cone_residual(s, x)
    res = float(np.linalg.norm(r))
    far = float(max(np.min(np.linalg.norm(ext - e, axis=1)) for e in s))
    ok = len(s) <= c.dim + 1 and res <= tol and far <= tol
    return ok, max(res, far), {"body": spec, "size": len(s)}


def trial_lemma7(rng, tol):
    """Hemisphere orthogonal to a diameter at its end supports, and the width there is
    at least pi/2; strictly above when its center lies in the interior of the body."""
    for _ in range(20):
        spec, c = _random_polytope(rng, spread=(0.95, 1.45), n=(8, 40))
        delta, p, q = metrics.diameter(c)
        if delta > HALF_PI:
            break
    else:
        raise GeometryError("no body with diameter above pi/2 drawn")
    k = metrics.orthogonal_diameter_support(c, p, q).center
    margin = support_margin(c, k)
    w = metrics.width_at(c, k, support_tol=max(tol, 1e-9)).value
    # the center k lies on the arc pq; if that arc runs in the boundary the
    # width is exactly pi/2
    k_inside = interior_margin(c, k)
    strict = k_inside > max(tol, 1e-12)
    ok = margin >= -tol and (w > HALF_PI if strict else w >= HALF_PI - tol)
    res = max(-margin, (HALF_PI - w) if strict else (HALF_PI - tol - w), 0.0)
    return ok, res, {"body": spec, "diameter": delta, "width": w, "center_margin": k_inside}


def _touching_body(rng):
    if rng.uniform() < 0.5:
        spec = CONSTANT_WIDTH_SET[-1][0]
        return spec, cached_body(spec), 1.7
    d = int(rng.integers(2, 5))
    rho = float(rng.uniform(np.pi / 4 + 0.05, HALF_PI - 0.05))
    center = random_points(rng, 1, d)[0]
    spec = {"kind": "ball", "dim": d, "params": {"center": center.tolist(), "rho": rho}, "seed": 0}
    return spec, build(spec), 2 * rho


def trial_touching_ball(rng, tol):
    """Ball of radius w - pi/2 touching a constant-width body from inside."""
    spec, c, w = _touching_body(rng)
    if isinstance(c, BallBody):
        p = c.sample(1, rng)[0]
    else:
        p = c.vertices[int(rng.integers(len(c.vertices)))]
    center, radius = metrics.inscribed_ball_at(c, p, w, tol=metrics.BOUNDARY_TOL)
    contain = metrics.ball_containment_margin(c, center, radius, 1000, int(rng.integers(2**31)))
    derr = abs(float(dist(p, center)) - (w - HALF_PI))
    ok = contain >= -kind_tol(spec, tol) and derr <= 1e-9
    return ok, max(-contain, derr, 0.0), {"body": spec, "p": p.tolist()}


def trial_strict_convexity(rng, tol):
    """Balls and Reuleaux odd-gons (w < pi/2) are strictly convex; the orthant is not."""
    u = rng.uniform()
    if u < 0.2:
        d = int(rng.integers(2, 4))
        spec = {"kind": "orthant", "dim": d, "params": {}, "seed": 0}
        expect = False
    elif u < 0.6:
        d = int(rng.integers(2, 5))
        spec = {"kind": "ball", "dim": d, "params": {"center": random_points(rng, 1, d)[0].tolist(),
                                                     "rho": float(rng.uniform(0.1, 1.4))}, "seed": 0}
        expect = True
    else:
        spec = {"kind": "reuleaux", "dim": 2, "params": {"n": int(rng.choice([3, 5, 7])),
                                                         "w": float(rng.uniform(0.3, 1.5)),
                                                         "samples": 200},
                "seed": int(rng.integers(2**31))}
        expect = True
    c = build(spec)
    rep = metrics.check_strict_convexity(c, trials=1000, tol=1e-12, seed=int(rng.integers(2**31)))
    return rep.passed == expect, rep.min_margin, {"body": spec, "expect": expect}


def trial_center_lune(rng, tol):
    """Each boundary point is the center of a bounding half of a lune of thickness w."""
    spec, w = CONSTANT_WIDTH_SET[int(rng.integers(len(CONSTANT_WIDTH_SET)))]
    c = cached_body(spec)
    t = kind_tol(spec, tol)
    p = (c.sample(1, rng)[0] if isinstance(c, BallBody)
         else c.vertices[int(rng.integers(len(c.vertices)))])
    try:
        lune = metrics.width_lune_at(c, p, w, tol=metrics.BOUNDARY_TOL, width_tol=t, center_tol=t)
    except metrics.CenterConditionFailed as exc:
        return False, np.inf, {"body": spec, "p": p.tolist(), "error": str(exc)}
    res = max(abs(lune.thickness - w), float(dist(p, lune.c_gh)),
              -support_margin(c, lune.g.center), -support_margin(c, lune.h.center))
    return res <= t, res, {"body": spec, "p": p.tolist()}


def trial_diam_eq_width(rng, tol, index=None):
    spec, w = CONSTANT_WIDTH_SET[index if index is not None else int(rng.integers(len(CONSTANT_WIDTH_SET)))]
    delta = metrics.diameter(cached_body(spec))[0]
    res = abs(delta - w)
    return res <= kind_tol(spec, tol), res, {"body": spec, "w": w, "diameter": delta}


def trial_width_diam_equivalence(rng, tol, index=None):
    """Constant width => constant diameter; constant diameter >= pi/2 => constant width."""
    spec, w = CONSTANT_WIDTH_SET[index if index is not None else int(rng.integers(len(CONSTANT_WIDTH_SET)))]
    c = cached_body(spec)
    t = kind_tol(spec, tol)
    seed = int(rng.integers(2**31))
    cw = metrics.check_constant_width(c, n=CHECK_DIRECTIONS, tol=t, seed=seed)
    cd = metrics.check_constant_diameter(c, n=CHECK_POINTS, tol=t, seed=seed)
    same_w = abs(cw.value - cd.value) <= t
    ok = (not cw.passed or (cd.passed and same_w))
    if cd.passed and cd.value >= HALF_PI - t and spec["kind"] in ("orthant", "example_s3"):
        ok = ok and cw.passed
    return ok, max(cw.spread, cd.spread), {"body": spec, "w": w, "width_passed": cw.passed,
                                          "diameter_passed": cd.passed}


def trial_minimal_lune_centers(rng, tol):
    """Centers of narrowest lunes lie on the boundary when the width exceeds pi/2."""
    spec, c, w = _touching_body(rng)
    t = kind_tol(spec, tol)
    k = c._dual.sample_boundary(1, int(rng.integers(2**31)))[0]
    rep = metrics.width_at(c, k, support_tol=1e-8)
    lune = rep.lune
    res = max(abs(interior_margin(c, lune.c_gh)), abs(interior_margin(c, lune.c_hg)))
    return res <= t, res, {"body": spec, "k": k.tolist()}


SUITES = {
    "lemma1": (trial_lemma1, 1e-9),
    "lemma2": (trial_lemma2, 1e-9),
    "lemma3": (trial_lemma3, 1e-6),
    "lemma4": (trial_lemma4, 1e-9),
    "lemma5": (trial_lemma5, 1e-9),
    "lemma7": (trial_lemma7, 1e-9),
    "thm-touching-ball": (trial_touching_ball, 1e-9),
    "thm-strict-convexity": (trial_strict_convexity, 1e-12),
    "thm-center-lune": (trial_center_lune, 1e-6),
    "thm-diam-eq-width": (trial_diam_eq_width, 1e-9),
    "thm-width-diam-equivalence": (trial_width_diam_equivalence, 1e-3),
    "minimal-lune-centers": (trial_minimal_lune_centers, 1e-6),
}


def _threads():
    raw = os.environ.get("SPHEREWIDTH_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        n = 1
    return max(1, n)


def run_trial(name, seed, i, tol=None):
    """Run trial ``i`` of suite ``name``; returns (ok, residual, inputs)."""
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    fn, default = SUITES[name]
    tol = default if tol is None else tol
    rng = np.random.default_rng([seed, i])
    try:
        ok, res, inputs = fn(rng, tol)
    except (GeometryError, ArithmeticError) as exc:
        ok, res, inputs = False, np.inf, {"error": f"{type(exc).__name__}: {exc}"}
    return bool(ok), float(res), inputs


def run_suite(name, trials, seed=0, tol=None):
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    tol = SUITES[name][1] if tol is None else tol
    t0 = time.perf_counter()
    threads = _threads()
    if threads == 1:
        results = [run_trial(name, seed, i, tol) for i in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda i: run_trial(name, seed, i, tol), range(trials)))
    failures = [{"trial": i, "seed": [seed, i], "tol": tol, "residual": res, "inputs": inputs}
                for i, (ok, res, inputs) in enumerate(results) if not ok]
    return SuiteResult(name, trials, trials - len(failures), failures,
                       time.perf_counter() - t0, seed, tol)


def replay(name, failure):
    """Re-run a failure record; returns its residual."""
    seed, i = failure["seed"]
    return run_trial(name, seed, i, failure["tol"])[1]
