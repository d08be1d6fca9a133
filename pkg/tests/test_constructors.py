import numpy as np
import pytest

from spherewidth.bodies import BallBody, PolytopeBody, interior_margin
from spherewidth.constructors import (
    DimensionTooSmall,
    EvenN,
    KappaOutOfRange,
    RadiusOutOfRange,
    SigmaOutOfRange,
    TooFewPoints,
    WidthOutOfRange,
    ball_body,
    build,
    example_s3_body,
    orthant_body,
    perturb,
    random_body,
    reuleaux_circumradius,
    reuleaux_odd_gon,
)
from spherewidth.harness.io import body_from_dict, body_to_dict, dumps
from spherewidth.metrics import check_constant_width, diameter, thickness
from spherewidth.sphere_core import GeometryError, dist

from _oracles import reuleaux_circumradius as circumradius_closed_form

E = np.eye(3)


class TestBall:
    def test_thickness(self):
        assert thickness(ball_body(E[0], 0.5)).value == pytest.approx(1.0, abs=1e-12)

    def test_hemisphere_excluded(self):
        with pytest.raises(RadiusOutOfRange):
            ball_body(E[0], np.pi / 2)

    def test_sampler(self, rng):
        b = ball_body(E[0], 0.5)
        assert isinstance(b, BallBody)
        np.testing.assert_allclose(dist(b.sample(500, rng), E[0]), 0.5, atol=1e-12)


class TestOrthant:
    def test_d2(self):
        c = orthant_body(2)
        np.testing.assert_allclose(c.vertices, E)
        assert thickness(c).value == pytest.approx(np.pi / 2, abs=1e-12)

    def test_d3(self):
        c = orthant_body(3)
        assert len(c.vertices) == 4
        assert diameter(c)[0] == pytest.approx(np.pi / 2, abs=1e-12)

    def test_d1(self):
        with pytest.raises(DimensionTooSmall):
            orthant_body(1)


class TestReuleaux:
    @pytest.mark.parametrize("n, w", [(3, 1.0), (5, 0.8), (7, 1.3), (9, 0.3)])
    def test_opposite_vertex_distances(self, n, w):
        c = reuleaux_odd_gon(n, w, 200)
        v = c.exact.vertices
        s = (n - 1) // 2
        d = [dist(v[j], v[(j + s) % n]) for j in range(n)]
        np.testing.assert_allclose(d, w, atol=1e-10)

    @pytest.mark.parametrize("n, w", [(3, 1.0), (5, 0.8), (7, 1.3)])
    def test_circumradius_matches_closed_form(self, n, w):
        assert reuleaux_circumradius(n, w) == pytest.approx(circumradius_closed_form(n, w), abs=1e-12)

    def test_arc_points_at_distance_w(self):
        c = reuleaux_odd_gon(5, 0.8, 500)
        m = c.exact
        s = 2
        for j in range(5):
            pts = m.arc_points(j, np.linspace(0, 1, 50))
            np.testing.assert_allclose(dist(pts, m.vertices[j]), 0.8, atol=1e-10)
            assert all(dist(pts, m.vertices[(j + s) % 5]) <= 0.8 + 1e-10)

    def test_diameter(self):
        assert diameter(reuleaux_odd_gon(3, 1.0, 300))[0] == pytest.approx(1.0, abs=1e-6)

    def test_even_n(self):
        with pytest.raises(EvenN):
            reuleaux_odd_gon(4, 1.0, 100)

    def test_width_range(self):
        with pytest.raises(WidthOutOfRange):
            reuleaux_odd_gon(3, 1.7, 100)

    @pytest.mark.parametrize("n, w", [(3, 1.7), (5, 2.2)])
    def test_extended_range(self, n, w):
        c = reuleaux_odd_gon(n, w, 1000, extended=True)
        assert diameter(c)[0] == pytest.approx(w, abs=1e-6)
        assert check_constant_width(c, n=200).passed
        np.testing.assert_allclose([c.exact.margin(x) for x in c.vertices], 0.0, atol=1e-12)

    def test_sampled_points_on_model_boundary(self, rng):
        c = reuleaux_odd_gon(5, 0.8, 300)
        np.testing.assert_allclose([c.exact.margin(x) for x in c.vertices], 0.0, atol=1e-10)


@pytest.fixture(scope="module")
def example():
    return example_s3_body(1.0, 0.35, 1000)


class TestExample:
    def test_apex_distance(self, example):
        m = example.exact
        x = np.array([m.x_of(ph) for ph in np.linspace(0, 2 * np.pi, 40)])
        np.testing.assert_allclose(dist(x, m.y), 1.0, atol=1e-10)

    def test_landmark_distances(self, example):
        m = example.exact
        for x, a, b, d, dp in m.landmarks(np.linspace(0, 2 * np.pi, 25)):
            assert dist(a, b) == pytest.approx(1.7, abs=1e-10)
            assert dist(d, dp) == pytest.approx(1.7, abs=1e-10)
            assert dist(x, m.x_of(np.arctan2(x @ m.e[1], x @ m.e[0]) + np.pi)) == pytest.approx(1.0, abs=1e-10)

    def test_paired_samples_at_width(self, example):
        m = example.exact
        p, q = m.sample_pairs(300, np.random.default_rng(0).uniform(size=(300, 3)))
        np.testing.assert_allclose(dist(p, q), 1.7, atol=1e-10)

    def test_rotation_preserves_distances(self, example):
        m = example.exact
        pts = m.sample(50, np.random.default_rng(1))
        raw = pts @ m.rotation
        np.testing.assert_allclose(raw @ raw.T, pts @ pts.T, atol=1e-12)

    def test_second_instance(self):
        c = example_s3_body(0.6, 0.3, 1000)
        assert diameter(c)[0] == pytest.approx(1.2, abs=5e-2)
        assert check_constant_width(c, n=100, tol=5e-2).passed

    def test_sigma_range(self):
        with pytest.raises(SigmaOutOfRange):
            example_s3_body(1.0, 0.6, 100)

    def test_kappa_range(self):
        with pytest.raises(KappaOutOfRange):
            example_s3_body(1.6, 0.01, 100)


class TestRandom:
    def test_determinism(self):
        a = random_body(3, 20, 0.8, seed=4)
        b = random_body(3, 20, 0.8, seed=4)
        np.testing.assert_array_equal(a.vertices, b.vertices)

    def test_too_few(self):
        with pytest.raises(TooFewPoints):
            random_body(2, 3, 0.8)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_invariants(self, d):
        c = random_body(d, 12, 1.0, seed=d)
        assert isinstance(c, PolytopeBody)
        np.testing.assert_allclose(np.linalg.norm(c.vertices, axis=1), 1.0, atol=1e-15)
        assert (c.vertices @ c.hemisphere_center).min() > 0
        assert interior_margin(c, c.interior_point) > 0


class TestPerturb:
    def test_identity(self):
        c = orthant_body(2)
        np.testing.assert_array_equal(perturb(c, 0.0).vertices, c.vertices)

    def test_deterministic(self):
        c = orthant_body(2)
        np.testing.assert_array_equal(perturb(c, 0.05, seed=3).vertices, perturb(c, 0.05, seed=3).vertices)

    def test_displacement_bound(self):
        c = random_body(3, 15, 0.8, 0)
        p = perturb(c, 0.1, seed=1)
        assert dist(p.vertices, c.vertices).max() <= 0.1 + 1e-12

    def test_constant_width_lost(self):
        assert check_constant_width(perturb(orthant_body(2), 0.05, seed=0), n=500).spread > 0.01

    def test_eps_range(self):
        with pytest.raises(GeometryError):
            perturb(orthant_body(2), 1.0)


class TestRefinement:
    def test_reuleaux_ladder(self):
        spreads = [check_constant_width(reuleaux_odd_gon(5, 0.8, s), n=300).spread
                   for s in (250, 500, 1000)]
        assert spreads[0] >= spreads[1] >= spreads[2]

    def test_example_ladder(self):
        spreads = [check_constant_width(example_s3_body(1.0, 0.35, s), n=100).spread
                   for s in (600, 1200, 2400)]
        assert spreads[0] >= spreads[1] >= spreads[2]


class TestRoundTrip:
    @pytest.mark.parametrize("body", [
        lambda: ball_body(E[1], 0.3),
        lambda: orthant_body(3),
        lambda: reuleaux_odd_gon(3, 1.0, 100, seed=2),
        lambda: example_s3_body(1.0, 0.35, 300, seed=1),
        lambda: random_body(2, 9, 0.7, seed=5),
        lambda: perturb(orthant_body(2), 0.05, seed=2),
    ])
    def test_bit_exact(self, body):
        c = body()
        d = body_to_dict(c)
        back = body_from_dict(d)
        assert dumps(body_to_dict(back)) == dumps(d)
        if isinstance(c, PolytopeBody):
            np.testing.assert_array_equal(back.vertices, c.vertices)

    def test_build_matches_constructor(self):
        c = reuleaux_odd_gon(5, 0.8, 100, seed=7)
        np.testing.assert_array_equal(build(c.constructor).vertices, c.vertices)
