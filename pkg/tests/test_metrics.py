import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spherewidth.bodies import contains, polytope_from_points, interior_margin, sample_boundary, support_margin
from spherewidth.constructors import (
    ball_body,
    example_s3_body,
    orthant_body,
    perturb,
    random_body,
    reuleaux_odd_gon,
)
from spherewidth.metrics import (
    CenterConditionFailed,
    NotADiameterPair,
    NotOnBoundary,
    NotSupporting,
    WidthNotAboveHalfPi,
    _min_over_dual,
    _min_over_dual_iterative,
    ball_containment_margin,
    check_constant_diameter,
    check_constant_width,
    diameter,
    farthest_partner,
    inscribed_ball_at,
    orthogonal_diameter_support,
    thickness,
    width_at,
    width_lune_at,
)
from spherewidth.sphere_core import dist, normalize, random_points

from _oracles import diameter_sampled, farthest_on_polytope_sampled

E = np.eye(3)
HALF_PI = np.pi / 2


@pytest.fixture(scope="module")
def orthant():
    return orthant_body(2)


@pytest.fixture(scope="module")
def ball():
    return ball_body(E[2], 0.5)


@pytest.fixture(scope="module")
def reuleaux():
    return reuleaux_odd_gon(3, 1.0, 2000)


@pytest.fixture(scope="module")
def example():
    return example_s3_body(1.0, 0.35, 2000)


class TestWidthAt:
    def test_ball(self, ball):
        k = normalize(np.cos(HALF_PI - 0.5) * E[2] + np.sin(HALF_PI - 0.5) * E[1])
        assert width_at(ball, k).value == pytest.approx(1.0, abs=1e-12)

    def test_orthant_facet(self, orthant):
        assert width_at(orthant, E[0]).value == pytest.approx(HALF_PI, abs=1e-12)

    def test_orthant_edge_direction(self, orthant):
        rep = width_at(orthant, normalize([0.0, 1.0, 1.0]))
        assert rep.value == pytest.approx(HALF_PI, abs=1e-12)
        np.testing.assert_allclose(rep.witness_m, E[0], atol=1e-12)

    def test_not_supporting(self, orthant):
        with pytest.raises(NotSupporting):
            width_at(orthant, normalize([1.0, 1.0, 1.0]))

    def test_witness_hemisphere_contains_body(self, rng):
        for seed in range(10):
            c = random_body(3, 20, 1.0, seed)
            for k in c._dual.sample_boundary(5, seed):
                rep = width_at(c, k)
                assert support_margin(c, rep.witness_m) >= -1e-12
                assert support_margin(c, rep.k) >= -1e-9

    def test_iterative_matches_exact(self, rng):
        worst = 0.0
        for seed in range(6):
            c = random_body(3, 14, 1.0, seed)
            for k in random_points(rng, 4, 3):
                exact = _min_over_dual(c, k)[0]
                worst = max(worst, _min_over_dual_iterative(c, k, n_starts=8)[0] - exact)
        assert worst <= 1e-9


class TestThickness:
    def test_orthant(self, orthant):
        assert thickness(orthant).value == pytest.approx(HALF_PI, abs=1e-12)

    def test_ball(self, ball):
        assert thickness(ball).value == pytest.approx(1.0, abs=1e-12)

    def test_reuleaux(self, reuleaux):
        assert thickness(reuleaux).value == pytest.approx(1.0, abs=1e-4)

    def test_below_sampled_widths(self):
        for seed in range(10):
            c = random_body(2 + seed % 2, 15, 1.0, seed)
            t = thickness(c).value
            ws = [width_at(c, k).value for k in c._dual.sample_boundary(100, seed)]
            assert t <= min(ws) + 1e-12


class TestDiameter:
    def test_orthant(self, orthant):
        assert diameter(orthant)[0] == pytest.approx(HALF_PI, abs=1e-12)

    def test_ball(self, ball):
        value, p, q = diameter(ball)
        assert value == pytest.approx(1.0, abs=1e-12)
        assert dist(p, q) == pytest.approx(1.0, abs=1e-12)

    def test_reuleaux(self, reuleaux):
        assert diameter(reuleaux)[0] == pytest.approx(1.0, abs=1e-9)

    def test_example(self, example):
        assert diameter(example)[0] == pytest.approx(1.7, abs=1e-9)

    def test_pair_lies_in_body(self, rng):
        for seed in range(10):
            c = random_body(3, 12, 1.5, seed)
            value, p, q = diameter(c)
            assert contains(c, p) and contains(c, q)
            assert dist(p, q) == pytest.approx(value, abs=1e-12)

    def test_not_below_sampled(self, rng):
        for seed in range(8):
            c = random_body(2 + seed % 2, 10, 1.5, seed)
            assert diameter(c)[0] >= diameter_sampled(c.vertices, 3000, rng) - 1e-12

    def test_above_vertex_pairs_when_obtuse(self):
        # above pi/2 the diameter can be realized away from the vertices
        gaps = []
        for seed in range(20):
            c = random_body(2, 8, 1.5, seed)
            v = c.vertices
            gaps.append(diameter(c)[0] - np.arccos(np.clip((v @ v.T).min(), -1, 1)))
        assert min(gaps) >= -1e-12 and max(gaps) > 1e-6


class TestFarthestPartner:
    def test_orthant(self, orthant):
        q, d = farthest_partner(orthant, E[0])
        assert d == pytest.approx(HALF_PI, abs=1e-12)

    def test_against_sampling(self, rng):
        for seed in range(8):
            c = random_body(3, 12, 1.4, seed)
            p = sample_boundary(c, 1, seed)[0]
            _, d = farthest_partner(c, p)
            assert d >= farthest_on_polytope_sampled(c.vertices, p, 3000, rng) - 1e-12

    def test_interior_raises(self, orthant):
        with pytest.raises(NotOnBoundary):
            farthest_partner(orthant, normalize([1.0, 1.0, 1.0]))

    def test_example_unique_maximizer(self, example):
        # dense scan of the exact boundary: distance from p drops by about
        # 0.18 s^2 at separation s from q
        pts = example.exact.sample(50000, np.random.default_rng(0))
        for p in example.vertices[[0, 100, 900]]:
            q, d = farthest_partner(example, p)
            assert d == pytest.approx(1.7, abs=1e-9)
            far = dist(pts, p)
            assert far.max() <= d + 1e-9
            assert far[dist(pts, q) > 0.1].max() < d - 1e-3


class TestOrthogonalSupport:
    def test_reuleaux_pair(self, reuleaux):
        value, p, q = diameter(reuleaux)
        h = orthogonal_diameter_support(reuleaux, p, q)
        assert support_margin(reuleaux, h.center) >= -1e-9

    def test_short_pair_raises(self, orthant):
        with pytest.raises(NotADiameterPair):
            orthogonal_diameter_support(orthant, E[0], normalize([1.0, 1.0, 0.0]))


class TestWidthAtOrthogonalSupport:
    A = 0.9

    def _body(self, extra):
        a, b = self.A, 0.3
        pts = [[np.sin(a), 0, np.cos(a)], [-np.sin(a), 0, np.cos(a)], [0, np.sin(b), np.cos(b)]]
        if extra:
            pts.append([0, -np.sin(b), np.cos(b)])
        return polytope_from_points(2, pts)

    def test_diameter_along_edge_gives_exactly_half_pi(self):
        c = self._body(extra=False)
        value, p, q = diameter(c)
        assert value == pytest.approx(1.8, abs=1e-12)
        k = orthogonal_diameter_support(c, p, q).center
        assert abs(interior_margin(c, k)) <= 1e-12
        assert width_at(c, k).value == pytest.approx(HALF_PI, abs=1e-12)

    def test_diameter_through_interior_exceeds_half_pi(self):
        c = self._body(extra=True)
        value, p, q = diameter(c)
        k = orthogonal_diameter_support(c, p, q).center
        assert interior_margin(c, k) > 0
        assert width_at(c, k).value > HALF_PI + 0.05


class TestInscribedBall:
    def test_requires_width_above_half_pi(self, reuleaux):
        p = reuleaux.vertices[0]
        with pytest.raises(WidthNotAboveHalfPi):
            inscribed_ball_at(reuleaux, p, 1.0)

    def test_example_touches_and_fits(self, example):
        pts = sample_boundary(example, 10, seed=0)
        for p in pts:
            center, radius = inscribed_ball_at(example, p, 1.7)
            assert radius == pytest.approx(1.7 - HALF_PI)
            assert dist(center, p) == pytest.approx(radius, abs=1e-12)
            assert ball_containment_margin(example, center, radius, 300) >= -5e-3


class TestWidthLune:
    def test_ball(self, ball):
        p = sample_boundary(ball, 1, seed=3)[0]
        lune = width_lune_at(ball, p, 1.0)
        assert lune.thickness == pytest.approx(1.0, abs=1e-9)
        assert dist(lune.c_gh, p) <= 1e-9

    def test_example(self, example):
        p = sample_boundary(example, 1, seed=3)[0]
        lune = width_lune_at(example, p, 1.7, width_tol=5e-3, center_tol=5e-3)
        assert lune.thickness == pytest.approx(1.7, abs=5e-3)
        assert support_margin(example, lune.h.center) >= -5e-3

    def test_interior_point(self, ball):
        with pytest.raises(NotOnBoundary):
            width_lune_at(ball, E[2], 1.0)

    def test_not_constant_width(self, orthant):
        with pytest.raises(CenterConditionFailed):
            width_lune_at(orthant, normalize([1.0, 1.0, 0.0]), 1.0)


class TestCheckers:
    def test_reuleaux_constant_width(self, reuleaux):
        rep = check_constant_width(reuleaux, n=300)
        assert rep.passed and rep.value == pytest.approx(1.0, abs=1e-3)

    def test_perturbed_orthant_fails(self):
        c = perturb(orthant_body(2), 0.05, seed=0)
        rep = check_constant_width(c, n=500)
        assert not rep.passed and rep.spread > 0.01
        assert {w["which"] for w in rep.witnesses} >= {"min", "max"}

    def test_orthant_has_constant_width(self, orthant):
        assert check_constant_width(orthant, n=200).spread <= 1e-12

    def test_reuleaux_constant_diameter(self, reuleaux):
        assert check_constant_diameter(reuleaux, n=100).passed

    def test_random_polytope_fails_diameter(self):
        assert not check_constant_diameter(random_body(2, 8, 1.0, 1), n=100).passed

    def test_report_serializes(self, reuleaux):
        d = check_constant_width(reuleaux, n=20).to_dict()
        assert set(d) >= {"mode", "w_min", "w_max", "spread", "pass", "witnesses"}


class TestProperties:
    @settings(max_examples=25)
    @given(st.integers(2, 3), st.integers(0, 10**6))
    def test_thickness_width_diameter_order(self, d, seed):
        rng = np.random.default_rng(seed)
        c = random_body(d, int(rng.integers(d + 2, 14)), rng.uniform(0.2, 1.5), seed)
        t = thickness(c).value
        for k in c._dual.sample_boundary(10, seed):
            assert t <= width_at(c, k).value + 1e-12
        assert t <= diameter(c)[0] + 1e-12

    @settings(max_examples=25)
    @given(st.integers(0, 10**6))
    def test_narrowest_lune_contains_body(self, seed):
        c = random_body(2, 8, 0.6, seed)
        lune = thickness(c).lune
        assert support_margin(c, lune.g.center) >= -1e-9
        assert support_margin(c, lune.h.center) >= -1e-9
