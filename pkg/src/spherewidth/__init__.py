"""Spherical convex geometry: lunes, width, thickness, diameter and bodies of
constant width on S^d."""
from .sphere_core import (
    EPS_UNIT, TOL_GEO, Hemisphere, Lune, antipode, ball_in_hemisphere, corner_angle,
    dist, geodesic_point, lune_contains, lune_thickness, make_lune, unit_point,
)
from .bodies import (
    BallBody, PolytopeBody, caratheodory, contains, dual_region, extreme_points,
    interior_margin, polytope_from_points, separate, support_margin,
)
from .metrics import (
    ConstancyReport, WidthReport, check_constant_diameter, check_constant_width,
    check_strict_convexity, diameter, farthest_partner, inscribed_ball_at,
    orthogonal_diameter_support, thickness, width_at, width_lune_at,
)
from .constructors import (
    ball_body, example_s3_body, orthant_body, perturb, random_body, reuleaux_odd_gon,
)

__version__ = "0.1.0"
