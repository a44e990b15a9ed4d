"""Numerical ranges of finite compressions, inverse value problems and plank vectors."""

from .boundary import RangeBoundary, numerical_range_boundary
from .plank import plank_certificate, plank_vector, solve_plank
from .region import (
    ConvexRegion,
    Disk,
    Point,
    Polygon,
    Segment,
    convex_hull,
    hull_of_regions,
    region_from_json,
)
from .states import (
    CompressionWindow,
    estimate_essential_range,
    find_state_in_complement,
    find_state_near,
    find_state_with_value,
    two_state_path,
    window_start,
)


def dist_to_boundary(region, lam):
    """Distance from ``lam`` to the boundary of ``region``."""
    return region.dist_to_boundary(lam)


__all__ = [
    "CompressionWindow",
    "ConvexRegion",
    "Disk",
    "Point",
    "Polygon",
    "RangeBoundary",
    "Segment",
    "convex_hull",
    "dist_to_boundary",
    "estimate_essential_range",
    "find_state_in_complement",
    "find_state_near",
    "find_state_with_value",
    "hull_of_regions",
    "numerical_range_boundary",
    "plank_certificate",
    "plank_vector",
    "region_from_json",
    "solve_plank",
    "two_state_path",
    "window_start",
]
