"""
Sphere geometry
---------------

Points of Sⁿ, distances, stereographic coordinates, and quadrature grids.
"""
from .points import (
    SpherePoint,
    exp_map,
    geodesic_distance,
    jacobian_density,
    north_pole,
    one_minus_cos,
    pairwise_distances,
    south_pole,
    sphere_area,
    stereographic_inverse,
    stereographic_projection,
    tangent_basis,
)
from .quadrature import QuadratureGrid, build_grid
