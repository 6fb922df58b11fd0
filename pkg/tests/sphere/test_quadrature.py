import math

import numpy as np
import pytest

from qcurv import errors
from qcurv.sphere import build_grid, sphere_area


class TestBuildGrid:
    @pytest.mark.parametrize("n,zonal", [(2, True), (3, True), (5, True), (2, False), (3, False)])
    def test_weights_sum_to_area(self, n, zonal):
        grid = build_grid(n, 6, zonal)
        assert grid.weights.sum() == pytest.approx(sphere_area(n), rel=1e-12)
        assert np.all(grid.weights > 0.0)

    @pytest.mark.parametrize("zonal", [True, False])
    def test_nodes_on_sphere(self, zonal):
        grid = build_grid(3, 4, zonal)
        assert np.linalg.norm(grid.coords, axis=1) == pytest.approx(np.ones(grid.size))

    def test_zonal_polynomial_exactness(self):
        # ∫_{S³} t² dv = ω₃/4 and ∫ t⁴ dv = ω₃/8 for t the last coordinate
        grid = build_grid(3, 4, True)
        assert grid.integrate(grid.polar**2) == pytest.approx(sphere_area(3) / 4, rel=1e-13)
        assert grid.integrate(grid.polar**4) == pytest.approx(sphere_area(3) / 8, rel=1e-13)

    def test_full_grid_monomials(self):
        grid = build_grid(3, 4, False)
        x1, x4 = grid.coords[:, 0], grid.coords[:, 3]
        assert grid.integrate(x1**2 * x4**2) == pytest.approx(sphere_area(3) / 24, rel=1e-12)
        assert grid.integrate(x1 * x4) == pytest.approx(0.0, abs=1e-13)

    def test_full_grid_high_dimension(self):
        with pytest.raises(errors.UnsupportedDimensionError):
            _ = build_grid(4, 4, False)

    @pytest.mark.parametrize("n,degree", [(1, 4), (3, 0)])
    def test_invalid(self, n, degree):
        with pytest.raises(errors.ParameterDomainError):
            _ = build_grid(n, degree, True)

    def test_cached(self):
        assert build_grid(3, 5, True) is build_grid(3, 5, True)

    def test_repr(self):
        assert "degree=3" in repr(build_grid(2, 3, True))

    def test_read_only(self):
        grid = build_grid(2, 3, True)
        with pytest.raises(ValueError):
            grid.weights[0] = math.pi
