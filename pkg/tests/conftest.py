import numpy as np
import pytest

from qcurv import kfuncs
from qcurv.spectral import constant_field, forward_transform, working_grid, zero_field
from qcurv.sphere import north_pole, south_pole


@pytest.fixture(scope="session")
def linear_k():
    """K = ξ₄ + 2 on S³, which admits no positive solution."""
    return kfuncs.LinearK(3, a=2.0, b=1.0)


@pytest.fixture(scope="session")
def two_peak_k():
    """Antipodal maxima at the poles; K_max/K_min ≈ 1.005."""
    return kfuncs.make_k("two-peak", 3, epsilon=0.005)


@pytest.fixture(scope="session")
def poles():
    return north_pole(3), south_pole(3)


@pytest.fixture(scope="session")
def coordinate_field():
    """Factory for the coordinate function ξ_j (default ξ_{n+1}) as a field."""

    def _make(n, L, zonal, j=None):
        grid = working_grid(zero_field(n, L, zonal))
        j = n + 1 if j is None else j
        return forward_transform(grid.coords[:, j - 1], grid, L)

    return _make


@pytest.fixture(scope="session")
def random_field():
    """Factory for seeded random fields with no content above degree ``band``."""

    def _make(n, L, zonal, seed=0, band=None):
        rng = np.random.default_rng(seed)
        u = zero_field(n, L, zonal)
        coeffs = rng.standard_normal(u.coeffs.size)
        if band is not None:
            coeffs[u.degrees > band] = 0.0
        return u.with_coeffs(coeffs)

    return _make


@pytest.fixture(scope="session")
def perturbed_constant(coordinate_field):
    """1 + 0.1·ξ₄ on S³, zonal, L = 16."""
    return constant_field(3, 16, True, 1.0) + 0.1 * coordinate_field(3, 16, True)
