import math

import numpy as np
import pytest

from qcurv import errors
from qcurv.spectral import basis_matrix, harmonic_basis, harmonic_dimension
from qcurv.spectral.harmonics import scaled_gegenbauer, solid_harmonics
from qcurv.sphere import build_grid


class TestHarmonicDimension:
    @pytest.mark.parametrize("L", [0, 1, 3, 7])
    def test_s2(self, L):
        assert harmonic_dimension(2, L, False) == (L + 1) ** 2

    @pytest.mark.parametrize("L", [0, 2, 5])
    def test_s3(self, L):
        assert harmonic_dimension(3, L, False) == sum((k + 1) ** 2 for k in range(L + 1))

    @pytest.mark.parametrize("n", [2, 3, 6])
    def test_zonal(self, n):
        assert harmonic_dimension(n, 9, True) == 10


class TestBasis:
    @pytest.mark.parametrize(
        "n,L,zonal", [(2, 6, False), (3, 5, False), (3, 24, True), (6, 16, True)]
    )
    def test_quadrature_orthonormality(self, n, L, zonal):
        grid = build_grid(n, L, zonal)
        mat = basis_matrix(grid, L)
        gram = mat.T @ (grid.weights[:, None] * mat)
        assert np.abs(gram - np.eye(mat.shape[1])).max() < 1e-10

    def test_degrees(self):
        basis = harmonic_basis(3, 3, False)
        counts = np.bincount(basis.degrees)
        assert counts.tolist() == [1, 4, 9, 16]
        assert basis.size == 30

    def test_constant_norm(self):
        basis = harmonic_basis(3, 4, True)
        assert basis.norms[0] == pytest.approx(math.sqrt(2 * math.pi**2))

    def test_grid_too_coarse(self):
        with pytest.raises(errors.ConfigurationError):
            _ = basis_matrix(build_grid(3, 4, True), 8)

    def test_read_only(self):
        mat = basis_matrix(build_grid(2, 4, True), 4)
        with pytest.raises(ValueError):
            mat[0, 0] = 0.0


class TestSolidHarmonics:
    def test_homogeneous(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((5, 4))
        raw, degrees = solid_harmonics(X, 3)
        raw2, _ = solid_harmonics(2.0 * X, 3)
        assert raw2 == pytest.approx(raw * 2.0 ** degrees[None, :])

    def test_too_few_coordinates(self):
        with pytest.raises(errors.UnsupportedDimensionError):
            _ = solid_harmonics(np.ones((3, 1)), 2)

    def test_gegenbauer_unit_at_pole(self):
        z = np.array([1.0])
        values = scaled_gegenbauer(12, 1.5, z, np.ones(1))
        assert np.concatenate(values) == pytest.approx(np.ones(13))

    def test_gegenbauer_matches_legendre(self):
        # a = 1/2 is the Legendre family
        z = np.linspace(-1.0, 1.0, 9)
        values = scaled_gegenbauer(4, 0.5, z, np.ones_like(z))
        assert values[2] == pytest.approx(1.5 * z**2 - 0.5)
        assert values[4] == pytest.approx((35 * z**4 - 30 * z**2 + 3) / 8)
