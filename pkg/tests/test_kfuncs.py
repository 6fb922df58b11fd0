import numpy as np
import pytest

from qcurv import errors, kfuncs
from qcurv.io import write_field
from qcurv.spectral import constant_field, working_grid
from qcurv.sphere import SpherePoint, north_pole, south_pole


@pytest.fixture(scope="module")
def points():
    rng = np.random.default_rng(11)
    coords = rng.standard_normal((6, 4))
    return coords / np.linalg.norm(coords, axis=1, keepdims=True)


class TestFamilies:
    def test_registered(self):
        assert {"constant", "linear", "two-peak", "harmonic"} <= set(kfuncs.k_families.get_all())

    def test_unknown_family(self):
        with pytest.raises(errors.ConfigurationError):
            _ = kfuncs.make_k("three-peak", 3)

    def test_constant(self):
        K = kfuncs.make_k("constant", 3, value=2.0)
        assert K(north_pole(3).coords) == pytest.approx([2.0])
        with pytest.raises(errors.InvalidKError):
            _ = kfuncs.make_k("constant", 3, value=0.0)

    def test_linear(self, linear_k, poles):
        north, south = poles
        assert linear_k(north.coords) == pytest.approx([3.0])
        assert linear_k(south.coords) == pytest.approx([1.0])
        with pytest.raises(errors.InvalidKError):
            _ = kfuncs.LinearK(3, a=1.0, b=1.0)
        with pytest.raises(errors.ParameterDomainError):
            _ = kfuncs.LinearK(3, j=5)

    def test_two_peak(self, two_peak_k, poles):
        north, south = poles
        peak = two_peak_k(north.coords)[0]
        assert two_peak_k(south.coords)[0] == pytest.approx(peak)
        assert peak == pytest.approx(1.0 + 0.005 * (1.0 - 0.325))
        e1 = SpherePoint([1.0, 0.0, 0.0, 0.0])
        assert two_peak_k(e1.coords)[0] < peak

    def test_two_peak_tilt(self):
        with pytest.raises(errors.ParameterDomainError):
            _ = kfuncs.make_k("two-peak", 3, tilt=1.0)

    def test_harmonic_from_file(self, coordinate_field, tmp_path):
        field = constant_field(3, 4, True, 2.0) + coordinate_field(3, 4, True)
        path = tmp_path / "k.field"
        write_field(field, 0.25, path)
        K = kfuncs.make_k("harmonic", 3, path=str(path))
        assert isinstance(K, kfuncs.FieldK)
        assert K(north_pole(3).coords) == pytest.approx([3.0])

    def test_harmonic_wrong_dimension(self, coordinate_field, tmp_path):
        path = tmp_path / "k.field"
        write_field(coordinate_field(4, 2, True), 0.25, path)
        with pytest.raises(errors.ConfigurationError):
            _ = kfuncs.make_k("harmonic", 3, path=str(path))


class TestAsKFunction:
    def test_constant(self):
        assert isinstance(kfuncs.as_k_function(1.5, 3), kfuncs.ConstantK)

    def test_callable(self):
        K = kfuncs.as_k_function(lambda x: 2.0 + x[:, 0], 3)
        assert K(north_pole(3).coords) == pytest.approx([2.0])

    def test_wrong_dimension(self, linear_k):
        with pytest.raises(errors.ConfigurationError):
            _ = kfuncs.as_k_function(linear_k, 4)

    def test_invalid_type(self):
        with pytest.raises(TypeError):
            _ = kfuncs.as_k_function("one", 3)

    def test_positive_values(self):
        K = kfuncs.as_k_function(lambda x: x[:, -1], 3)
        with pytest.raises(errors.InvalidKError):
            _ = kfuncs.positive_values(K, np.stack([north_pole(3).coords, south_pole(3).coords]))


class TestDerivatives:
    def test_gradient_is_tangent(self, two_peak_k, points):
        grad = kfuncs.riemannian_gradient(two_peak_k, points)
        assert np.einsum("ij,ij->i", grad, points) == pytest.approx(np.zeros(6), abs=1e-14)

    def test_laplacian_of_coordinate(self, linear_k, points):
        # Δ ξ_{n+1} = -n ξ_{n+1}
        assert kfuncs.laplacian(linear_k, points) == pytest.approx(-3.0 * points[:, -1])

    @pytest.mark.parametrize("k_name", ["linear_k", "two_peak_k"])
    def test_finite_differences_match_analytic(self, request, points, k_name):
        K = request.getfixturevalue(k_name)
        K_fd = kfuncs.CallableK(3, K)
        assert kfuncs.riemannian_gradient(K_fd, points) == pytest.approx(
            kfuncs.riemannian_gradient(K, points), abs=1e-8
        )
        assert kfuncs.laplacian(K_fd, points) == pytest.approx(
            kfuncs.laplacian(K, points), abs=1e-5
        )
        hess, frame = kfuncs.intrinsic_hessian(K, points[0])
        hess_fd, frame_fd = kfuncs.intrinsic_hessian(K_fd, points[0])
        assert frame == pytest.approx(frame_fd)
        assert hess_fd == pytest.approx(hess, abs=1e-5)

    def test_hessian_at_pole(self, linear_k, poles):
        north, south = poles
        hess, _ = kfuncs.intrinsic_hessian(linear_k, north.coords)
        assert hess == pytest.approx(-np.eye(3))
        hess, _ = kfuncs.intrinsic_hessian(linear_k, south.coords)
        assert hess == pytest.approx(np.eye(3))


class TestZonal:
    @pytest.mark.parametrize(
        "K",
        [
            kfuncs.ConstantK(3, 2.0),
            kfuncs.LinearK(3),
            kfuncs.LinearK(3, b=0.0, j=1),
            kfuncs.QuadraticK(3, [0.0, 0.0, 0.0, 1.0], 0.1),
            kfuncs.CallableK(3, lambda x: 2.0 + x[:, -1] ** 3),
        ],
    )
    def test_axially_symmetric(self, K):
        assert kfuncs.is_zonal(K)

    @pytest.mark.parametrize(
        "K",
        [
            kfuncs.LinearK(3, j=1),
            kfuncs.LinearK(3, j=3),
            kfuncs.CallableK(3, lambda x: 2.0 + x[:, 1] * x[:, 3]),
        ],
    )
    def test_not_axially_symmetric(self, K):
        assert not kfuncs.is_zonal(K)

    def test_two_peak(self, two_peak_k):
        assert not kfuncs.is_zonal(two_peak_k)

    def test_zonal_field(self, coordinate_field):
        K = constant_field(3, 4, True, 2.0) + coordinate_field(3, 4, True)
        assert kfuncs.is_zonal(kfuncs.as_k_function(K, 3))

    def test_full_field(self, coordinate_field):
        base = constant_field(3, 4, False, 2.0)
        assert kfuncs.is_zonal(kfuncs.as_k_function(base + coordinate_field(3, 4, False), 3))
        assert not kfuncs.is_zonal(
            kfuncs.as_k_function(base + coordinate_field(3, 4, False, j=2), 3)
        )

    def test_grid_values(self, linear_k):
        grid = working_grid(constant_field(3, 4, True, 1.0))
        assert kfuncs.grid_values(linear_k, grid) == pytest.approx(2.0 + grid.coords[:, -1])
        with pytest.raises(errors.ConfigurationError, match="axially symmetric"):
            _ = kfuncs.grid_values(kfuncs.LinearK(3, j=1), grid)

    def test_grid_values_full_grid(self):
        grid = working_grid(constant_field(3, 4, False, 1.0))
        K = kfuncs.LinearK(3, j=1)
        assert kfuncs.grid_values(K, grid) == pytest.approx(2.0 + grid.coords[:, 0])
