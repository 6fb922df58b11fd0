import pytest

from qcurv import errors
from qcurv.bubbles import (
    BubbleParams,
    bubble_derivatives,
    bubble_field,
    in_neighborhood,
    optimal_representation,
)
from qcurv.spectral import forward_transform, hsigma_inner, hsigma_norm, working_grid, zero_field
from qcurv.sphere import SpherePoint, geodesic_distance

SIGMA = 0.25


def _orthogonal_to(w, directions):
    """``w`` with its energy-norm projection onto span(``directions``) removed."""
    basis = []
    for d in directions:
        for b in basis:
            d = d - hsigma_inner(d, b, SIGMA) * b
        basis.append(d / hsigma_norm(d, SIGMA))
    for b in basis:
        w = w - hsigma_inner(w, b, SIGMA) * b
    return w


@pytest.fixture(scope="module")
def single_bubble(poles):
    return bubble_field(poles[0], 5.0, 3, SIGMA, 32)


@pytest.fixture(scope="module")
def two_bubbles(poles):
    params = BubbleParams.from_arrays([1.0, 0.8], list(poles), [5.0, 9.0], 3, SIGMA)
    return params.field(32)


class TestSingleBubble:
    def test_exact_bubble_recovered(self, single_bubble, poles):
        params, v, diagnostics = optimal_representation(single_bubble, 1, None, SIGMA)
        assert params.centers[0] == poles[0]
        assert params.lambdas[0] == pytest.approx(5.0, rel=1e-6)
        assert params.alphas[0] == pytest.approx(1.0, rel=1e-6)
        assert diagnostics["v_norm"] < 1e-6
        assert diagnostics["converged"]
        assert "level_match" not in diagnostics

    def test_perturbed_bubble(self, single_bubble, random_field):
        w = random_field(3, 32, True, seed=11, band=4)
        w = w * (1e-3 * hsigma_norm(single_bubble, SIGMA) / hsigma_norm(w, SIGMA))
        params, v, diagnostics = optimal_representation(single_bubble + w, 1, 1.0, SIGMA)
        assert params.lambdas[0] == pytest.approx(5.0, rel=1e-2)
        assert params.alphas[0] == pytest.approx(1.0, rel=1e-2)
        assert diagnostics["v_norm"] <= 1.1e-3
        assert max(diagnostics["level_match"]) < 1e-2

    def test_remainder_is_difference(self, single_bubble):
        params, v, _ = optimal_representation(single_bubble, 1, None, SIGMA)
        assert hsigma_norm(single_bubble - params.field(32) - v, SIGMA) < 1e-10


class TestSharpBubble:
    @pytest.fixture(scope="class")
    def sharp(self, poles):
        return bubble_field(poles[0], 8.0, 3, SIGMA, 64)

    def test_exact(self, sharp, poles):
        params, _, diagnostics = optimal_representation(sharp, 1, None, SIGMA)
        assert params.centers[0] == poles[0]
        assert params.lambdas[0] == pytest.approx(8.0, rel=1e-6)
        assert params.alphas[0] == pytest.approx(1.0, rel=1e-6)
        assert diagnostics["v_norm"] < 1e-6

    def test_orthogonal_perturbation(self, sharp, poles, random_field):
        # on zonal fields the center derivatives are odd about the axis and drop out
        grid = working_grid(sharp)
        d_lam, _, _ = bubble_derivatives(poles[0], 8.0, 3, SIGMA, grid.coords)
        w = _orthogonal_to(
            random_field(3, 64, True, seed=11, band=8),
            [sharp, forward_transform(d_lam, grid, 64)],
        )
        w = w * (1e-3 * hsigma_norm(sharp, SIGMA) / hsigma_norm(w, SIGMA))
        params, v, diagnostics = optimal_representation(sharp + w, 1, 1.0, SIGMA)
        assert params.lambdas[0] == pytest.approx(8.0, rel=1e-3)
        assert params.alphas[0] == pytest.approx(1.0, rel=1e-3)
        assert diagnostics["v_norm"] == pytest.approx(1e-3, rel=1e-2)
        assert hsigma_norm(v - w, SIGMA) < 1e-2 * hsigma_norm(w, SIGMA)
        assert max(diagnostics["v0_residuals"]) < 1e-8


class TestFullGrid:
    L = 8

    @pytest.fixture(scope="class")
    def centers(self):
        return [
            SpherePoint.from_vector([1.0, 0.5, 0.0, 1.0]),
            SpherePoint.from_vector([0.0, -1.0, 0.3, -1.0]),
        ]

    def test_off_axis_bubble(self, centers):
        u = bubble_field(centers[0], 2.5, 3, SIGMA, self.L, zonal=False)
        params, _, diagnostics = optimal_representation(u, 1, None, SIGMA)
        assert geodesic_distance(params.centers[0], centers[0]) < 1e-6
        assert params.lambdas[0] == pytest.approx(2.5, rel=1e-6)
        assert params.alphas[0] == pytest.approx(1.0, rel=1e-6)
        assert diagnostics["v_norm"] < 1e-6
        assert max(diagnostics["v0_residuals"]) < 1e-8

    def test_two_off_axis_bubbles(self, centers):
        truth = BubbleParams.from_arrays([1.0, 0.8], centers, [2.5, 3.5], 3, SIGMA)
        u = truth.field(self.L, False)
        nudged = [
            SpherePoint.from_vector(centers[0].coords + [0.0, 0.02, -0.02, 0.0]),
            SpherePoint.from_vector(centers[1].coords + [0.02, 0.0, 0.0, 0.01]),
        ]
        initial = BubbleParams.from_arrays([0.95, 0.85], nudged, [2.7, 3.3], 3, SIGMA)
        params, _, diagnostics = optimal_representation(u, 2, None, SIGMA, initial=initial)
        assert params.lambdas.tolist() == pytest.approx([2.5, 3.5], rel=1e-6)
        assert params.alphas.tolist() == pytest.approx([1.0, 0.8], rel=1e-6)
        for found, expected in zip(params.centers, centers):
            assert geodesic_distance(found, expected) < 1e-6
        assert diagnostics["converged"]


class TestTwoBubbles:
    def test_greedy_start(self, two_bubbles, poles):
        params, _, diagnostics = optimal_representation(two_bubbles, 2, None, SIGMA)
        assert params.lambdas.tolist() == pytest.approx([5.0, 9.0], rel=1e-6)
        assert params.alphas.tolist() == pytest.approx([1.0, 0.8], rel=1e-6)
        assert params.centers == list(poles)
        assert set(diagnostics["epsilons"]) == {"0,1"}

    def test_order_of_initial_guess_irrelevant(self, two_bubbles, poles):
        north, south = poles
        initial = BubbleParams.from_arrays([0.75, 1.05], [south, north], [8.5, 5.5], 3, SIGMA)
        params, _, _ = optimal_representation(two_bubbles, 2, None, SIGMA, initial=initial)
        assert params.lambdas.tolist() == pytest.approx([5.0, 9.0], rel=1e-6)
        assert params.centers == [north, south]

    def test_initial_guess_size_mismatch(self, two_bubbles, poles):
        initial = BubbleParams.from_arrays([1.0], [poles[0]], [5.0], 3, SIGMA)
        with pytest.raises(errors.ConfigurationError):
            _ = optimal_representation(two_bubbles, 2, None, SIGMA, initial=initial)


class TestInvalidInput:
    def test_too_many_zonal_bubbles(self, two_bubbles):
        with pytest.raises(errors.ConfigurationError):
            _ = optimal_representation(two_bubbles, 3, None, SIGMA)

    @pytest.mark.parametrize("p", [0, -1])
    def test_nonpositive_count(self, two_bubbles, p):
        with pytest.raises(errors.ConfigurationError):
            _ = optimal_representation(two_bubbles, p, None, SIGMA)

    def test_zero_field(self):
        with pytest.raises(errors.DegenerateInputError):
            _ = optimal_representation(zero_field(3, 16, True), 1, None, SIGMA)


class TestNeighborhood:
    @pytest.fixture(scope="class")
    def sharp(self, poles):
        params = BubbleParams.from_arrays([1.0], [poles[0]], [8.0], 3, SIGMA)
        return params, params.field(64)

    def test_inside(self, sharp):
        params, u = sharp
        assert in_neighborhood(u, params, 1.0, SIGMA, 0.2)

    def test_concentration_too_low(self, sharp):
        params, u = sharp
        assert not in_neighborhood(u, params, 1.0, SIGMA, 0.1)

    def test_nonpositive_size(self, sharp):
        params, u = sharp
        with pytest.raises(errors.ParameterDomainError):
            _ = in_neighborhood(u, params, 1.0, SIGMA, 0.0)
