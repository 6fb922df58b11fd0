import math

import pytest

from qcurv import errors
from qcurv.bubbles import BubbleParams, bubble_derivatives, bubble_field, vbar_minimize
from qcurv.spectral import forward_transform, hsigma_inner, hsigma_norm, working_grid, zero_field

SIGMA = 0.25


@pytest.fixture(scope="module")
def params(poles):
    return BubbleParams.from_arrays([1.0], [poles[0]], [4.0], 3, SIGMA)


@pytest.fixture(scope="module")
def result(params, linear_k):
    return vbar_minimize(params, linear_k, SIGMA, 24)


def test_level_does_not_increase(result):
    diagnostics = result.diagnostics
    assert diagnostics["level"] <= diagnostics["level_start"]
    assert math.isfinite(result.norm)
    assert result.vbar.L == 24


def test_orthogonal_to_bubble_directions(result, poles):
    vbar = result.vbar
    grid = working_grid(zero_field(3, 24, True))
    delta = bubble_field(poles[0], 4.0, 3, SIGMA, 24)
    d_lam, _, _ = bubble_derivatives(poles[0], 4.0, 3, SIGMA, grid.coords)
    d_lam = forward_transform(d_lam, grid, 24)
    for phi in (delta, d_lam):
        scale = hsigma_norm(vbar, SIGMA) * hsigma_norm(phi, SIGMA) + 1e-300
        assert abs(hsigma_inner(vbar, phi, SIGMA)) <= 1e-8 * scale


def test_complement_dimension(result):
    # zonal: L + 1 coefficients minus the bubble and its λ-derivative
    assert result.diagnostics["complement_dimension"] == 25 - 2


def test_constant_k_keeps_bubble(params):
    result = vbar_minimize(params, 1.0, SIGMA, 48)
    assert result.norm < 1e-6


class TestInvalidInput:
    def test_sigma_mismatch(self, params, linear_k):
        with pytest.raises(errors.ConfigurationError):
            _ = vbar_minimize(params, linear_k, 0.3, 24)

    def test_infinite_concentration(self, poles, linear_k):
        params = BubbleParams.from_arrays([1.0], [poles[0]], [math.inf], 3, SIGMA)
        with pytest.raises(errors.ParameterDomainError):
            _ = vbar_minimize(params, linear_k, SIGMA, 24)


@pytest.mark.slow
def test_remainder_shrinks_with_concentration(poles, linear_k):
    norms = [
        vbar_minimize(
            BubbleParams.from_arrays([1.0], [poles[0]], [lam], 3, SIGMA), linear_k, SIGMA, 64
        ).norm
        for lam in (2.0, 4.0, 8.0)
    ]
    assert norms[0] > norms[1] > norms[2]
