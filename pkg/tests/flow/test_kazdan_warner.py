import math

import pytest
from scipy import integrate

from qcurv import errors, kfuncs
from qcurv.bubbles import bubble_constant, bubble_field
from qcurv.flow import kazdan_warner_integral
from qcurv.spectral import constant_field
from qcurv.sphere import SpherePoint, north_pole, sphere_area


def _polar_oracle(lam, n, sigma):
    # ∫ (1 - t²) δ(t)^q dv written as an integral in t = cos θ
    beta = (n - 2 * sigma) / 2
    q = 2 * n / (n - 2 * sigma)
    amp = 0.5 * (lam * lam - 1)

    def integrand(t):
        delta = bubble_constant(n, sigma) * lam**beta * (1 + amp * (1 - t)) ** -beta
        return (1 - t * t) * delta**q * (1 - t * t) ** ((n - 2) / 2)

    value, _ = integrate.quad(integrand, -1.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return sphere_area(n - 1) * value


@pytest.fixture(scope="module")
def pole_bubble():
    return bubble_field(north_pole(3), 2.0, 3, 0.25, 64)


def test_constant_k_vanishes(pole_bubble):
    for j in range(1, 5):
        value = kazdan_warner_integral(pole_bubble, 1.0, 0.25, j)
        assert value.raw == 0.0
        assert value.normalized == 0.0


def test_linear_k_at_pole(pole_bubble, linear_k):
    value = kazdan_warner_integral(pole_bubble, linear_k, 0.25, 4)
    assert value.raw > 0.0
    assert value.raw == pytest.approx(_polar_oracle(2.0, 3, 0.25), rel=1e-8)
    assert 0.0 < value.normalized <= 1.0


def test_zonal_symmetry(pole_bubble, linear_k):
    assert kazdan_warner_integral(pole_bubble, linear_k, 0.25, 1) == (0.0, 0.0)


@pytest.mark.parametrize("j", [0, 5])
def test_invalid_index(pole_bubble, j):
    with pytest.raises(errors.ParameterDomainError):
        _ = kazdan_warner_integral(pole_bubble, 1.0, 0.25, j)


def test_full_grid_off_axis(linear_k):
    a = SpherePoint.from_vector([1.0, 0.0, 0.0, 1.0])
    u = bubble_field(a, 1.5, 3, 0.25, 8, zonal=False)
    values = [kazdan_warner_integral(u, linear_k, 0.25, j) for j in range(1, 5)]
    # K varies along ξ₄ only, and u is symmetric under ξ₂ ↦ -ξ₂ and ξ₃ ↦ -ξ₃
    assert abs(values[1].raw) < 1e-12
    assert abs(values[2].raw) < 1e-12
    assert math.isfinite(values[0].raw)
    assert values[3].raw > 0.0


def test_off_axis_k_on_full_grid():
    # ∫ (1 - ξ₁²) over S³ is (3/4)ω₃; max|∇K| over the nodes is close to 1
    K = kfuncs.LinearK(3, a=2.0, b=1.0, j=1)
    u = constant_field(3, 8, False, 1.0)
    value = kazdan_warner_integral(u, K, 0.25, 1)
    assert value.normalized == pytest.approx(0.75, rel=1e-2)
    assert value.raw == pytest.approx(0.75 * sphere_area(3), rel=1e-10)


def test_off_axis_k_on_zonal_grid():
    K = kfuncs.LinearK(3, a=2.0, b=1.0, j=1)
    u = constant_field(3, 8, True, 1.0)
    for j in (1, 4):
        with pytest.raises(errors.ConfigurationError):
            _ = kazdan_warner_integral(u, K, 0.25, j)
