"""
:mod:`qcurv.bubbles.functional`: The Euler-Lagrange functional
J_K(u) = ‖u‖² / (∫ K u₊^{2n/(n-2σ)})^{(n-2σ)/n} and its subcritical variants.
"""
from __future__ import annotations

import logging
from typing import NamedTuple, Optional, Union

import numpy as np

from .. import constants, errors, kfuncs, types, utils
from ..sphere.quadrature import QuadratureGrid
from ..spectral.fields import SpectralField, forward_transform, inverse_transform, working_grid
from ..spectral.operator import hsigma_inner, psigma_multipliers

LOGGER = logging.getLogger(__name__)


class FunctionalParts(NamedTuple):
    """Pieces of J_K at a field: numerator, denominator, exponent and nodal values."""

    energy: float
    denominator: float
    exponent: float
    positive: np.ndarray
    k_nodes: np.ndarray

    @property
    def value(self) -> float:
        return self.energy / self.denominator ** (2.0 / self.exponent)


def k_on_grid(K: Union[types.KLike, SpectralField], grid: QuadratureGrid) -> np.ndarray:
    """Positive values of K at the nodes of ``grid``."""
    return kfuncs.grid_values(K, grid)


def functional_parts(
    u: SpectralField,
    k_nodes: np.ndarray,
    sigma: float,
    grid: QuadratureGrid,
    exponent: Optional[float] = None,
) -> FunctionalParts:
    """
    Evaluate the numerator and denominator of J_K at ``u`` on ``grid``.

    Raises:
        DegenerateInputError: for u = 0 or a denominator below 1e-14·‖u‖^q.
    """
    q = utils.critical_exponent(u.n, sigma) if exponent is None else float(exponent)
    energy = hsigma_inner(u, u, sigma)
    if energy <= 0.0:
        raise errors.DegenerateInputError("J_K is undefined at the zero field")
    samples = inverse_transform(u, grid)
    positive = np.maximum(samples, 0.0) + constants.POSITIVE_FLOOR
    denom = float(np.dot(grid.weights, k_nodes * positive**q))
    if denom <= constants.DENOMINATOR_FLOOR * energy ** (q / 2.0):
        raise errors.DegenerateInputError(
            f"denominator ∫K u₊^q = {denom:.3e} collapsed relative to ‖u‖^q"
        )
    return FunctionalParts(energy, denom, q, positive, k_nodes)


def functional_JK(
    u: SpectralField,
    K: Union[types.KLike, SpectralField],
    sigma: float,
    grid: Optional[QuadratureGrid] = None,
    *,
    exponent: Optional[float] = None,
) -> float:
    """
    J_K(u) = ‖u‖² / (∫ K u₊^q dv)^{2/q} with q = 2n/(n-2σ), or a subcritical ``exponent``.

    Args:
        u: Nonzero field.
        K: Prescribed function: a positive constant, :class:`~qcurv.kfuncs.KFunction`,
            callable of embedded coordinates, or :class:`SpectralField`.
        sigma: Order of P_σ.
        grid: Quadrature grid for the denominator; defaults to the de-aliased working grid.
        exponent: Replace the critical exponent (subcritical problems).

    Raises:
        DegenerateInputError
        InvalidKError: if K ≤ 0 at some node.
    """
    utils.validate_sigma(u.n, sigma)
    grid = grid or working_grid(u)
    return functional_parts(u, k_on_grid(K, grid), sigma, grid, exponent).value


def functional_gradient_coeffs(
    u: SpectralField,
    k_nodes: np.ndarray,
    sigma: float,
    grid: QuadratureGrid,
    exponent: Optional[float] = None,
):
    """
    J_K at ``u`` together with its gradient with respect to the coefficients of ``u``
    (Euclidean in coefficient space).

    Returns:
        (FunctionalParts, gradient array of shape ``u.coeffs.shape``)
    """
    parts = functional_parts(u, k_nodes, sigma, grid, exponent)
    q = parts.exponent
    mult = psigma_multipliers(u.n, u.L, u.zonal, float(sigma))
    active = inverse_transform(u, grid) > 0.0
    nonlinear = np.where(active, k_nodes * parts.positive ** (q - 1.0), 0.0)
    projected = forward_transform(nonlinear, grid, u.L).coeffs
    scale = 2.0 / parts.denominator ** (2.0 / q)
    grad = scale * (mult * u.coeffs - parts.energy / parts.denominator * projected)
    return parts, grad
