"""
:mod:`qcurv.flow.gradient`: The gradient of J_K in the energy metric and the
Euler-Lagrange residual of a field.
"""
from __future__ import annotations

import logging
from typing import Optional, Tuple, Union

import numpy as np

from .. import types, utils
from ..bubbles.functional import functional_gradient_coeffs, k_on_grid
from ..sphere.quadrature import QuadratureGrid
from ..spectral.fields import SpectralField, forward_transform, inverse_transform, working_grid
from ..spectral.operator import psigma_multipliers

LOGGER = logging.getLogger(__name__)


def tangential(u: SpectralField, g: np.ndarray, mult: np.ndarray) -> np.ndarray:
    """Remove from coefficients ``g`` their component along ``u`` in the energy metric."""
    wu = mult * u.coeffs
    return g - (np.dot(g, wu) / np.dot(u.coeffs, wu)) * u.coeffs


def gradient_JK(
    u: SpectralField,
    K: Union[types.KLike, SpectralField],
    sigma: float,
    grid: Optional[QuadratureGrid] = None,
    *,
    exponent: Optional[float] = None,
    project: bool = True,
) -> SpectralField:
    """
    Gradient of J_K at ``u`` with respect to ⟨u, v⟩ = ∫ v P_σ u, so that
    ⟨gradient_JK(u), h⟩ is the derivative of J_K at u in direction h.

    Args:
        u: Nonzero field.
        K: Prescribed function.
        sigma: Order of P_σ.
        grid: Quadrature grid; defaults to the de-aliased working grid of ``u``.
        exponent: Subcritical exponent replacing 2n/(n-2σ).
        project: Remove the (vanishing up to round-off) component along ``u``.

    Raises:
        DegenerateInputError: for a collapsed denominator.
    """
    utils.validate_sigma(u.n, sigma)
    grid = grid or working_grid(u)
    _, grad = functional_gradient_coeffs(u, k_on_grid(K, grid), sigma, grid, exponent)
    mult = psigma_multipliers(u.n, u.L, u.zonal, float(sigma))
    g = grad / mult
    if project:
        g = tangential(u, g, mult)
    return u.with_coeffs(g)


def euler_lagrange_residual(
    u: SpectralField,
    K: Union[types.KLike, SpectralField],
    sigma: float,
    grid: Optional[QuadratureGrid] = None,
    *,
    exponent: Optional[float] = None,
) -> Tuple[float, float]:
    """
    Least-squares multiplier μ and relative residual ‖P_σu - μ K u₊^{q-1}‖ / ‖P_σu‖.

    Returns:
        (mu, residual)
    """
    grid = grid or working_grid(u)
    q = utils.critical_exponent(u.n, sigma) if exponent is None else float(exponent)
    k_nodes = k_on_grid(K, grid)
    lhs = psigma_multipliers(u.n, u.L, u.zonal, float(sigma)) * u.coeffs
    samples = np.maximum(inverse_transform(u, grid), 0.0)
    rhs = forward_transform(k_nodes * samples ** (q - 1.0), grid, u.L).coeffs
    denom = float(np.dot(rhs, rhs))
    mu = float(np.dot(lhs, rhs) / denom) if denom > 0.0 else 0.0
    norm = float(np.linalg.norm(lhs))
    return mu, float(np.linalg.norm(lhs - mu * rhs) / norm) if norm > 0.0 else 0.0
