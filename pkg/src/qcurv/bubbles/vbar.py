"""
:mod:`qcurv.bubbles.vbar`: The remainder v̄ minimizing J_K(Σ α_i δ_i + v) over fields v
orthogonal, in the energy inner product, to the bubbles and their parameter derivatives.
"""
from __future__ import annotations

import logging
from typing import Any, Dict, NamedTuple, Union

import numpy as np
from scipy import linalg, optimize

from .. import constants, errors, kfuncs, types
from ..spectral.fields import SpectralField, forward_transform, working_grid
from ..spectral.operator import psigma_multipliers
from .core import BubbleParams, bubble_derivatives, bubble_samples
from .functional import functional_gradient_coeffs

LOGGER = logging.getLogger(__name__)


class VbarResult(NamedTuple):
    """The minimizing remainder, its energy norm, and descent diagnostics."""

    vbar: SpectralField
    norm: float
    diagnostics: Dict[str, Any]


def _constraint_rows(params: BubbleParams, grid, L: int, zonal: bool) -> np.ndarray:
    """Coefficients of every δ_i, ∂δ_i/∂λ_i and (off-axis) ∂δ_i/∂a_i, one per row."""
    rows = []
    for e in params:
        delta = bubble_samples(e.center, e.lam, params.n, params.sigma, grid.coords)
        d_lam, d_a, _ = bubble_derivatives(e.center, e.lam, params.n, params.sigma, grid.coords)
        cols = [delta, d_lam] + ([] if zonal else list(d_a.T))
        rows.extend(forward_transform(col, grid, L).coeffs for col in cols)
    return np.stack(rows)


def vbar_minimize(
    params: BubbleParams,
    K: Union[types.KLike, SpectralField],
    sigma: float,
    L: int,
    *,
    zonal: bool = True,
    max_iter: int = constants.VBAR_MAX_ITER,
    gtol: float = constants.VBAR_GTOL,
) -> VbarResult:
    """
    Minimize J_K(Σ α_i δ_i + v) over the orthogonal complement of the bubble span,
    truncated at degree ``L``.

    The complement is parametrized by whitened coordinates y with v = W^{-1/2} Q y, where
    W holds the eigenvalues of P_σ and Q an orthonormal basis of the admissible directions,
    so that ‖v‖ = |y| and L-BFGS runs in an isometric chart.

    Returns:
        :class:`VbarResult`; ``diagnostics["converged"]`` is False when the descent stopped
        on its iteration cap. J_K(Σα_iδ_i + v̄) ≤ J_K(Σα_iδ_i) always holds.

    Raises:
        ParameterDomainError: for bubbles with λ = ∞.
        InvalidKError: for K ≤ 0 at a node.
    """
    if params.sigma != sigma:
        raise errors.ConfigurationError(f"params carry σ = {params.sigma}, not {sigma}")
    if np.any(np.isinf(params.lambdas)):
        raise errors.ParameterDomainError("v̄ needs finite concentrations")
    base = params.field(L, zonal)
    grid = working_grid(base)
    k_nodes = kfuncs.grid_values(kfuncs.as_k_function(K, params.n), grid)
    mult = psigma_multipliers(base.n, L, zonal, float(sigma))
    inv_sqrt = 1.0 / np.sqrt(mult)
    rows = _constraint_rows(params, grid, L, zonal) * np.sqrt(mult)[None, :]
    basis = linalg.null_space(rows)

    def fun(y: np.ndarray):
        field = base.with_coeffs(base.coeffs + inv_sqrt * (basis @ y))
        parts, grad = functional_gradient_coeffs(field, k_nodes, sigma, grid)
        return parts.value, basis.T @ (inv_sqrt * grad)

    y0 = np.zeros(basis.shape[1])
    start, _ = fun(y0)
    result = optimize.minimize(
        fun,
        y0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": max_iter, "gtol": gtol},
    )
    y = result.x
    level = float(result.fun)
    if not level <= start:
        y, level = y0, start
    vbar = base.with_coeffs(inv_sqrt * (basis @ y))
    diagnostics: Dict[str, Any] = {
        "converged": bool(result.success),
        "iterations": int(result.nit),
        "message": str(result.message),
        "level_start": start,
        "level": level,
        "complement_dimension": int(basis.shape[1]),
    }
    if not result.success:
        LOGGER.warning("v̄ descent did not converge: %s", result.message)
    return VbarResult(vbar, float(np.linalg.norm(y)), diagnostics)
