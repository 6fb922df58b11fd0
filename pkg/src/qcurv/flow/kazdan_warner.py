"""
:mod:`qcurv.flow.kazdan_warner`: The Kazdan-Warner integrals ∫ ⟨∇K, ∇ξ_j⟩ u₊^{2n/(n-2σ)},
which vanish at every solution of the prescribed curvature equation.
"""
from __future__ import annotations

import logging
from typing import NamedTuple, Optional, Union

import numpy as np

from .. import errors, kfuncs, types, utils
from ..sphere.quadrature import QuadratureGrid
from ..spectral.fields import SpectralField, inverse_transform, working_grid

LOGGER = logging.getLogger(__name__)


class KazdanWarnerValue(NamedTuple):
    raw: float
    normalized: float


def kazdan_warner_integral(
    u: SpectralField,
    K: Union[types.KLike, SpectralField],
    sigma: float,
    j: int,
    grid: Optional[QuadratureGrid] = None,
) -> KazdanWarnerValue:
    """
    ∫ ⟨∇K, ∇ξ_j⟩ u₊^{2n/(n-2σ)} for the coordinate function ξ_j, 1 ≤ j ≤ n+1, raw and
    divided by ∫ u₊^{2n/(n-2σ)} · max|∇K| (0 when ∇K vanishes identically).

    On zonal grids K must itself be zonal; the integrals for j ≤ n then vanish by symmetry
    and are returned as exact zeros.

    Raises:
        ParameterDomainError: for j outside 1..n+1.
        ConfigurationError: for a K that is not zonal on a zonal grid.
    """
    n = u.n
    if not 1 <= j <= n + 1:
        raise errors.ParameterDomainError(errors.range_invalid_msg("j", j, (1, n + 1)))
    grid = grid or working_grid(u)
    kf = kfuncs.as_k_function(K, n)
    _ = kfuncs.grid_values(kf, grid)
    if grid.zonal and j <= n:
        return KazdanWarnerValue(0.0, 0.0)
    q = utils.critical_exponent(n, sigma)
    grad = kfuncs.riemannian_gradient(kf, grid.coords)
    # grad is tangent, so ⟨∇K, e_j - ξ_j x⟩ reduces to its j-th component
    power = np.maximum(inverse_transform(u, grid), 0.0) ** q
    raw = grid.integrate(grad[:, j - 1] * power)
    scale = float(np.max(np.linalg.norm(grad, axis=1))) * grid.integrate(power)
    return KazdanWarnerValue(raw, raw / scale if scale > 0.0 else 0.0)
