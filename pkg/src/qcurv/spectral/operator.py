"""
Conformal Fractional Operator
-----------------------------

:mod:`qcurv.spectral.operator`: The exact spectral action of the conformally covariant
operator P_σ on Sⁿ, its energy inner product, and the sharp Sobolev (Yamabe) quotient.

P_σ is diagonal on harmonics: degree-k harmonics are scaled by Γ(k+n/2+σ)/Γ(k+n/2-σ).
"""
from __future__ import annotations

import functools
import logging
import math
from typing import Optional, Union

import numpy as np
from cachetools import cached
from cachetools.keys import hashkey
from scipy import special

from .. import cache, errors, utils
from ..sphere.points import sphere_area
from ..sphere.quadrature import QuadratureGrid
from . import harmonics
from .fields import SpectralField, inverse_transform, working_grid

LOGGER = logging.getLogger(__name__)


def psigma_eigenvalue(
    n: int, sigma: float, k: Union[int, np.ndarray]
) -> Union[float, np.ndarray]:
    """
    Eigenvalue Γ(k+n/2+σ)/Γ(k+n/2-σ) of P_σ on degree-``k`` harmonics.

    Args:
        n: Dimension of the sphere.
        sigma: Order parameter, 0 < σ < n/2.
        k: Harmonic degree(s), nonnegative.

    Raises:
        ParameterDomainError: for σ outside (0, n/2) or negative degrees.

    .. code-block:: pycon

        >>> psigma_eigenvalue(3, 1.0, 2)  # (k + n/2)(k + n/2 - 1) at σ = 1
        8.75
    """
    sigma = utils.validate_sigma(n, sigma)
    k_arr = np.asarray(k)
    if np.any(k_arr < 0):
        raise errors.ParameterDomainError(f"harmonic degree must be >= 0, not {k}")
    vals = special.poch(k_arr + n / 2 - sigma, 2.0 * sigma)
    return float(vals) if np.ndim(vals) == 0 else vals


def conformal_constant(n: int, sigma: float) -> float:
    """c(n,σ) = Γ(n/2+σ)/Γ(n/2-σ), the action of P_σ on constants."""
    return psigma_eigenvalue(n, sigma, 0)


def beckner_constant(n: int, sigma: float) -> float:
    """
    Sharp constant S = ω_n^{2σ/n}·c(n,σ) of the fractional Sobolev quotient on Sⁿ,
    attained by constants and bubbles.
    """
    return sphere_area(n) ** (2.0 * sigma / n) * conformal_constant(n, sigma)


@cached(cache.LRU_CACHE, key=functools.partial(hashkey, "psigma_multipliers"))
def psigma_multipliers(n: int, L: int, zonal: bool, sigma: float) -> np.ndarray:
    """Eigenvalue attached to every coefficient of a field with (n, L, zonal)."""
    degrees = harmonics.harmonic_basis(n, L, zonal).degrees
    table = np.asarray(psigma_eigenvalue(n, sigma, np.arange(L + 1)), dtype=float)
    mult = table[degrees]
    mult.setflags(write=False)
    return mult


def _multipliers(u: SpectralField, sigma: float) -> np.ndarray:
    return psigma_multipliers(u.n, u.L, u.zonal, float(sigma))


def apply_psigma(u: SpectralField, sigma: float) -> SpectralField:
    return u.with_coeffs(_multipliers(u, sigma) * u.coeffs)


def hsigma_inner(u: SpectralField, v: SpectralField, sigma: float) -> float:
    """⟨u, v⟩ = ∫ v P_σ u dv."""
    u._check(v)
    return float(np.dot(_multipliers(u, sigma) * u.coeffs, v.coeffs))


def hsigma_norm(u: SpectralField, sigma: float) -> float:
    return math.sqrt(max(hsigma_inner(u, u, sigma), 0.0))


def yamabe_quotient(
    u: SpectralField, sigma: float, grid: Optional[QuadratureGrid] = None
) -> float:
    """
    ⟨u, P_σ u⟩ / (∫|u|^{2n/(n-2σ)})^{(n-2σ)/n}; scale invariant and bounded below by
    :func:`beckner_constant` up to truncation error.

    Raises:
        DegenerateInputError: for the zero field.
    """
    grid = grid or working_grid(u)
    q = utils.critical_exponent(u.n, sigma)
    energy = hsigma_inner(u, u, sigma)
    if energy <= 0.0:
        raise errors.DegenerateInputError("yamabe quotient of the zero field is undefined")
    samples = inverse_transform(u, grid)
    denom = grid.integrate(np.abs(samples) ** q)
    if denom <= 0.0:
        raise errors.DegenerateInputError("field vanishes at every quadrature node")
    return energy / denom ** (2.0 / q)
