"""
Quadrature Grids
----------------

:mod:`qcurv.sphere.quadrature`: Tensor-product Gauss rules on Sⁿ that host every integral
∫ · dv computed by the package.

Polar directions use Gauss rules in t = cos θ whose weight function is the polar part of
the round measure, (1 - t²)^{(d-2)/2} on S^d, so that the measure is integrated exactly; when
that weight is constant the rule is Gauss-Legendre. Azimuths are uniform. Zonal grids keep
only the polar rule, with the area of S^{n-1} folded into the weights.
"""
from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import List

import numpy as np
from cachetools import cached
from cachetools.keys import hashkey
from scipy import special

from .. import cache, errors, utils
from .points import SpherePoint, sphere_area

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """
    Nodes and positive weights on Sⁿ, exact for products of harmonics of total degree
    up to ``2 * degree``.

    Attributes:
        n: Dimension of the sphere.
        degree: Largest harmonic degree L whose products the grid integrates exactly.
        zonal: If True, nodes lie on one meridian and only integrate functions of the
            polar angle measured from the north pole.
        coords: Embedded node coordinates, shape (N, n+1).
        weights: Quadrature weights, shape (N,), summing to ω_n.
    """

    n: int
    degree: int
    zonal: bool
    coords: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        for arr in (self.coords, self.weights):
            arr.setflags(write=False)

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def nodes(self) -> List[SpherePoint]:
        return [SpherePoint(row) for row in self.coords]

    @property
    def polar(self) -> np.ndarray:
        """cos of the polar angle of every node, i.e. the last coordinate."""
        return self.coords[:, -1]

    def integrate(self, samples: np.ndarray) -> float:
        """Quadrature of nodal ``samples`` against the round measure."""
        return float(np.dot(self.weights, samples))

    def __repr__(self) -> str:
        return (
            f"QuadratureGrid(n={self.n}, degree={self.degree}, "
            f"zonal={self.zonal}, size={self.size})"
        )


def _polar_rule(num: int, dim: int):
    """Gauss rule in t = cos θ for the polar weight (1 - t²)^{(dim-2)/2} of S^dim."""
    alpha = (dim - 1) / 2
    if dim == 2:
        return special.roots_legendre(num)
    return special.roots_gegenbauer(num, alpha)


@cached(cache.LRU_CACHE, key=functools.partial(hashkey, "grid"))
def build_grid(n: int, degree: int, zonal: bool) -> QuadratureGrid:
    """
    Build a quadrature grid on Sⁿ exact for products of harmonics up to total degree
    ``2 * degree``.

    Args:
        n: Dimension of the sphere, at least 2.
        degree: Harmonic degree L the grid must serve, at least 1.
        zonal: If True, build a one-dimensional polar rule (any n); otherwise a full
            tensor-product grid (n = 2 or 3 only).

    Returns:
        :class:`QuadratureGrid`

    Raises:
        UnsupportedDimensionError: for full grids with n > 3.
        ParameterDomainError: for n < 2 or degree < 1.
    """
    n = utils.validate_dimension(n)
    degree = int(degree)
    if degree < 1:
        raise errors.ParameterDomainError(f"`degree` value = {degree} is invalid; need >= 1")
    if zonal:
        grid = _zonal_grid(n, degree)
    elif n == 2:
        grid = _full_grid_s2(degree)
    elif n == 3:
        grid = _full_grid_s3(degree)
    else:
        raise errors.UnsupportedDimensionError(
            f"full quadrature grids are available for n in {{2, 3}}, not n = {n}; "
            "use a zonal grid (zonal=True) for higher dimensions"
        )
    LOGGER.debug("built %s", grid)
    return grid


def _zonal_grid(n: int, degree: int) -> QuadratureGrid:
    num = 2 * degree + 1
    t, w = _polar_rule(num, n)
    coords = np.zeros((num, n + 1))
    coords[:, 0] = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    coords[:, -1] = t
    weights = sphere_area(n - 1) * w
    return QuadratureGrid(n, degree, True, coords, np.asarray(weights, dtype=float))


def _azimuths(degree: int):
    num = 2 * degree + 2
    phi = 2.0 * math.pi * np.arange(num) / num
    return phi, np.full(num, 2.0 * math.pi / num)


def _full_grid_s2(degree: int) -> QuadratureGrid:
    t, wt = _polar_rule(degree + 1, 2)
    phi, wphi = _azimuths(degree)
    tt, pp = np.meshgrid(t, phi, indexing="ij")
    s = np.sqrt(np.clip(1.0 - tt * tt, 0.0, None))
    coords = np.stack([s * np.cos(pp), s * np.sin(pp), tt], axis=-1).reshape(-1, 3)
    weights = np.outer(wt, wphi).reshape(-1)
    return QuadratureGrid(2, degree, False, coords, weights)


def _full_grid_s3(degree: int) -> QuadratureGrid:
    t1, w1 = _polar_rule(degree + 1, 3)
    t2, w2 = _polar_rule(degree + 1, 2)
    phi, wphi = _azimuths(degree)
    a, b, c = np.meshgrid(t1, t2, phi, indexing="ij")
    s1 = np.sqrt(np.clip(1.0 - a * a, 0.0, None))
    s2 = np.sqrt(np.clip(1.0 - b * b, 0.0, None))
    coords = np.stack(
        [s1 * s2 * np.cos(c), s1 * s2 * np.sin(c), s1 * b, a], axis=-1
    ).reshape(-1, 4)
    weights = (w1[:, None, None] * w2[None, :, None] * wphi[None, None, :]).reshape(-1)
    return QuadratureGrid(3, degree, False, coords, weights)
