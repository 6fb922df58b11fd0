"""
Hyperspherical Harmonics
------------------------

:mod:`qcurv.spectral.harmonics`: Real orthonormal bases of harmonics of degree ≤ L on Sⁿ.

Bases are built recursively from solid harmonics: a degree-k solid harmonic of ℝ^{d+1} is
G_{k-l}^{a}(x_{d+1}, |x|)·H_l(x_1..x_d) with H_l a degree-l solid harmonic of ℝ^d,
a = l + (d-1)/2, and G the homogeneous Gegenbauer polynomial |x|^j C_j^a(x_{d+1}/|x|).
Gegenbauer polynomials are evaluated with a three-term recurrence scaled so that
C_j^a(1) = 1, which keeps high degrees and large dimensions in floating-point range.
The zonal basis is the l = 0 family at the top level.

Normalization is numerical: raw functions are divided by their quadrature norms on a grid
that integrates their squares exactly.
"""
from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from cachetools import cached
from cachetools.keys import hashkey

from .. import cache, errors
from ..sphere.quadrature import QuadratureGrid, build_grid

LOGGER = logging.getLogger(__name__)


def harmonic_dimension(n: int, L: int, zonal: bool) -> int:
    """Number of basis functions of degree ≤ ``L`` on Sⁿ (one per degree if zonal)."""
    if zonal:
        return L + 1
    return math.comb(L + n, n) + math.comb(L + n - 1, n)


def scaled_gegenbauer(jmax: int, a: float, z: np.ndarray, r2: np.ndarray) -> List[np.ndarray]:
    """
    Homogeneous Gegenbauer polynomials |x|^j C_j^a(z/|x|) / C_j^a(1) for j = 0..jmax,
    with ``r2`` = |x|².
    """
    out = [np.ones_like(z)]
    if jmax >= 1:
        out.append(z.copy())
    for j in range(1, jmax):
        out.append((2.0 * (j + a) * z * out[j] - j * r2 * out[j - 1]) / (j + 2.0 * a))
    return out


def _solid_plane(X: np.ndarray, L: int) -> Tuple[np.ndarray, np.ndarray]:
    w = X[:, 0] + 1j * X[:, 1]
    cols = [np.ones(X.shape[0])]
    degs = [0]
    power = np.ones_like(w)
    for m in range(1, L + 1):
        power = power * w
        cols.extend([power.real.copy(), power.imag.copy()])
        degs.extend([m, m])
    return np.stack(cols, axis=1), np.asarray(degs)


def solid_harmonics(X: np.ndarray, L: int, zonal: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """
    Raw (unnormalized) solid harmonics of degree ≤ ``L`` evaluated at the rows of ``X``.

    Columns are ordered by degree, then by the degree of the inner factor, then by the
    inner ordering, recursively.

    Returns:
        (values of shape (N, M), degree of every column)
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    dim = X.shape[1]
    if dim < 2:
        raise errors.UnsupportedDimensionError("solid harmonics need at least 2 coordinates")
    if dim == 2 and not zonal:
        return _solid_plane(X, L)
    z = X[:, -1]
    r2 = np.einsum("ij,ij->i", X, X)
    if zonal:
        gegen = scaled_gegenbauer(L, (dim - 2) / 2, z, r2)
        return np.stack(gegen, axis=1), np.arange(L + 1)
    inner, inner_degs = solid_harmonics(X[:, :-1], L)
    by_l = {}
    for l in range(L + 1):
        by_l[l] = (
            scaled_gegenbauer(L - l, l + (dim - 2) / 2, z, r2),
            inner[:, inner_degs == l],
        )
    cols = []
    degs = []
    for k in range(L + 1):
        for l in range(k + 1):
            gegen, block = by_l[l]
            cols.append(gegen[k - l][:, None] * block)
            degs.extend([k] * block.shape[1])
    return np.concatenate(cols, axis=1), np.asarray(degs)


@dataclass(frozen=True, eq=False)
class HarmonicBasis:
    """
    Degree labels and numerical normalization of the basis of degree ≤ L on Sⁿ.

    Attributes:
        n: Dimension of the sphere.
        L: Truncation degree.
        zonal: Whether the basis holds zonal functions only.
        degrees: Degree k of every basis function.
        norms: Quadrature norms of the raw basis functions.
    """

    n: int
    L: int
    zonal: bool
    degrees: np.ndarray
    norms: np.ndarray

    @property
    def size(self) -> int:
        return self.degrees.size

    def evaluate(self, coords: np.ndarray) -> np.ndarray:
        """Orthonormal basis functions at arbitrary embedded points, shape (N, M)."""
        raw, _ = solid_harmonics(coords, self.L, self.zonal)
        return raw / self.norms


@cached(cache.LRU_CACHE, key=functools.partial(hashkey, "harmonic_basis"))
def harmonic_basis(n: int, L: int, zonal: bool) -> HarmonicBasis:
    """
    Build (and cache) the normalized harmonic basis of degree ≤ ``L`` on Sⁿ.

    Raises:
        UnsupportedDimensionError: for full bases with n > 3, which have no grid.
    """
    grid = build_grid(n, max(L, 1), zonal)
    raw, degrees = solid_harmonics(grid.coords, L, zonal)
    norms = np.sqrt(grid.weights @ (raw * raw))
    if raw.shape[1] != harmonic_dimension(n, L, zonal):
        raise errors.InvariantViolationError(
            f"basis construction produced {raw.shape[1]} functions, "
            f"expected {harmonic_dimension(n, L, zonal)}"
        )
    for arr in (degrees, norms):
        arr.setflags(write=False)
    return HarmonicBasis(n, L, zonal, degrees, norms)


@cached(
    cache.LRU_CACHE,
    key=lambda grid, L: hashkey("basis_matrix", grid.n, grid.degree, grid.zonal, L),
)
def basis_matrix(grid: QuadratureGrid, L: int) -> np.ndarray:
    """
    Orthonormal basis of degree ≤ ``L`` sampled at the nodes of ``grid``, shape (N, M).

    Raises:
        ConfigurationError: if the grid cannot resolve degree ``L``.
    """
    if grid.degree < L:
        raise errors.ConfigurationError(
            f"grid built for degree {grid.degree} cannot host truncation L = {L}"
        )
    basis = harmonic_basis(grid.n, L, grid.zonal)
    mat = basis.evaluate(grid.coords)
    mat.setflags(write=False)
    return mat
