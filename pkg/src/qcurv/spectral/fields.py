"""
Spectral Fields
---------------

:mod:`qcurv.spectral.fields`: Functions on Sⁿ stored as coefficients over the orthonormal
harmonic basis, and the forward/inverse transforms between coefficients and grid samples.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .. import constants, errors
from ..sphere.quadrature import QuadratureGrid, build_grid
from . import harmonics

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """
    A function on Sⁿ truncated at harmonic degree ``L``.

    Coefficients follow the ordering of :func:`qcurv.spectral.harmonics.solid_harmonics`:
    ascending degree, and inside a degree the recursive (inner degree, inner index) order.
    Zonal fields carry one coefficient per degree.

    .. code-block:: pycon

        >>> u = constant_field(3, 8, True, 1.0)
        >>> u.coeffs[:3]
        array([4.44288294, 0.        , 0.        ])
        >>> (2.0 * u).coeffs[0] == 2.0 * u.coeffs[0]
        True

    Raises:
        InvariantViolationError: for a coefficient count that does not match (n, L, zonal)
            or non-finite coefficients.
    """

    n: int
    L: int
    zonal: bool
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float).reshape(-1)
        expected = harmonics.harmonic_dimension(self.n, self.L, self.zonal)
        if coeffs.size != expected:
            raise errors.InvariantViolationError(
                f"field with (n={self.n}, L={self.L}, zonal={self.zonal}) needs "
                f"{expected} coefficients, not {coeffs.size}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise errors.InvariantViolationError("field coefficients must all be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degrees(self) -> np.ndarray:
        return harmonics.harmonic_basis(self.n, self.L, self.zonal).degrees

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(self.n, self.L, self.zonal, coeffs)

    def is_compatible(self, other: "SpectralField") -> bool:
        return (self.n, self.L, self.zonal) == (other.n, other.L, other.zonal)

    def _check(self, other: "SpectralField") -> None:
        if not self.is_compatible(other):
            raise errors.ConfigurationError(
                f"fields disagree: (n, L, zonal) = {(self.n, self.L, self.zonal)} "
                f"vs {(other.n, other.L, other.zonal)}"
            )

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return self.with_coeffs(float(scalar) * self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "SpectralField":
        return self.with_coeffs(self.coeffs / float(scalar))

    def __neg__(self) -> "SpectralField":
        return self.with_coeffs(-self.coeffs)

    def __repr__(self) -> str:
        return f"SpectralField(n={self.n}, L={self.L}, zonal={self.zonal})"


def zero_field(n: int, L: int, zonal: bool) -> SpectralField:
    return SpectralField(n, L, zonal, np.zeros(harmonics.harmonic_dimension(n, L, zonal)))


def constant_field(n: int, L: int, zonal: bool, value: float = 1.0) -> SpectralField:
    """The constant function ``value``, whose only coefficient is value·√ω_n."""
    coeffs = np.zeros(harmonics.harmonic_dimension(n, L, zonal))
    coeffs[0] = value * harmonics.harmonic_basis(n, L, zonal).norms[0]
    return SpectralField(n, L, zonal, coeffs)


def working_grid(
    u: SpectralField, oversample: int = constants.DEFAULT_OVERSAMPLE
) -> QuadratureGrid:
    """Grid on which nonlinear expressions of ``u`` are evaluated (de-aliased)."""
    return build_grid(u.n, oversample * max(u.L, 1), u.zonal)


def forward_transform(
    samples: np.ndarray, grid: QuadratureGrid, L: Optional[int] = None
) -> SpectralField:
    """
    Project nodal ``samples`` onto harmonics of degree ≤ ``L`` (default: the grid degree).

    Raises:
        ConfigurationError: if ``L`` exceeds the grid degree or sample count mismatches.
    """
    L = grid.degree if L is None else int(L)
    samples = np.asarray(samples, dtype=float).reshape(-1)
    if samples.size != grid.size:
        raise errors.ConfigurationError(
            f"got {samples.size} samples for a grid of {grid.size} nodes"
        )
    mat = harmonics.basis_matrix(grid, L)
    return SpectralField(grid.n, L, grid.zonal, mat.T @ (grid.weights * samples))


# pointwise values projected back to a truncation; same operation, named for its role
project_pointwise = forward_transform


def inverse_transform(u: SpectralField, grid: QuadratureGrid) -> np.ndarray:
    """
    Evaluate ``u`` at the nodes of ``grid``.

    Raises:
        ConfigurationError: on dimension / zonal mismatch or a grid too coarse for ``u``.
    """
    if grid.n != u.n or grid.zonal != u.zonal:
        raise errors.ConfigurationError(
            f"grid (n={grid.n}, zonal={grid.zonal}) does not match {u!r}"
        )
    return harmonics.basis_matrix(grid, u.L) @ u.coeffs


def evaluate_field(u: SpectralField, coords: np.ndarray) -> np.ndarray:
    """
    Evaluate ``u`` at arbitrary embedded points (N, n+1). Zonal fields are functions of
    the last coordinate only.
    """
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    if coords.shape[1] != u.n + 1:
        raise errors.ConfigurationError(
            f"points in R^{coords.shape[1]} cannot be evaluated by a field on S^{u.n}"
        )
    basis = harmonics.harmonic_basis(u.n, u.L, u.zonal)
    return basis.evaluate(coords) @ u.coeffs


def truncate(u: SpectralField, L: int) -> SpectralField:
    """Restrict or zero-pad ``u`` to truncation ``L``."""
    size = harmonics.harmonic_dimension(u.n, L, u.zonal)
    coeffs = np.zeros(size)
    keep = min(size, u.coeffs.size)
    coeffs[:keep] = u.coeffs[:keep]
    return SpectralField(u.n, L, u.zonal, coeffs)


def l2_inner(u: SpectralField, v: SpectralField) -> float:
    u._check(v)
    return float(np.dot(u.coeffs, v.coeffs))


FieldOrSamples = Union[SpectralField, np.ndarray]
