"""
Points of the Sphere
--------------------

:mod:`qcurv.sphere.points`: Points of Sⁿ as unit vectors of ℝⁿ⁺¹, geodesic distance,
stereographic coordinates, and the tangent-space helpers used by Newton and Gauss-Newton
iterations.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg, special

from .. import constants, errors

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """
    A point of Sⁿ, stored as its embedded unit vector ``coords`` of length n+1.

    .. code-block:: pycon

        >>> x = SpherePoint([0.0, 0.0, 0.0, 1.0])
        >>> x.n
        3
        >>> SpherePoint.from_vector([3.0, 0.0, 4.0]).coords
        array([0.6, 0. , 0.8])

    Raises:
        InvariantViolationError: if ``coords`` is not a unit vector within 1e-12.
    """

    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float).reshape(-1)
        if coords.size < 2 or not np.all(np.isfinite(coords)):
            raise errors.InvariantViolationError(
                f"sphere point needs >= 2 finite coordinates, not {coords}"
            )
        norm = np.linalg.norm(coords)
        if abs(norm - 1.0) > constants.UNIT_NORM_TOL:
            raise errors.InvariantViolationError(
                f"sphere point coords must have unit norm; |coords| = {norm!r}"
            )
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_vector(cls, vec: Sequence[float] | np.ndarray) -> "SpherePoint":
        """Normalize a nonzero vector onto the sphere."""
        vec = np.asarray(vec, dtype=float).reshape(-1)
        norm = np.linalg.norm(vec)
        if norm == 0.0 or not math.isfinite(norm):
            raise errors.InvariantViolationError("cannot normalize a zero vector")
        return cls(vec / norm)

    @property
    def n(self) -> int:
        return self.coords.size - 1

    def __neg__(self) -> "SpherePoint":
        return SpherePoint(-self.coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpherePoint):
            return NotImplemented
        return bool(np.array_equal(self.coords, other.coords))

    def __hash__(self) -> int:
        return hash(self.coords.tobytes())

    def __repr__(self) -> str:
        return f"SpherePoint({np.array2string(self.coords, precision=6)})"


def north_pole(n: int) -> SpherePoint:
    coords = np.zeros(n + 1)
    coords[-1] = 1.0
    return SpherePoint(coords)


def south_pole(n: int) -> SpherePoint:
    coords = np.zeros(n + 1)
    coords[-1] = -1.0
    return SpherePoint(coords)


def sphere_area(n: int) -> float:
    """ω_n = 2π^{(n+1)/2} / Γ((n+1)/2), the area of Sⁿ."""
    return float(2.0 * math.pi ** ((n + 1) / 2) / special.gamma((n + 1) / 2))


def _check_unit(coords: np.ndarray) -> None:
    norms = np.linalg.norm(np.atleast_2d(coords), axis=-1)
    if np.any(np.abs(norms - 1.0) > constants.UNIT_NORM_TOL):
        raise errors.InvariantViolationError(
            f"points must have unit norm; got norms {norms}"
        )


def geodesic_distance(x: SpherePoint | np.ndarray, y: SpherePoint | np.ndarray) -> float:
    """
    Great-circle distance between two points of Sⁿ, in [0, π].

    Raises:
        InvariantViolationError: for non-unit inputs.
    """
    xc = x.coords if isinstance(x, SpherePoint) else np.asarray(x, dtype=float)
    yc = y.coords if isinstance(y, SpherePoint) else np.asarray(y, dtype=float)
    _check_unit(xc)
    _check_unit(yc)
    return float(np.arccos(np.clip(np.dot(xc, yc), -1.0, 1.0)))


def pairwise_distances(coords: np.ndarray, point: np.ndarray) -> np.ndarray:
    """Geodesic distances from every row of ``coords`` to ``point``."""
    return np.arccos(np.clip(coords @ point, -1.0, 1.0))


def one_minus_cos(coords: np.ndarray, point: np.ndarray) -> np.ndarray:
    """1 - cos d(x, a) in the cancellation-free form |x - a|²/2."""
    diff = coords - point
    return 0.5 * np.einsum("ij,ij->i", diff, diff)


def stereographic_inverse(x: Sequence[float] | np.ndarray) -> SpherePoint:
    """
    Map x ∈ ℝⁿ to (2x/(1+|x|²), (|x|²-1)/(1+|x|²)) on Sⁿ; the south pole is the image of 0.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    r2 = float(np.dot(x, x))
    denom = 1.0 + r2
    coords = np.empty(x.size + 1)
    coords[:-1] = 2.0 * x / denom
    # (r²-1)/(r²+1) written as 1 - 2/(1+r²) never reaches 1 for finite x
    coords[-1] = 1.0 - 2.0 / denom
    return SpherePoint.from_vector(coords)


def jacobian_density(x: Sequence[float] | np.ndarray) -> float:
    """Jacobian density (2/(1+|x|²))ⁿ of the inverse stereographic map."""
    x = np.asarray(x, dtype=float).reshape(-1)
    return float((2.0 / (1.0 + np.dot(x, x))) ** x.size)


def stereographic_projection(point: SpherePoint) -> np.ndarray:
    """
    Map a point of Sⁿ other than the north pole back to ℝⁿ.

    Raises:
        DomainError: at the north pole itself.
    """
    coords = point.coords
    denom = 1.0 - coords[-1]
    if denom <= 0.0:
        raise errors.DomainError("stereographic projection is undefined at the north pole")
    return coords[:-1] / denom


def tangent_basis(point: SpherePoint | np.ndarray) -> np.ndarray:
    """Orthonormal basis of the tangent space at ``point``, as an (n+1, n) array."""
    coords = point.coords if isinstance(point, SpherePoint) else np.asarray(point)
    return linalg.null_space(coords.reshape(1, -1))


def exp_map(point: SpherePoint | np.ndarray, v: np.ndarray) -> np.ndarray:
    """Exponential map of the round sphere at ``point`` applied to tangent vector ``v``."""
    coords = point.coords if isinstance(point, SpherePoint) else np.asarray(point)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return coords.copy()
    out = math.cos(norm) * coords + math.sin(norm) * v / norm
    return out / np.linalg.norm(out)
