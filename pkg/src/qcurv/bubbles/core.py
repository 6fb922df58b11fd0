"""
Bubbles
-------

:mod:`qcurv.bubbles.core`: The standard bubbles δ_{a,λ} solving P_σ δ = δ^{(n+2σ)/(n-2σ)}
on Sⁿ, their parameter derivatives, families of weighted bubbles, and the interaction
quantities ε_ij.

.. code-block:: pycon

    >>> from qcurv.sphere import north_pole, build_grid
    >>> grid = build_grid(3, 32, zonal=True)
    >>> vals = bubble_field(north_pole(3), 2.0, 3, 0.25, grid)
    >>> bool(vals.max() <= bubble_constant(3, 0.25) * 2.0 ** 1.25)
    True
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .. import constants, errors, utils
from ..sphere.points import SpherePoint, geodesic_distance, one_minus_cos, tangent_basis
from ..sphere.quadrature import QuadratureGrid
from ..spectral.fields import (
    SpectralField,
    forward_transform,
    inverse_transform,
    working_grid,
    zero_field,
)
from ..spectral.operator import apply_psigma, beckner_constant, conformal_constant

LOGGER = logging.getLogger(__name__)


def bubble_constant(n: int, sigma: float) -> float:
    """c̄ = c(n,σ)^{(n-2σ)/(4σ)}, which makes P_σ δ = δ^{(n+2σ)/(n-2σ)} hold exactly."""
    return conformal_constant(n, sigma) ** ((n - 2.0 * sigma) / (4.0 * sigma))


def bubble_energy(n: int, sigma: float) -> float:
    """E = S^{n/(2σ)} = ∫ δ P_σ δ = ∫ δ^{2n/(n-2σ)}, the same for every bubble."""
    return beckner_constant(n, sigma) ** (n / (2.0 * sigma))


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not lam >= 1.0 or not math.isfinite(lam):
        raise errors.ParameterDomainError(f"bubble concentration λ must be >= 1, not {lam}")
    return lam


def bubble_samples(
    a: SpherePoint, lam: float, n: int, sigma: float, coords: np.ndarray
) -> np.ndarray:
    """δ_{a,λ} at the rows of ``coords``."""
    lam = _check_lambda(lam)
    beta = (n - 2.0 * sigma) / 2.0
    denom = 1.0 + 0.5 * (lam * lam - 1.0) * one_minus_cos(coords, a.coords)
    return bubble_constant(n, sigma) * lam**beta * denom ** (-beta)


def bubble_derivatives(
    a: SpherePoint, lam: float, n: int, sigma: float, coords: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Parameter derivatives of δ_{a,λ} at the rows of ``coords``.

    Returns:
        (∂δ/∂λ of shape (N,), ∂δ/∂a along each tangent frame vector of shape (N, n),
        the tangent frame at ``a`` of shape (n+1, n))
    """
    lam = _check_lambda(lam)
    beta = (n - 2.0 * sigma) / 2.0
    amp = 0.5 * (lam * lam - 1.0)
    omc = one_minus_cos(coords, a.coords)
    denom = 1.0 + amp * omc
    delta = bubble_constant(n, sigma) * lam**beta * denom ** (-beta)
    d_lam = beta * delta * (1.0 / lam - lam * omc / denom)
    frame = tangent_basis(a)
    d_a = (beta * amp * delta / denom)[:, None] * (coords @ frame)
    return d_lam, d_a, frame


def _check_zonal_center(a: SpherePoint) -> None:
    if abs(abs(a.coords[-1]) - 1.0) > constants.UNIT_NORM_TOL:
        raise errors.ConfigurationError(
            f"zonal fields only host bubbles centered at a pole, not at {a!r}"
        )


def bubble_field(
    a: SpherePoint,
    lam: float,
    n: int,
    sigma: float,
    target: Union[QuadratureGrid, int],
    *,
    zonal: bool = True,
) -> Union[np.ndarray, SpectralField]:
    """
    Evaluate the bubble δ_{a,λ}(x) = c̄ λ^{(n-2σ)/2} / (1 + ((λ²-1)/2)(1 - cos d(x,a)))^{(n-2σ)/2}.

    Args:
        a: Center of the bubble.
        lam: Concentration parameter, λ ≥ 1 (λ = 1 gives the constant c̄).
        n: Dimension of the sphere.
        sigma: Order of the operator.
        target: A :class:`QuadratureGrid` (returns nodal samples) or a truncation
            degree L (returns a :class:`SpectralField` projected from the de-aliased grid).
        zonal: For an integer ``target``, whether to build a zonal field.

    Raises:
        ParameterDomainError: for λ < 1.
        ConfigurationError: for a zonal target with an off-axis center.
    """
    utils.validate_sigma(n, sigma)
    if isinstance(target, QuadratureGrid):
        if target.zonal:
            _check_zonal_center(a)
        return bubble_samples(a, lam, n, sigma, target.coords)
    L = int(target)
    if zonal:
        _check_zonal_center(a)
    grid = working_grid(zero_field(n, L, zonal))
    return forward_transform(bubble_samples(a, lam, n, sigma, grid.coords), grid, L)


def bubble_residual(
    lam: float, n: int, sigma: float, L: int, *, center: Optional[SpherePoint] = None, zonal: bool = True
) -> float:
    """
    Relative L² residual ‖P_σδ - δ^{(n+2σ)/(n-2σ)}‖ / ‖δ^{(n+2σ)/(n-2σ)}‖ of the bubble truncated
    at degree ``L``, measured pointwise on the de-aliased grid so that it decays with the
    harmonic tail of the bubble.
    """
    center = center if center is not None else SpherePoint.from_vector(np.eye(n + 1)[-1])
    u = bubble_field(center, lam, n, sigma, L, zonal=zonal)
    grid = working_grid(u)
    power = (n + 2.0 * sigma) / (n - 2.0 * sigma)
    rhs = bubble_samples(center, lam, n, sigma, grid.coords) ** power
    lhs = inverse_transform(apply_psigma(u, sigma), grid)
    return math.sqrt(grid.integrate((lhs - rhs) ** 2) / grid.integrate(rhs**2))


def epsilon_ij(
    a_i: SpherePoint, lambda_i: float, a_j: SpherePoint, lambda_j: float, n: int, sigma: float
) -> float:
    """
    Interaction ε_ij = (λ_i/λ_j + λ_j/λ_i + λ_i λ_j d(a_i, a_j)²)^{-(n-2σ)/2}.

    .. code-block:: pycon

        >>> from qcurv.sphere import north_pole
        >>> epsilon_ij(north_pole(3), 4.0, north_pole(3), 4.0, 3, 0.25) == 2 ** -1.25
        True
    """
    if lambda_i <= 0 or lambda_j <= 0:
        raise errors.ParameterDomainError("ε_ij needs positive concentrations")
    if math.isinf(lambda_i) or math.isinf(lambda_j):
        return 0.0
    d = geodesic_distance(a_i, a_j)
    base = lambda_i / lambda_j + lambda_j / lambda_i + lambda_i * lambda_j * d * d
    return base ** (-(n - 2.0 * sigma) / 2.0)


class BubbleEntry(NamedTuple):
    alpha: float
    center: SpherePoint
    lam: float


@dataclass(frozen=True)
class BubbleParams:
    """
    A finite family {(α_i, a_i, λ_i)} describing Σ α_i δ_{a_i,λ_i} on Sⁿ.

    λ_i = ``math.inf`` is accepted as the formal limit used by level expansions; such
    entries cannot be turned into fields.

    Raises:
        ParameterDomainError: for α ≤ 0 or λ < 1.
    """

    entries: Tuple[BubbleEntry, ...]
    n: int
    sigma: float

    def __post_init__(self):
        entries = tuple(BubbleEntry(float(al), c, float(lm)) for al, c, lm in self.entries)
        for entry in entries:
            if not entry.alpha > 0:
                raise errors.ParameterDomainError(f"bubble weights must be > 0, not {entry.alpha}")
            if not entry.lam >= 1.0:
                raise errors.ParameterDomainError(f"bubble λ must be >= 1, not {entry.lam}")
            if entry.center.n != self.n:
                raise errors.ConfigurationError(f"center {entry.center!r} is not on S^{self.n}")
        object.__setattr__(self, "entries", entries)
        utils.validate_sigma(self.n, self.sigma)

    @classmethod
    def from_arrays(
        cls,
        alphas: Sequence[float],
        centers: Sequence[SpherePoint],
        lambdas: Sequence[float],
        n: int,
        sigma: float,
    ) -> "BubbleParams":
        return cls(tuple(BubbleEntry(*e) for e in zip(alphas, centers, lambdas)), n, sigma)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[BubbleEntry]:
        return iter(self.entries)

    @property
    def alphas(self) -> np.ndarray:
        return np.array([e.alpha for e in self.entries])

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([e.lam for e in self.entries])

    @property
    def centers(self) -> List[SpherePoint]:
        return [e.center for e in self.entries]

    def epsilons(self) -> dict:
        """ε_ij for every unordered pair i < j."""
        return {
            (i, j): epsilon_ij(ei.center, ei.lam, ej.center, ej.lam, self.n, self.sigma)
            for (i, ei), (j, ej) in itertools.combinations(enumerate(self.entries), 2)
        }

    def samples(self, coords: np.ndarray) -> np.ndarray:
        out = np.zeros(np.atleast_2d(coords).shape[0])
        for entry in self.entries:
            out += entry.alpha * bubble_samples(entry.center, entry.lam, self.n, self.sigma, coords)
        return out

    def field(self, L: int, zonal: bool = True) -> SpectralField:
        """Σ α_i δ_i as a field truncated at ``L``."""
        if zonal:
            for entry in self.entries:
                _check_zonal_center(entry.center)
        grid = working_grid(zero_field(self.n, L, zonal))
        return forward_transform(self.samples(grid.coords), grid, L)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "sigma": self.sigma,
            "entries": [
                {"alpha": e.alpha, "center": e.center.coords.tolist(), "lambda": e.lam}
                for e in self.entries
            ],
        }
