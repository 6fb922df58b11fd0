"""
Prescribed Functions K
----------------------

:mod:`qcurv.kfuncs`: The prescribed curvature function K on Sⁿ, its intrinsic derivatives,
and a registry of builtin families.

Analytic families provide the gradient and Hessian of an extension F of K to ℝⁿ⁺¹; intrinsic
quantities follow from the embedding:

- grad K = P ∇F, with P = I - x xᵀ the tangent projector;
- Hess K = Pᵀ ∇²F P - (x·∇F) P on the tangent space;
- Δ K = tr ∇²F - xᵀ ∇²F x - n (x·∇F).

Functions without analytic derivatives (spectral fields, plain callables) are
differentiated along geodesics by central differences.
"""
from __future__ import annotations

import logging
import math
from typing import Callable, Optional, Sequence, Tuple, Union

import catalogue
import numpy as np

from . import constants, errors, types, utils
from .sphere.points import exp_map, tangent_basis
from .sphere.quadrature import QuadratureGrid
from .spectral.fields import SpectralField, evaluate_field

LOGGER = logging.getLogger(__name__)

k_families = catalogue.create("qcurv", "k_families", entry_points=True)


class KFunction:
    """
    Base class for prescribed functions on Sⁿ. Subclasses set ``analytic = True`` and
    implement :meth:`ambient_gradient` / :meth:`ambient_hessian` when they can.
    """

    analytic: bool = False

    def __init__(self, n: int):
        self.n = utils.validate_dimension(n)

    def __call__(self, coords: types.Coords) -> types.Samples:
        raise NotImplementedError

    def ambient_gradient(self, coords: types.Coords) -> np.ndarray:
        raise NotImplementedError

    def ambient_hessian(self, coords: types.Coords) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"family": type(self).__name__}


class ConstantK(KFunction):
    analytic = True

    def __init__(self, n: int, value: float = 1.0):
        super().__init__(n)
        if value <= 0:
            raise errors.InvalidKError(f"K must be positive, not the constant {value}")
        self.value = float(value)

    def __call__(self, coords):
        return np.full(np.atleast_2d(coords).shape[0], self.value)

    def ambient_gradient(self, coords):
        return np.zeros_like(np.atleast_2d(coords), dtype=float)

    def ambient_hessian(self, coords):
        coords = np.atleast_2d(coords)
        return np.zeros((coords.shape[0], self.n + 1, self.n + 1))

    def describe(self):
        return {"family": "constant", "value": self.value}


class LinearK(KFunction):
    """K(ξ) = a + b·ξ_j with 1 ≤ j ≤ n+1."""

    analytic = True

    def __init__(self, n: int, a: float = 2.0, b: float = 1.0, j: Optional[int] = None):
        super().__init__(n)
        self.a = float(a)
        self.b = float(b)
        self.j = n + 1 if j is None else int(j)
        if not 1 <= self.j <= n + 1:
            raise errors.ParameterDomainError(f"coordinate index j = {j} not in [1, {n + 1}]")
        if self.a - abs(self.b) <= 0:
            raise errors.InvalidKError(
                f"a + b·ξ_j takes nonpositive values for a = {a}, b = {b}"
            )

    def __call__(self, coords):
        coords = np.atleast_2d(coords)
        return self.a + self.b * coords[:, self.j - 1]

    def ambient_gradient(self, coords):
        grad = np.zeros_like(np.atleast_2d(coords), dtype=float)
        grad[:, self.j - 1] = self.b
        return grad

    def ambient_hessian(self, coords):
        coords = np.atleast_2d(coords)
        return np.zeros((coords.shape[0], self.n + 1, self.n + 1))

    def describe(self):
        return {"family": "linear", "a": self.a, "b": self.b, "j": self.j}


class QuadraticK(KFunction):
    """
    K(ξ) = base + ε·(Σ_i A_i ξ_i² - mean) for a diagonal form A. On the sphere its critical
    points are ±e_i; they are nondegenerate exactly when the A_i are pairwise distinct.
    """

    analytic = True

    def __init__(
        self,
        n: int,
        diag: Sequence[float],
        epsilon: float,
        base: float = 1.0,
        shift: Optional[float] = None,
    ):
        super().__init__(n)
        self.diag = np.asarray(diag, dtype=float)
        if self.diag.size != n + 1:
            raise errors.ParameterDomainError(
                f"quadratic form needs {n + 1} diagonal entries, not {self.diag.size}"
            )
        self.epsilon = float(epsilon)
        self.base = float(base)
        # the sphere average of ξ_i² is 1/(n+1)
        self.shift = float(self.diag.sum() / (n + 1)) if shift is None else float(shift)
        lo = self.base + self.epsilon * (
            (self.diag.min() if self.epsilon > 0 else self.diag.max()) - self.shift
        )
        if lo <= 0:
            raise errors.InvalidKError(f"quadratic K reaches nonpositive value {lo}")

    def __call__(self, coords):
        coords = np.atleast_2d(coords)
        return self.base + self.epsilon * ((coords * coords) @ self.diag - self.shift)

    def ambient_gradient(self, coords):
        return 2.0 * self.epsilon * np.atleast_2d(coords) * self.diag

    def ambient_hessian(self, coords):
        coords = np.atleast_2d(coords)
        hess = np.diag(2.0 * self.epsilon * self.diag)
        return np.broadcast_to(hess, (coords.shape[0], self.n + 1, self.n + 1)).copy()

    def describe(self):
        return {
            "family": "quadratic",
            "diag": self.diag.tolist(),
            "epsilon": self.epsilon,
            "base": self.base,
            "shift": self.shift,
        }


class FieldK(KFunction):
    """K given by a finite harmonic series."""

    def __init__(self, field: SpectralField):
        super().__init__(field.n)
        self.field = field

    def __call__(self, coords):
        return evaluate_field(self.field, coords)

    def describe(self):
        return {"family": "harmonic", "L": self.field.L, "zonal": self.field.zonal}


class CallableK(KFunction):
    def __init__(self, n: int, func: Callable[[np.ndarray], np.ndarray]):
        super().__init__(n)
        self.func = func

    def __call__(self, coords):
        return np.asarray(self.func(np.atleast_2d(coords)), dtype=float).reshape(-1)


def as_k_function(K: Union[types.KLike, SpectralField], n: int) -> KFunction:
    """
    Coerce a constant, :class:`SpectralField`, :class:`KFunction` or plain callable of
    embedded coordinates into a :class:`KFunction` on Sⁿ.
    """
    if isinstance(K, KFunction):
        if K.n != n:
            raise errors.ConfigurationError(f"K lives on S^{K.n}, not S^{n}")
        return K
    if isinstance(K, SpectralField):
        if K.n != n:
            raise errors.ConfigurationError(f"K lives on S^{K.n}, not S^{n}")
        return FieldK(K)
    if isinstance(K, (int, float)) and not isinstance(K, bool):
        return ConstantK(n, float(K))
    if callable(K):
        return CallableK(n, K)
    raise TypeError(errors.type_invalid_msg("K", type(K), Union[float, KFunction, SpectralField]))


def positive_values(K: KFunction, coords: np.ndarray) -> np.ndarray:
    """
    Values of K at ``coords``.

    Raises:
        InvalidKError: if K ≤ 0 at any point.
    """
    vals = K(coords)
    if np.any(vals <= 0.0) or not np.all(np.isfinite(vals)):
        raise errors.InvalidKError(
            f"K must be positive at every quadrature node; min value = {np.min(vals)}"
        )
    return vals


def is_zonal(K: KFunction) -> bool:
    """
    Whether K depends on ξ_{n+1} alone, i.e. is invariant under rotations fixing the poles.

    Families that know their symmetry answer directly; anything else is sampled on
    circles of latitude and must agree with itself to ``constants.ZONAL_K_TOL``.
    """
    if isinstance(K, ConstantK):
        return True
    if isinstance(K, LinearK):
        return K.j == K.n + 1 or K.b == 0.0
    if isinstance(K, FieldK) and K.field.zonal:
        return True
    n = K.n
    rng = np.random.default_rng(0)
    extra = rng.standard_normal((constants.ZONAL_K_DIRECTIONS, n))
    dirs = np.vstack([np.eye(n), -np.eye(n), extra / np.linalg.norm(extra, axis=1)[:, None]])
    heights = np.cos(np.linspace(0.0, np.pi, constants.ZONAL_K_HEIGHTS + 2)[1:-1])
    worst, scale = 0.0, 0.0
    for t in heights:
        coords = np.hstack([math.sqrt(1.0 - t * t) * dirs, np.full((dirs.shape[0], 1), t)])
        vals = np.asarray(K(coords), dtype=float)
        worst = max(worst, float(np.ptp(vals)))
        scale = max(scale, float(np.max(np.abs(vals))))
    return worst <= constants.ZONAL_K_TOL * max(scale, 1.0)


def grid_values(K: Union[types.KLike, SpectralField], grid: QuadratureGrid) -> np.ndarray:
    """
    Positive values of K at the nodes of ``grid``.

    Raises:
        ConfigurationError: if ``grid`` is zonal and K is not, since a single meridian
            cannot represent a K that varies around the axis.
        InvalidKError: if K ≤ 0 at a node.
    """
    kf = as_k_function(K, grid.n)
    if grid.zonal and not is_zonal(kf):
        raise errors.ConfigurationError(
            f"K = {kf.describe()} is not axially symmetric about the poles and cannot be "
            "evaluated on a zonal grid; use full grids (zonal = false) for n <= 3"
        )
    return positive_values(kf, grid.coords)


def _fd_derivatives(K: KFunction, x: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray]:
    """Tangent-frame gradient and Hessian of K at ``x`` by geodesic central differences."""
    frame = tangent_basis(x)
    n = frame.shape[1]
    k0 = float(K(x)[0])
    grad = np.empty(n)
    hess = np.empty((n, n))
    hh = 10.0 * h
    for i in range(n):
        e = frame[:, i]
        kp, km = float(K(exp_map(x, h * e))[0]), float(K(exp_map(x, -h * e))[0])
        grad[i] = (kp - km) / (2.0 * h)
        kp, km = float(K(exp_map(x, hh * e))[0]), float(K(exp_map(x, -hh * e))[0])
        hess[i, i] = (kp - 2.0 * k0 + km) / hh**2
    for i in range(n):
        for j in range(i + 1, n):
            ei, ej = frame[:, i], frame[:, j]
            vals = [
                float(K(exp_map(x, hh * (si * ei + sj * ej) / np.sqrt(2.0)))[0])
                for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1))
            ]
            # mixed second derivative along the rotated pair of directions
            hess[i, j] = hess[j, i] = (vals[0] - vals[1] - vals[2] + vals[3]) / (2.0 * hh**2)
    return frame @ grad, hess


def riemannian_gradient(
    K: KFunction, coords: np.ndarray, fd_step: float = constants.FD_STEP
) -> np.ndarray:
    """Intrinsic gradient of K at each row of ``coords``, as ambient tangent vectors."""
    coords = np.atleast_2d(coords)
    if K.analytic:
        grad = K.ambient_gradient(coords)
        radial = np.einsum("ij,ij->i", coords, grad)
        return grad - radial[:, None] * coords
    return np.stack([_fd_derivatives(K, x, fd_step)[0] for x in coords])


def intrinsic_hessian(
    K: KFunction, x: np.ndarray, fd_step: float = constants.FD_STEP
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Hessian of K at the point ``x`` in an orthonormal tangent frame.

    Returns:
        (Hessian of shape (n, n), tangent frame of shape (n+1, n))
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if not K.analytic:
        frame = tangent_basis(x)
        grad, hess = _fd_derivatives(K, x, fd_step)
        return hess, frame
    frame = tangent_basis(x)
    grad = K.ambient_gradient(x)[0]
    hess = K.ambient_hessian(x)[0]
    return frame.T @ hess @ frame - float(x @ grad) * np.eye(frame.shape[1]), frame


def laplacian(K: KFunction, coords: np.ndarray, fd_step: float = constants.FD_STEP) -> np.ndarray:
    """Laplace-Beltrami Δ K of the round metric at each row of ``coords``."""
    coords = np.atleast_2d(coords)
    if K.analytic:
        grad = K.ambient_gradient(coords)
        hess = K.ambient_hessian(coords)
        trace = np.trace(hess, axis1=1, axis2=2)
        normal = np.einsum("ij,ijk,ik->i", coords, hess, coords)
        radial = np.einsum("ij,ij->i", coords, grad)
        return trace - normal - K.n * radial
    return np.array([np.trace(intrinsic_hessian(K, x, fd_step)[0]) for x in coords])


@k_families.register("constant")
def constant(n: int, *, value: float = 1.0) -> KFunction:
    return ConstantK(n, value)


@k_families.register("linear")
def linear(n: int, *, a: float = 2.0, b: float = 1.0, j: Optional[int] = None) -> KFunction:
    return LinearK(n, a=a, b=b, j=j)


@k_families.register("two-peak")
def two_peak(
    n: int, *, epsilon: float = 0.005, tilt: float = 0.3, c: Optional[float] = None
) -> KFunction:
    """
    1 + ε(ξ_{n+1}² + Σ_{j≤n} μ_j ξ_j² - c) with μ_j = tilt·(j-1)/n: maxima at both poles.
    ``tilt = 0`` leaves a degenerate circle of minima on the equator.
    """
    if not 0.0 <= tilt < 1.0:
        raise errors.ParameterDomainError(f"tilt must lie in [0, 1), not {tilt}")
    diag = [tilt * j / n for j in range(n)] + [1.0]
    return QuadraticK(n, diag, epsilon, base=1.0, shift=c)


@k_families.register("harmonic")
def harmonic(n: int, *, path: types.PathLike) -> KFunction:
    from .io.fields import read_field

    field, _ = read_field(path)
    if field.n != n:
        raise errors.ConfigurationError(f"K file {path} holds a field on S^{field.n}, not S^{n}")
    return FieldK(field)


def make_k(family: str, n: int, **params) -> KFunction:
    """
    Instantiate a registered K family by name.

    Raises:
        ConfigurationError: for unknown family names.
    """
    try:
        factory = k_families.get(family)
    except catalogue.RegistryError:
        raise errors.ConfigurationError(
            errors.value_invalid_msg("family", family, sorted(k_families.get_all()))
        )
    return factory(n, **params)
