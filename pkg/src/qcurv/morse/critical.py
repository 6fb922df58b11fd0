"""
Critical Points of K
--------------------

:mod:`qcurv.morse.critical`: Locate and classify the critical points of the prescribed
function K on Sⁿ by multistart Riemannian Newton iterations, merge duplicates, and check
that every point found is nondegenerate.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple, Union

import joblib
import networkx as nx
import numpy as np

from .. import constants, errors, kfuncs, types, utils
from ..sphere.points import SpherePoint, exp_map, geodesic_distance
from ..spectral.fields import SpectralField

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class NewtonOptions:
    """
    Knobs of :func:`find_critical_points`.

    Attributes:
        starts: Number of random starting points, in addition to the 2(n+1) points ±e_i.
        seed: Seed of the starting points.
        max_iter: Newton iteration cap per start.
        grad_tol: Gradient norm, relative to max|∇K|, at which an iteration stops.
        accept_tol: Gradient norm, relative to max|∇K|, below which an endpoint counts.
        max_step: Largest geodesic step length.
        dedup_radius: Geodesic distance below which endpoints are merged.
        nondegeneracy_floor: Smallest admissible min|Hessian eigenvalue| / max|K|.
        fd_step: Step of the finite differences used when K has no analytic derivatives.
        n_jobs: Parallel workers over starting points (joblib).
    """

    starts: int = constants.NEWTON_STARTS
    seed: Optional[int] = 0
    max_iter: int = constants.NEWTON_MAX_ITER
    grad_tol: float = 1e-12
    accept_tol: float = 1e-8
    max_step: float = 0.5
    dedup_radius: float = constants.DEDUP_RADIUS
    nondegeneracy_floor: float = constants.NONDEGENERACY_FLOOR
    fd_step: float = constants.FD_STEP
    n_jobs: int = 1

    def __post_init__(self):
        if self.starts < 0 or self.max_iter < 1:
            raise errors.ParameterDomainError("need starts >= 0 and max_iter >= 1")
        for name in ("grad_tol", "accept_tol", "max_step", "dedup_radius", "fd_step"):
            if not getattr(self, name) > 0:
                raise errors.ParameterDomainError(f"Newton option {name} must be > 0")


@dataclass(frozen=True)
class CriticalPointRecord:
    """
    A nondegenerate critical point y of K.

    Attributes:
        location: The point.
        k_value: K(y) > 0.
        gradient_norm: |∇K(y)|.
        morse_index: Number of negative eigenvalues of the intrinsic Hessian.
        laplacian: Δ K(y) for the round metric.
        in_k_plus: Whether -Δ K(y) > 0.
        margin: min|Hessian eigenvalue| / max|K|.
    """

    location: SpherePoint
    k_value: float
    gradient_norm: float
    morse_index: int
    laplacian: float
    in_k_plus: bool
    margin: float = math.inf

    def __post_init__(self):
        if self.in_k_plus != (self.laplacian < 0.0):
            raise errors.InvariantViolationError("in_k_plus must agree with the sign of ΔK")
        if not 0 <= self.morse_index <= self.location.n:
            raise errors.InvariantViolationError(
                errors.range_invalid_msg("morse_index", self.morse_index, (0, self.location.n))
            )

    @classmethod
    def manual(
        cls, location: Union[SpherePoint, np.ndarray], k_value: float, morse_index: int, laplacian: float
    ) -> "CriticalPointRecord":
        """A record built from known data, e.g. for hand-made inventories."""
        if not isinstance(location, SpherePoint):
            location = SpherePoint.from_vector(location)
        return cls(location, float(k_value), 0.0, int(morse_index), float(laplacian), laplacian < 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "location": self.location.coords.tolist(),
            "k_value": self.k_value,
            "gradient_norm": self.gradient_norm,
            "morse_index": self.morse_index,
            "laplacian": self.laplacian,
            "in_k_plus": self.in_k_plus,
            "margin": self.margin,
        }


def _tangent_gradient(kf: kfuncs.KFunction, x: np.ndarray, fd_step: float) -> np.ndarray:
    return kfuncs.riemannian_gradient(kf, x[None, :], fd_step)[0]


def _newton(kf: kfuncs.KFunction, x0: np.ndarray, options: NewtonOptions, grad_scale: float):
    """Riemannian Newton from ``x0``; returns (endpoint, gradient norm, iterations)."""
    x = x0 / np.linalg.norm(x0)
    gnorm = math.inf
    for it in range(1, options.max_iter + 1):
        hess, frame = kfuncs.intrinsic_hessian(kf, x, options.fd_step)
        g = frame.T @ _tangent_gradient(kf, x, options.fd_step)
        gnorm = float(np.linalg.norm(g))
        if gnorm <= options.grad_tol * grad_scale:
            return x, gnorm, it
        step, *_ = np.linalg.lstsq(hess, -g, rcond=None)
        size = float(np.linalg.norm(step))
        if size > options.max_step:
            step *= options.max_step / size
        elif size < 1e-15:
            return x, gnorm, it
        x = exp_map(x, frame @ step)
    return x, gnorm, options.max_iter


def _starting_points(n: int, options: NewtonOptions) -> np.ndarray:
    rng = utils.as_rng(options.seed)
    cloud = rng.standard_normal((options.starts, n + 1))
    cloud /= np.linalg.norm(cloud, axis=1, keepdims=True)
    axes = np.concatenate([np.eye(n + 1), -np.eye(n + 1)])
    return np.concatenate([axes, cloud])


def _merge(points: List[np.ndarray], gnorms: List[float], radius: float) -> List[int]:
    """Indices of one representative (smallest gradient) per cluster of nearby endpoints."""
    graph = nx.Graph()
    graph.add_nodes_from(range(len(points)))
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if geodesic_distance(points[i], points[j]) < radius:
                graph.add_edge(i, j)
    return sorted(
        min(component, key=lambda idx: gnorms[idx])
        for component in nx.connected_components(graph)
    )


def find_critical_points(
    K: Union[types.KLike, SpectralField],
    n: int,
    options: Optional[NewtonOptions] = None,
) -> List[CriticalPointRecord]:
    """
    All critical points of K reachable from a covering set of starting points.

    Args:
        K: Positive prescribed function; analytic derivatives are used when available.
        n: Dimension of the sphere.
        options: Newton knobs; defaults to :class:`NewtonOptions`.

    Returns:
        Records sorted by decreasing K value.

    Raises:
        InvalidKError: if K ≤ 0 somewhere on the starting set.
        NondegeneracyError: if a located point has a (nearly) singular Hessian or a
            vanishing Laplacian; the diagnostics name the point.
    """
    n = utils.validate_dimension(n)
    options = options or NewtonOptions()
    kf = kfuncs.as_k_function(K, n)
    starts = _starting_points(n, options)
    k_scale = float(np.max(kfuncs.positive_values(kf, starts)))
    grad_scale = float(np.max(np.linalg.norm(kfuncs.riemannian_gradient(kf, starts, options.fd_step), axis=1)))
    if grad_scale == 0.0:
        raise errors.NondegeneracyError(
            "K is constant: every point is a degenerate critical point", {"k_value": k_scale}
        )

    results = joblib.Parallel(n_jobs=options.n_jobs)(
        joblib.delayed(_newton)(kf, x0, options, grad_scale) for x0 in starts
    )
    accepted = [(x, g) for x, g, _ in results if g <= options.accept_tol * grad_scale]
    LOGGER.debug("%s of %s Newton starts reached a critical point", len(accepted), len(starts))
    points = [x for x, _ in accepted]
    gnorms = [g for _, g in accepted]
    reps = _merge(points, gnorms, options.dedup_radius)

    records = []
    for idx in reps:
        x = points[idx]
        hess, _ = kfuncs.intrinsic_hessian(kf, x, options.fd_step)
        eigs = np.linalg.eigvalsh(0.5 * (hess + hess.T))
        margin = float(np.min(np.abs(eigs))) / k_scale
        lap = float(np.sum(eigs))
        if margin < options.nondegeneracy_floor or abs(lap) < options.nondegeneracy_floor * k_scale:
            raise errors.NondegeneracyError(
                f"critical point {x.tolist()} of K is degenerate "
                f"(min |eigenvalue|/max K = {margin:.3e}, ΔK = {lap:.3e})",
                {"location": x.tolist(), "eigenvalues": eigs.tolist(), "laplacian": lap},
            )
        records.append(
            CriticalPointRecord(
                SpherePoint.from_vector(x),
                float(kf(x)[0]),
                gnorms[idx],
                int(np.sum(eigs < 0.0)),
                lap,
                lap < 0.0,
                margin,
            )
        )
    records.sort(key=lambda r: (-r.k_value, tuple(r.location.coords)))
    LOGGER.info(
        "found %s critical points of K (%s in K+)", len(records), sum(r.in_k_plus for r in records)
    )
    return records


def k_extremes(records: List[CriticalPointRecord]) -> Tuple[float, float]:
    """(max K, min K) over the critical set, i.e. over the sphere."""
    if not records:
        raise errors.DegenerateInputError("no critical points to take extremes over")
    values = [r.k_value for r in records]
    return max(values), min(values)
