"""
Optimal Representation
----------------------

:mod:`qcurv.bubbles.representation`: Write a field u close to a sum of p bubbles as
Σ α_i δ_{a_i,λ_i} + v, with (α, a, λ) minimizing the energy norm of v. At the minimizer
v is orthogonal, in the energy inner product, to every δ_i, ∂δ_i/∂λ_i and ∂δ_i/∂a_i.

The minimization is a damped Gauss-Newton iteration in coefficient space, weighted by
the square roots of the eigenvalues of P_σ, over (α_i, log λ_i, tangent moves of a_i).
"""
from __future__ import annotations

import logging
import math
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from .. import constants, errors, kfuncs, types, utils
from ..sphere.points import SpherePoint, exp_map, north_pole, one_minus_cos, south_pole
from ..sphere.quadrature import QuadratureGrid
from ..spectral import harmonics
from ..spectral.fields import SpectralField, evaluate_field, working_grid
from ..spectral.operator import psigma_multipliers
from .core import BubbleEntry, BubbleParams, bubble_derivatives, bubble_samples
from .functional import functional_JK

LOGGER = logging.getLogger(__name__)

Representation = Tuple[BubbleParams, SpectralField, Dict[str, Any]]


class _Problem:
    """Projection machinery shared by every iterate of one fit."""

    def __init__(self, u: SpectralField, sigma: float, grid: QuadratureGrid):
        self.u = u
        self.n = u.n
        self.sigma = sigma
        self.zonal = u.zonal
        self.grid = grid
        self.basis = harmonics.basis_matrix(grid, u.L)
        self.proj = (self.basis * grid.weights[:, None]).T
        self.sqrt_w = np.sqrt(psigma_multipliers(u.n, u.L, u.zonal, float(sigma)))
        self.target = self.sqrt_w * u.coeffs
        self.unorm = float(np.linalg.norm(self.target))

    def model(self, entries) -> np.ndarray:
        samples = np.zeros(self.grid.size)
        for e in entries:
            samples += e.alpha * bubble_samples(e.center, e.lam, self.n, self.sigma, self.grid.coords)
        return self.sqrt_w * (self.proj @ samples)

    def residual(self, entries) -> np.ndarray:
        return self.target - self.model(entries)

    def jacobian(self, entries) -> Tuple[np.ndarray, List[np.ndarray]]:
        """Weighted derivative columns, per bubble (α, log λ, tangent frame moves)."""
        cols, frames = [], []
        coords = self.grid.coords
        for e in entries:
            delta = bubble_samples(e.center, e.lam, self.n, self.sigma, coords)
            d_lam, d_a, frame = bubble_derivatives(e.center, e.lam, self.n, self.sigma, coords)
            cols.append(delta)
            cols.append(e.alpha * e.lam * d_lam)
            if not self.zonal:
                cols.extend(e.alpha * d_a.T)
            frames.append(frame)
        mat = np.stack(cols, axis=1)
        return self.sqrt_w[:, None] * (self.proj @ mat), frames

    def field(self, weighted: np.ndarray) -> SpectralField:
        return self.u.with_coeffs(weighted / self.sqrt_w)


def _canonical(center: SpherePoint, lam: float) -> Tuple[SpherePoint, float]:
    # δ_{a,λ} = δ_{-a,1/λ}
    if lam < 1.0:
        return -center, 1.0 / lam
    return center, lam


def _advance(entries, step: np.ndarray, frames, zonal: bool, n: int):
    width = 2 if zonal else 2 + n
    out = []
    for i, e in enumerate(entries):
        block = step[i * width : (i + 1) * width]
        alpha = e.alpha + block[0]
        lam = e.lam * math.exp(block[1])
        if not (alpha > 0.0 and math.isfinite(lam)):
            return None
        center = e.center
        if not zonal:
            center = SpherePoint.from_vector(exp_map(center, frames[i] @ block[2:]))
        center, lam = _canonical(center, lam)
        out.append(BubbleEntry(alpha, center, lam))
    return out


def _scan(problem: _Problem, weighted: np.ndarray, center: SpherePoint) -> BubbleEntry:
    """Best single bubble at a fixed center over a geometric λ grid, α solved linearly."""
    lo, hi, num = constants.GN_SCAN_LAMBDAS
    lambdas = np.geomspace(lo, hi, int(num))
    samples = np.stack(
        [bubble_samples(center, lam, problem.n, problem.sigma, problem.grid.coords) for lam in lambdas],
        axis=1,
    )
    cols = problem.sqrt_w[:, None] * (problem.proj @ samples)
    dots = cols.T @ weighted
    sq = np.einsum("ij,ij->j", cols, cols)
    gain = np.where(dots > 0.0, dots**2 / sq, -np.inf)
    best = int(np.argmax(gain))
    alpha = dots[best] / sq[best]
    if not alpha > 0.0:
        alpha = max(problem.unorm, 1.0) * 1e-12
    return BubbleEntry(float(alpha), center, float(lambdas[best]))


def _peak(problem: _Problem, weighted: np.ndarray, taken: List[BubbleEntry]) -> SpherePoint:
    n = problem.n
    if problem.zonal:
        poles = [north_pole(n), south_pole(n)]
        free = [p for p in poles if all(p != e.center for e in taken)]
        if not free:
            raise errors.ConfigurationError("a zonal field hosts at most two bubble centers")
        values = evaluate_field(problem.field(weighted), np.stack([p.coords for p in poles]))
        order = [0, 1] if values[0] >= values[1] else [1, 0]
        for idx in order:
            if poles[idx] in free:
                return poles[idx]
    samples = problem.basis @ (weighted / problem.sqrt_w)
    mask = np.ones(problem.grid.size, dtype=bool)
    beta = (n - 2.0 * problem.sigma) / 2.0
    for e in taken:
        amp = 0.5 * (e.lam**2 - 1.0)
        if amp > 0.0:
            # exclude the core of bubbles already extracted (value above half its peak)
            radius = (2.0 ** (1.0 / beta) - 1.0) / amp
            mask &= one_minus_cos(problem.grid.coords, e.center.coords) > radius
    samples = np.where(mask, samples, -np.inf)
    return SpherePoint.from_vector(problem.grid.coords[int(np.argmax(samples))])


def _initialize(problem: _Problem, p: int) -> List[BubbleEntry]:
    entries: List[BubbleEntry] = []
    weighted = problem.target.copy()
    for _ in range(p):
        center = _peak(problem, weighted, entries)
        entry = _scan(problem, weighted, center)
        entries.append(entry)
        weighted = weighted - problem.model([entry])
    return entries


def _sort_key(e: BubbleEntry):
    return (e.lam, tuple(-e.center.coords[::-1]))


def optimal_representation(
    u: SpectralField,
    p: int,
    K: Optional[Union[types.KLike, SpectralField]],
    sigma: float,
    *,
    initial: Optional[BubbleParams] = None,
    max_iter: int = constants.GN_MAX_ITER,
    tol: float = constants.GN_TOL,
) -> Representation:
    """
    Fit ``u`` by Σ_{i≤p} α_i δ_{a_i,λ_i} in the energy norm.

    Args:
        u: Field to represent, assumed close to a p-bubble configuration.
        p: Number of bubbles.
        K: Prescribed function, used only for the level-matching numbers; may be None.
        sigma: Order of the operator.
        initial: Starting parameters; by default the grid maximum and a λ scan
            (p = 1), or greedy peak extraction (p ≥ 2).
        max_iter: Gauss-Newton iteration cap.
        tol: Relative step size at which the iteration stops.

    Returns:
        (params sorted by λ, remainder v = u - Σα_iδ_i, diagnostics). Diagnostics hold
        ``converged``, ``iterations``, ``v_norm`` (relative to ‖u‖), ``epsilons``,
        ``v0_residuals`` (|⟨v, φ⟩|/(‖u‖‖φ‖) per derivative direction φ) and, when K is
        given, ``level_match``. Non-convergence is reported there, never raised.

    Raises:
        DegenerateInputError: for u = 0.
        ConfigurationError: for p < 1, or p > 2 on a zonal field.
    """
    sigma = utils.validate_sigma(u.n, sigma)
    if p < 1:
        raise errors.ConfigurationError(f"number of bubbles must be >= 1, not {p}")
    if u.zonal and p > 2:
        raise errors.ConfigurationError("a zonal field hosts at most two bubble centers")
    problem = _Problem(u, sigma, working_grid(u))
    if problem.unorm == 0.0:
        raise errors.DegenerateInputError("cannot represent the zero field by bubbles")

    if initial is not None:
        if len(initial) != p:
            raise errors.ConfigurationError(f"initial guess has {len(initial)} bubbles, not {p}")
        entries = list(initial.entries)
    else:
        entries = _initialize(problem, p)

    resid = problem.residual(entries)
    obj = float(resid @ resid)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        jac, frames = problem.jacobian(entries)
        step, *_ = np.linalg.lstsq(jac, resid, rcond=None)
        t = 1.0
        accepted = None
        while t >= 2.0**-30:
            trial = _advance(entries, t * step, frames, u.zonal, u.n)
            if trial is not None:
                trial_resid = problem.residual(trial)
                trial_obj = float(trial_resid @ trial_resid)
                if trial_obj < obj:
                    accepted = (trial, trial_resid, trial_obj)
                    break
            t *= 0.5
        if accepted is None:
            LOGGER.debug("gauss-newton stalled at iteration %s, objective %.3e", iterations, obj)
            break
        entries, resid, obj = accepted
        move = t * float(np.linalg.norm(step))
        LOGGER.debug("gauss-newton %s: objective %.6e, step %.3e", iterations, obj, move)
        if move <= tol * (1.0 + np.linalg.norm([e.alpha for e in entries])) or obj <= (
            tol * problem.unorm
        ) ** 2:
            break

    jac, _ = problem.jacobian(entries)
    col_norms = np.linalg.norm(jac, axis=0)
    v0 = np.abs(jac.T @ resid) / (problem.unorm * np.where(col_norms > 0.0, col_norms, 1.0))
    entries.sort(key=_sort_key)
    params = BubbleParams(tuple(entries), u.n, sigma)
    v = problem.field(resid)
    diagnostics: Dict[str, Any] = {
        "converged": bool(np.max(v0) <= constants.V0_TOL),
        "iterations": iterations,
        "v_norm": float(np.linalg.norm(resid)) / problem.unorm,
        "v0_residuals": v0.tolist(),
        "epsilons": {f"{i},{j}": e for (i, j), e in params.epsilons().items()},
    }
    if K is not None:
        diagnostics["level_match"] = _level_match(u, params, K, sigma, problem.unorm)
    if not diagnostics["converged"]:
        LOGGER.debug("representation with p=%s did not converge: %s", p, diagnostics)
    return params, v, diagnostics


def _level_match(u, params: BubbleParams, K, sigma: float, unorm: float) -> List[float]:
    """|J_K(u)^{n/(n-2σ)} (α_i/‖u‖)^{4σ/(n-2σ)} K(a_i) - 1| for each bubble."""
    n = params.n
    kf = kfuncs.as_k_function(K, n)
    level = functional_JK(u, kf, sigma)
    k_at = kfuncs.positive_values(kf, np.stack([c.coords for c in params.centers]))
    gap = n - 2.0 * sigma
    return [
        abs(level ** (n / gap) * (a / unorm) ** (4.0 * sigma / gap) * k - 1.0)
        for a, k in zip(params.alphas, k_at)
    ]


def in_neighborhood(
    u: SpectralField,
    params: BubbleParams,
    K: Union[types.KLike, SpectralField],
    sigma: float,
    eps: float,
) -> bool:
    """
    Whether ``u``, scaled to unit energy, lies in the ε-neighborhood of p-bubble
    configurations described by ``params``: remainder below ε, every λ above 1/ε,
    every ε_ij below ε and every level-matching number below ε.
    """
    if not eps > 0.0:
        raise errors.ParameterDomainError(f"neighborhood size must be > 0, not {eps}")
    if np.any(params.lambdas <= 1.0 / eps):
        return False
    if any(e >= eps for e in params.epsilons().values()):
        return False
    problem = _Problem(u, sigma, working_grid(u))
    if problem.unorm == 0.0:
        return False
    v_norm = float(np.linalg.norm(problem.residual(params.entries))) / problem.unorm
    if v_norm >= eps:
        return False
    return all(m < eps for m in _level_match(u, params, K, sigma, problem.unorm))
