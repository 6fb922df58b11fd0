"""
Level Expansion near Bubble Sums
--------------------------------

:mod:`qcurv.bubbles.expansion`: Predicted values of J_K at Σ α_i δ_{a_i,λ_i} for large λ_i,
the linear and quadratic forms governing the remainder v, and the numerical calibration of
the expansion constants.

The prediction (remainder v = 0) reads

    J ≈ Γ₂/Γ₁^{(n-2σ)/n} · [ 1 - ((n-2σ)/n)(c₂/Γ₁) Σ α_i^q ΔK(a_i)/λ_i²
                              + c₀₁ Σ_{i≠j} ε_ij (α_iα_j/Γ₂ - 2 α_i^{q-1} α_j K(a_i)/Γ₁) ]

with q = 2n/(n-2σ), Γ₁ = E Σ α_i^q K(a_i), Γ₂ = E Σ α_i², E the bubble energy.
c₂ and c₀₁ are not known in closed form; :func:`calibrate_constants` fits them from
direct evaluations of J_K on single and antipodal double bubbles.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, NamedTuple, Optional, Sequence, Union

import joblib
import numpy as np
from tqdm import tqdm

from .. import constants, errors, kfuncs, types, utils
from ..sphere.points import north_pole, south_pole
from ..sphere.quadrature import QuadratureGrid
from ..spectral.fields import SpectralField, inverse_transform, working_grid
from ..spectral.operator import beckner_constant, hsigma_norm
from .core import BubbleParams, bubble_energy, bubble_field, bubble_samples, epsilon_ij
from .functional import functional_JK

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExpansionConstants:
    """
    Calibrated constants of the level expansion for one (n, σ).

    Attributes:
        c2: Coefficient of the Σ α^q ΔK(a_i)/λ_i² correction.
        c01: Coefficient multiplying the ε_ij interaction terms.
        n: Dimension of the sphere.
        sigma: Order of the operator.
        provenance: ``{"source": "calibrated", ...}`` plus fit residuals, slopes and sweeps.
    """

    c2: float
    c01: float
    n: int
    sigma: float
    provenance: Dict[str, Any] = field(default_factory=lambda: {"source": "manual"})

    def __post_init__(self):
        if not (math.isfinite(self.c2) and math.isfinite(self.c01)):
            raise errors.InvariantViolationError("expansion constants must be finite")

    def to_dict(self) -> dict:
        return {
            "c2": self.c2,
            "c01": self.c01,
            "n": self.n,
            "sigma": self.sigma,
            "provenance": self.provenance,
        }


class KCenterData(NamedTuple):
    """Values, intrinsic gradients and Laplacians of K at bubble centers."""

    values: np.ndarray
    gradients: Optional[np.ndarray]
    laplacians: Optional[np.ndarray]

    @classmethod
    def from_k(cls, K: Union[types.KLike, SpectralField], params: BubbleParams) -> "KCenterData":
        kf = kfuncs.as_k_function(K, params.n)
        coords = np.stack([c.coords for c in params.centers])
        return cls(
            kfuncs.positive_values(kf, coords),
            kfuncs.riemannian_gradient(kf, coords),
            kfuncs.laplacian(kf, coords),
        )


def _gammas(alphas: np.ndarray, k_values: np.ndarray, n: int, sigma: float):
    q = utils.critical_exponent(n, sigma)
    energy = bubble_energy(n, sigma)
    return energy * np.sum(alphas**q * k_values), energy * np.sum(alphas**2), q


def expansion_JK(
    params: BubbleParams, kdata: KCenterData, expansion: ExpansionConstants
) -> float:
    """
    Predicted level of J_K at Σ α_i δ_{a_i,λ_i} (remainder v = 0).

    ``λ_i = inf`` is allowed and drops the corresponding corrections.

    Raises:
        InvalidKError: if values or Laplacians of K at the centers are missing.
        ConfigurationError: if the constants were calibrated for another (n, σ).
    """
    n, sigma = params.n, params.sigma
    if (expansion.n, expansion.sigma) != (n, sigma):
        raise errors.ConfigurationError(
            f"constants for (n, σ) = {(expansion.n, expansion.sigma)} used at {(n, sigma)}"
        )
    p = len(params)
    if kdata.values is None or kdata.laplacians is None:
        raise errors.InvalidKError("expansion needs K values and Laplacians at every center")
    k_values = np.asarray(kdata.values, dtype=float)
    k_lapl = np.asarray(kdata.laplacians, dtype=float)
    if k_values.shape != (p,) or k_lapl.shape != (p,):
        raise errors.InvalidKError(f"need K data for {p} centers")
    alphas, lambdas = params.alphas, params.lambdas
    gamma1, gamma2, q = _gammas(alphas, k_values, n, sigma)
    ratio = (n - 2.0 * sigma) / n
    lead = gamma2 / gamma1**ratio
    inv_l2 = np.where(np.isinf(lambdas), 0.0, 1.0 / lambdas**2)
    corr = -ratio * expansion.c2 / gamma1 * np.sum(alphas**q * k_lapl * inv_l2)
    inter = 0.0
    for i in range(p):
        for j in range(p):
            if i == j:
                continue
            eps = epsilon_ij(params.centers[i], lambdas[i], params.centers[j], lambdas[j], n, sigma)
            bracket = (
                alphas[i] * alphas[j] / gamma2
                - 2.0 * alphas[i] ** (q - 1.0) * alphas[j] * k_values[i] / gamma1
            )
            inter += eps * bracket
    return float(lead * (1.0 + corr + expansion.c01 * inter))


def interaction_bracket(params: BubbleParams, k_values: Sequence[float], i: int, j: int) -> float:
    """α_iα_j/Γ₂ - 2 α_i^{(n+2σ)/(n-2σ)} α_j K(a_i)/Γ₁ for the pair (i, j)."""
    alphas = params.alphas
    gamma1, gamma2, q = _gammas(alphas, np.asarray(k_values, dtype=float), params.n, params.sigma)
    return float(
        alphas[i] * alphas[j] / gamma2 - 2.0 * alphas[i] ** (q - 1.0) * alphas[j] * k_values[i] / gamma1
    )


def linear_term(
    params: BubbleParams,
    v: SpectralField,
    K: Union[types.KLike, SpectralField],
    grid: Optional[QuadratureGrid] = None,
) -> float:
    """f(v) = -(2/Γ₁) ∫ K (Σ α_i δ_i)^{(n+2σ)/(n-2σ)} v."""
    grid = grid or working_grid(v)
    kf = kfuncs.as_k_function(K, params.n)
    k_nodes = kfuncs.grid_values(kf, grid)
    centers = np.stack([c.coords for c in params.centers])
    gamma1, _, q = _gammas(params.alphas, kfuncs.positive_values(kf, centers), params.n, params.sigma)
    bubbles = params.samples(grid.coords)
    return float(-2.0 / gamma1 * grid.integrate(k_nodes * bubbles ** (q - 1.0) * inverse_transform(v, grid)))


def quadratic_term(
    params: BubbleParams,
    v: SpectralField,
    K: Union[types.KLike, SpectralField],
    grid: Optional[QuadratureGrid] = None,
) -> float:
    """Q(v, v) = ‖v‖²/Γ₂ - ((2n+4σ)/((n-2σ)Γ₁)) Σ_i ∫ K (α_i δ_i)^{4σ/(n-2σ)} v²."""
    n, sigma = params.n, params.sigma
    grid = grid or working_grid(v)
    kf = kfuncs.as_k_function(K, n)
    k_nodes = kfuncs.grid_values(kf, grid)
    centers = np.stack([c.coords for c in params.centers])
    gamma1, gamma2, q = _gammas(params.alphas, kfuncs.positive_values(kf, centers), n, sigma)
    v_nodes = inverse_transform(v, grid)
    local = sum(
        grid.integrate(
            k_nodes
            * (e.alpha * bubble_samples(e.center, e.lam, n, sigma, grid.coords)) ** (q - 2.0)
            * v_nodes**2
        )
        for e in params
    )
    coef = (2.0 * n + 4.0 * sigma) / ((n - 2.0 * sigma) * gamma1)
    return float(hsigma_norm(v, sigma) ** 2 / gamma2 - coef * local)


def _intercept_fit(lambdas: np.ndarray, values: np.ndarray):
    """Fit values(λ) = c + b₁/λ + b₂/λ²; return (c, max relative misfit)."""
    x = 1.0 / lambdas
    coeffs = np.polyfit(x, values, 2)
    model = np.polyval(coeffs, x)
    intercept = float(coeffs[-1])
    scale = abs(intercept) if intercept != 0.0 else float(np.max(np.abs(values)))
    return intercept, float(np.max(np.abs(model - values)) / scale)


def _single_bubble_level(n: int, sigma: float, L: int, center_sign: int, lam: float) -> float:
    K = kfuncs.LinearK(n, a=2.0, b=1.0)
    center = north_pole(n) if center_sign > 0 else south_pole(n)
    return functional_JK(bubble_field(center, lam, n, sigma, L, zonal=True), K, sigma)


def _double_bubble_level(n: int, sigma: float, L: int, lam: float) -> float:
    params = BubbleParams.from_arrays(
        [1.0, 1.0], [north_pole(n), south_pole(n)], [lam, lam], n, sigma
    )
    return functional_JK(params.field(L, zonal=True), 1.0, sigma)


def calibrate_constants(
    n: int,
    sigma: float,
    L: int = constants.CALIBRATION_TRUNCATION,
    *,
    lambda_range=constants.CALIBRATION_LAMBDAS,
    num: int = constants.CALIBRATION_SAMPLES,
    threshold: float = constants.CALIBRATION_RESIDUAL_MAX,
    n_jobs: int = 1,
    progress: bool = False,
) -> ExpansionConstants:
    """
    Fit c₂ and c₀₁ from zonal sweeps over geometrically spaced λ.

    c₂ comes from single bubbles at both poles for K = 2 + ξ_{n+1} (ΔK = ∓n there);
    c₀₁ from antipodal double bubbles for K ≡ 1, where the λ^{-2} correction vanishes
    identically. Each per-λ estimate is extrapolated to λ = ∞ by a quadratic fit in 1/λ.

    Args:
        n: Dimension of the sphere.
        sigma: Order of the operator.
        L: Zonal truncation; it must resolve the sharpest bubble of the sweep.
        lambda_range: (smallest, largest) λ.
        num: Number of λ samples, at least 6.
        threshold: Largest admissible relative fit residual or disagreement.
        n_jobs: Parallel workers for the sweeps (joblib).
        progress: Show a progress bar.

    Raises:
        CalibrationError: if a fit residual or the two-center disagreement exceeds
            ``threshold``; the diagnostics are attached.
    """
    sigma = utils.validate_sigma(n, sigma)
    if num < 6:
        raise errors.ParameterDomainError(f"calibration needs >= 6 λ samples, not {num}")
    lambdas = utils.geometric_samples(lambda_range[0], lambda_range[1], num)
    ratio = (n - 2.0 * sigma) / n
    S = beckner_constant(n, sigma)
    E = bubble_energy(n, sigma)

    tasks = [("single", sign, lam) for sign in (1, -1) for lam in lambdas]
    tasks += [("double", 0, lam) for lam in lambdas]
    runner = joblib.Parallel(n_jobs=n_jobs)
    levels = runner(
        joblib.delayed(_single_bubble_level)(n, sigma, L, sign, lam)
        if kind == "single"
        else joblib.delayed(_double_bubble_level)(n, sigma, L, lam)
        for kind, sign, lam in tqdm(tasks, disable=not progress, desc="calibration")
    )
    levels = np.asarray(levels)

    diagnostics: Dict[str, Any] = {
        "source": "calibrated",
        "truncation": L,
        "lambda_range": [float(lambda_range[0]), float(lambda_range[1])],
        "samples": num,
        "lambdas": lambdas.tolist(),
    }
    c2_by_center = {}
    for idx, (name, k_val, lap) in enumerate((("north", 3.0, -float(n)), ("south", 1.0, float(n)))):
        lev = levels[idx * num : (idx + 1) * num]
        limit = S / k_val**ratio
        dev = lev - limit
        est = -dev * k_val * E * lambdas**2 / (limit * ratio * lap)
        c2_c, resid = _intercept_fit(lambdas, est)
        slope, _ = utils.loglog_slope(lambdas, dev)
        c2_by_center[name] = c2_c
        diagnostics[f"single_{name}"] = {
            "deviation": dev.tolist(),
            "slope": slope,
            "c2": c2_c,
            "residual": resid,
        }
    c2_vals = np.array(list(c2_by_center.values()))
    c2 = float(c2_vals.mean())
    disagreement = float(abs(c2_vals[0] - c2_vals[1]) / abs(c2)) if c2 != 0 else math.inf
    diagnostics["c2_disagreement"] = disagreement

    lev = levels[2 * num :]
    limit = (2.0 * E) ** (2.0 * sigma / n)
    dev = lev - limit
    eps = np.array(
        [epsilon_ij(north_pole(n), lam, south_pole(n), lam, n, sigma) for lam in lambdas]
    )
    est = -dev * E / (limit * eps)
    c01, resid2 = _intercept_fit(lambdas, est)
    slope2, _ = utils.loglog_slope(lambdas, dev)
    diagnostics["double"] = {
        "deviation": dev.tolist(),
        "epsilon": eps.tolist(),
        "slope": slope2,
        "expected_slope": -(n - 2.0 * sigma),
        "c01": c01,
        "residual": resid2,
    }

    worst = max(
        disagreement,
        diagnostics["single_north"]["residual"],
        diagnostics["single_south"]["residual"],
        resid2,
    )
    diagnostics["worst_residual"] = worst
    if not worst <= threshold:
        raise errors.CalibrationError(
            f"calibration at (n, σ) = ({n}, {sigma}) failed: worst residual {worst:.3g} "
            f"> {threshold}",
            diagnostics,
        )
    LOGGER.info("calibrated (n, σ) = (%s, %s): c2 = %.6g, c01 = %.6g", n, sigma, c2, c01)
    return ExpansionConstants(c2, c01, n, sigma, diagnostics)
