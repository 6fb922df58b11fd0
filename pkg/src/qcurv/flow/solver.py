"""
Gradient Flow
-------------

:mod:`qcurv.flow.solver`: Discrete gradient flow of J_K on the unit sphere of the energy
space, with detection of concentration (flow lines escaping to a sum of bubbles) and
continuation along subcritical exponents.

Each step moves against the energy-metric gradient, accepts the move by Armijo
backtracking, and renormalizes to unit energy. Level changes are accumulated from an
increment formula free of cancellation, so the recorded level history never increases.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from cytoolz import itertoolz
from tqdm import tqdm

from .. import constants, errors, kfuncs, types, utils
from ..bubbles.core import BubbleParams
from ..bubbles.functional import functional_gradient_coeffs
from ..bubbles.representation import optimal_representation
from ..io.csv import write_csv
from ..spectral import harmonics
from ..spectral.fields import SpectralField, constant_field, inverse_transform, working_grid
from ..spectral.operator import psigma_multipliers
from .gradient import tangential
from .kazdan_warner import kazdan_warner_integral

LOGGER = logging.getLogger(__name__)

FlowStatus = Literal["converged", "concentrated", "max_iterations"]
TRACE_FIELDS = ("step", "level", "gradient_norm", "lambda_fit")


@dataclass(frozen=True)
class FlowOptions:
    """
    Knobs of :func:`flow_run`.

    Attributes:
        tol: Energy-metric gradient norm at which the flow is converged.
        max_iter: Largest number of accepted steps.
        initial_step: First trial step length.
        armijo_c1: Sufficient-decrease constant.
        min_step: Step length below which the line search gives up (stall).
        max_step: Cap on the step length, which doubles after immediate acceptance.
        check_every: Steps between concentration checks.
        detect_concentration: Run the concentration checks at all.
        concentration_lambda: Fitted λ above which concentration may be declared;
            None means min(1e3, L/8) for truncation L.
        concentration_v_max: Largest relative remainder of the bubble fit.
        concentration_window: Consecutive checks over which λ must keep growing.
        negative_mass_max: Tolerated fraction ∫u₋/∫|u|.
        negative_mass_patience: Consecutive steps above that fraction before aborting.
        trace_path: If set, per-step records are written there as CSV.
        trace_meta: Metadata for the CSV's leading comment line.
        progress: Show a progress bar.
    """

    tol: float = constants.FLOW_TOL
    max_iter: int = constants.FLOW_MAX_ITER
    initial_step: float = 1.0
    armijo_c1: float = constants.ARMIJO_C1
    min_step: float = constants.ARMIJO_MIN_STEP
    max_step: float = constants.ARMIJO_MAX_STEP
    check_every: int = constants.CHECK_EVERY
    detect_concentration: bool = True
    concentration_lambda: Optional[float] = None
    concentration_v_max: float = constants.CONCENTRATION_V_MAX
    concentration_window: int = constants.CONCENTRATION_WINDOW
    negative_mass_max: float = constants.NEGATIVE_MASS_MAX
    negative_mass_patience: int = constants.NEGATIVE_MASS_PATIENCE
    trace_path: Optional[types.PathLike] = None
    trace_meta: Optional[Dict[str, Any]] = None
    progress: bool = False

    def __post_init__(self):
        for name in ("tol", "initial_step", "armijo_c1", "min_step", "max_step"):
            if not getattr(self, name) > 0:
                raise errors.ParameterDomainError(f"flow option {name} must be > 0")
        if not 0 < self.armijo_c1 < 1:
            raise errors.ParameterDomainError("armijo_c1 must lie in (0, 1)")
        for name in ("max_iter", "check_every", "concentration_window", "negative_mass_patience"):
            if getattr(self, name) < 1:
                raise errors.ParameterDomainError(f"flow option {name} must be >= 1")

    def lambda_threshold(self, L: int) -> float:
        if self.concentration_lambda is not None:
            return float(self.concentration_lambda)
        return min(constants.CONCENTRATION_LAMBDA, L / 8.0)


@dataclass
class FlowResult:
    """Outcome of a flow: status, last iterate, histories and the bubble fit if any."""

    status: FlowStatus
    final_field: SpectralField
    level_history: List[float]
    gradient_norm_history: List[float]
    step_count: int
    bubble_fit: Optional[Tuple[BubbleParams, Dict[str, Any]]] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def final_level(self) -> float:
        return self.level_history[-1]

    def to_dict(self) -> dict:
        out = {
            "status": self.status,
            "step_count": self.step_count,
            "final_level": self.final_level,
            "final_gradient_norm": self.gradient_norm_history[-1],
            "level_history": self.level_history,
            "gradient_norm_history": self.gradient_norm_history,
            "field": {"n": self.final_field.n, "L": self.final_field.L, "zonal": self.final_field.zonal},
            "diagnostics": self.diagnostics,
        }
        if self.bubble_fit is not None:
            out["bubble_fit"] = {"params": self.bubble_fit[0].to_dict(), "fit": self.bubble_fit[1]}
        return out


class _State(NamedTuple):
    u: SpectralField
    nodes: np.ndarray
    level: float
    energy: float
    denominator: float
    positive: np.ndarray
    grad: np.ndarray
    gnorm: float


class _Flow:
    def __init__(self, u0: SpectralField, k_nodes: np.ndarray, sigma: float, q: float, grid):
        self.sigma = sigma
        self.q = q
        self.grid = grid
        self.k_nodes = k_nodes
        self.mult = psigma_multipliers(u0.n, u0.L, u0.zonal, float(sigma))
        self.basis = harmonics.basis_matrix(grid, u0.L)

    def state(self, u: SpectralField) -> _State:
        parts, grad = functional_gradient_coeffs(u, self.k_nodes, self.sigma, self.grid, self.q)
        g = tangential(u, grad / self.mult, self.mult)
        gnorm = math.sqrt(max(float(np.dot(self.mult * g, g)), 0.0))
        nodes = self.basis @ u.coeffs
        return _State(u, nodes, parts.value, parts.energy, parts.denominator, parts.positive, g, gnorm)

    def increment(self, s: _State, d: np.ndarray, d_nodes: np.ndarray) -> float:
        """J(u + d) - J(u) without subtracting nearly equal levels."""
        q = self.q
        d_energy = float(np.dot(self.mult * d, 2.0 * s.u.coeffs + d))
        pos_new = np.maximum(s.nodes + d_nodes, 0.0) + constants.POSITIVE_FLOOR
        rel = np.expm1(q * np.log1p((pos_new - s.positive) / s.positive))
        d_denom = float(np.dot(self.grid.weights, self.k_nodes * s.positive**q * rel))
        if d_energy <= -s.energy or d_denom <= -s.denominator:
            return math.inf
        arg = math.log1p(d_energy / s.energy) - (2.0 / q) * math.log1p(d_denom / s.denominator)
        return s.level * math.expm1(arg)

    def normalize(self, coeffs: np.ndarray, like: SpectralField) -> SpectralField:
        return like.with_coeffs(coeffs / math.sqrt(float(np.dot(self.mult * coeffs, coeffs))))

    def negative_fraction(self, nodes: np.ndarray) -> float:
        total = self.grid.integrate(np.abs(nodes))
        return self.grid.integrate(np.maximum(-nodes, 0.0)) / total if total > 0 else 0.0


def _concentration_fit(u: SpectralField, kf, sigma: float):
    """Largest fitted λ, relative remainder and fit, trying one bubble then two."""
    best = None
    for p in (1, 2):
        try:
            params, _, diag = optimal_representation(u, p, kf, sigma)
        except errors.QcurvError as e:
            LOGGER.warning("bubble fit with p=%s failed during concentration check: %s", p, e)
            continue
        best = (float(np.max(params.lambdas)), diag["v_norm"], (params, diag))
        if diag["converged"]:
            break
    if best is None:
        return math.nan, math.nan, None
    return best


def _concentrating(window: Sequence[Tuple[float, float]], threshold: float, v_max: float) -> bool:
    lams = [lam for lam, _ in window]
    if not all(lam > threshold for lam in lams):
        return False
    if not all(b > a for a, b in itertoolz.sliding_window(2, lams)):
        return False
    v_first, v_last = window[0][1], window[-1][1]
    return v_last < v_max and v_last <= v_first


def flow_run(
    u0: SpectralField,
    K: Union[types.KLike, SpectralField],
    sigma: float,
    options: Optional[FlowOptions] = None,
    *,
    exponent: Optional[float] = None,
) -> FlowResult:
    """
    Run the gradient flow of J_K from ``u0``.

    Args:
        u0: Initial field with nonzero positive part.
        K: Prescribed function.
        sigma: Order of P_σ.
        options: Flow knobs; defaults to :class:`FlowOptions`.
        exponent: Subcritical exponent replacing 2n/(n-2σ).

    Returns:
        :class:`FlowResult` with status ``converged`` (gradient norm below ``tol`` at an
        iterate that is not a resolved bubble beyond the λ threshold), ``concentrated``
        (fitted λ above threshold and growing while the remainder shrinks, or a converged
        iterate fitting such a bubble, flagged by ``diagnostics["resolution_limited"]``)
        or ``max_iterations`` (iteration cap, or a stalled line search flagged by
        ``diagnostics["stalled"]``).
        Converged flows at the critical exponent also carry the normalized Kazdan-Warner
        integrals in ``diagnostics["kazdan_warner"]`` and their gate in
        ``diagnostics["kazdan_warner_ok"]``.

    Raises:
        DegenerateInputError: for u0 = 0 or a vanishing positive part.
        ConfigurationError: for a K that is not zonal with a zonal ``u0``.
        LeavingPositiveConeError: if the negative mass fraction stays above its limit for
            ``negative_mass_patience`` consecutive steps.
    """
    options = options or FlowOptions()
    n = u0.n
    sigma = utils.validate_sigma(n, sigma)
    q = utils.critical_exponent(n, sigma) if exponent is None else float(exponent)
    kf = kfuncs.as_k_function(K, n)
    grid = working_grid(u0)
    flow = _Flow(u0, kfuncs.grid_values(kf, grid), sigma, q, grid)
    norm0 = math.sqrt(max(float(np.dot(flow.mult * u0.coeffs, u0.coeffs)), 0.0))
    if norm0 == 0.0:
        raise errors.DegenerateInputError("flow started from the zero field")

    s = flow.state(u0 / norm0)
    levels, gnorms = [s.level], [s.gnorm]
    threshold = options.lambda_threshold(u0.L)
    checks: List[Tuple[float, float]] = []
    rows: List[Dict[str, Any]] = [_row(0, s.level, s.gnorm, None)]
    status: FlowStatus = "max_iterations"
    fit = None
    stalled = False
    neg_streak = 0
    tau = options.initial_step
    step = 0
    tracked = s.level

    with tqdm(total=options.max_iter, disable=not options.progress, desc="flow") as bar:
        while True:
            if s.gnorm < options.tol:
                status = "converged"
                break
            if step >= options.max_iter:
                break
            g_nodes = flow.basis @ s.grad
            first_try = True
            d_level = math.inf
            while tau >= options.min_step:
                d_level = flow.increment(s, -tau * s.grad, -tau * g_nodes)
                if d_level <= -options.armijo_c1 * tau * s.gnorm**2:
                    break
                tau *= 0.5
                first_try = False
            if not tau >= options.min_step:
                stalled = True
                LOGGER.warning("line search stalled at step %s, gradient norm %.3e", step, s.gnorm)
                break

            step += 1
            bar.update(1)
            s = flow.state(flow.normalize(s.u.coeffs - tau * s.grad, s.u))
            tracked += d_level
            levels.append(tracked)
            gnorms.append(s.gnorm)
            if first_try:
                tau = min(2.0 * tau, options.max_step)

            frac = flow.negative_fraction(s.nodes)
            neg_streak = neg_streak + 1 if frac > options.negative_mass_max else 0
            if neg_streak >= options.negative_mass_patience:
                raise errors.LeavingPositiveConeError(
                    f"negative mass fraction {frac:.3g} above {options.negative_mass_max} "
                    f"for {neg_streak} consecutive steps",
                    {"step": step, "negative_fraction": frac, "level": tracked},
                )

            lam_fit = None
            if options.detect_concentration and step % options.check_every == 0:
                lam_fit, v_norm, candidate = _concentration_fit(s.u, kf, sigma)
                checks.append((lam_fit, v_norm))
                LOGGER.debug("step %s: λ_fit = %.4g, ‖v‖ = %.3g", step, lam_fit, v_norm)
                window = checks[-options.concentration_window :]
                if len(window) == options.concentration_window and _concentrating(
                    window, threshold, options.concentration_v_max
                ):
                    status = "concentrated"
                    fit = candidate
            rows.append(_row(step, tracked, s.gnorm, lam_fit))
            LOGGER.debug("step %s: level %.15g, gradient %.3e, τ %.3g", step, tracked, s.gnorm, tau)
            if status == "concentrated":
                break

    resolution_limited = False
    kazdan_warner = None
    if status == "converged" and options.detect_concentration and exponent is None:
        # bubbles narrower than the truncation resolves stall as discrete critical points
        lam_fit, v_norm, candidate = _concentration_fit(s.u, kf, sigma)
        checks.append((lam_fit, v_norm))
        if lam_fit > threshold and v_norm < options.concentration_v_max:
            LOGGER.info(
                "converged iterate fits a bubble with λ = %.4g > %.4g; "
                "concentration reached the resolution of L = %s",
                lam_fit, threshold, u0.L,
            )
            status = "concentrated"
            fit = candidate
            resolution_limited = True
    if status == "converged" and exponent is None:
        kazdan_warner = [
            kazdan_warner_integral(s.u, kf, sigma, j, grid).normalized for j in range(1, n + 2)
        ]

    diagnostics = {
        "stalled": stalled,
        "exponent": q,
        "last_step": tau,
        "level_exact": s.level,
        "lambda_threshold": threshold,
        "concentration_checks": [list(c) for c in checks],
        "resolution_limited": resolution_limited,
    }
    if kazdan_warner is not None:
        diagnostics["kazdan_warner"] = kazdan_warner
        diagnostics["kazdan_warner_ok"] = all(
            abs(v) < constants.KAZDAN_WARNER_TOL for v in kazdan_warner
        )
    LOGGER.info("flow finished: %s after %s steps, level %.12g", status, step, tracked)
    if options.trace_path is not None:
        write_csv(rows, options.trace_path, fieldnames=TRACE_FIELDS, meta=options.trace_meta, make_dirs=True)
    return FlowResult(status, s.u, levels, gnorms, step, fit, diagnostics)


def _row(step: int, level: float, gnorm: float, lam_fit: Optional[float]) -> Dict[str, Any]:
    return {
        "step": step,
        "level": repr(level),
        "gradient_norm": repr(gnorm),
        "lambda_fit": "" if lam_fit is None else repr(lam_fit),
    }


def _subcritical_exponent(n: int, sigma: float, eps_exp: float) -> float:
    q = utils.critical_exponent(n, sigma)
    if not 0.0 < eps_exp < q - 2.0:
        raise errors.ParameterDomainError(
            errors.range_invalid_msg("eps_exp", eps_exp, (0.0, q - 2.0))
        )
    return q - eps_exp


def _dimension(K, n: Optional[int]) -> int:
    n = n if n is not None else getattr(K, "n", None)
    if n is None:
        raise errors.ConfigurationError("pass n when K carries no dimension")
    return utils.validate_dimension(n)


def subcritical_solve(
    K: Union[types.KLike, SpectralField],
    sigma: float,
    eps_exp: float,
    options: Optional[FlowOptions] = None,
    *,
    u0: Optional[SpectralField] = None,
    n: Optional[int] = None,
    L: int = 32,
    zonal: bool = True,
) -> FlowResult:
    """
    Flow of the functional with exponent 2n/(n-2σ) - ``eps_exp``, started from ``u0``
    (default: the constant 1 at truncation ``L``).

    Raises:
        ParameterDomainError: unless 0 < eps_exp < 2n/(n-2σ) - 2.
    """
    n = u0.n if u0 is not None else _dimension(K, n)
    sigma = utils.validate_sigma(n, sigma)
    exponent = _subcritical_exponent(n, sigma, eps_exp)
    u0 = u0 if u0 is not None else constant_field(n, L, zonal, 1.0)
    return flow_run(u0, K, sigma, options, exponent=exponent)


class BranchPoint(NamedTuple):
    """One solve along a subcritical branch."""

    eps_exp: float
    result: FlowResult
    level: float
    peak_ratio: float


def peak_ratio(u: SpectralField) -> float:
    """max u / mean u on the working grid."""
    grid = working_grid(u)
    nodes = inverse_transform(u, grid)
    mean = grid.integrate(nodes) / float(np.sum(grid.weights))
    return float(np.max(nodes) / mean) if mean > 0 else math.inf


def subcritical_branch(
    K: Union[types.KLike, SpectralField],
    sigma: float,
    eps_values: Sequence[float],
    options: Optional[FlowOptions] = None,
    *,
    u0: Optional[SpectralField] = None,
    n: Optional[int] = None,
    L: int = 32,
    zonal: bool = True,
    warm_start: bool = True,
    progress: bool = False,
) -> List[BranchPoint]:
    """
    Solve along the given subcritical exponents in order, warm-starting each solve from
    the previous solution; typically ``eps_values`` decreases geometrically toward 0.

    .. code-block:: pycon

        >>> eps = np.geomspace(0.5, 0.05, 4)
        >>> branch = subcritical_branch(LinearK(3), 0.25, eps, L=32)  # doctest: +SKIP
        >>> [round(b.peak_ratio, 2) for b in branch]  # doctest: +SKIP
    """
    n = u0.n if u0 is not None else _dimension(K, n)
    start = u0 if u0 is not None else constant_field(n, L, zonal, 1.0)
    out: List[BranchPoint] = []
    current = start
    for eps in tqdm(list(eps_values), disable=not progress, desc="branch"):
        result = subcritical_solve(K, sigma, float(eps), options, u0=current)
        out.append(BranchPoint(float(eps), result, result.final_level, peak_ratio(result.final_field)))
        LOGGER.info(
            "branch ε=%.4g: %s in %s steps, peak ratio %.4g",
            eps, result.status, result.step_count, out[-1].peak_ratio,
        )
        current = result.final_field if warm_start else start
    return out
