"""
Commands
--------

:mod:`qcurv.harness.commands`: The experiments the CLI runs, one registered function per
command, and :func:`run_command`, which maps their outcome to an exit status:

- 0: success
- 1: a negative scientific outcome (a false verdict, a flow that hit its iteration cap or
  converged to a point failing the Kazdan-Warner gate, failed scaling checks); still a
  valid run
- 2: configuration problems, including unmet hypotheses and out-of-domain parameters
- 3: numerical failures

Every file written carries the configuration digest and the seed.
"""
from __future__ import annotations

import dataclasses
import logging
import pathlib
from typing import Any, Dict, List, Optional

import catalogue

from .. import errors, utils
from ..bubbles import (
    bubble_constant,
    bubble_energy,
    bubble_field,
    bubble_residual,
    calibrate_constants,
)
from ..flow import (
    FlowOptions,
    euler_lagrange_residual,
    flow_run,
    kazdan_warner_integral,
    subcritical_branch,
)
from ..io import write_csv, write_field, write_json
from ..morse import NewtonOptions, existence_verdict, find_critical_points, k_extremes
from ..spectral import harmonics
from ..spectral.fields import constant_field, forward_transform, working_grid, zero_field
from ..spectral.operator import (
    beckner_constant,
    conformal_constant,
    psigma_eigenvalue,
    yamabe_quotient,
)
from ..sphere.points import north_pole, sphere_area
from .config import RunConfig

LOGGER = logging.getLogger(__name__)

command_registry = catalogue.create("qcurv", "commands", entry_points=True)

EXIT_SUCCESS = 0
EXIT_NEGATIVE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

SLOPE_TOL = 0.2
EPSILON_SLOPE_TOL = 0.1


def _multiplicity(n: int, k: int) -> int:
    """Dimension of the space of degree-k spherical harmonics on Sⁿ."""
    below = harmonics.harmonic_dimension(n, k - 1, False) if k > 0 else 0
    return harmonics.harmonic_dimension(n, k, False) - below


@command_registry.register("spectrum")
def spectrum(config: RunConfig, out: pathlib.Path, *, progress: bool = False) -> int:
    """Eigenvalues of P_σ up to degree ``kmax`` and the constants c, S, E and c̄."""
    n, sigma = config.n, utils.validate_sigma(config.n, config.sigma)
    kmax = config.option("spectrum", "kmax")
    if kmax < 0:
        raise errors.ParameterDomainError(f"kmax must be >= 0, not {kmax}")
    rows = [
        {
            "k": k,
            "eigenvalue": repr(psigma_eigenvalue(n, sigma, k)),
            "multiplicity": _multiplicity(n, k),
        }
        for k in range(kmax + 1)
    ]
    write_csv(
        rows,
        out / "spectrum.csv",
        fieldnames=("k", "eigenvalue", "multiplicity"),
        meta=config.meta(),
        make_dirs=True,
    )
    summary = {
        "meta": config.meta(),
        "n": n,
        "sigma": sigma,
        "sphere_area": sphere_area(n),
        "conformal_constant": conformal_constant(n, sigma),
        "beckner_constant": beckner_constant(n, sigma),
        "bubble_energy": bubble_energy(n, sigma),
        "bubble_constant": bubble_constant(n, sigma),
    }
    write_json(summary, out / "constants.json", make_dirs=True)
    LOGGER.info(
        "spectrum: %s eigenvalues, c(n, σ) = %.12g", kmax + 1, summary["conformal_constant"]
    )
    return EXIT_SUCCESS


@command_registry.register("bubble-residual")
def bubble_residual_sweep(
    config: RunConfig, out: pathlib.Path, *, progress: bool = False
) -> int:
    """PDE residual and Yamabe-quotient error of a bubble at the north pole, per truncation."""
    n, sigma = config.n, utils.validate_sigma(config.n, config.sigma)
    lam = config.option("bubble-residual", "lambda")
    S = beckner_constant(n, sigma)
    rows = []
    for L in config.option("bubble-residual", "truncations"):
        residual = bubble_residual(lam, n, sigma, L, zonal=config.zonal)
        u = bubble_field(north_pole(n), lam, n, sigma, L, zonal=config.zonal)
        rows.append(
            {
                "L": L,
                "residual": repr(residual),
                "yamabe_error": repr(abs(yamabe_quotient(u, sigma) / S - 1.0)),
            }
        )
        LOGGER.info("bubble λ = %s, L = %s: residual %.3e", lam, L, residual)
    write_csv(
        rows,
        out / "bubble_residual.csv",
        fieldnames=("L", "residual", "yamabe_error"),
        meta=config.meta(),
        make_dirs=True,
    )
    return EXIT_SUCCESS


@command_registry.register("expansion-verify")
def expansion_verify(config: RunConfig, out: pathlib.Path, *, progress: bool = False) -> int:
    """
    Calibrate the expansion constants and check the fitted decay exponents: λ^{-2} for
    single bubbles at both calibration centers, ε_ij ~ λ^{-(n-2σ)} for bubble pairs.
    """
    opts = config.sections["expansion-verify"]
    constants_ = calibrate_constants(
        config.n,
        config.sigma,
        opts["truncation"],
        lambda_range=(opts["lambda_min"], opts["lambda_max"]),
        num=opts["samples"],
        n_jobs=opts["n_jobs"],
        progress=progress,
    )
    prov = constants_.provenance
    expected = prov["double"]["expected_slope"]
    checks = {
        "single_north_slope": abs(prov["single_north"]["slope"] + 2.0) <= SLOPE_TOL,
        "single_south_slope": abs(prov["single_south"]["slope"] + 2.0) <= SLOPE_TOL,
        "epsilon_slope": abs(prov["double"]["slope"] / expected - 1.0) <= EPSILON_SLOPE_TOL,
    }
    rows: List[Dict[str, Any]] = []
    for kind in ("single_north", "single_south", "double"):
        for i, lam in enumerate(prov["lambdas"]):
            rows.append(
                {
                    "kind": kind,
                    "lambda": repr(lam),
                    "deviation": repr(prov[kind]["deviation"][i]),
                    "epsilon": repr(prov["double"]["epsilon"][i]) if kind == "double" else "",
                }
            )
    write_csv(
        rows,
        out / "expansion_sweep.csv",
        fieldnames=("kind", "lambda", "deviation", "epsilon"),
        meta=config.meta(),
        make_dirs=True,
    )
    write_json(
        {"meta": config.meta(), "constants": constants_, "checks": checks},
        out / "calibration.json",
        make_dirs=True,
    )
    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        LOGGER.info("expansion checks failed: %s", ", ".join(failed))
        return EXIT_NEGATIVE
    return EXIT_SUCCESS


def _initial_field(config: RunConfig, perturbation: float):
    """1 + perturbation·ξ_{n+1} at the configured truncation."""
    base = zero_field(config.n, config.L, config.zonal)
    grid = working_grid(base)
    xi = forward_transform(grid.coords[:, -1], grid, config.L)
    return constant_field(config.n, config.L, config.zonal, 1.0) + xi * perturbation


@command_registry.register("flow")
def flow(config: RunConfig, out: pathlib.Path, *, progress: bool = False) -> int:
    """
    Gradient flow of J_K from a perturbed constant, with solution-quality gates on a
    converged outcome, and optionally a subcritical continuation branch.
    """
    opts = config.sections["flow"]
    sigma = utils.validate_sigma(config.n, config.sigma)
    K = config.make_k()
    options = FlowOptions(
        tol=opts["tol"],
        max_iter=opts["max_iter"],
        check_every=opts["check_every"],
        concentration_lambda=opts["concentration_lambda"],
        trace_path=out / "flow_trace.csv" if opts["trace"] else None,
        trace_meta=config.meta(),
        progress=progress,
    )
    u0 = _initial_field(config, opts["perturbation"])
    result = flow_run(u0, K, sigma, options)

    report: Dict[str, Any] = {"meta": config.meta(), "K": config.k_family, "result": result}
    kw_ok = True
    if result.status == "converged":
        kw = [
            kazdan_warner_integral(result.final_field, K, sigma, j)
            for j in range(1, config.n + 2)
        ]
        mu, residual = euler_lagrange_residual(result.final_field, K, sigma)
        kw_ok = result.diagnostics["kazdan_warner_ok"]
        report["kazdan_warner"] = [v._asdict() for v in kw]
        report["kazdan_warner_ok"] = kw_ok
        report["euler_lagrange"] = {"multiplier": mu, "residual": residual}
        if not kw_ok:
            LOGGER.info("converged flow fails the Kazdan-Warner gate; not a solution")
    if opts["eps"]:
        branch_options = dataclasses.replace(
            options, detect_concentration=False, trace_path=None
        )
        branch = subcritical_branch(
            K, sigma, opts["eps"], branch_options, u0=u0, progress=progress
        )
        rows = [
            {
                "eps_exp": repr(b.eps_exp),
                "status": b.result.status,
                "level": repr(b.level),
                "peak_ratio": repr(b.peak_ratio),
                "steps": b.result.step_count,
            }
            for b in branch
        ]
        write_csv(
            rows,
            out / "branch.csv",
            fieldnames=("eps_exp", "status", "level", "peak_ratio", "steps"),
            meta=config.meta(),
            make_dirs=True,
        )
    write_json(report, out / "flow_report.json", make_dirs=True)
    meta = config.meta()
    write_field(
        result.final_field,
        sigma,
        out / "flow_final.field",
        make_dirs=True,
        comment=" ".join(f"{key}={value}" for key, value in meta.items()),
    )
    if result.status == "max_iterations" or not kw_ok:
        return EXIT_NEGATIVE
    return EXIT_SUCCESS


_CRITICAL_FIELDS = (
    "location",
    "k_value",
    "gradient_norm",
    "morse_index",
    "laplacian",
    "in_k_plus",
    "margin",
)


@command_registry.register("existence")
def existence(config: RunConfig, out: pathlib.Path, *, progress: bool = False) -> int:
    """Critical points of K and the existence report built on them."""
    opts = config.sections["existence"]
    n = config.n
    sigma = utils.validate_sigma(n, config.sigma, existence=True)
    K = config.make_k()
    records = find_critical_points(
        K, n, NewtonOptions(starts=opts["starts"], seed=config.seed, n_jobs=opts["n_jobs"])
    )
    k_max, k_min = k_extremes(records)
    report = existence_verdict(records, k_max, k_min, n, sigma, p_max=opts["p_max"])
    rows = []
    for r in records:
        row = r.to_dict()
        row["location"] = " ".join(repr(float(x)) for x in row["location"])
        rows.append(
            {
                key: row[key] if isinstance(row[key], str) else repr(row[key])
                for key in _CRITICAL_FIELDS
            }
        )
    write_csv(
        rows,
        out / "critical_points.csv",
        fieldnames=_CRITICAL_FIELDS,
        meta=config.meta(),
        make_dirs=True,
    )
    write_json(
        {"meta": config.meta(), "K": config.k_family, "report": report},
        out / "existence.json",
        make_dirs=True,
    )
    return EXIT_SUCCESS if report.any_holds else EXIT_NEGATIVE


def exit_status(exc: errors.QcurvError) -> int:
    """Exit status for a qcurv error raised by a command."""
    if isinstance(
        exc, (errors.ConfigurationError, errors.HypothesisError, errors.ParameterDomainError)
    ):
        return EXIT_CONFIG
    return EXIT_NUMERICAL


def run_command(
    name: str,
    config: RunConfig,
    out: Optional[pathlib.Path] = None,
    *,
    progress: bool = False,
) -> int:
    """
    Run command ``name`` on ``config``, writing into ``out`` (default: ``config.out``).

    Returns:
        The exit status; errors from qcurv are logged and mapped to 2 or 3, anything
        else propagates.
    """
    try:
        command = command_registry.get(name)
    except catalogue.RegistryError:
        LOGGER.error(
            errors.value_invalid_msg("command", name, sorted(command_registry.get_all()))
        )
        return EXIT_CONFIG
    out = pathlib.Path(out) if out is not None else config.out
    LOGGER.info(
        "running %s (config %s, seed %s) into %s", name, config.digest[:12], config.seed, out
    )
    try:
        status = command(config, out, progress=progress)
    except errors.QcurvError as e:
        status = exit_status(e)
        LOGGER.error("%s failed: %s: %s", name, type(e).__name__, e)
        diagnostics = getattr(e, "diagnostics", None)
        if diagnostics:
            write_json(
                {
                    "meta": config.meta(),
                    "error": type(e).__name__,
                    "message": str(e),
                    "diagnostics": diagnostics,
                },
                out / f"{name}_failure.json",
                make_dirs=True,
            )
    LOGGER.info("%s finished with exit status %s", name, status)
    return status
