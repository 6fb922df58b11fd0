"""
:mod:`qcurv.utils`: Variety of general-purpose utility functions for validating args,
fitting scaling laws, and facilitating meta package tasks.
"""
from __future__ import annotations

import hashlib
import inspect
import logging
import math
import pathlib
import sys
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from . import errors as errors_, types

LOGGER = logging.getLogger(__name__)


_KW_PARAM_KINDS = {
    inspect.Parameter.POSITIONAL_OR_KEYWORD,
    inspect.Parameter.KEYWORD_ONLY,
}


def get_config() -> Dict[str, Any]:
    """
    Get key configuration info about dev environment: OS, python, numpy, scipy, and qcurv.

    Returns:
        dict
    """
    import scipy

    from ._version import __version__ as qcurv_version

    return {
        "platform": sys.platform,
        "python": sys.version,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "qcurv": qcurv_version,
    }


def to_path(path: types.PathLike) -> pathlib.Path:
    """
    Coerce ``path`` to a ``pathlib.Path``.

    Raises:
        TypeError
    """
    if isinstance(path, str):
        return pathlib.Path(path)
    elif isinstance(path, pathlib.Path):
        return path
    else:
        raise TypeError(
            errors_.type_invalid_msg("path", type(path), Union[str, pathlib.Path])
        )


def validate_dimension(n: int, *, minimum: int = 2) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError(errors_.type_invalid_msg("n", type(n), int))
    if n < minimum:
        raise errors_.ParameterDomainError(f"`n` value = {n} is invalid; need n >= {minimum}")
    return int(n)


def validate_sigma(n: int, sigma: float, *, existence: bool = False) -> float:
    """
    Check that ``sigma`` lies in (0, n/2), or in (0, (n-2)/2) when ``existence`` is set.

    Raises:
        ParameterDomainError: if ``sigma`` is outside (0, n/2).
        HypothesisError: if ``existence`` and ``sigma`` is outside (0, (n-2)/2).
    """
    sigma = float(sigma)
    if not (0.0 < sigma < n / 2):
        raise errors_.ParameterDomainError(
            errors_.range_invalid_msg("sigma", sigma, (0, f"n/2 = {n / 2}"))
        )
    if existence and not (sigma < (n - 2) / 2):
        raise errors_.HypothesisError(
            errors_.range_invalid_msg("sigma", sigma, (0, f"(n-2)/2 = {(n - 2) / 2}"))
        )
    return sigma


def critical_exponent(n: int, sigma: float) -> float:
    """The critical Sobolev exponent 2n/(n-2σ)."""
    return 2.0 * n / (n - 2.0 * sigma)


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float]:
    """
    Least-squares slope of log|y| against log(x).

    Returns:
        (slope, residual), where residual is the root-mean-square misfit in log space.
    """
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.abs(np.asarray(ys, dtype=float)))
    coeffs, res, *_ = np.polyfit(lx, ly, 1, full=True)
    rms = math.sqrt(float(res[0]) / len(lx)) if len(res) else 0.0
    return float(coeffs[0]), rms


def geometric_samples(lo: float, hi: float, num: int) -> np.ndarray:
    if num < 2 or lo <= 0 or hi <= lo:
        raise errors_.ParameterDomainError(
            f"need 0 < lo < hi and num >= 2, not lo={lo}, hi={hi}, num={num}"
        )
    return np.geomspace(lo, hi, num)


def text_digest(text: str) -> str:
    """SHA-256 hex digest of ``text``, used to tie outputs to their config."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def get_kwargs_for_func(func: Callable, kwargs: Dict[str, Any]) -> Dict[str, Any]:
    """
    Get the set of keyword arguments from ``kwargs`` that are used by ``func``.
    Useful when calling a func from another func and inferring its signature
    from provided ``**kwargs``.
    """
    if not kwargs:
        return {}

    func_params = {
        name
        for name, param in inspect.signature(func).parameters.items()
        if param.kind in _KW_PARAM_KINDS
    }
    return {kwarg: value for kwarg, value in kwargs.items() if kwarg in func_params}


def as_rng(seed: Optional[int | np.random.Generator]) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
