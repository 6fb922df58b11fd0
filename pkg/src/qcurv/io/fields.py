"""
:mod:`qcurv.io.fields`: Plain-text persistence of spectral fields.

A field file has a header line ``n sigma L zonal`` (``zonal`` is 1 or 0) followed by one
coefficient per line, in the coefficient order of :mod:`qcurv.spectral.harmonics`
(ascending degree, then the recursive inner degree and index). Lines starting with ``#``
are comments.

.. code-block:: text

    3 0.25 2 1
    4.4428829381583661
    0
    0.5
"""
from __future__ import annotations

import logging
from typing import Optional, Tuple

import numpy as np

from .. import errors, types
from ..spectral.fields import SpectralField
from ..spectral.harmonics import harmonic_dimension
from . import utils as io_utils

LOGGER = logging.getLogger(__name__)


def write_field(
    u: SpectralField,
    sigma: float,
    filepath: types.PathLike,
    *,
    make_dirs: bool = False,
    comment: Optional[str] = None,
) -> None:
    """Write ``u`` (and the σ it belongs to) to ``filepath``."""
    with io_utils.open_sesame(filepath, mode="wt", make_dirs=make_dirs) as f:
        if comment:
            f.write(f"# {comment}\n")
        f.write(f"{u.n} {sigma!r} {u.L} {int(u.zonal)}\n")
        for c in u.coeffs:
            f.write(f"{c:.17g}\n")


def read_field(filepath: types.PathLike) -> Tuple[SpectralField, float]:
    """
    Read a field written by :func:`write_field`.

    Returns:
        (field, sigma)

    Raises:
        ConfigurationError: for a malformed header or a coefficient count that does not
            match the header.
    """
    with io_utils.open_sesame(filepath, mode="rt") as f:
        lines = [line.strip() for line in f]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise errors.ConfigurationError(f"field file {filepath} is empty")
    head = lines[0].split()
    try:
        n, sigma, L, zonal = int(head[0]), float(head[1]), int(head[2]), int(head[3])
        if len(head) != 4 or zonal not in (0, 1):
            raise ValueError(head)
        coeffs = np.array([float(line) for line in lines[1:]])
    except (ValueError, IndexError):
        raise errors.ConfigurationError(
            f"field file {filepath} needs a header 'n sigma L zonal' and numeric coefficients"
        )
    expected = harmonic_dimension(n, L, bool(zonal))
    if coeffs.size != expected:
        raise errors.ConfigurationError(
            f"field file {filepath} holds {coeffs.size} coefficients; header implies {expected}"
        )
    return SpectralField(n, L, bool(zonal), coeffs), sigma
