"""
:mod:`qcurv.types`: Definitions for common object types used throughout the package.
"""
from pathlib import Path
from typing import Callable, Protocol, Union, runtime_checkable

import numpy as np


PathLike = Union[str, Path]

# (N, n+1) arrays of embedded points and (N,) arrays of values at those points
Coords = np.ndarray
Samples = np.ndarray


@runtime_checkable
class KFunctionLike(Protocol):
    """Anything that evaluates a prescribed function K at embedded sphere points."""

    n: int

    def __call__(self, coords: Coords) -> Samples:
        ...


KLike = Union[float, KFunctionLike, Callable[[Coords], Samples]]
