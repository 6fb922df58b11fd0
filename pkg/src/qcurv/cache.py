"""
:mod:`qcurv.cache`: Functionality for caching quadrature grids and harmonic bases.
Building these is the slow part of every computation; let's just do it once and forget
about it.
"""
import logging
import os
import sys

import numpy as np
from cachetools import LRUCache


LOGGER = logging.getLogger(__name__)


def _get_size(obj) -> int:
    """
    Approximate size of a cached value in bytes, counting the numpy buffers it holds.
    """
    if isinstance(obj, np.ndarray):
        return obj.nbytes
    if isinstance(obj, (tuple, list)):
        return sum(_get_size(item) for item in obj) + sys.getsizeof(obj)
    if hasattr(obj, "__dict__"):
        return sum(_get_size(v) for v in vars(obj).values()) + sys.getsizeof(obj)
    return sys.getsizeof(obj)


LRU_CACHE = LRUCache(
    int(os.environ.get("QCURV_MAX_CACHE_SIZE", 1073741824)), getsizeof=_get_size
)
""":class:`cachetools.LRUCache`: Least Recently Used (LRU) cache for grids and bases.

The max cache size may be set by the `QCURV_MAX_CACHE_SIZE` environment variable,
where the value must be an integer (in bytes). Otherwise, the max size is 1GB.
"""


def clear():
    """Clear qcurv's cache of grids and harmonic bases."""
    global LRU_CACHE
    LRU_CACHE.clear()
    LOGGER.debug("cleared grid and basis cache")
