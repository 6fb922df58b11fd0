"""
:mod:`qcurv.io.json`: Functions for reading from and writing to disk structured reports
in JSON format.
"""
from __future__ import annotations

import dataclasses
import json
import math
from typing import Any, Optional, Tuple

import numpy as np

from .. import types
from . import utils as io_utils


def read_json(
    filepath: types.PathLike,
    *,
    encoding: Optional[str] = None,
) -> Any:
    """
    Read the contents of a JSON file at ``filepath``.

    Args:
        filepath: Path to file on disk from which data will be read.
        encoding: Name of the encoding used to decode the data in ``filepath``.
    """
    with io_utils.open_sesame(filepath, mode="rt", encoding=encoding) as f:
        return json.load(f)


def write_json(
    data: Any,
    filepath: types.PathLike,
    *,
    encoding: Optional[str] = None,
    make_dirs: bool = False,
    ensure_ascii: bool = False,
    separators: Tuple[str, str] = (",", ":"),
    sort_keys: bool = True,
    indent: Optional[int | str] = 2,
) -> None:
    """
    Write JSON ``data`` to disk at ``filepath``.

    Args:
        data: JSON data to write to disk, including any Python objects
            encodable by default in :mod:`json`, as well as numpy scalars and arrays,
            dataclasses and objects with a ``to_dict()`` method.
        filepath: Path to file on disk to which data will be written.
        encoding: Name of the encoding used to encode the data in ``filepath``.
        make_dirs: If True, automatically create (sub)directories if
            not already present in order to write ``filepath``.
        ensure_ascii: If True, all non-ASCII characters are escaped;
            otherwise, non-ASCII characters are output as-is.
        separators: An (item_separator, key_separator) pair
            specifying how items and keys are separated in output.
        sort_keys: If True, each output dictionary is sorted by key.
        indent: Pretty-printing indent level; None gives the most compact form.

    Non-finite floats are written as the strings ``"inf"``, ``"-inf"`` and ``"nan"``.

    See Also:
        https://docs.python.org/3/library/json.html#json.dump
    """
    with io_utils.open_sesame(
        filepath, mode="wt", encoding=encoding, make_dirs=make_dirs
    ) as f:
        f.write(
            json.dumps(
                _finite(data),
                indent=indent,
                ensure_ascii=ensure_ascii,
                separators=separators,
                sort_keys=sort_keys,
                cls=ExtendedJSONEncoder,
                allow_nan=False,
            )
        )


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if hasattr(obj, "to_dict"):
        return _finite(obj.to_dict())
    if isinstance(obj, dict):
        return {str(key): _finite(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(value) for value in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_, np.ndarray)):
        return _finite(obj.tolist())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _finite(dataclasses.asdict(obj))
    return obj


class ExtendedJSONEncoder(json.JSONEncoder):
    """
    Sub-class of :class:`json.JSONEncoder`, used to write JSON data to disk in
    :func:`write_json()` while handling a broader range of Python objects.

    - numpy scalars and arrays => Python numbers and lists
    - objects with ``to_dict()`` and dataclasses => dicts
    """

    def default(self, obj):
        if isinstance(obj, (np.floating, np.integer, np.bool_, np.ndarray)):
            return obj.tolist()
        elif hasattr(obj, "to_dict"):
            return obj.to_dict()
        elif dataclasses.is_dataclass(obj) and not isinstance(obj, type):
            return dataclasses.asdict(obj)
        else:
            return super().default(obj)
