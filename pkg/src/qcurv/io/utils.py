"""
I/O Utils
---------

:mod:`qcurv.io.utils`: Functions to help read and write run artifacts to disk.

Artifacts are small text files (CSV tables, JSON reports, field coefficients); a ``.gz``,
``.bz2`` or ``.xz`` suffix transparently compresses them.
"""
from __future__ import annotations

import bz2
import gzip
import io
import logging
import lzma
from typing import IO, Callable, Dict, Literal, Optional

from .. import errors as errors_
from .. import types, utils

LOGGER = logging.getLogger(__name__)

_OPENERS: Dict[str, Callable[..., IO]] = {
    "bz2": bz2.BZ2File,
    "gzip": gzip.GzipFile,
    "xz": lzma.LZMAFile,
}
_SUFFIXES = {".bz2": "bz2", ".gz": "gzip", ".xz": "xz"}


def open_sesame(
    filepath: types.PathLike,
    *,
    mode: str = "rt",
    encoding: Optional[str] = None,
    newline: Optional[str] = None,
    compression: Optional[Literal["infer", "bz2", "gzip", "xz"]] = "infer",
    make_dirs: bool = False,
) -> IO:
    """
    Open the artifact at ``filepath``, handling compression and, for writes, missing
    parent directories.

    Args:
        filepath: Path on disk (absolute or relative) of the file to open.
        mode: The mode in which ``filepath`` is opened.
        encoding: Name of the encoding used in text mode.
        newline: Universal newlines behavior in text mode.
        compression: None, an explicit codec, or 'infer' to pick one from the suffix.
        make_dirs: Create the parent directories of ``filepath`` when writing.

    Raises:
        ValueError: for an ``encoding`` in binary mode, or an unknown ``compression``.
        OSError: when reading a file that doesn't exist.
    """
    if encoding and "t" not in mode:
        raise ValueError("encoding only applicable for text mode")
    path = utils.to_path(filepath).resolve()
    writing = any(flag in mode for flag in "wax")
    if writing and make_dirs:
        path.parent.mkdir(parents=True, exist_ok=True)
    elif not writing and not path.is_file():
        raise OSError(f"file '{path}' does not exist")

    codec = _codec(path, compression)
    if codec is None:
        return path.open(mode=mode, encoding=encoding, newline=newline)
    LOGGER.debug("opening %s with %s compression", path, codec)
    raw = _OPENERS[codec](path, mode=mode.replace("b", "").replace("t", ""))
    if "b" in mode:
        return raw
    return io.TextIOWrapper(raw, encoding=encoding, newline=newline)


def _codec(path, compression) -> Optional[str]:
    if compression == "infer":
        return _SUFFIXES.get(path.suffix.lower())
    if compression is None or compression in _OPENERS:
        return compression
    raise ValueError(
        errors_.value_invalid_msg("compression", compression, [None, "infer", *sorted(_OPENERS)])
    )


def meta_comment(meta: Optional[dict]) -> str:
    """Render run metadata as a single ``# key=value ...`` line (empty if no metadata)."""
    if not meta:
        return ""
    return "# " + " ".join(f"{key}={value}" for key, value in meta.items()) + "\n"
