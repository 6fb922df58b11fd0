"""
:mod:`qcurv.io.csv`: Functions for reading from and writing to disk tabular run data
(sweeps, spectra, flow traces) in CSV format, optionally led by one ``#`` metadata line.
"""
from __future__ import annotations

import csv
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Union

from .. import types
from . import utils as io_utils


def read_csv(
    filepath: types.PathLike,
    *,
    encoding: Optional[str] = None,
    header: bool = True,
    delimiter: str = ",",
) -> Iterator[Union[Dict[str, str], List[str]]]:
    """
    Read the rows of a CSV file at ``filepath``, skipping leading ``#`` comment lines.

    Args:
        filepath: Path to file on disk from which data will be read.
        encoding: Name of the encoding used to decode the data in ``filepath``.
        header: If True, the first non-comment row holds column names and each
            subsequent row is yielded as a dict; otherwise rows are lists of strings.
        delimiter: 1-character string used to separate fields in a row.

    Yields:
        Next row.
    """
    with io_utils.open_sesame(filepath, mode="rt", encoding=encoding, newline="") as f:
        lines = (line for line in f if not line.startswith("#"))
        reader: Union[csv.DictReader, Any]
        if header:
            reader = csv.DictReader(lines, delimiter=delimiter)
        else:
            reader = csv.reader(lines, delimiter=delimiter)
        for row in reader:
            yield row


def read_meta(filepath: types.PathLike, *, encoding: Optional[str] = None) -> Dict[str, str]:
    """Parse the leading ``# key=value ...`` line of a CSV written by :func:`write_csv`."""
    with io_utils.open_sesame(filepath, mode="rt", encoding=encoding) as f:
        first = f.readline()
    if not first.startswith("#"):
        return {}
    return dict(item.split("=", 1) for item in first[1:].split() if "=" in item)


def write_csv(
    data: Iterable[Dict[str, Any]] | Iterable[Iterable],
    filepath: types.PathLike,
    *,
    encoding: Optional[str] = None,
    make_dirs: bool = False,
    fieldnames: Optional[Sequence[str]] = None,
    meta: Optional[Dict[str, Any]] = None,
    delimiter: str = ",",
) -> None:
    """
    Write rows of ``data`` to disk at ``filepath``, where each row is an iterable
    or a dictionary of strings and/or numbers, written to one line with values
    separated by ``delimiter``.

    Args:
        data: If ``fieldnames`` is None, an iterable of iterables of strings
            and/or numbers to write to disk; for example::

                [[0, 1.5], [1, 2.25]]

            If ``fieldnames`` is specified, an iterable of dictionaries keyed by them.
        filepath: Path to file on disk to which data will be written.
        encoding: Name of the encoding used to encode the data in ``filepath``.
        make_dirs: If True, automatically create (sub)directories if not already present
            in order to write ``filepath``.
        fieldnames: Column order; written as a header row.
        meta: Run metadata (config digest, seed, ...) written as a leading ``#`` line.
        delimiter: 1-character string used to separate fields in a row.

    Floats are written with ``repr`` precision, so identical inputs give identical files.
    """
    with io_utils.open_sesame(
        filepath, mode="wt", newline="", encoding=encoding, make_dirs=make_dirs
    ) as f:
        f.write(io_utils.meta_comment(meta))
        csv_writer: Union[csv.DictWriter, Any]
        if fieldnames:
            csv_writer = csv.DictWriter(f, fieldnames, delimiter=delimiter)
            csv_writer.writeheader()
        else:
            csv_writer = csv.writer(f, delimiter=delimiter)
        csv_writer.writerows(data)
