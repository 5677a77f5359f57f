"""CSV reading and writing: RFC-4180 subset, header row mandatory, '.' decimals."""

import csv

import numpy as np

from .errors import CSVFormatError, InvalidArgumentError

FLOAT_FMT = "%.17g"


def read_table(path):
    """Read a numeric CSV into (header list, dict column -> float64 array)."""
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CSVFormatError(path, 1, "empty file") from None
        header = [h.strip() for h in header]
        if any(not h for h in header):
            raise CSVFormatError(path, 1, "blank column name in header")
        cols = [[] for _ in header]
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise CSVFormatError(
                    path, line_no, f"expected {len(header)} fields, got {len(row)}"
                )
            for i, cell in enumerate(row):
                try:
                    cols[i].append(float(cell))
                except ValueError:
                    raise CSVFormatError(
                        path, line_no, f"column {header[i]!r}: not a number: {cell!r}"
                    ) from None
    return header, {name: np.asarray(col, dtype=np.float64) for name, col in zip(header, cols)}


def pick_column(header, columns, requested, preferences):
    """Resolve which column a command operates on."""
    if requested is not None:
        for name in header:
            if name.lower() == requested.lower():
                return name
        raise InvalidArgumentError(f"column {requested!r} not in header {header}")
    lowered = {name.lower(): name for name in header}
    for pref in preferences:
        if pref in lowered:
            return lowered[pref]
    if len(header) >= 2:
        return header[1]
    raise InvalidArgumentError(f"cannot infer a value column from header {header}")


def write_rows(path, header, rows):
    """Write rows of floats/ints/strings; floats use 17 significant digits."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return FLOAT_FMT % v
    return str(v)
