"""Plain-text formats: observation CSV, adjacency CSV, edge lists."""

import csv
import io
import math

import numpy as np

from .exceptions import InvalidInputError
from .multiple import AdjacencyMatrix

__all__ = [
    "CsvParseError",
    "read_observations",
    "parse_observations",
    "format_dense",
    "parse_dense",
    "format_edge_list",
    "parse_edge_list",
]


class CsvParseError(InvalidInputError):
    """Malformed numeric CSV; ``line`` and ``column`` are 1-based."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = "line %d" % line
            if column is not None:
                where += ", column %d" % column
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


def _to_float(text):
    # float() also accepts "nan", "inf" and "1_000"; only plain decimals
    # in the C locale are allowed here.
    t = text.strip()
    if not t or "_" in t:
        raise ValueError(text)
    v = float(t)
    if not math.isfinite(v):
        raise ValueError(text)
    return v


def parse_observations(text):
    """Parse CSV text into an (n_rows, n_cols) float array.

    The first line is treated as a header when any of its fields is not
    a number; every other line must hold the same number of decimal
    fields.  Blank lines are skipped.
    """
    rows = []
    width = None
    reader = csv.reader(io.StringIO(text))
    for lineno, fields in enumerate(reader, start=1):
        if not fields or all(not f.strip() for f in fields):
            continue
        values = []
        for col, field in enumerate(fields, start=1):
            try:
                values.append(_to_float(field))
            except ValueError:
                if lineno == 1 and not rows:
                    values = None
                    break
                raise CsvParseError("not a finite decimal number: %r"
                                    % field, lineno, col) from None
        if values is None:
            width = len(fields)
            continue
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise CsvParseError("expected %d fields, found %d"
                                % (width, len(values)), lineno)
        rows.append(values)
    if not rows:
        raise CsvParseError("no data rows")
    return np.array(rows, dtype=np.float64)


def read_observations(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_observations(fh.read())


def format_dense(adjacency):
    """Dense 0/1 matrix, one row per line."""
    return "".join(",".join(str(int(v)) for v in row) + "\n"
                   for row in adjacency.g)


def parse_dense(text):
    return AdjacencyMatrix(parse_observations(text))


def format_edge_list(adjacency):
    """One ``i,j`` line per edge, ``i < j``, 1-based indices."""
    return "".join("%d,%d\n" % (i + 1, j + 1) for i, j in adjacency.edges())


def parse_edge_list(text, N):
    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise CsvParseError("expected 'i,j'", lineno)
        try:
            i, j = (int(p) for p in parts)
        except ValueError:
            raise CsvParseError("indices must be integers", lineno) from None
        if not (1 <= i < j <= N):
            raise CsvParseError("need 1 <= i < j <= %d" % N, lineno)
        edges.append((i - 1, j - 1))
    return AdjacencyMatrix.from_edges(N, edges)
