"""Parsers for the simulator's documented file formats.

Only the published formats are read here — curve CSVs with a header
row, grid files with six `key,value` header lines plus a density
matrix, and overlay point CSVs.  Malformed input raises ParseError
naming the offending file and line.
"""

from __future__ import annotations

import numpy as np

GRID_HEADER_KEYS = ("extent_au", "resolution", "time_s", "n", "Z", "eta")


class ParseError(ValueError):
    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


def read_curve_csv(path, expected_columns):
    """Columns of a headered CSV as a dict of float arrays."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header.split(",") != list(expected_columns):
            raise ParseError(path, 1, f"expected header {','.join(expected_columns)!r}, "
                                      f"got {header!r}")
        columns = {name: [] for name in expected_columns}
        for line_no, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.strip().split(",")
            if len(parts) != len(expected_columns):
                raise ParseError(path, line_no,
                                 f"expected {len(expected_columns)} fields, got {len(parts)}")
            try:
                values = [float(p) for p in parts]
            except ValueError as exc:
                raise ParseError(path, line_no, str(exc)) from exc
            for name, value in zip(expected_columns, values):
                columns[name].append(value)
    return {name: np.asarray(vals) for name, vals in columns.items()}


def read_grid(path):
    """(header dict, density matrix) from a simulator grid file."""
    header = {}
    with open(path) as fh:
        for line_no, key in enumerate(GRID_HEADER_KEYS, start=1):
            line = fh.readline()
            if not line:
                raise ParseError(path, line_no, "unexpected end of header")
            parts = line.strip().split(",", 1)
            if len(parts) != 2 or parts[0] != key:
                raise ParseError(path, line_no, f"expected header line {key!r}, got {line.strip()!r}")
            header[key] = parts[1]
        try:
            resolution = int(header["resolution"])
            extent = float(header["extent_au"])
        except ValueError as exc:
            raise ParseError(path, 2, f"bad header value: {exc}") from exc
        rows = []
        for line_no, line in enumerate(fh, start=len(GRID_HEADER_KEYS) + 1):
            if not line.strip():
                continue
            parts = line.strip().split(",")
            if len(parts) != resolution:
                raise ParseError(path, line_no,
                                 f"expected {resolution} values, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise ParseError(path, line_no, str(exc)) from exc
        if len(rows) != resolution:
            raise ParseError(path, len(GRID_HEADER_KEYS) + len(rows) + 1,
                             f"expected {resolution} rows, got {len(rows)}")
    header["extent_au"] = extent
    header["resolution"] = resolution
    return header, np.asarray(rows)


def read_overlay(path):
    """(n_points, 2) array of overlay boundary points."""
    pts = read_curve_csv(path, ("x_au", "y_au"))
    return np.column_stack([pts["x_au"], pts["y_au"]])
