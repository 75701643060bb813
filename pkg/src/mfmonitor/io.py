"""Reading and writing matrix series.

Two formats are supported:

* ``csv``: long format with header ``t,i,j,value`` and 1-based indices.
  Rows may come in any order; every cell must appear exactly once.
* ``binary``: a 32-byte little-endian header (magic ``MCPD``, version
  u16, p1 u32, p2 u32, T u64, 10 reserved bytes) followed by ``T*p1*p2``
  float64 values in time-major, row-major order.
"""

from __future__ import annotations

import csv
import math
import struct
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DomainError, FormatError
from .series import MatrixSeries

MAGIC = b"MCPD"
VERSION = 1
HEADER = struct.Struct("<4sHIIQ10x")
CSV_HEADER = ["t", "i", "j", "value"]
FORMATS = ("csv", "binary")


def _index(text: str, line: int, name: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise FormatError(f"line {line}: {name}={text!r} is not an integer") from None
    if v < 1:
        raise FormatError(f"line {line}: {name}={v} must be >= 1")
    return v


def read_csv(path) -> MatrixSeries:
    """Read a long-format CSV file.

    Dimensions are the largest indices seen. Duplicate cells raise
    :class:`FormatError` naming the line; the first missing ``(t, i, j)``
    (lexicographic order) is reported if the grid is incomplete.
    """
    cells = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file") from None
        if [h.strip().lower() for h in header] != CSV_HEADER:
            raise FormatError(f"line 1: header must be t,i,j,value, got {','.join(header)}")
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise FormatError(f"line {line}: expected 4 fields, got {len(row)}")
            key = tuple(_index(row[k].strip(), line, n) for k, n in enumerate("tij"))
            try:
                value = float(row[3])
            except ValueError:
                raise FormatError(f"line {line}: value {row[3]!r} is not a number") from None
            if not math.isfinite(value):
                raise DomainError(f"line {line}: non-finite value at (t,i,j)={key}")
            if key in cells:
                raise FormatError(f"line {line}: duplicate cell (t,i,j)={key} "
                                  f"(first seen at line {cells[key][1]})")
            cells[key] = (value, line)
    if not cells:
        raise FormatError(f"{path}: no data rows")
    T = max(k[0] for k in cells)
    p1 = max(k[1] for k in cells)
    p2 = max(k[2] for k in cells)
    if len(cells) != T * p1 * p2:
        for t in range(1, T + 1):
            for i in range(1, p1 + 1):
                for j in range(1, p2 + 1):
                    if (t, i, j) not in cells:
                        raise FormatError(f"missing cell (t,i,j)={(t, i, j)} for dims "
                                          f"T={T}, p1={p1}, p2={p2}")
    data = np.empty((T, p1, p2))
    for (t, i, j), (v, _) in cells.items():
        data[t - 1, i - 1, j - 1] = v
    return MatrixSeries(data)


def write_csv(series: MatrixSeries, path) -> None:
    """Write long-format CSV with shortest round-trip float text."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for t in range(series.T):
            for i in range(series.p1):
                for j in range(series.p2):
                    w.writerow([t + 1, i + 1, j + 1, repr(float(series.data[t, i, j]))])


def read_binary(path) -> MatrixSeries:
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise FormatError(f"{path}: file shorter than the {HEADER.size}-byte header")
    magic, version, p1, p2, T = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if min(p1, p2, T) < 1:
        raise FormatError(f"{path}: header dims p1={p1}, p2={p2}, T={T} must be positive")
    expected = HEADER.size + 8 * T * p1 * p2
    if len(raw) != expected:
        raise FormatError(f"{path}: header declares T={T}, p1={p1}, p2={p2} "
                          f"({expected} bytes) but file has {len(raw)} bytes")
    data = np.frombuffer(raw, dtype="<f8", offset=HEADER.size).reshape(T, p1, p2)
    return MatrixSeries(data.astype(np.float64))


def write_binary(series: MatrixSeries, path) -> None:
    header = HEADER.pack(MAGIC, VERSION, series.p1, series.p2, series.T)
    body = np.ascontiguousarray(series.data, dtype="<f8").tobytes()
    Path(path).write_bytes(header + body)


def detect_format(path) -> str:
    """``"binary"`` when the file starts with the magic bytes, else ``"csv"``."""
    with open(path, "rb") as fh:
        return "binary" if fh.read(4) == MAGIC else "csv"


def ingest(path, format: Optional[str] = None) -> MatrixSeries:
    """Load a series from ``path``; the format is sniffed when not given."""
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"input file not found: {path}")
    fmt = detect_format(p) if format is None else format
    if fmt == "csv":
        return read_csv(p)
    if fmt == "binary":
        return read_binary(p)
    raise FormatError(f"unknown format {fmt!r}; choose from {FORMATS}")


def export(series: MatrixSeries, path, format: str = "binary") -> None:
    if format == "csv":
        write_csv(series, path)
    elif format == "binary":
        write_binary(series, path)
    else:
        raise FormatError(f"unknown format {format!r}; choose from {FORMATS}")
