"""Parsers for the two documented input formats.

Schema violations raise SchemaError; the CLI turns that into a nonzero exit.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List


class SchemaError(Exception):
    """The input file does not match the documented schema."""


SWEEP_COLUMNS = ("eps", "lambda2", "err", "mc_lambda2", "predicted")


@dataclass
class SweepTable:
    rows: List[dict]
    footer: Dict[str, str]

    def column(self, name: str) -> List[float]:
        return [row[name] for row in self.rows]


def read_sweep_csv(path) -> SweepTable:
    """Sweep CSV: header with at least the five documented columns, one row
    per eps, '#' footer lines carrying the fit summary."""
    p = Path(path)
    if not p.exists():
        raise SchemaError(f"no such file: {path}")
    lines = p.read_text().splitlines()
    data = [l for l in lines if l.strip() and not l.startswith("#")]
    footer_lines = [l[1:].strip() for l in lines if l.startswith("#")]
    if not data:
        raise SchemaError("empty CSV: no header row")
    header = [c.strip() for c in data[0].split(",")]
    if tuple(header[: len(SWEEP_COLUMNS)]) != SWEEP_COLUMNS:
        raise SchemaError(
            f"bad sweep header {header!r}: expected columns starting with {SWEEP_COLUMNS}"
        )
    rows = []
    for line in data[1:]:
        parts = [c.strip() for c in line.split(",")]
        if len(parts) < len(SWEEP_COLUMNS):
            raise SchemaError(f"short CSV row: {line!r}")
        try:
            rows.append({name: float(val) for name, val in zip(SWEEP_COLUMNS, parts)})
        except ValueError as e:
            raise SchemaError(f"non-numeric CSV value in row {line!r}") from e
    if not rows:
        raise SchemaError("sweep CSV has a header but no data rows")
    footer = {}
    for l in footer_lines:
        if "=" in l:
            k, v = l.split("=", 1)
            footer[k.strip()] = v.strip()
    return SweepTable(rows=rows, footer=footer)


@dataclass
class DensityDump:
    x: List[float]       # breakpoints, len m+1
    values: List[float]  # value on the cell right of x[i], len m
    header: Dict[str, str]


def read_density_dump(path, require=("bv_norm",)) -> DensityDump:
    """Two-column dump: '# key=value' header lines, then 'breakpoint value'
    rows; the last row closes the final cell."""
    p = Path(path)
    if not p.exists():
        raise SchemaError(f"no such file: {path}")
    header: Dict[str, str] = {}
    xs: List[float] = []
    vs: List[float] = []
    for raw in p.read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                header[k.strip()] = v.strip()
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SchemaError(f"bad dump row (want two columns): {line!r}")
        try:
            xs.append(float(parts[0]))
            vs.append(float(parts[1]))
        except ValueError as e:
            raise SchemaError(f"non-numeric dump row: {line!r}") from e
    for key in require:
        if key not in header:
            raise SchemaError(f"dump header is missing the required key {key!r}")
    if len(xs) < 3:
        raise SchemaError("density dump needs at least three rows")
    if any(b >= a for a, b in zip(xs[1:], xs[:-1])):
        raise SchemaError("dump breakpoints must be strictly increasing")
    return DensityDump(x=xs, values=vs[:-1], header=header)
