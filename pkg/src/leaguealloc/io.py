"""CSV reading and writing for matrices, totals and allocations.

All files are plain UTF-8 CSV. Lines that are blank or start with ``#``
are ignored so fixtures can carry a note about where the numbers came
from. Numbers use a decimal point and no thousands separators.

Matrix layout (one row per hosting club, columns in header order)::

    club,Alpha,Beta,Gamma
    Alpha,0,1.2,1.03
    Beta,1.2,0,0.23
    Gamma,1.03,0.23,0

Every cell must be filled. The one exception is the partial-matrix
reader used for interrupted seasons, where an empty off-diagonal cell
means "game never played".
"""

from __future__ import annotations

import csv
import io as _stdio
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CsvFormatError
from .model import AggregateAudience, Allocation, AudienceMatrix, allocation_from_values

# 17 significant digits round-trip any IEEE double exactly.
_FLOAT_FMT = "%.17g"


def csv_rows_from_text(text: str) -> list[list[str]]:
    """Raw CSV rows with comment and blank lines stripped."""
    kept = [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    return [row for row in csv.reader(kept)]


def read_csv_rows(path: str | Path) -> list[list[str]]:
    return csv_rows_from_text(Path(path).read_text(encoding="utf-8"))


def _parse_float(cell: str, where: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise CsvFormatError(f"{where}: cannot parse {cell!r} as a number") from None


def _matrix_cells(path: str | Path) -> tuple[tuple[str, ...], list[list[str]]]:
    rows = read_csv_rows(path)
    if not rows:
        raise CsvFormatError(f"{path}: empty file")
    header = rows[0]
    if len(header) < 2:
        raise CsvFormatError(f"{path}: matrix header needs a label column plus one column per club")
    labels = tuple(cell.strip() for cell in header[1:])
    n = len(labels)
    body = rows[1:]
    if len(body) != n:
        raise CsvFormatError(f"{path}: expected {n} club rows, found {len(body)}")
    for i, row in enumerate(body):
        if len(row) != n + 1:
            raise CsvFormatError(f"{path}: row {i + 2} has {len(row)} cells, expected {n + 1}")
        if row[0].strip() != labels[i]:
            raise CsvFormatError(
                f"{path}: row {i + 2} is labelled {row[0].strip()!r} but the header "
                f"puts {labels[i]!r} in this position"
            )
    return labels, body


def read_matrix(path: str | Path) -> AudienceMatrix:
    """Read a complete audience matrix; empty cells are an error."""
    labels, body = _matrix_cells(path)
    n = len(labels)
    entries = np.zeros((n, n))
    for i, row in enumerate(body):
        for j, cell in enumerate(row[1:]):
            if cell.strip() == "":
                raise CsvFormatError(
                    f"{path}: empty cell at row {labels[i]!r}, column {labels[j]!r}; "
                    "a complete matrix has no blanks (use the cancelled-season tools "
                    "for partial data)"
                )
            entries[i, j] = _parse_float(cell, f"{path} row {labels[i]!r} col {labels[j]!r}")
    return AudienceMatrix(labels, entries)


def read_partial_matrix(path: str | Path):
    """Read a matrix with possibly-missing games (empty off-diagonal cells).

    An empty diagonal cell is read as the mandatory 0.
    Returns a :class:`leaguealloc.cancelled.PartialAudienceMatrix`.
    """
    from .cancelled import PartialAudienceMatrix

    labels, body = _matrix_cells(path)
    n = len(labels)
    entries = np.zeros((n, n))
    missing = np.zeros((n, n), dtype=bool)
    for i, row in enumerate(body):
        for j, cell in enumerate(row[1:]):
            if cell.strip() == "":
                if i != j:
                    missing[i, j] = True
            else:
                entries[i, j] = _parse_float(cell, f"{path} row {labels[i]!r} col {labels[j]!r}")
    return PartialAudienceMatrix(labels, entries, missing)


def write_matrix(matrix: AudienceMatrix, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["club", *matrix.labels])
        for i, label in enumerate(matrix.labels):
            writer.writerow([label, *(_FLOAT_FMT % v for v in matrix.entries[i])])


def _two_column_rows(path: str | Path, value_column: str) -> list[tuple[str, float]]:
    rows = read_csv_rows(path)
    if not rows:
        raise CsvFormatError(f"{path}: empty file")
    header = [cell.strip().lower() for cell in rows[0]]
    if header != ["club", value_column]:
        raise CsvFormatError(f"{path}: expected header 'club,{value_column}', got {rows[0]!r}")
    out = []
    for k, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise CsvFormatError(f"{path}: row {k} has {len(row)} cells, expected 2")
        out.append((row[0].strip(), _parse_float(row[1], f"{path} row {k}")))
    return out


def read_aggregates(path: str | Path) -> AggregateAudience:
    """Read per-club season totals from a ``club,audience`` CSV."""
    pairs = _two_column_rows(path, "audience")
    return AggregateAudience(tuple(label for label, _ in pairs), tuple(v for _, v in pairs))


def write_aggregates(agg: AggregateAudience, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["club", "audience"])
        for label, value in zip(agg.labels, agg.per_club):
            writer.writerow([label, _FLOAT_FMT % value])


def read_allocation(path: str | Path, unit: str = "audience") -> Allocation:
    """Read a ``club,value`` CSV; the endowment is the sum of the values."""
    pairs = _two_column_rows(path, "value")
    return allocation_from_values(
        (label for label, _ in pairs), (v for _, v in pairs), unit=unit
    )


def format_allocation_csv(allocation: Allocation) -> str:
    """Render an allocation in the same ``club,value`` layout we read."""
    buffer = _stdio.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["club", "value"])
    for label, value in zip(allocation.labels, allocation.values):
        writer.writerow([label, _FLOAT_FMT % value])
    return buffer.getvalue()
