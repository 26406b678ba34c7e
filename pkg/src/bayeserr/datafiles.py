"""Dataset files and run reports.

Three CSV layouts, all UTF-8 with a header row and floats written at 17
significant digits so values round-trip bit-exactly:

  soft    header "eta":          one posterior per row, in [0, 1]
  counts  header "pos,total":    positive count and annotation count per row
  paired  header "eta_tilde,y":  corrupted score in [0, 1] and hard label

Parsing is strict: the header must match the format exactly, every row needs
the full field count, numbers must parse, and range violations name the
offending row. Run reports are JSON documents with a fixed field order; the
`created_utc` field is the only part that varies between identical runs.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from datetime import datetime, timezone
from typing import Any

import numpy as np

from .errors import DataError

__all__ = [
    "FORMATS",
    "write_soft",
    "write_counts",
    "write_paired",
    "read_dataset",
    "sniff_format",
    "file_digest",
    "build_report",
    "render_report",
    "write_report",
]

FORMATS = ("soft", "counts", "paired")
_HEADERS = {
    "soft": ["eta"],
    "counts": ["pos", "total"],
    "paired": ["eta_tilde", "y"],
}


def _format_float(x: float) -> str:
    return format(float(x), ".17g")


def _write_rows(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def write_soft(path: str, etas) -> None:
    eta = np.asarray(etas, dtype=float)
    _write_rows(path, _HEADERS["soft"], ([_format_float(v)] for v in eta.tolist()))


def write_counts(path: str, positives, totals) -> None:
    pos = np.asarray(positives)
    tot = np.broadcast_to(np.asarray(totals), pos.shape)
    _write_rows(path, _HEADERS["counts"], ([int(k), int(m)] for k, m in zip(pos.tolist(), tot.tolist())))


def write_paired(path: str, scores, labels) -> None:
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    _write_rows(
        path,
        _HEADERS["paired"],
        ([_format_float(v), int(label)] for v, label in zip(s.tolist(), y.tolist())),
    )


def _parse_float(text: str, path: str, row: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"{path}, row {row}: '{text}' is not a number in column {column}") from None
    if not math.isfinite(value):
        raise DataError(f"{path}, row {row}: non-finite value in column {column}")
    return value


def _parse_int(text: str, path: str, row: int, column: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise DataError(f"{path}, row {row}: '{text}' is not an integer in column {column}") from None


def _parse_unit(text: str, path: str, row: int, column: str) -> float:
    value = _parse_float(text, path, row, column)
    if not (0.0 <= value <= 1.0):
        raise DataError(f"{path}, row {row}: {column} = {value} is outside [0, 1]")
    return value


def sniff_format(path: str) -> str:
    """Infer the dataset format from the header row."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        header = next(csv.reader(handle), None)
    for fmt, expected in _HEADERS.items():
        if header == expected:
            return fmt
    raise DataError(f"{path}: header {header} matches no known format {FORMATS}")


def read_dataset(path: str, fmt: str | None = None) -> dict[str, np.ndarray]:
    """Read a dataset file; returns the columns keyed by name.

    With fmt None the format is inferred from the header. soft yields
    {"eta"}, counts yields {"pos", "total"}, paired yields
    {"eta_tilde", "y"}. The file must hold at least one data row.
    """
    if fmt is not None and fmt not in FORMATS:
        raise DataError(f"unknown dataset format '{fmt}'")
    if not os.path.exists(path):
        raise DataError(f"no such dataset file: {path}")
    actual = sniff_format(path)
    if fmt is not None and fmt != actual:
        raise DataError(f"{path}: declared format '{fmt}' but the header says '{actual}'")
    fmt = actual
    header = _HEADERS[fmt]

    columns: list[list] = [[] for _ in header]
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        next(reader)
        for row_number, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataError(
                    f"{path}, row {row_number}: expected {len(header)} fields, got {len(row)}"
                )
            if fmt == "soft":
                columns[0].append(_parse_unit(row[0], path, row_number, "eta"))
            elif fmt == "counts":
                pos = _parse_int(row[0], path, row_number, "pos")
                total = _parse_int(row[1], path, row_number, "total")
                if total < 1:
                    raise DataError(f"{path}, row {row_number}: total must be >= 1")
                if not (0 <= pos <= total):
                    raise DataError(f"{path}, row {row_number}: pos must satisfy 0 <= pos <= total")
                columns[0].append(pos)
                columns[1].append(total)
            else:
                columns[0].append(_parse_unit(row[0], path, row_number, "eta_tilde"))
                label = _parse_int(row[1], path, row_number, "y")
                if label not in (0, 1):
                    raise DataError(f"{path}, row {row_number}: y must be 0 or 1")
                columns[1].append(label)
    if not columns[0]:
        raise DataError(f"{path}: no data rows")

    if fmt == "soft":
        return {"eta": np.asarray(columns[0], dtype=float)}
    if fmt == "counts":
        return {
            "pos": np.asarray(columns[0], dtype=np.int64),
            "total": np.asarray(columns[1], dtype=np.int64),
        }
    return {
        "eta_tilde": np.asarray(columns[0], dtype=float),
        "y": np.asarray(columns[1], dtype=np.int64),
    }


def file_digest(path: str) -> str:
    """SHA-256 of a file's bytes, hex encoded."""
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def build_report(
    command: str,
    seed: int | None,
    parameters: dict[str, Any],
    inputs: dict[str, str],
    results: dict[str, Any],
) -> dict[str, Any]:
    """Assemble a run report with a fixed field order."""
    from . import __version__

    return {
        "schema": 1,
        "tool": "bayeserr",
        "version": __version__,
        "command": command,
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "seed": seed,
        "parameters": parameters,
        "inputs": inputs,
        "results": results,
    }


def render_report(report: dict[str, Any]) -> str:
    """Serialize a report deterministically (keys stay in insertion order)."""
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def write_report(report: dict[str, Any], path: str) -> None:
    """Write a report atomically: temp file in place, then rename."""
    text = render_report(report)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as handle:
        handle.write(text)
    os.replace(tmp, path)
