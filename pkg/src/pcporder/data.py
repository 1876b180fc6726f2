"""CSV ingestion and per-column min-max normalization.

The loader is deliberately strict about what a usable dataset is: numeric
columns only, at least two complete rows, unique non-empty column names.
Rows that fail to parse in any selected column are dropped (and counted)
rather than imputed; a column that never parses is rejected outright.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (
    DuplicateColumnNameError,
    EmptyDatasetError,
    NonNumericColumnError,
    UnknownColumnError,
)


@dataclass(frozen=True)
class Column:
    """One numeric axis: raw values plus their min-max image in [0, 1].

    A constant column maps to 0.5 everywhere; otherwise
    ``normalized = (raw - raw_min) / (raw_max - raw_min)``.
    """

    name: str
    raw: np.ndarray
    normalized: np.ndarray
    raw_min: float
    raw_max: float


def normalize_values(values: np.ndarray) -> np.ndarray:
    """Min-max scale ``values`` to [0, 1]; constant input maps to 0.5."""
    lo = float(values.min())
    hi = float(values.max())
    if hi > lo:
        return (values - lo) / (hi - lo)
    return np.full(values.shape, 0.5)


def _make_column(name: str, raw: np.ndarray) -> Column:
    raw = np.asarray(raw, dtype=np.float64)
    return Column(
        name=name,
        raw=raw,
        normalized=normalize_values(raw),
        raw_min=float(raw.min()),
        raw_max=float(raw.max()),
    )


@dataclass(frozen=True)
class Dataset:
    """An immutable table of aligned numeric columns.

    All columns have exactly ``row_count`` entries and row order is shared,
    so ``columns[a].normalized[r]`` and ``columns[b].normalized[r]`` describe
    the same observation.
    """

    name: str
    columns: tuple[Column, ...]
    row_count: int

    @property
    def dims(self) -> list[str]:
        return [c.name for c in self.columns]

    @property
    def dim_count(self) -> int:
        return len(self.columns)

    @cached_property
    def fingerprint(self) -> str:
        """Content hash used as a cache key for detector results."""
        h = hashlib.sha1()
        h.update(self.name.encode("utf-8"))
        h.update(str(self.row_count).encode("ascii"))
        for col in self.columns:
            h.update(col.name.encode("utf-8"))
            h.update(np.ascontiguousarray(col.normalized).tobytes())
        return h.hexdigest()

    def rows(self, indices: Sequence[int] | None = None) -> list[list[float]]:
        """Normalized row tuples, in dataset order or the given order."""
        if indices is None:
            indices = range(self.row_count)
        return [[float(c.normalized[i]) for c in self.columns] for i in indices]


@dataclass(frozen=True)
class LoadResult:
    dataset: Dataset
    dropped_rows: int


def _parse_cell(text: str) -> float | None:
    try:
        value = float(text.strip())
    except ValueError:
        return None
    if not math.isfinite(value):
        return None
    return value


def load_csv(
    path: str,
    selected_columns: Sequence[str] | None = None,
    *,
    name: str | None = None,
) -> LoadResult:
    """Read a CSV file with a header row into a normalized Dataset.

    Decimal separator is '.', encoding UTF-8. Rows containing a missing or
    non-parsable value in any selected column are dropped; the count of
    dropped rows is reported on the result. A selected column without a
    single parseable numeric cell raises NonNumericColumnError naming the
    first offending line.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyDatasetError(f"{path}: file has no header row")
        names = [h.strip() for h in header]
        records = list(reader)

    for col_name in names:
        if not col_name:
            raise UnknownColumnError(f"{path}: header contains an empty column name")
    seen: set[str] = set()
    for col_name in names:
        if col_name in seen:
            raise DuplicateColumnNameError(f"duplicate column name: {col_name!r}")
        seen.add(col_name)

    if selected_columns is None:
        selected = list(names)
    else:
        selected = list(selected_columns)
        for col_name in selected:
            if col_name not in names:
                raise UnknownColumnError(f"column not in header: {col_name!r}")
        if len(set(selected)) != len(selected):
            raise DuplicateColumnNameError("selected columns contain duplicates")
    positions = [names.index(c) for c in selected]

    kept: list[list[float]] = []
    dropped = 0
    numeric_seen = [0] * len(selected)
    first_bad_line = [0] * len(selected)
    for row_idx, record in enumerate(records):
        line_no = row_idx + 2  # header is line 1
        parsed: list[float] = []
        ok = True
        for k, pos in enumerate(positions):
            cell = record[pos] if pos < len(record) else ""
            value = _parse_cell(cell)
            if value is None:
                ok = False
                if first_bad_line[k] == 0:
                    first_bad_line[k] = line_no
            else:
                numeric_seen[k] += 1
                parsed.append(value)
        if ok and len(record) >= len(names):
            kept.append(parsed)
        else:
            dropped += 1

    for k, col_name in enumerate(selected):
        if records and numeric_seen[k] == 0:
            raise NonNumericColumnError(
                f"column {col_name!r} has no numeric values (first offending line {first_bad_line[k]})",
                detail={"column": col_name, "line": first_bad_line[k]},
            )

    if len(kept) < 2:
        raise EmptyDatasetError(
            f"{path}: {len(kept)} usable row(s) after dropping {dropped}; need at least 2"
        )

    table = np.asarray(kept, dtype=np.float64)
    columns = tuple(_make_column(col_name, table[:, k]) for k, col_name in enumerate(selected))
    dataset = Dataset(name=name or path, columns=columns, row_count=len(kept))
    return LoadResult(dataset=dataset, dropped_rows=dropped)


def dataset_from_text(
    text: str,
    selected_columns: Sequence[str] | None = None,
    *,
    name: str = "dataset",
) -> LoadResult:
    """load_csv over in-memory CSV text (used by the HTTP service)."""
    import io
    import os
    import tempfile

    # Reuse the file-based path so both entry points share one parser.
    fd, tmp = tempfile.mkstemp(suffix=".csv")
    try:
        with io.open(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        result = load_csv(tmp, selected_columns, name=name)
    finally:
        os.unlink(tmp)
    return result
