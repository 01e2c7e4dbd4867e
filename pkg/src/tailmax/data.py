"""CSV ingestion, date alignment and log returns."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date
from pathlib import Path

import numpy as np

__all__ = [
    "DataError",
    "RawSeries",
    "AlignedPanel",
    "load_csv",
    "align_and_log_diff",
    "write_panel_csv",
]


class DataError(ValueError):
    """Malformed or unusable input data."""


@dataclass(frozen=True)
class RawSeries:
    """A named price series; missing cells are ``NaN``."""

    name: str
    dates: tuple
    values: np.ndarray

    def __len__(self):
        return len(self.dates)


@dataclass(frozen=True)
class AlignedPanel:
    """Log returns on a common date index; ``dates[i]`` closes return ``i``."""

    dates: tuple
    columns: dict

    def __len__(self):
        return len(self.dates)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise DataError(f"unknown column {name!r}; available: {sorted(self.columns)}") from None


def load_csv(path, columns=None, date_column: str = "date") -> list:
    """Read one :class:`RawSeries` per value column of a header-first CSV."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if date_column not in header:
            raise DataError(f"{path}: no {date_column!r} column in header {header}")
        date_idx = header.index(date_column)
        names = [h for h in header if h != date_column] if columns is None else list(columns)
        missing = [c for c in names if c not in header]
        if missing:
            raise DataError(f"{path}: columns not found: {missing}")
        col_idx = [header.index(c) for c in names]

        dates, rows, seen = [], [], set()
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            raw_date = row[date_idx].strip()
            try:
                day = date.fromisoformat(raw_date)
            except ValueError:
                raise DataError(f"{path}:{lineno}: malformed date {raw_date!r}") from None
            if day in seen:
                raise DataError(f"{path}:{lineno}: duplicate date {day.isoformat()}")
            seen.add(day)
            values = []
            for name, j in zip(names, col_idx):
                cell = row[j].strip() if j < len(row) else ""
                if not cell:
                    values.append(math.nan)
                    continue
                try:
                    values.append(float(cell))
                except ValueError:
                    raise DataError(
                        f"{path}:{lineno}: non-numeric value {cell!r} in column {name!r}"
                    ) from None
            dates.append(day)
            rows.append(values)

    table = np.array(rows, dtype=float).reshape(len(rows), len(names))
    order = sorted(range(len(dates)), key=dates.__getitem__)
    dates = tuple(dates[i] for i in order)
    table = table[order]
    return [RawSeries(name, dates, table[:, k].copy()) for k, name in enumerate(names)]


def align_and_log_diff(series) -> AlignedPanel:
    """Keep dates where every series has a value, then take log differences.

    Rows are removed before differencing, so a return may span a gap.
    """
    series = list(series)
    if not series:
        raise DataError("need at least one series")
    names = [s.name for s in series]
    if len(set(names)) != len(names):
        raise DataError(f"duplicate series names: {names}")
    common = set(series[0].dates)
    for s in series[1:]:
        common &= set(s.dates)
    lookups = [{d: i for i, d in enumerate(s.dates)} for s in series]
    keep = []
    for day in sorted(common):
        row = [s.values[lk[day]] for s, lk in zip(series, lookups)]
        if not any(math.isnan(x) for x in row):
            keep.append((day, row))
    if len(keep) < 2:
        raise DataError(f"fewer than 2 aligned dates ({len(keep)})")
    table = np.array([row for _, row in keep])
    if np.any(table <= 0):
        bad = [names[j] for j in np.unique(np.nonzero(table <= 0)[1])]
        raise DataError(f"non-positive values in {bad}; log returns undefined")
    returns = np.diff(np.log(table), axis=0)
    return AlignedPanel(
        tuple(day for day, _ in keep[1:]),
        {name: returns[:, j].copy() for j, name in enumerate(names)},
    )


def write_panel_csv(panel: AlignedPanel, path) -> None:
    names = list(panel.columns)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(["date", *names])
        for i, day in enumerate(panel.dates):
            writer.writerow([day.isoformat(), *(f"{panel.columns[c][i]:.12g}" for c in names)])
