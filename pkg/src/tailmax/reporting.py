"""Artifact writers: JSON with schema validation, CSV tables, SVG histogram."""

from __future__ import annotations

import csv
import json
import math
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

__all__ = [
    "load_schema",
    "validate",
    "write_json",
    "write_csv",
    "histogram_table",
    "histogram_svg",
]

N_BINS = 30


def load_schema(name: str) -> dict:
    ref = resources.files("tailmax") / "resources" / "schemas" / f"{name}.schema.json"
    return json.loads(ref.read_text(encoding="utf-8"))


def validate(document: dict, schema_name: str) -> None:
    jsonschema.validate(document, load_schema(schema_name))


def write_json(document: dict, path, schema_name: str | None = None) -> Path:
    if schema_name is not None:
        validate(document, schema_name)
    path = Path(path)
    path.write_text(json.dumps(document, indent=2, allow_nan=False) + "\n", encoding="utf-8")
    return path


def write_csv(header, rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _normal_pdf(x, mean, sd):
    return math.exp(-0.5 * ((x - mean) / sd) ** 2) / (sd * math.sqrt(2.0 * math.pi))


def histogram_table(values, bins: int = N_BINS):
    """Rows ``(left, right, count, density, normal_density)``."""
    values = np.asarray(values, dtype=float)
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    width = edges[1] - edges[0]
    mean = math.fsum(values.tolist()) / values.size
    sd = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    rows = []
    for c, left, right in zip(counts, edges[:-1], edges[1:]):
        mid = 0.5 * (left + right)
        dens = c / (values.size * width)
        nd = _normal_pdf(mid, mean, sd) if sd > 0 else 0.0
        rows.append((float(left), float(right), int(c), float(dens), float(nd)))
    return rows


def histogram_svg(values, title: str = "", width: int = 640, height: int = 400) -> str:
    """Histogram of ``values`` (density scale) with a fitted normal curve."""
    rows = histogram_table(values)
    values = np.asarray(values, dtype=float)
    mean = math.fsum(values.tolist()) / values.size
    sd = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    lo, hi = rows[0][0], rows[-1][1]
    pad_l, pad_r, pad_t, pad_b = 50, 20, 30, 40
    pw, ph = width - pad_l - pad_r, height - pad_t - pad_b
    curve_x = np.linspace(lo, hi, 200)
    curve_y = [_normal_pdf(x, mean, sd) if sd > 0 else 0.0 for x in curve_x]
    ymax = max(max(r[3] for r in rows), max(curve_y)) or 1.0

    def sx(x):
        return pad_l + (x - lo) / (hi - lo) * pw

    def sy(y):
        return pad_t + ph - y / ymax * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13">{title}</text>',
    ]
    for left, right, _, dens, _ in rows:
        x0, x1 = sx(left), sx(right)
        parts.append(
            f'<rect x="{x0:.2f}" y="{sy(dens):.2f}" width="{max(x1 - x0, 0):.2f}" '
            f'height="{pad_t + ph - sy(dens):.2f}" fill="#9ecae1" stroke="#3182bd" stroke-width="0.5"/>'
        )
    points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(curve_x, curve_y))
    parts.append(f'<polyline points="{points}" fill="none" stroke="#de2d26" stroke-width="1.5"/>')
    parts.append(
        f'<line x1="{pad_l}" y1="{pad_t + ph}" x2="{pad_l + pw}" y2="{pad_t + ph}" stroke="black"/>'
    )
    parts.append(f'<line x1="{pad_l}" y1="{pad_t}" x2="{pad_l}" y2="{pad_t + ph}" stroke="black"/>')
    for x in np.linspace(lo, hi, 5):
        parts.append(
            f'<text x="{sx(x):.2f}" y="{pad_t + ph + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{x:.4f}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
