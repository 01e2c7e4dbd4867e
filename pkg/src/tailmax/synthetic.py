"""Synthetic price panel used by the examples and the end-to-end tests."""

from __future__ import annotations

import csv
from datetime import date, timedelta
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.special import ndtri

from .simulation import gc_pair_series

__all__ = ["synthetic_prices", "write_synthetic_prices", "bundled_prices_path"]

COLUMNS = ("ALPHA", "BETA", "GAMMA")


def synthetic_prices(n: int = 5000, seed: int = 20240101, missing_rate: float = 0.005):
    """Return ``(dates, prices)`` with ``prices`` of shape ``(n, 3)``.

    ALPHA and BETA returns share a generalized Clayton (0.4, 0.2) copula
    driven by an AR(1) latent series; GAMMA is independent of both.  A few
    cells are blanked to exercise row removal.
    """
    rng = np.random.default_rng(seed)
    u, v = gc_pair_series(0.4, 0.2, n - 1, 0.6, rng)
    w = rng.random(n - 1)
    returns = 0.01 * ndtri(np.column_stack([u, v, w]))
    prices = 100.0 * np.exp(np.vstack([np.zeros(3), np.cumsum(returns, axis=0)]))
    holes = rng.random(prices.shape) < missing_rate
    holes[0] = False
    prices[holes] = np.nan
    start = date(2000, 1, 3)
    dates = [start + timedelta(days=i) for i in range(n)]
    return dates, prices


def write_synthetic_prices(path, n: int = 5000, seed: int = 20240101) -> Path:
    dates, prices = synthetic_prices(n, seed)
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(["date", *COLUMNS])
        for day, row in zip(dates, prices):
            writer.writerow([day.isoformat(), *("" if np.isnan(x) else f"{x:.10g}" for x in row)])
    return path


def bundled_prices_path() -> Path:
    return Path(str(resources.files("tailmax") / "resources" / "synthetic_prices.csv"))
