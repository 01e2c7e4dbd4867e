"""Multivariate portmanteau white-noise tests.

For a demeaned ``k``-variate series of length ``n`` with lag-``l`` sample
autocovariance ``G_l = (1/n) sum_t x_t x_{t-l}'`` and
``T_l = tr(G_l' G_0^{-1} G_l G_0^{-1})``:

============  ==========================================  ==================
test          statistic                                   reference
============  ==========================================  ==================
BoxPierceMV   ``n sum T_l``                               chi2(k^2 L)
LjungBoxMV    ``n (n + 2) sum T_l / (n - l)``             chi2(k^2 L)
Hosking       ``n^2 sum T_l / (n - l)``                   chi2(k^2 L)
LiMcLeod      ``n sum T_l + k^2 L (L + 1) / (2 n)``       chi2(k^2 L)
MahdiMcLeod   ``-3 n / (2L + 1) log det R_L``             chi2(3k^2 L(L+1) / (2(2L+1)))
============  ==========================================  ==================

``R_L`` is the block-Toeplitz autocorrelation matrix of order ``L + 1``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np
from scipy.stats import chi2

__all__ = [
    "PortmanteauKind",
    "PortmanteauResult",
    "PortmanteauReport",
    "portmanteau_suite",
]


class PortmanteauKind(str, Enum):
    BOX_PIERCE = "BoxPierceMV"
    LJUNG_BOX = "LjungBoxMV"
    HOSKING = "Hosking"
    LI_MCLEOD = "LiMcLeod"
    MAHDI_MCLEOD = "MahdiMcLeod"


@dataclass(frozen=True)
class PortmanteauResult:
    test_kind: PortmanteauKind
    lag: int
    statistic: float
    df: float
    p_value: float

    def to_row(self) -> dict:
        row = asdict(self)
        row["test_kind"] = self.test_kind.value
        return row


@dataclass
class PortmanteauReport:
    results: list
    level: float = 0.05
    retained_pct_pooled: float = field(init=False)
    retained_pct_by_test: dict = field(init=False)

    def __post_init__(self):
        keep = [r.p_value > self.level for r in self.results]
        self.retained_pct_pooled = 100.0 * sum(keep) / len(keep)
        self.retained_pct_by_test = {}
        for kind in PortmanteauKind:
            sub = [r.p_value > self.level for r in self.results if r.test_kind is kind]
            self.retained_pct_by_test[kind.value] = 100.0 * sum(sub) / len(sub)

    def p_value(self, kind, lag: int) -> float:
        kind = PortmanteauKind(kind)
        return next(r.p_value for r in self.results if r.test_kind is kind and r.lag == lag)


def _autocovariances(x, max_lag):
    n = x.shape[0]
    return np.stack([x[l:].T @ x[: n - l] / n for l in range(max_lag + 1)])


def _block_toeplitz(gammas, order):
    k = gammas.shape[1]
    big = np.empty((k * (order + 1), k * (order + 1)))
    for i in range(order + 1):
        for j in range(order + 1):
            g = gammas[i - j] if i >= j else gammas[j - i].T
            big[i * k : (i + 1) * k, j * k : (j + 1) * k] = g
    return big


def portmanteau_suite(series, max_lag: int = 20, level: float = 0.05) -> PortmanteauReport:
    """Run the five tests at every lag ``1..max_lag``."""
    x = np.asarray(series, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise ValueError("series must have shape (n, k) with k >= 2")
    n, k = x.shape
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    if n < 5 * max_lag:
        raise ValueError(f"series too short: length {n} < 5 * max_lag = {5 * max_lag}")
    x = x - x.mean(axis=0)
    gammas = _autocovariances(x, max_lag)
    g0 = gammas[0]
    sign, logdet0 = np.linalg.slogdet(g0)
    if sign <= 0 or np.linalg.cond(g0) > 1e12:
        raise np.linalg.LinAlgError("lag-0 autocovariance is singular")
    g0_inv = np.linalg.inv(g0)
    traces = np.array(
        [np.trace(g.T @ g0_inv @ g @ g0_inv) for g in gammas[1:]]
    )
    lags = np.arange(1, max_lag + 1)
    bp = n * np.cumsum(traces)
    lb = n * (n + 2) * np.cumsum(traces / (n - lags))
    hosking = n * n * np.cumsum(traces / (n - lags))
    lm = bp + k * k * lags * (lags + 1) / (2.0 * n)
    df = k * k * lags

    results = []
    for kind, values in (
        (PortmanteauKind.BOX_PIERCE, bp),
        (PortmanteauKind.LJUNG_BOX, lb),
        (PortmanteauKind.HOSKING, hosking),
        (PortmanteauKind.LI_MCLEOD, lm),
    ):
        for lag, stat, d in zip(lags, values, df):
            results.append(PortmanteauResult(kind, int(lag), float(stat), float(d), float(chi2.sf(stat, d))))
    for lag in lags:
        sign, logdet = np.linalg.slogdet(_block_toeplitz(gammas, lag))
        log_det_r = logdet - (lag + 1) * logdet0
        stat = -3.0 * n / (2 * lag + 1) * log_det_r
        d = 3.0 * k * k * lag * (lag + 1) / (2.0 * (2 * lag + 1))
        results.append(PortmanteauResult(PortmanteauKind.MAHDI_MCLEOD, int(lag), float(stat), d, float(chi2.sf(stat, d))))
    return PortmanteauReport(results, level)
