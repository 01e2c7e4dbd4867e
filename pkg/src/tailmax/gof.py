"""One-sided tests of ``F*(u, v) >= uv`` and of ``F*(u, v) = uv``.

``F*`` is the empirical law of the rescaled rectangle points.  Direction
``below`` measures how far ``F*`` dips under the independence copula (null:
the bound holds); direction ``above`` measures how far it rises over it (null:
equality).  Critical values come from resampling under a null scheme:

``uniform``
    iid uniform coordinates, the exact law of the points when
    ``F* = uv`` (default).
``rank_grid``
    coordinates fixed at ``k / (m + 1)``, second coordinate randomly
    permuted.
``pair_bootstrap``
    rows of the observed rescaled pairs drawn with replacement.

The K-S supremum is taken over the member points by default
(``ks_mode="members"``).  ``ks_mode="exact"`` takes it over the whole unit
square using the cell structure of the step function.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from .empirical import EmptySelectionError, RectangleSelection

__all__ = [
    "StatisticKind",
    "Direction",
    "Decision",
    "GofResult",
    "gof_statistic",
    "gof_statistics",
    "null_statistics",
    "resampled_critical_value",
    "gof_test",
    "gof_table",
    "NULL_SCHEMES",
    "KS_MODES",
]

NULL_SCHEMES = ("uniform", "rank_grid", "pair_bootstrap")
KS_MODES = ("members", "exact")
_KINDS_ORDER = ("KS", "CvM", "AD")
_CHUNK_ELEMENTS = 4_000_000


class StatisticKind(str, Enum):
    KS = "KS"
    CVM = "CvM"
    AD = "AD"


class Direction(str, Enum):
    BELOW = "below"
    ABOVE = "above"


class Decision(str, Enum):
    RETAIN = "Retain"
    REJECT = "Reject"


@dataclass(frozen=True)
class GofResult:
    statistic_kind: StatisticKind
    direction: Direction
    statistic: float
    critical_value: float
    level: float
    n_resamples: int
    decision: Decision
    seed: int
    null: str = "uniform"
    ks_mode: str = "members"

    def to_row(self) -> dict:
        row = asdict(self)
        row["statistic_kind"] = self.statistic_kind.value
        row["direction"] = self.direction.value
        row["decision"] = self.decision.value
        return row


def _pairs_of(data):
    if isinstance(data, RectangleSelection):
        if data.m_q == 0:
            raise EmptySelectionError(f"no points in the MTD rectangle at q={data.q}")
        return data.u_tilde, data.v_tilde
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
        raise EmptySelectionError("need a non-empty (m, 2) array of rescaled pairs")
    return arr[:, 0], arr[:, 1]


def _ad_weight(u, v, m):
    # only exact 0/1 coordinates are moved off the singular boundary
    lo, hi = 0.5 / m, 1.0 - 0.5 / m
    u = np.where(u >= 1.0, hi, np.where(u <= 0.0, lo, u))
    v = np.where(v >= 1.0, hi, np.where(v <= 0.0, lo, v))
    return u * (1.0 - u) * v * (1.0 - v)


def _member_statistics(U, V, direction):
    """Statistics for a batch of samples, shape ``(B, m)`` -> ``(B, 3)``."""
    m = U.shape[1]
    dom = (U[:, None, :] <= U[:, :, None]) & (V[:, None, :] <= V[:, :, None])
    F = dom.sum(axis=2) / m
    uv = U * V
    gap = uv - F if direction is Direction.BELOW else F - uv
    gap = np.maximum(gap, 0.0)
    sq = gap * gap
    ks = math.sqrt(m) * gap.max(axis=1)
    cvm = sq.sum(axis=1)
    ad = (sq / _ad_weight(U, V, m)).sum(axis=1)
    return np.column_stack([ks, cvm, ad])


def _exact_ks(u, v, direction):
    m = u.shape[0]
    xs, ys = np.unique(u), np.unique(v)
    hist = np.zeros((xs.size, ys.size))
    np.add.at(hist, (np.searchsorted(xs, u), np.searchsorted(ys, v)), 1.0)
    cum = hist.cumsum(axis=0).cumsum(axis=1) / m
    if direction is Direction.ABOVE:
        # F* is constant on cells and uv is smallest at their lower-left corner
        sup = (cum - xs[:, None] * ys[None, :]).max()
    else:
        # uv approaches its cell supremum at the upper-right corner, where
        # F* takes its left limit (strict counts)
        gx = xs if xs[-1] >= 1.0 else np.append(xs, 1.0)
        gy = ys if ys[-1] >= 1.0 else np.append(ys, 1.0)
        strict = np.zeros((xs.size + 1, ys.size + 1))
        strict[1:, 1:] = cum
        sup = (gx[:, None] * gy[None, :] - strict[: gx.size, : gy.size]).max()
    return math.sqrt(m) * max(sup, 0.0)


def _statistics(U, V, direction, ks_mode):
    out = _member_statistics(U, V, direction)
    if ks_mode == "exact":
        out[:, 0] = [_exact_ks(u, v, direction) for u, v in zip(U, V)]
    return out


def _check_options(direction, ks_mode, null=None):
    direction = Direction(direction)
    if ks_mode not in KS_MODES:
        raise ValueError(f"ks_mode must be one of {KS_MODES}, got {ks_mode!r}")
    if null is not None and null not in NULL_SCHEMES:
        raise ValueError(f"null must be one of {NULL_SCHEMES}, got {null!r}")
    return direction


def gof_statistics(data, direction, ks_mode: str = "members") -> dict:
    """All three statistics for one direction, keyed ``KS``, ``CvM``, ``AD``."""
    direction = _check_options(direction, ks_mode)
    u, v = _pairs_of(data)
    row = _statistics(u[None, :], v[None, :], direction, ks_mode)[0]
    return {k: float(x) for k, x in zip(_KINDS_ORDER, row)}


def gof_statistic(data, kind, direction, ks_mode: str = "members") -> float:
    """One-sided K-S, C-vM or A-D statistic of rescaled rectangle points.

    C-vM and A-D integrate against the empirical law of the points, which
    with the ``m`` prefactor is a plain sum over the points.
    """
    return gof_statistics(data, direction, ks_mode)[StatisticKind(kind).value]


def null_statistics(
    m_q: int,
    direction,
    n_resamples: int = 10_000,
    seed: int = 0,
    null: str = "uniform",
    pairs=None,
    ks_mode: str = "members",
) -> np.ndarray:
    """Resampled statistics, shape ``(n_resamples, 3)`` in K-S, C-vM, A-D order."""
    direction = _check_options(direction, ks_mode, null)
    if m_q < 1:
        raise EmptySelectionError("m_q must be >= 1")
    if n_resamples < 1:
        raise ValueError("n_resamples must be >= 1")
    if null == "pair_bootstrap":
        if pairs is None:
            raise ValueError("pair_bootstrap needs the observed pairs")
        pu, pv = _pairs_of(pairs)
        m_q = pu.shape[0]
    rng = np.random.default_rng(seed)
    grid = np.arange(1, m_q + 1) / (m_q + 1.0)
    batch = max(1, _CHUNK_ELEMENTS // (m_q * m_q))
    out = np.empty((n_resamples, 3))
    for s in range(0, n_resamples, batch):
        b = min(batch, n_resamples - s)
        if null == "uniform":
            # one contiguous block of 2 * m_q draws per resample keeps the
            # values independent of the batch size
            draws = rng.random((b, 2, m_q))
            U, V = draws[:, 0], draws[:, 1]
        elif null == "rank_grid":
            U = np.broadcast_to(grid, (b, m_q))
            V = rng.permuted(np.tile(grid, (b, 1)), axis=1)
        else:
            idx = rng.integers(0, m_q, size=(b, m_q))
            U, V = pu[idx], pv[idx]
        out[s : s + b] = _statistics(U, V, direction, ks_mode)
    return out


def _quantile(values, level):
    n = values.shape[0]
    k = min(max(math.ceil(level * n - 1e-9), 1), n)
    return float(np.sort(values)[k - 1])


def resampled_critical_value(
    m_q: int,
    kind,
    direction,
    n_resamples: int = 10_000,
    level: float = 0.95,
    seed: int = 0,
    null: str = "uniform",
    pairs=None,
    ks_mode: str = "members",
) -> float:
    """Level quantile (order statistic ``ceil(level * N)``) of the null statistics."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level!r}")
    col = _KINDS_ORDER.index(StatisticKind(kind).value)
    stats = null_statistics(m_q, direction, n_resamples, seed, null, pairs, ks_mode)
    return _quantile(stats[:, col], level)


def gof_table(
    selection,
    directions=(Direction.BELOW, Direction.ABOVE),
    n_resamples: int = 10_000,
    level: float = 0.95,
    seed: int = 0,
    null: str = "uniform",
    ks_mode: str = "members",
) -> list:
    """K-S, C-vM and A-D results for each requested direction."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level!r}")
    u, v = _pairs_of(selection)
    pairs = np.column_stack([u, v])
    results = []
    for direction in directions:
        direction = _check_options(direction, ks_mode, null)
        observed = gof_statistics(pairs, direction, ks_mode)
        stats = null_statistics(u.shape[0], direction, n_resamples, seed, null, pairs, ks_mode)
        for col, kind in enumerate(_KINDS_ORDER):
            crit = _quantile(stats[:, col], level)
            stat = observed[kind]
            results.append(
                GofResult(
                    statistic_kind=StatisticKind(kind),
                    direction=direction,
                    statistic=stat,
                    critical_value=crit,
                    level=level,
                    n_resamples=n_resamples,
                    decision=Decision.RETAIN if stat < crit else Decision.REJECT,
                    seed=int(seed),
                    null=null,
                    ks_mode=ks_mode,
                )
            )
    return results


def gof_test(
    selection,
    kind,
    direction,
    n_resamples: int = 10_000,
    level: float = 0.95,
    seed: int = 0,
    null: str = "uniform",
    ks_mode: str = "members",
) -> GofResult:
    """Retain the null iff the statistic is below the resampled critical value."""
    kind = StatisticKind(kind)
    rows = gof_table(selection, (Direction(direction),), n_resamples, level, seed, null, ks_mode)
    return next(r for r in rows if r.statistic_kind is kind)
