"""Pseudo-observations, empirical copula and the empirical MTD rectangle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

__all__ = [
    "PseudoSample",
    "RectangleSelection",
    "DiagonalSelection",
    "EmptySelectionError",
    "pseudo_observations",
    "empirical_copula",
    "mtd_maximizer",
    "diagonal_selection",
    "empirical_fstar",
    "dominance_counts",
]


class EmptySelectionError(ValueError):
    """Raised when a tail selection holds too few points for the request."""


@dataclass(frozen=True)
class PseudoSample:
    """Rank-transformed pairs in time order."""

    u: np.ndarray
    v: np.ndarray
    source_label: str = ""

    @property
    def n(self) -> int:
        return int(self.u.shape[0])

    @property
    def pairs(self) -> np.ndarray:
        return np.column_stack([self.u, self.v])

    @classmethod
    def from_pairs(cls, pairs, source_label: str = "") -> "PseudoSample":
        """Wrap pairs that already live in the unit square (no re-ranking)."""
        arr = np.asarray(pairs, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("pairs must have shape (n, 2)")
        if np.any((arr < 0) | (arr > 1)):
            raise ValueError("pseudo-observations must lie in [0, 1]")
        return cls(arr[:, 0].copy(), arr[:, 1].copy(), source_label)


@dataclass(frozen=True)
class RectangleSelection:
    """Points of the empirical MTD rectangle at threshold ``q``.

    ``u_tilde = u / phi_star_n`` and ``v_tilde = v * phi_star_n / q**2``
    rescale the rectangle to the unit square.
    """

    q: float
    phi_star_n: float
    member_indices: np.ndarray
    u_tilde: np.ndarray
    v_tilde: np.ndarray
    n: int

    @property
    def m_q(self) -> int:
        return int(self.member_indices.shape[0])

    @property
    def pi_star_n(self) -> float:
        return self.m_q / self.n

    @property
    def scaled_pairs(self) -> np.ndarray:
        return np.column_stack([self.u_tilde, self.v_tilde])


@dataclass(frozen=True)
class DiagonalSelection:
    """Points of the square ``[0, q]**2`` with descending ``w = q / max(u, v)``."""

    q: float
    member_indices: np.ndarray
    w_values: np.ndarray

    @property
    def n_q(self) -> int:
        return int(self.member_indices.shape[0])


def pseudo_observations(x, y, source_label: str = "") -> PseudoSample:
    """Ranks divided by ``n + 1``; ties keep first-occurrence order.

    Smallest values receive the smallest ranks, so joint extreme losses sit
    near the origin.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise ValueError("x and y must be one-dimensional")
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape[0]} != {y.shape[0]}")
    n = x.shape[0]
    if n < 2:
        raise ValueError("need at least two observations")
    if np.isnan(x).any() or np.isnan(y).any():
        raise ValueError("inputs contain NaN")
    u = rankdata(x, method="ordinal") / (n + 1.0)
    v = rankdata(y, method="ordinal") / (n + 1.0)
    return PseudoSample(u, v, source_label)


def empirical_copula(sample: PseudoSample, u: float, v: float) -> float:
    """Fraction of pairs with ``u_i <= u`` and ``v_i <= v``."""
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise ValueError("empirical copula arguments must lie in [0, 1]")
    return np.count_nonzero((sample.u <= u) & (sample.v <= v)) / sample.n


def _check_q(q):
    if not (0.0 < q <= 1.0):
        raise ValueError(f"q must lie in (0, 1], got {q!r}")


def mtd_maximizer(sample: PseudoSample, q: float) -> RectangleSelection:
    """Exact maximizer of the step function ``x -> C_n(x, q**2 / x)``.

    Point ``i`` is counted for every ``x`` in ``[max(u_i, q**2), min(q**2/v_i, 1)]``,
    so the profile is a stabbing count of closed intervals.  It is evaluated
    on the candidates ``{u_i} | {q**2/v_i} | {q**2, 1}`` clipped to
    ``[q**2, 1]``, which contain every interval endpoint.  Among maximizing
    candidates the one closest to ``q`` on the log scale wins (smaller ``x``
    on exact ties).
    """
    _check_q(q)
    q2 = q * q
    u, v = sample.u, sample.v
    with np.errstate(divide="ignore"):
        end_all = np.minimum(q2 / v, 1.0)
    start_all = np.maximum(u, q2)
    admissible = start_all <= end_all
    if not admissible.any():
        empty = np.empty(0)
        return RectangleSelection(q, q, np.empty(0, dtype=np.intp), empty, empty, sample.n)

    starts = np.sort(start_all[admissible])
    ends = np.sort(end_all[admissible])
    # sorted needles keep the binary searches cache friendly
    cand = np.sort(np.clip(np.concatenate([u, end_all, [q2, 1.0]]), q2, 1.0))
    counts = np.searchsorted(starts, cand, side="right") - np.searchsorted(ends, cand, side="left")
    best = counts.max()
    winners = np.unique(cand[counts == best])
    dist = np.abs(np.log(winners) - math.log(q))
    phi = float(winners[np.argmin(dist)])  # argmin keeps the smaller x on ties

    members = np.flatnonzero(admissible & (start_all <= phi) & (end_all >= phi))
    u_t = np.minimum(u[members] / phi, 1.0)
    v_t = np.minimum(v[members] * phi / q2, 1.0)
    return RectangleSelection(q, phi, members, u_t, v_t, sample.n)


def diagonal_selection(sample: PseudoSample, q: float) -> DiagonalSelection:
    """Pairs in ``[0, q]**2`` with their descending ``w = q / max(u, v)``."""
    _check_q(q)
    members = np.flatnonzero((sample.u <= q) & (sample.v <= q))
    w = q / np.maximum(sample.u[members], sample.v[members])
    return DiagonalSelection(q, members, np.sort(w)[::-1])


def empirical_fstar(selection: RectangleSelection, u: float, v: float) -> float:
    """Empirical law of the rescaled rectangle points."""
    if selection.m_q == 0:
        raise EmptySelectionError(f"no points in the MTD rectangle at q={selection.q}")
    hits = (selection.u_tilde <= u) & (selection.v_tilde <= v)
    return np.count_nonzero(hits) / selection.m_q


def dominance_counts(x, y, block: int = 512) -> np.ndarray:
    """``#{k : x_k <= x_i and y_k <= y_i}`` for every ``i`` (self included).

    Runs in roughly ``O(n log n + n * block)``: points are swept in ``x`` order,
    earlier blocks are counted with a binary search over their sorted ``y``
    values, the current block (plus any ``x`` ties spilling past it) by
    direct comparison.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.shape[0]
    out = np.empty(n, dtype=np.int64)
    if n == 0:
        return out
    order = np.lexsort((y, x))
    xs, ys = x[order], y[order]
    reach = np.searchsorted(xs, xs, side="right")
    counts = np.empty(n, dtype=np.int64)
    seen = np.empty(0)
    for s in range(0, n, block):
        e = min(s + block, n)
        hi = int(reach[e - 1])
        yb = ys[s:e]
        window = ys[s:hi]
        idx = np.arange(s, hi)
        local = (window[None, :] <= yb[:, None]) & (idx[None, :] < reach[s:e, None])
        counts[s:e] = local.sum(axis=1) + np.searchsorted(seen, yb, side="right")
        seen = np.sort(np.concatenate([seen, yb]))
    out[order] = counts
    return out
