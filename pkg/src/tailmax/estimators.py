"""Tail-order estimators: average block-minima TOMD and OLS TODD."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .empirical import (
    DiagonalSelection,
    EmptySelectionError,
    RectangleSelection,
    diagonal_selection,
    dominance_counts,
    mtd_maximizer,
    pseudo_observations,
)

__all__ = [
    "DEFAULT_THETA",
    "TomdEstimate",
    "ToddEstimate",
    "t_theta",
    "member_ratios",
    "tomd_estimate",
    "todd_estimate",
    "relative_difference",
    "TomdEstimator",
    "ToddEstimator",
]

DEFAULT_THETA = 1e-6


@dataclass(frozen=True)
class TomdEstimate:
    value: float
    q: float
    m: int
    theta: float
    group_seed: int
    groups: tuple
    m_q: int


@dataclass(frozen=True)
class ToddEstimate:
    value: float
    q: float
    n_q: int


def t_theta(t, theta: float = DEFAULT_THETA):
    """Box-Cox type transform ``(t**theta - 1) / theta``, ``log t`` at ``theta = 0``."""
    if theta < 0:
        raise ValueError(f"theta must be >= 0, got {theta!r}")
    t = np.asarray(t, dtype=float)
    if np.any((t <= 0) | (t > 1)) or np.isnan(t).any():
        raise ValueError("t must lie in (0, 1]")
    out = np.log(t) if theta == 0 else np.expm1(theta * np.log(t)) / theta
    return float(out) if out.ndim == 0 else out


def member_ratios(selection: RectangleSelection, theta: float = DEFAULT_THETA) -> np.ndarray:
    """Per-member ratios ``2 T(F*(u~, v~)) / (log u~ + log v~)`` clamped to ``[0, 2]``.

    A member sitting at ``(1, 1)`` has a zero denominator; its ratio is 0 when
    ``F* = 1`` there and 2 otherwise.
    """
    if selection.m_q == 0:
        raise EmptySelectionError(f"no points in the MTD rectangle at q={selection.q}")
    u_t, v_t = selection.u_tilde, selection.v_tilde
    f = dominance_counts(u_t, v_t) / selection.m_q
    num = 2.0 * t_theta(f, theta)
    den = np.log(u_t) + np.log(v_t)
    degenerate = den == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(degenerate, np.where(f < 1.0, 2.0, 0.0), num / np.where(degenerate, -1.0, den))
    return np.clip(r, 0.0, 2.0)


def tomd_estimate(
    selection: RectangleSelection,
    m: int = 5,
    theta: float = DEFAULT_THETA,
    group_seed: int = 0,
) -> TomdEstimate:
    """Average over random blocks of size ``m`` of the block-minimum ratio.

    Members are shuffled by ``numpy.random.PCG64(group_seed)`` and cut into
    consecutive blocks; only the last block may be short.
    """
    if m < 1:
        raise ValueError(f"block size m must be >= 1, got {m!r}")
    r = member_ratios(selection, theta)
    m_q = selection.m_q
    rng = np.random.Generator(np.random.PCG64(group_seed))
    perm = rng.permutation(m_q)
    starts = np.arange(0, m_q, m)
    block_min = np.minimum.reduceat(r[perm], starts)
    groups = tuple(selection.member_indices[perm[s : s + m]] for s in starts)
    value = math.fsum(block_min.tolist()) / len(starts)
    return TomdEstimate(value, selection.q, m, theta, int(group_seed), groups, m_q)


def todd_estimate(selection: DiagonalSelection) -> ToddEstimate:
    """Rank-size regression of ``log(i - 0.5)`` on descending ``log w``.

    The fitted slope is ``-kappa``; its magnitude is returned.
    """
    n_q = selection.n_q
    if n_q < 3:
        raise EmptySelectionError(
            f"need at least 3 points in [0, q]^2 at q={selection.q}, got {n_q}"
        )
    log_w = np.log(selection.w_values)
    centered = log_w - log_w.mean()
    ss = float(np.dot(centered, centered))
    if ss == 0.0:
        raise ValueError("all w values are equal; regression is degenerate")
    log_rank = np.log(np.arange(1, n_q + 1) - 0.5)
    slope = float(np.dot(centered, log_rank)) / ss
    return ToddEstimate(-slope, selection.q, n_q)


def relative_difference(tomd: float, todd: float) -> float:
    """``(tomd / todd - 1) * 100``."""
    if todd == 0:
        raise ZeroDivisionError("TODD estimate is zero")
    return (tomd / todd - 1.0) * 100.0


def _as_pairs(X):
    X = check_array(X, dtype=float, ensure_min_samples=2)
    if X.shape[1] != 2:
        raise ValueError(f"expected 2 columns, got {X.shape[1]}")
    return X


class TomdEstimator(BaseEstimator):
    """Estimate the tail order of maximal dependence from a bivariate sample.

    Parameters
    ----------
    q : float, default=0.1
        Threshold; the rectangle has the area of ``[0, q]**2``.
    m : int, default=5
        Block size of the block-minima average.
    theta : float, default=1e-6
        Transform parameter, ``0`` means ``log``.
    random_state : int or None, default=None
        Seed of the member-to-block assignment. ``None`` draws a fresh seed,
        which is stored in ``group_seed_``.

    Attributes
    ----------
    kappa_ : float
        The TOMD estimate.
    selection_ : RectangleSelection
    estimate_ : TomdEstimate
    """

    def __init__(self, q=0.1, m=5, theta=DEFAULT_THETA, random_state=None):
        self.q = q
        self.m = m
        self.theta = theta
        self.random_state = random_state

    def fit(self, X, y=None):
        X = _as_pairs(X)
        self.n_features_in_ = 2
        if self.random_state is None:
            self.group_seed_ = int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
        else:
            self.group_seed_ = int(self.random_state)
        sample = pseudo_observations(X[:, 0], X[:, 1])
        self.selection_ = mtd_maximizer(sample, self.q)
        self.estimate_ = tomd_estimate(self.selection_, self.m, self.theta, self.group_seed_)
        self.kappa_ = self.estimate_.value
        self.phi_star_ = self.selection_.phi_star_n
        self.m_q_ = self.selection_.m_q
        return self

    def sensitivity(self, block_sizes):
        """Estimates for several block sizes on the fitted rectangle."""
        check_is_fitted(self, "selection_")
        return {
            int(m): tomd_estimate(self.selection_, int(m), self.theta, self.group_seed_).value
            for m in block_sizes
        }


class ToddEstimator(BaseEstimator):
    """Estimate the tail order of diagonal dependence (rank-size OLS).

    Attributes
    ----------
    kappa_ : float
    n_q_ : int
    selection_ : DiagonalSelection
    """

    def __init__(self, q=0.1):
        self.q = q

    def fit(self, X, y=None):
        X = _as_pairs(X)
        self.n_features_in_ = 2
        sample = pseudo_observations(X[:, 0], X[:, 1])
        self.selection_ = diagonal_selection(sample, self.q)
        est = todd_estimate(self.selection_)
        self.kappa_ = est.value
        self.n_q_ = est.n_q
        return self
