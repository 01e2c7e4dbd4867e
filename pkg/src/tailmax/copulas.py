"""Analytic copulas with closed-form maximal-tail-dependence paths.

Three families are supported: the independence copula, the Marshall-Olkin
copula ``min(u**(1-a) * v, u * v**(1-b))`` and the generalized Clayton
copula ``u**(g1/g) * (u**(-1/g) + v**(-1/g0) - 1)**(-g0)`` with
``g = g0 + g1``.  They serve as exact references for the empirical
machinery in :mod:`tailmax.empirical` and :mod:`tailmax.estimators`.

All closed forms are evaluated in log space so that thresholds well below
``1e-3`` do not underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

__all__ = [
    "Independence",
    "MarshallOlkin",
    "GeneralizedClayton",
    "CopulaModel",
    "MtdOracle",
    "copula_value",
    "log_copula_value",
    "mtd_oracle",
    "fstar",
    "gc_f0_star",
    "gc_f0_argmax",
    "gc_phi_star",
    "gc_phi_residual",
    "numeric_phi_star",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Independence:
    """The product copula ``C(u, v) = u * v``."""

    kind = "independence"


@dataclass(frozen=True)
class MarshallOlkin:
    """Marshall-Olkin copula with parameters ``a, b`` in ``[0, 1]``."""

    a: float
    b: float
    kind = "marshall_olkin"

    def __post_init__(self):
        for name in ("a", "b"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0) or math.isnan(value):
                raise ValueError(f"MarshallOlkin parameter {name}={value!r} not in [0, 1]")

    @property
    def is_independence(self) -> bool:
        # a = 0 or b = 0 collapses the min() to u * v
        return self.a == 0.0 or self.b == 0.0


@dataclass(frozen=True)
class GeneralizedClayton:
    """Generalized Clayton copula, ``gamma0 > 0`` and ``gamma1 >= 0``."""

    gamma0: float
    gamma1: float
    gamma_star: float = field(init=False)
    kind = "generalized_clayton"

    def __post_init__(self):
        if not self.gamma0 > 0.0:
            raise ValueError(f"gamma0 must be > 0, got {self.gamma0!r}")
        if not self.gamma1 >= 0.0:
            raise ValueError(f"gamma1 must be >= 0, got {self.gamma1!r}")
        object.__setattr__(self, "gamma_star", self.gamma0 + self.gamma1)

    @property
    def tomd(self) -> float:
        return 1.0 + self.gamma1 / (self.gamma1 + 2.0 * self.gamma0)


CopulaModel = Union[Independence, MarshallOlkin, GeneralizedClayton]


@dataclass(frozen=True)
class MtdOracle:
    """Closed-form description of a maximal-tail-dependence path.

    ``phi_star(q) * psi_star(q) == q**2`` and ``pi_star(q)`` is the copula
    mass of the rectangle ``[0, phi_star(q)] x [0, psi_star(q)]``.
    """

    phi_star: Callable[[float], float]
    psi_star: Callable[[float], float]
    pi_star: Callable[[float], float]
    tomd: float


def _check_unit(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any((u < 0) | (u > 1) | np.isnan(u)) or np.any((v < 0) | (v > 1) | np.isnan(v)):
        raise ValueError("copula arguments must lie in [0, 1]")
    return u, v


def _log(x):
    with np.errstate(divide="ignore"):
        return np.log(x)


def _log_gc(gamma0, gamma1, log_u, log_v):
    # log C for the generalized Clayton copula; log_u, log_v may be -inf
    gs = gamma0 + gamma1
    a = -log_u / gs
    b = -log_v / gamma0
    top = np.maximum(a, b)
    with np.errstate(over="ignore", invalid="ignore"):
        inner = top + np.log(np.exp(a - top) + np.exp(b - top) - np.exp(-top))
        out = (gamma1 / gs) * log_u - gamma0 * inner
    return np.where(np.isinf(top), -np.inf, out)


def log_copula_value(model: CopulaModel, u, v):
    """Natural log of :func:`copula_value` (``-inf`` on the lower boundary)."""
    u, v = _check_unit(u, v)
    lu, lv = _log(u), _log(v)
    if isinstance(model, Independence) or (
        isinstance(model, MarshallOlkin) and model.is_independence
    ):
        out = lu + lv
    elif isinstance(model, MarshallOlkin):
        with np.errstate(invalid="ignore"):
            out = np.minimum((1 - model.a) * lu + lv, lu + (1 - model.b) * lv)
        out = np.where(np.isneginf(lu) | np.isneginf(lv), -np.inf, out)
    elif isinstance(model, GeneralizedClayton):
        out = _log_gc(model.gamma0, model.gamma1, lu, lv)
    else:
        raise TypeError(f"unsupported copula model {model!r}")
    return out[()] if np.ndim(out) == 0 else out


def copula_value(model: CopulaModel, u, v):
    """Evaluate the copula at ``(u, v)``; broadcasts over arrays."""
    out = np.exp(log_copula_value(model, u, v))
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# generalized Clayton helpers


def gc_phi_residual(gamma0: float, gamma1: float, q: float, x: float) -> float:
    """Log-scale residual of the first-order condition defining ``phi*(q)``.

    The condition is ``x**(-1/g0) * (x**(-1/g) - c) = (1 - c) * q**(-2/g0)``
    with ``c = g1 / g``; the residual is ``log(lhs) - log(rhs)`` so that it
    stays well scaled when ``q**(-2/g0)`` is astronomically large.
    """
    gs = gamma0 + gamma1
    c = gamma1 / gs
    s = -math.log(x) / gs
    log_lhs = -math.log(x) / gamma0 + s + math.log1p(-c * math.exp(-s))
    log_rhs = math.log1p(-c) - 2.0 * math.log(q) / gamma0
    return log_lhs - log_rhs


def gc_phi_star(gamma0: float, gamma1: float, q: float) -> float:
    """Solve the implicit equation for the GC maximal path by bisection."""
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q must lie in (0, 1], got {q!r}")
    if q == 1.0:
        return 1.0
    # residual is strictly decreasing in log x on [2 log q, 0]
    lo, hi = 2.0 * math.log(q), 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if gc_phi_residual(gamma0, gamma1, q, math.exp(mid)) > 0.0:
            lo = mid
        else:
            hi = mid
    r_lo = abs(gc_phi_residual(gamma0, gamma1, q, math.exp(lo)))
    r_hi = abs(gc_phi_residual(gamma0, gamma1, q, math.exp(hi)))
    return math.exp(lo if r_lo <= r_hi else hi)


def gc_f0_star(gamma0: float, gamma1: float, u, v):
    """Limit as ``q -> 0`` of the scaled rectangle law for the GC copula."""
    GeneralizedClayton(gamma0, gamma1)
    u, v = _check_unit(u, v)
    gs = gamma0 + gamma1
    c = gamma1 / gs
    lu, lv = _log(u), _log(v)
    a = math.log1p(-c) - lu / gs
    b = -lv / gamma0
    top = np.maximum(a, b)
    with np.errstate(invalid="ignore"):
        log_mean = top + np.log(np.exp(a - top) + np.exp(b - top)) - math.log(2.0 - c)
        out = np.exp(c * lu - gamma0 * log_mean)
    out = np.where(np.isinf(top), 0.0, out)
    return float(out) if np.ndim(out) == 0 else out


def gc_f0_argmax(gamma0: float, gamma1: float, q: float) -> float:
    """Maximizer ``q**(2g/(g+g0))`` of ``x -> F0*(x, q**2/x)``."""
    gs = gamma0 + gamma1
    return math.exp(2.0 * gs / (gs + gamma0) * math.log(q))


# ---------------------------------------------------------------------------
# oracles


def _check_q(q):
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q must lie in (0, 1], got {q!r}")


def mtd_oracle(model: CopulaModel) -> MtdOracle:
    """Return the closed-form MTD path, maximal tail probability and TOMD."""
    if isinstance(model, Independence) or (
        isinstance(model, MarshallOlkin) and model.a + model.b == 0.0
    ):
        # flat profile; the diagonal is returned by convention
        def phi(q):
            _check_q(q)
            return q

        return MtdOracle(phi, phi, lambda q: phi(q) ** 2, 2.0)

    if isinstance(model, MarshallOlkin):
        a, b = model.a, model.b
        kappa = 2.0 - 2.0 * a * b / (a + b)

        def phi(q):
            _check_q(q)
            return math.exp(2.0 * b / (a + b) * math.log(q))

        def psi(q):
            _check_q(q)
            return math.exp(2.0 * a / (a + b) * math.log(q))

        def pi(q):
            _check_q(q)
            return math.exp(kappa * math.log(q))

        return MtdOracle(phi, psi, pi, kappa)

    if isinstance(model, GeneralizedClayton):
        g0, g1 = model.gamma0, model.gamma1

        def phi(q):
            return gc_phi_star(g0, g1, q)

        def psi(q):
            return q * q / phi(q)

        def pi(q):
            x = phi(q)
            return copula_value(model, x, min(q * q / x, 1.0))

        return MtdOracle(phi, psi, pi, model.tomd)

    raise TypeError(f"unsupported copula model {model!r}")


def fstar(model: CopulaModel, q: float, u, v):
    """Copula law of the MTD rectangle at ``q``, rescaled to the unit square."""
    oracle = mtd_oracle(model)
    x = oracle.phi_star(q)
    y = min(q * q / x, 1.0)
    u, v = _check_unit(u, v)
    out = np.exp(log_copula_value(model, u * x, v * y) - math.log(oracle.pi_star(q)))
    return float(out) if np.ndim(out) == 0 else out


def numeric_phi_star(model: CopulaModel, q: float, resolution: int = 1000) -> float:
    """Brute-force maximizer of ``x -> C(x, q**2/x)`` over ``[q**2, 1]``.

    A log-spaced grid locates the best cell, which golden-section search
    then refines.  A flat profile returns ``q``.
    """
    _check_q(q)
    if resolution < 100:
        raise ValueError("resolution must be at least 100")
    if q == 1.0:
        return 1.0
    log_q2 = 2.0 * math.log(q)

    def profile(t):
        t = np.asarray(t, dtype=float)
        x = np.exp(t)
        y = np.minimum(np.exp(log_q2 - t), 1.0)
        return log_copula_value(model, np.minimum(x, 1.0), y)

    grid = np.linspace(log_q2, 0.0, resolution)
    values = profile(grid)
    top = values.max()
    if top - values.min() <= 1e-12 * (1.0 + abs(top)):
        return q
    k = int(np.argmax(values))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, resolution - 1)]
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = profile(c), profile(d)
    while hi - lo > 1e-13:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = profile(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = profile(d)
    return float(math.exp(0.5 * (lo + hi)))
