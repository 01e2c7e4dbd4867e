"""Stationary generalized-Clayton pairs driven by a latent AR(1) process.

The sampler rests on the identity

    P(U <= (1 + z)**(-g) | V = v) = P(min(X, Y) > z | V = v)

with ``X | V = v ~ Lomax(g0 + 1, v**(-1/g0))`` and ``Y ~ Lomax(g1, 1)``
independent, ``g = g0 + g1``.  Feeding ``V_i = Phi(Z_i / sigma)`` from a
stationary Gaussian AR(1) series ``Z`` gives pairs that are each distributed
as the copula but are serially dependent.

Seeds
-----
Replication ``i`` of a study with seed ``s`` draws its data from
``SeedSequence(s, spawn_key=(i, 0))`` and groups its rectangle members
with ``PCG64`` seeded by the first 64-bit word of
``SeedSequence(s, spawn_key=(i, 1))``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.signal import lfilter
from scipy.special import ndtr

from .copulas import GeneralizedClayton
from .empirical import mtd_maximizer, pseudo_observations
from .estimators import DEFAULT_THETA, tomd_estimate

__all__ = [
    "SimConfig",
    "StudyRow",
    "ReplicationError",
    "ar1_series",
    "lomax_sample",
    "gc_pair_series",
    "sample_marshall_olkin",
    "sample_independence",
    "replication_seeds",
    "run_replication",
    "simulation_study",
]


class ReplicationError(RuntimeError):
    def __init__(self, index, cause):
        super().__init__(f"replication {index} failed: {cause}")
        self.index = index


@dataclass(frozen=True)
class SimConfig:
    gamma0: float
    gamma1: float
    q: float
    phi: float = 0.6
    n: int = 500_000
    replications: int = 1000
    m: int = 5
    theta: float = DEFAULT_THETA
    seed: int = 0

    def __post_init__(self):
        GeneralizedClayton(self.gamma0, self.gamma1)
        if not -1.0 < self.phi < 1.0:
            raise ValueError(f"AR coefficient must lie in (-1, 1), got {self.phi!r}")
        if not 0.0 < self.q <= 1.0:
            raise ValueError(f"q must lie in (0, 1], got {self.q!r}")
        if self.n < 2 or self.replications < 1 or self.m < 1:
            raise ValueError("n >= 2, replications >= 1 and m >= 1 are required")
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def sigma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.phi**2)


@dataclass
class StudyRow:
    gamma0: float
    gamma1: float
    kappa_star_true: float
    mean: float
    stdev: float | None
    replication_estimates: list = field(repr=False)
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ar1_series(phi: float, n: int, seed=None) -> np.ndarray:
    """Gaussian AR(1) path of length ``n`` started from its stationary law."""
    if not -1.0 < phi < 1.0:
        raise ValueError(f"AR coefficient must lie in (-1, 1), got {phi!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed)
    eps = rng.standard_normal(n)
    z0 = eps[0] / math.sqrt(1.0 - phi * phi)
    if n == 1:
        return np.array([z0])
    rest = lfilter([1.0], [1.0, -phi], eps[1:], zi=[phi * z0])[0]
    return np.concatenate([[z0], rest])


def lomax_sample(alpha: float, lam, uniform):
    """Inverse-cdf Lomax draw with survival ``(1 + z/lam)**(-alpha)``."""
    if not alpha > 0:
        raise ValueError(f"Lomax shape must be > 0, got {alpha!r}")
    w = np.asarray(uniform, dtype=float)
    out = lam * np.expm1(-np.log1p(-w) / alpha)
    return float(out) if np.ndim(out) == 0 else out


def gc_pair_series(gamma0: float, gamma1: float, n: int, phi: float = 0.6, seed=None):
    """Return ``(u, v)`` arrays of stationary generalized-Clayton pairs.

    ``gamma1 = 0`` is the Clayton copula; then ``Y`` is infinite and
    ``U = (1 + X)**(-gamma0)``.
    """
    GeneralizedClayton(gamma0, gamma1)
    rng = _rng(seed)
    z = ar1_series(phi, n, rng)
    v = ndtr(z * math.sqrt(1.0 - phi * phi))
    x = lomax_sample(gamma0 + 1.0, v ** (-1.0 / gamma0), rng.random(n))
    w = rng.random(n)
    if gamma1 > 0:
        x = np.minimum(x, lomax_sample(gamma1, 1.0, w))
    u = np.exp(-(gamma0 + gamma1) * np.log1p(x))
    return u, v


def sample_marshall_olkin(a: float, b: float, n: int, seed=None):
    """Common-shock sampler: ``P(U <= u, V <= v) = min(u**(1-a) v, u v**(1-b))``."""
    if not (0 <= a <= 1 and 0 <= b <= 1):
        raise ValueError("Marshall-Olkin parameters must lie in [0, 1]")
    rng = _rng(seed)
    if a == 0 or b == 0:
        return rng.random(n), rng.random(n)
    e = rng.standard_exponential((3, n))
    lam1, lam2 = (1 - a) / a, (1 - b) / b
    with np.errstate(divide="ignore"):
        x = np.minimum(e[0] / lam1, e[2]) if lam1 > 0 else e[2]
        y = np.minimum(e[1] / lam2, e[2]) if lam2 > 0 else e[2]
    return np.exp(-(lam1 + 1.0) * x), np.exp(-(lam2 + 1.0) * y)


def sample_independence(n: int, seed=None):
    rng = _rng(seed)
    return rng.random(n), rng.random(n)


def replication_seeds(seed: int, index: int):
    """Data seed sequence and 64-bit grouping seed for one replication."""
    data = np.random.SeedSequence(seed, spawn_key=(index, 0))
    group = np.random.SeedSequence(seed, spawn_key=(index, 1))
    return data, int(group.generate_state(1, np.uint64)[0])


def run_replication(config: SimConfig, index: int) -> float:
    data_seed, group_seed = replication_seeds(config.seed, index)
    try:
        u, v = gc_pair_series(config.gamma0, config.gamma1, config.n, config.phi, data_seed)
        sample = pseudo_observations(u, v)
        selection = mtd_maximizer(sample, config.q)
        return tomd_estimate(selection, config.m, config.theta, group_seed).value
    except Exception as exc:  # noqa: BLE001 - re-raised with the index
        raise ReplicationError(index, exc) from exc


def _run_chunk(args):
    config, indices = args
    return [run_replication(config, i) for i in indices]


def resolve_workers(workers=None) -> int:
    if workers is None:
        env = os.environ.get("TAILMAX_THREADS")
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))


def simulation_study(config: SimConfig, workers=None) -> StudyRow:
    """Run all replications and summarize the TOMD estimates.

    Results do not depend on ``workers``: every replication owns its seeds
    and the summary uses exactly rounded sums.
    """
    workers = resolve_workers(workers)
    indices = list(range(config.replications))
    if workers == 1 or config.replications == 1:
        estimates = [run_replication(config, i) for i in indices]
    else:
        chunks = [indices[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [(config, c) for c in chunks]))
        estimates = [0.0] * len(indices)
        for chunk, values in zip(chunks, parts):
            for i, value in zip(chunk, values):
                estimates[i] = value
    reps = len(estimates)
    mean = math.fsum(estimates) / reps
    stdev = None
    if reps > 1:
        stdev = math.sqrt(math.fsum((e - mean) ** 2 for e in estimates) / (reps - 1))
    return StudyRow(
        gamma0=config.gamma0,
        gamma1=config.gamma1,
        kappa_star_true=GeneralizedClayton(config.gamma0, config.gamma1).tomd,
        mean=mean,
        stdev=stdev,
        replication_estimates=estimates,
        config=asdict(config),
    )
