"""Tail order of maximal dependence: copula models, empirical estimators and tests."""

__version__ = "0.1.0"

from .copulas import (  # noqa: E402
    GeneralizedClayton,
    Independence,
    MarshallOlkin,
    copula_value,
    fstar,
    gc_phi_star,
    mtd_oracle,
    numeric_phi_star,
)
from .empirical import (  # noqa: E402
    EmptySelectionError,
    PseudoSample,
    diagonal_selection,
    empirical_copula,
    mtd_maximizer,
    pseudo_observations,
)
from .estimators import (  # noqa: E402
    ToddEstimator,
    TomdEstimator,
    relative_difference,
    todd_estimate,
    tomd_estimate,
)
from .gof import Direction, StatisticKind, gof_table, gof_test  # noqa: E402
from .portmanteau import portmanteau_suite  # noqa: E402
from .simulation import SimConfig, gc_pair_series, simulation_study  # noqa: E402

__all__ = [
    "__version__",
    "GeneralizedClayton",
    "Independence",
    "MarshallOlkin",
    "copula_value",
    "fstar",
    "gc_phi_star",
    "mtd_oracle",
    "numeric_phi_star",
    "EmptySelectionError",
    "PseudoSample",
    "diagonal_selection",
    "empirical_copula",
    "mtd_maximizer",
    "pseudo_observations",
    "ToddEstimator",
    "TomdEstimator",
    "relative_difference",
    "todd_estimate",
    "tomd_estimate",
    "Direction",
    "StatisticKind",
    "gof_table",
    "gof_test",
    "portmanteau_suite",
    "SimConfig",
    "gc_pair_series",
    "simulation_study",
]
