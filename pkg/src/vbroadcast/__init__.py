"""Trade-offs between approximation error and sample complexity for virtual
quantum broadcasting: Choi-operator machinery, a self-contained semidefinite
programming solver, diamond-norm distances, the broadcasting optimization
problems, and a Monte Carlo simulator for the resulting quasiprobability
sampling protocols."""

from . import broadcasting, channels, diamond, linalg, records, sdp, simulator
from .broadcasting import (
    approx_overhead,
    approx_overhead_depolarizing,
    depolarizing_overhead,
    discard_prepare_point,
    exact_overhead,
    min_error,
    min_error_upper_bound,
    overhead_of_map,
)
from .channels import BroadcastDecomposition, ChoiOperator, depolarizing_choi
from .diamond import half_diamond_distance, lower_bound_by_states
from .sdp import SolverConfig
from .simulator import Observable, naive_baseline, required_samples, run_protocol

__version__ = "0.1.0"

__all__ = [
    "linalg", "channels", "sdp", "diamond", "broadcasting", "simulator",
    "records",
    "exact_overhead", "approx_overhead", "approx_overhead_depolarizing",
    "depolarizing_overhead", "min_error", "min_error_upper_bound",
    "discard_prepare_point", "overhead_of_map",
    "half_diamond_distance", "lower_bound_by_states",
    "ChoiOperator", "BroadcastDecomposition", "depolarizing_choi",
    "Observable", "run_protocol", "naive_baseline", "required_samples",
    "SolverConfig",
]
