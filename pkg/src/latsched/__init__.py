"""Schedulability analysis for latency constraints in non-preemptive multiprocessor DAG scheduling."""

from .allocation import LINEAR, LOG, Allocation, CommModel, PairAllocation, allocate, allocate_pair, check_parallelism_optimality
from .analysis import LITERAL, STRICT, SystemReport, analyze_system, check_single, check_x_pair, lower_bound_single, lower_bounds_x
from .errors import InfeasibleSpec, InvalidGraph, LatschedError, NoPath, NotXConfiguration, PathExplosion
from .generator import GeneratorSpec, generate_single_instance, generate_x_instance
from .graph import LatencyConstraint, PairConfiguration, PathSet, Task, TaskGraph, classify_pair, enumerate_paths, validate_graph
from .io import Instance
from .oracle import Objective, Schedule, compute_rho, optimal_schedule, validate_schedule

__version__ = "0.1.0"

_LAZY = {"LatencyAnalyzer", "OracleScheduler", "check_graph"}


def __getattr__(name):
    # keeps scikit-learn off the import path unless the estimators are used
    if name in _LAZY:
        from . import estimator

        return getattr(estimator, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
