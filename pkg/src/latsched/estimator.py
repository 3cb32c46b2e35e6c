"""scikit-learn style wrappers around the analysis and the exact scheduler.

The "data" here is a task graph plus its constraints rather than a feature
matrix, so only the estimator conventions are borrowed: constructor
hyperparameters, ``get_params``/``set_params``, ``fit`` returning ``self`` and
fitted attributes with a trailing underscore.
"""

from __future__ import annotations

import os
from collections.abc import Mapping

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import io
from .allocation import LINEAR, CommModel, allocate
from .analysis import LITERAL, analyze_system
from .errors import InvalidGraph
from .graph import DEFAULT_PATH_CAP, LatencyConstraint, TaskGraph, validate_graph
from .oracle import DEFAULT_TIME_BUDGET, Objective, optimal_schedule


def check_graph(graph, constraints=None) -> tuple[TaskGraph, tuple[LatencyConstraint, ...]]:
    """Coerce a graph argument and validate it.

    Accepts a ``TaskGraph``, an ``Instance``, an instance dict or a path to an
    instance JSON file. Explicit ``constraints`` override any embedded ones.
    Raises ``InvalidGraph`` when validation finds violations.
    """
    if isinstance(graph, (str, os.PathLike)):
        graph = io.load(graph)
    elif isinstance(graph, Mapping):
        graph = io.Instance.from_dict(graph)
    if isinstance(graph, io.Instance):
        embedded = graph.constraints
        graph = graph.graph
    elif isinstance(graph, TaskGraph):
        embedded = ()
    else:
        raise TypeError(f"expected a TaskGraph, instance dict or path, got {type(graph).__name__}")
    cs = tuple(constraints) if constraints is not None else tuple(embedded)
    for c in cs:
        if not isinstance(c, LatencyConstraint):
            raise TypeError(f"expected LatencyConstraint, got {type(c).__name__}")
    report = validate_graph(graph, cs)
    if not report.ok:
        raise InvalidGraph(report)
    return graph, cs


class LatencyAnalyzer(BaseEstimator):
    """Sufficient schedulability test for every constraint and X pair.

    ``predict`` returns one boolean per constraint: the constraint's own check
    and, for constraints in an X pair, the joint check too.
    """

    def __init__(self, comm=LINEAR, q=0, mode=LITERAL, cap=DEFAULT_PATH_CAP, log_base=2):
        self.comm = comm
        self.q = q
        self.mode = mode
        self.cap = cap
        self.log_base = log_base

    def _comm_model(self) -> CommModel:
        return CommModel(self.comm, self.q, self.log_base)

    def fit(self, graph, constraints=None):
        g, cs = check_graph(graph, constraints)
        self.graph_ = g
        self.constraints_ = cs
        self.report_ = analyze_system(g, cs, self._comm_model(), self.mode, self.cap)
        self.allocations_ = tuple(allocate(g, c, self.cap) for c in cs)
        return self

    def predict(self, graph=None, constraints=None) -> list[bool]:
        if graph is not None:
            self.fit(graph, constraints)
        check_is_fitted(self, "report_")
        ok = [c.verdict is not None and c.verdict.schedulable for c in self.report_.constraints]
        for p in self.report_.pairs:
            if p.error or (p.x is not None and not p.x.schedulable):
                ok[p.i] = ok[p.j] = False
        return ok

    def lower_bounds(self) -> list:
        """Per-constraint lower bounds on the achievable latency."""
        check_is_fitted(self, "report_")
        return [c.lower_bound for c in self.report_.constraints]


class OracleScheduler(BaseEstimator):
    """Exact scheduler; ``predict`` returns the start time of each objective task."""

    def __init__(self, num_procs=2, q_edge=0, time_budget=DEFAULT_TIME_BUDGET):
        self.num_procs = num_procs
        self.q_edge = q_edge
        self.time_budget = time_budget

    def fit(self, graph, objective):
        g, _ = check_graph(graph, ())
        if isinstance(objective, str):
            objective = Objective(objective)
        elif isinstance(objective, (tuple, list)):
            objective = Objective(*objective)
        self.objective_ = objective
        self.schedule_ = optimal_schedule(g, self.num_procs, objective, self.q_edge, self.time_budget)
        return self

    def predict(self) -> tuple[int, ...]:
        check_is_fitted(self, "schedule_")
        return tuple(self.schedule_.start(t) for t in self.objective_.targets)
