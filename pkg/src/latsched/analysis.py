"""Schedulability conditions and lower bounds for latency-constrained DAGs.

Two evaluation modes are supported. ``literal`` sums path terms including the
sink task's WCET, exactly as the closed-form conditions are usually written.
``strict`` drops the sink's WCET from every path term, which matches the
start-to-start meaning of a latency constraint and makes the bounds directly
comparable with the exact scheduler.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .allocation import (
    ZERO_COMM,
    Allocation,
    CommModel,
    PairAllocation,
    allocate,
    allocate_pair,
    comm_overhead,
    fits,
)
from .errors import LatschedError, NotXConfiguration
from .graph import (
    DEFAULT_PATH_CAP,
    LatencyConstraint,
    PairConfiguration,
    TaskGraph,
    classify_pair,
    decompose,
    enumerate_paths,
)

LITERAL = "literal"
STRICT = "strict"
MODES = (LITERAL, STRICT)


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def to_json_number(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    return x


def _sub(a, b):
    if isinstance(a, float) or isinstance(b, float):
        return float(a) - float(b)
    return Fraction(a) - Fraction(b) if isinstance(a, Fraction) or isinstance(b, Fraction) else a - b


def _add(a, b):
    if isinstance(a, float) or isinstance(b, float):
        return float(a) + float(b)
    return a + b


def path_sum_term(graph: TaskGraph, allocation: Allocation, mode: str = LITERAL) -> int:
    """Shared-task WCET plus the largest exclusive-task WCET over the selected paths.

    This is the processor-independent part of the single-constraint condition;
    in strict mode the sink task's WCET is left out of the shared sum.
    """
    _check_mode(mode)
    w = graph.wcet
    shared, exclusive = decompose(allocation.selected_paths)
    total = sum(w[t] for t in shared)
    total += max((sum(w[t] for t in ex) for ex in exclusive.values()), default=0)
    if mode == STRICT:
        total -= w[allocation.constraint.sink]
    return total


@dataclass(frozen=True)
class SingleVerdict:
    constraint: LatencyConstraint
    m: int
    lhs: object
    bound: int
    schedulable: bool
    slack: object
    mode: str

    def to_dict(self) -> dict:
        return {
            "source": self.constraint.source,
            "sink": self.constraint.sink,
            "bound": self.bound,
            "m": self.m,
            "lhs": to_json_number(self.lhs),
            "slack": to_json_number(self.slack),
            "schedulable": self.schedulable,
            "mode": self.mode,
        }


def _single(graph, constraint, comm, mode, allocation) -> SingleVerdict:
    base = path_sum_term(graph, allocation, mode)
    lhs = _add(base, comm_overhead(comm, allocation.m))
    ok = fits(base, comm, allocation.m, constraint.bound)
    return SingleVerdict(constraint, allocation.m, lhs, constraint.bound, ok, _sub(constraint.bound, lhs), mode)


def check_single(
    graph: TaskGraph,
    constraint: LatencyConstraint,
    comm: CommModel = ZERO_COMM,
    mode: str = LITERAL,
    cap: int = DEFAULT_PATH_CAP,
    allocation: Allocation | None = None,
) -> SingleVerdict:
    """Evaluate the single-constraint condition on the path-based allocation.

    A negative verdict means "not schedulable under the path-based
    allocation", not that no schedule exists.
    """
    _check_mode(mode)
    if allocation is None:
        allocation = allocate(graph, constraint, cap)
    return _single(graph, constraint, comm, mode, allocation)


@dataclass(frozen=True)
class LowerBounds:
    constraints: tuple[LatencyConstraint, ...]
    values: tuple
    mode: str

    @property
    def necessarily_unschedulable(self) -> tuple[bool, ...]:
        return tuple(_sub(c.bound, v) < 0 for c, v in zip(self.constraints, self.values))

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "bounds": [
                {"source": c.source, "sink": c.sink, "bound": c.bound, "lower_bound": to_json_number(v), "necessarily_unschedulable": bad}
                for c, v, bad in zip(self.constraints, self.values, self.necessarily_unschedulable)
            ],
        }


def lower_bound_single(
    graph: TaskGraph,
    constraint: LatencyConstraint,
    comm: CommModel = ZERO_COMM,
    mode: str = LITERAL,
    cap: int = DEFAULT_PATH_CAP,
    allocation: Allocation | None = None,
) -> LowerBounds:
    """Smallest latency bound the constraint could be given; the condition's left-hand side."""
    verdict = check_single(graph, constraint, comm, mode, cap, allocation)
    return LowerBounds((constraint,), (verdict.lhs,), mode)


def _cross_term(graph, source, sink, mode, cap) -> int:
    longest = enumerate_paths(graph, source, sink, cap).longest()
    return longest - graph.wcet[sink] if mode == STRICT else longest


@dataclass(frozen=True)
class XVerdict:
    c1: LatencyConstraint
    c2: LatencyConstraint
    m1: int
    m2: int
    m: int
    single1: SingleVerdict
    single2: SingleVerdict
    cross1: object
    cross2: object
    cross1_ok: bool
    cross2_ok: bool
    mode: str

    @property
    def schedulable(self) -> bool:
        return self.single1.schedulable and self.single2.schedulable and self.cross1_ok and self.cross2_ok

    def to_dict(self) -> dict:
        return {
            "kind": PairConfiguration.X,
            "m1": self.m1,
            "m2": self.m2,
            "m": self.m,
            "single": [self.single1.to_dict(), self.single2.to_dict()],
            "cross1": to_json_number(self.cross1),
            "cross2": to_json_number(self.cross2),
            "cross1_ok": self.cross1_ok,
            "cross2_ok": self.cross2_ok,
            "schedulable": self.schedulable,
            "mode": self.mode,
        }


@dataclass(frozen=True)
class _XTerms:
    a1: Allocation
    a2: Allocation
    pair: PairAllocation
    base1: int
    base2: int
    cross_base1: int
    cross_base2: int


def _x_terms(graph, c1, c2, mode, cap) -> _XTerms:
    _check_mode(mode)
    config = classify_pair(graph, c1, c2)
    if config.kind != PairConfiguration.X:
        raise NotXConfiguration(f"constraints ({c1.source},{c1.sink}) and ({c2.source},{c2.sink}) are in {config.kind}")
    a1 = allocate(graph, c1, cap)
    a2 = allocate(graph, c2, cap)
    pair = allocate_pair(graph, c1, c2, cap)
    return _XTerms(
        a1,
        a2,
        pair,
        path_sum_term(graph, a1, mode),
        path_sum_term(graph, a2, mode),
        _cross_term(graph, c2.source, c1.sink, mode, cap),
        _cross_term(graph, c1.source, c2.sink, mode, cap),
    )


def _x_verdict(graph, c1, c2, comm, mode, t: _XTerms) -> XVerdict:
    m = t.pair.m
    over = comm_overhead(comm, m)
    return XVerdict(
        c1,
        c2,
        t.a1.m,
        t.a2.m,
        m,
        _single(graph, c1, comm, mode, t.a1),
        _single(graph, c2, comm, mode, t.a2),
        _add(t.cross_base1, over),
        _add(t.cross_base2, over),
        fits(t.cross_base1, comm, m, c1.bound),
        fits(t.cross_base2, comm, m, c2.bound),
        mode,
    )


def _x_bounds(c1, c2, comm, mode, t: _XTerms) -> LowerBounds:
    over = comm_overhead(comm, t.pair.m)
    lb1 = max(_add(t.base1, comm_overhead(comm, t.a1.m)), _add(t.cross_base1, over))
    lb2 = max(_add(t.base2, comm_overhead(comm, t.a2.m)), _add(t.cross_base2, over))
    return LowerBounds((c1, c2), (lb1, lb2), mode)


def check_x_pair(
    graph: TaskGraph,
    c1: LatencyConstraint,
    c2: LatencyConstraint,
    comm: CommModel = ZERO_COMM,
    mode: str = LITERAL,
    cap: int = DEFAULT_PATH_CAP,
) -> XVerdict:
    """Both single conditions plus the two cross-path conditions for a pair in X.

    The single conditions use each constraint's own processor count; the
    cross-path terms use the processor count of the joint allocation.
    """
    return _x_verdict(graph, c1, c2, comm, mode, _x_terms(graph, c1, c2, mode, cap))


def lower_bounds_x(
    graph: TaskGraph,
    c1: LatencyConstraint,
    c2: LatencyConstraint,
    comm: CommModel = ZERO_COMM,
    mode: str = LITERAL,
    cap: int = DEFAULT_PATH_CAP,
) -> LowerBounds:
    return _x_bounds(c1, c2, comm, mode, _x_terms(graph, c1, c2, mode, cap))


@dataclass(frozen=True)
class ConstraintReport:
    index: int
    constraint: LatencyConstraint
    verdict: SingleVerdict | None
    lower_bound: object = None
    error: str | None = None

    def to_dict(self) -> dict:
        c = self.constraint
        d = {"index": self.index, "source": c.source, "sink": c.sink, "bound": c.bound}
        if self.verdict is not None:
            v = self.verdict
            d.update(
                m=v.m,
                lhs=to_json_number(v.lhs),
                slack=to_json_number(v.slack),
                schedulable=v.schedulable,
                lower_bound=to_json_number(self.lower_bound),
                necessarily_unschedulable=_sub(c.bound, self.lower_bound) < 0,
            )
        if self.error:
            d["error"] = self.error
        return d


@dataclass(frozen=True)
class PairReport:
    i: int
    j: int
    config: PairConfiguration | None
    x: XVerdict | None = None
    bounds: LowerBounds | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        d = {"c1": self.i, "c2": self.j, "kind": self.config.kind if self.config else None}
        if self.config:
            d["witness"] = self.config.to_dict()
        if self.x is not None:
            d.update({k: v for k, v in self.x.to_dict().items() if k != "kind"})
            d["lower_bounds"] = [to_json_number(v) for v in self.bounds.values]
        if self.error:
            d["error"] = self.error
        return d


@dataclass(frozen=True)
class SystemReport:
    mode: str
    comm: CommModel
    constraints: tuple[ConstraintReport, ...]
    pairs: tuple[PairReport, ...]
    errors: tuple[str, ...] = field(default=())

    @property
    def system_schedulable(self) -> bool:
        if self.errors:
            return False
        singles = all(c.verdict.schedulable for c in self.constraints)
        return singles and all(p.x.schedulable for p in self.pairs if p.x is not None)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "comm": self.comm.to_dict(),
            "system_schedulable": self.system_schedulable,
            "constraints": [c.to_dict() for c in self.constraints],
            "pairs": [p.to_dict() for p in self.pairs],
            "errors": list(self.errors),
        }


def analyze_system(
    graph: TaskGraph,
    constraints: Sequence[LatencyConstraint],
    comm: CommModel = ZERO_COMM,
    mode: str = LITERAL,
    cap: int = DEFAULT_PATH_CAP,
) -> SystemReport:
    """Check every constraint on its own and every X pair jointly.

    Parallel and Z pairs need nothing beyond the single checks. Errors in one
    constraint or pair are recorded and the remaining checks still run.
    """
    _check_mode(mode)
    graph.require_valid()
    errors: list[str] = []
    creports = []
    for i, c in enumerate(constraints):
        try:
            v = check_single(graph, c, comm, mode, cap)
            creports.append(ConstraintReport(i, c, v, v.lhs))
        except LatschedError as exc:
            errors.append(f"constraint {i}: {exc}")
            creports.append(ConstraintReport(i, c, None, error=str(exc)))
    preports = []
    for (i, c1), (j, c2) in itertools.combinations(enumerate(constraints), 2):
        try:
            config = classify_pair(graph, c1, c2)
        except LatschedError as exc:
            errors.append(f"pair ({i}, {j}): {exc}")
            preports.append(PairReport(i, j, None, error=str(exc)))
            continue
        if config.kind != PairConfiguration.X:
            preports.append(PairReport(i, j, config))
            continue
        try:
            terms = _x_terms(graph, c1, c2, mode, cap)
            x = _x_verdict(graph, c1, c2, comm, mode, terms)
            lb = _x_bounds(c1, c2, comm, mode, terms)
            preports.append(PairReport(i, j, config, x, lb))
        except LatschedError as exc:
            errors.append(f"pair ({i}, {j}): {exc}")
            preports.append(PairReport(i, j, config, error=str(exc)))
    return SystemReport(mode, comm, tuple(creports), tuple(preports), tuple(errors))
