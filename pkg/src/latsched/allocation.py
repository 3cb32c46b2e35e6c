"""Path-based task-to-processor allocation and the communication overhead model."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .graph import (
    DEFAULT_PATH_CAP,
    LatencyConstraint,
    Path,
    PathSet,
    TaskGraph,
    enumerate_paths,
    natural_key,
    sequence_key,
)

LINEAR = "linear"
LOG = "log"


def as_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or ``"p/q"`` string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("boolean is not a number")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(str(value).strip())


def plain_number(x):
    """Integer when integral, Fraction otherwise; floats pass through."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


@dataclass(frozen=True)
class CommModel:
    """Overhead ``M(m)``: ``q*(m-1)`` (linear) or ``q*log_base(m)`` (log)."""

    kind: str = LINEAR
    q: Fraction = Fraction(0)
    base: int = 2

    def __post_init__(self):
        kind = {"logarithmic": LOG}.get(self.kind, self.kind)
        if kind not in (LINEAR, LOG):
            raise ValueError(f"unknown communication model {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        q = as_fraction(self.q)
        if q < 0:
            raise ValueError("q must be non-negative")
        object.__setattr__(self, "q", q)
        if not isinstance(self.base, int) or self.base < 2:
            raise ValueError("log base must be an integer >= 2")

    def to_dict(self) -> dict:
        q = self.q
        d = {"model": self.kind, "q": int(q) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"}
        if self.kind == LOG and self.base != 2:
            d["base"] = self.base
        return d

    @classmethod
    def from_dict(cls, d: Mapping | None) -> "CommModel":
        if not d:
            return cls()
        return cls(d.get("model", LINEAR), d.get("q", 0), int(d.get("base", 2)))


ZERO_COMM = CommModel()


def _exact_log(m: int, base: int) -> int | None:
    k, p = 0, 1
    while p < m:
        p *= base
        k += 1
    return k if p == m else None


def comm_overhead(model: CommModel, m: int):
    """``M(m)``; exact Fraction except for a logarithm of a non-power of the base."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if model.kind == LINEAR:
        return plain_number(model.q * (m - 1))
    if model.q == 0:
        return 0
    k = _exact_log(m, model.base)
    if k is not None:
        return plain_number(model.q * k)
    return float(model.q) * math.log(m, model.base)


def fits(base, model: CommModel, m: int, bound) -> bool:
    """Exact test of ``base + M(m) <= bound`` for rational ``base`` and ``bound``."""
    room = as_fraction(bound) - as_fraction(base)
    if model.kind == LINEAR or model.q == 0 or _exact_log(m, model.base) is not None:
        return as_fraction(comm_overhead(model, m)) <= room
    # q*log_b(m) <= room  <=>  m**den <= b**num  with room/q = num/den
    if room < 0:
        return False
    r = room / model.q
    return m**r.denominator <= model.base**r.numerator


@dataclass(frozen=True)
class Allocation:
    """Result of the path-based allocation for one constraint.

    ``selected_paths`` are in selection order; the i-th selected path owns
    processor i, which hosts the tasks that path claimed first.
    """

    constraint: LatencyConstraint
    selected_paths: tuple[Path, ...]
    assignment: Mapping[str, int]
    m: int
    offset: int = 0

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "assignment": dict(sorted(self.assignment.items(), key=lambda kv: natural_key(kv[0]))),
            "selected_paths": [list(p.tasks) for p in self.selected_paths],
        }

    def processors(self) -> set[int]:
        return set(self.assignment.values())


def _select(
    paths: Sequence[Path],
    universe: frozenset[str],
    wcet: Mapping[str, int],
    claimed: Mapping[str, int],
    first_proc: int,
) -> tuple[list[Path], dict[str, int]]:
    order = sorted(paths, key=lambda p: (-p.length, sequence_key(p.tasks)))
    phi = set(claimed) & universe
    assignment: dict[str, int] = {}
    selected: list[Path] = []
    remaining = list(order)
    if not phi:
        lp = remaining.pop(0)
        selected.append(lp)
        for t in lp.tasks:
            assignment[t] = first_proc
        phi.update(lp.tasks)
    while phi != universe:
        gains = [sum(wcet[t] for t in p.tasks if t not in phi) for p in remaining]
        best = max(gains)
        # ties: smallest task-id sequence; remaining keeps length order for the sort
        pick = min((i for i, g in enumerate(gains) if g == best), key=lambda i: sequence_key(remaining[i].tasks))
        path = remaining.pop(pick)
        proc = first_proc + len(selected)
        selected.append(path)
        for t in path.tasks:
            if t not in phi:
                assignment[t] = proc
        phi.update(path.tasks)
    return selected, assignment


def allocate(graph: TaskGraph, constraint: LatencyConstraint, cap: int = DEFAULT_PATH_CAP, paths: PathSet | None = None) -> Allocation:
    """Select paths longest-first, then by greatest not-yet-covered WCET, until every task under the constraint is covered."""
    if paths is None:
        paths = enumerate_paths(graph, constraint.source, constraint.sink, cap)
    selected, assignment = _select(paths.paths, paths.tasks, graph.wcet, {}, 0)
    return Allocation(constraint, tuple(selected), assignment, len(selected))


@dataclass(frozen=True)
class PairAllocation:
    """Sequential allocation of two constraints sharing one processor pool."""

    first: Allocation
    second: Allocation
    assignment: Mapping[str, int]
    m: int

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "assignment": dict(sorted(self.assignment.items(), key=lambda kv: natural_key(kv[0]))),
            "selected_paths": [list(p.tasks) for p in self.first.selected_paths + self.second.selected_paths],
        }


def allocate_pair(
    graph: TaskGraph,
    c1: LatencyConstraint,
    c2: LatencyConstraint,
    cap: int = DEFAULT_PATH_CAP,
) -> PairAllocation:
    """Allocate ``c1``, then ``c2`` with the tasks already placed kept on their processors.

    Paths of ``c2`` that bring no new task are never selected, so the total
    processor count is below ``m1 + m2`` whenever the constraints share tasks
    that would otherwise need their own path.
    """
    first = allocate(graph, c1, cap)
    ps2 = enumerate_paths(graph, c2.source, c2.sink, cap)
    selected, extra = _select(ps2.paths, ps2.tasks, graph.wcet, first.assignment, first.m)
    second = Allocation(c2, tuple(selected), extra, len(selected), offset=first.m)
    assignment = {**first.assignment, **extra}
    return PairAllocation(first, second, assignment, first.m + second.m)


def incomparable_pairs(graph: TaskGraph, tasks: Iterable[str]) -> list[tuple[str, str]]:
    tasks = sorted(tasks, key=natural_key)
    desc = {t: graph.descendants(t) for t in tasks}
    out = []
    for i, a in enumerate(tasks):
        for b in tasks[i + 1 :]:
            if b not in desc[a] and a not in desc[b]:
                out.append((a, b))
    return out


def check_parallelism_optimality(graph: TaskGraph, allocation: Allocation | PairAllocation | Mapping[str, int]) -> list[tuple[str, str]]:
    """Pairs of mutually unreachable tasks that were placed on the same processor."""
    assignment = allocation if isinstance(allocation, Mapping) else allocation.assignment
    return [(a, b) for a, b in incomparable_pairs(graph, assignment) if assignment[a] == assignment[b]]
