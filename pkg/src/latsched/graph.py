"""Task-graph data model, validation, path enumeration and pair classification."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import InvalidGraph, NoPath, PathExplosion

DEFAULT_PATH_CAP = 100_000

_CHUNK = re.compile(r"(\d+)")


def natural_key(task_id: str):
    """Sort key that orders ``t2`` before ``t11``.

    Digit runs compare numerically, other runs as text; the raw id is the
    final tie-break so distinct ids never compare equal.
    """
    parts = tuple((0, int(c), "") if c.isdigit() else (1, 0, c) for c in _CHUNK.split(task_id) if c)
    return parts, task_id


def sequence_key(ids: Iterable[str]):
    return tuple(natural_key(t) for t in ids)


@dataclass(frozen=True)
class Task:
    id: str
    wcet: int


@dataclass(frozen=True)
class LatencyConstraint:
    """Upper bound on ``S(sink) - S(source)``, start to start."""

    source: str
    sink: str
    bound: int

    def to_dict(self) -> dict:
        return {"source": self.source, "sink": self.sink, "bound": self.bound}


@dataclass(frozen=True)
class Violation:
    rule: str
    subject: tuple
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()
    warnings: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        def dump(vs):
            return [{"rule": v.rule, "subject": list(v.subject), "message": v.message} for v in vs]

        return {"ok": self.ok, "violations": dump(self.violations), "warnings": dump(self.warnings)}


@dataclass(frozen=True)
class TaskGraph:
    """A DAG of tasks. Construction never fails; call :func:`validate_graph`."""

    tasks: tuple[Task, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[Sequence[str]],
        wcet: Mapping[str, int] | int = 1,
        tasks: Iterable[str] = (),
    ) -> "TaskGraph":
        """Build a graph from an edge list; ``wcet`` is a map or a constant."""
        edges = [tuple(e) for e in edges]
        ids = list(dict.fromkeys([*tasks, *(t for e in edges for t in e)]))
        if isinstance(wcet, Mapping):
            ids = list(dict.fromkeys([*ids, *wcet]))
            tl = [Task(t, wcet[t]) for t in ids]
        else:
            tl = [Task(t, wcet) for t in ids]
        return cls(tuple(tl), tuple(edges))

    @cached_property
    def wcet(self) -> dict[str, int]:
        return {t.id: t.wcet for t in self.tasks}

    @cached_property
    def ids(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.tasks)

    @cached_property
    def successors(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {t: [] for t in self.wcet}
        for u, v in dict.fromkeys(self.edges):
            if u in out and v in out and v not in out[u]:
                out[u].append(v)
        return {u: tuple(sorted(vs, key=natural_key)) for u, vs in out.items()}

    @cached_property
    def predecessors(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {t: [] for t in self.wcet}
        for u, vs in self.successors.items():
            for v in vs:
                out[v].append(u)
        return {v: tuple(sorted(us, key=natural_key)) for v, us in out.items()}

    @cached_property
    def validation(self) -> ValidationReport:
        return validate_graph(self)

    @cached_property
    def topological_order(self) -> tuple[str, ...]:
        """Kahn order, ties broken by natural id order. Requires a valid graph."""
        self.require_valid()
        indeg = {t: len(p) for t, p in self.predecessors.items()}
        ready = sorted((t for t, d in indeg.items() if d == 0), key=natural_key)
        order = []
        while ready:
            t = ready.pop(0)
            order.append(t)
            fresh = []
            for s in self.successors[t]:
                indeg[s] -= 1
                if indeg[s] == 0:
                    fresh.append(s)
            if fresh:
                ready = sorted(ready + fresh, key=natural_key)
        return tuple(order)

    def require_valid(self) -> None:
        if not self.validation.ok:
            raise InvalidGraph(self.validation)

    def descendants(self, task: str) -> frozenset[str]:
        return _reach(task, self.successors)

    def ancestors(self, task: str) -> frozenset[str]:
        return _reach(task, self.predecessors)

    def reaches(self, u: str, v: str) -> bool:
        return v in self.descendants(u)

    def under(self, constraint: LatencyConstraint) -> frozenset[str]:
        """Tasks on at least one source-to-sink path, endpoints included."""
        s, t = constraint.source, constraint.sink
        if t not in self.descendants(s):
            raise NoPath(s, t)
        return (self.descendants(s) & self.ancestors(t)) | {s, t}

    def path_length(self, ids: Iterable[str]) -> int:
        return sum(self.wcet[t] for t in ids)

    def total_wcet(self) -> int:
        return sum(self.wcet.values())


def _reach(start: str, adjacency: Mapping[str, Sequence[str]]) -> frozenset[str]:
    seen: set[str] = set()
    stack = list(adjacency.get(start, ()))
    while stack:
        u = stack.pop()
        if u not in seen:
            seen.add(u)
            stack.extend(adjacency[u])
    return frozenset(seen)


def validate_graph(graph: TaskGraph, constraints: Sequence[LatencyConstraint] = ()) -> ValidationReport:
    """Check the DAG invariants and, optionally, constraint well-formedness.

    Violations are returned as data. Constraints whose endpoints coincide with
    another constraint's endpoints are accepted but reported as warnings.
    """
    bad: list[Violation] = []
    warn: list[Violation] = []
    seen_ids: set[str] = set()
    for t in graph.tasks:
        if not isinstance(t.id, str) or not t.id:
            bad.append(Violation("bad-id", (t.id,), f"task id {t.id!r} must be a non-empty string"))
        if t.id in seen_ids:
            bad.append(Violation("duplicate-task", (t.id,), f"task {t.id} defined twice"))
        seen_ids.add(t.id)
        if not isinstance(t.wcet, int) or isinstance(t.wcet, bool) or t.wcet < 1:
            bad.append(Violation("bad-wcet", (t.id,), f"task {t.id} has wcet {t.wcet!r}, expected integer >= 1"))

    seen_edges: set[tuple[str, str]] = set()
    for e in graph.edges:
        if len(e) != 2:
            bad.append(Violation("bad-edge", tuple(e), f"edge {e!r} is not a pair"))
            continue
        u, v = e
        for end in (u, v):
            if end not in seen_ids:
                bad.append(Violation("unknown-task", (u, v), f"edge ({u}, {v}) names unknown task {end}"))
        if u == v:
            bad.append(Violation("self-loop", (u, v), f"self-loop on {u}"))
        if (u, v) in seen_edges:
            bad.append(Violation("duplicate-edge", (u, v), f"edge ({u}, {v}) listed twice"))
        seen_edges.add((u, v))

    cycle = _find_cycle(graph)
    if cycle:
        bad.append(Violation("cycle", tuple(cycle), "cycle " + " -> ".join(cycle + [cycle[0]])))

    endpoints: dict[str, int] = {}
    for i, c in enumerate(constraints):
        subject = (c.source, c.sink)
        missing = [t for t in subject if t not in seen_ids]
        if missing:
            bad.append(Violation("constraint-unknown-task", subject, f"constraint {i} names unknown task(s) {missing}"))
            continue
        if c.source == c.sink:
            bad.append(Violation("constraint-same-endpoints", subject, f"constraint {i} has source == sink"))
        if not isinstance(c.bound, int) or isinstance(c.bound, bool) or c.bound < 0:
            bad.append(Violation("bad-bound", subject, f"constraint {i} bound {c.bound!r} is not a non-negative integer"))
        if not cycle and c.source != c.sink and c.sink not in graph.descendants(c.source):
            bad.append(Violation("constraint-no-path", subject, f"no path from {c.source} to {c.sink}"))
        for t in subject:
            if t in endpoints:
                warn.append(
                    Violation(
                        "shared-endpoint", (t,), f"task {t} is an endpoint of constraints {endpoints[t]} and {i}"
                    )
                )
            else:
                endpoints[t] = i
    return ValidationReport(tuple(bad), tuple(warn))


def _find_cycle(graph: TaskGraph) -> list[str] | None:
    succ = graph.successors
    colour: dict[str, int] = {}
    for root in sorted(succ, key=natural_key):
        if root in colour:
            continue
        stack = [(root, iter(succ[root]))]
        colour[root] = 1
        trail = [root]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                trail.pop()
                colour[node] = 2
            elif colour.get(nxt) == 1:
                return trail[trail.index(nxt) :]
            elif nxt not in colour:
                colour[nxt] = 1
                trail.append(nxt)
                stack.append((nxt, iter(succ[nxt])))
    return None


@dataclass(frozen=True)
class Path:
    tasks: tuple[str, ...]
    length: int

    def __iter__(self):
        return iter(self.tasks)

    def __len__(self):
        return len(self.tasks)


def decompose(paths: Sequence[Path]) -> tuple[frozenset[str], dict[int, frozenset[str]]]:
    """Shared tasks (in every path) and per-path exclusive tasks (in that path only)."""
    if not paths:
        return frozenset(), {}
    sets = [frozenset(p.tasks) for p in paths]
    shared = frozenset.intersection(*sets)
    count: dict[str, int] = {}
    for s in sets:
        for t in s:
            count[t] = count.get(t, 0) + 1
    exclusive = {i: frozenset(t for t in s if count[t] == 1) for i, s in enumerate(sets)}
    if len(sets) == 1:
        # a lone path shares everything with itself
        exclusive = {0: frozenset()}
    return shared, exclusive


@dataclass(frozen=True)
class PathSet:
    source: str
    sink: str
    paths: tuple[Path, ...]
    shared: frozenset[str] = field(init=False)
    exclusive: Mapping[int, frozenset[str]] = field(init=False)

    def __post_init__(self):
        shared, exclusive = decompose(self.paths)
        object.__setattr__(self, "shared", shared)
        object.__setattr__(self, "exclusive", exclusive)

    def __len__(self):
        return len(self.paths)

    @property
    def tasks(self) -> frozenset[str]:
        return frozenset(t for p in self.paths for t in p.tasks)

    def longest(self) -> int:
        return max(p.length for p in self.paths)


def count_paths(graph: TaskGraph, source: str, sink: str) -> int:
    """Number of source-to-sink paths, by dynamic programming over the DAG."""
    graph.require_valid()
    ways = {sink: 1}
    for u in reversed(graph.topological_order):
        if u != sink:
            ways[u] = sum(ways.get(v, 0) for v in graph.successors[u])
    return ways.get(source, 0)


def enumerate_paths(graph: TaskGraph, source: str, sink: str, cap: int = DEFAULT_PATH_CAP) -> PathSet:
    """All directed paths from ``source`` to ``sink`` in natural lexicographic order.

    Raises PathExplosion before enumerating anything if the count exceeds ``cap``.
    """
    graph.require_valid()
    for t in (source, sink):
        if t not in graph.wcet:
            raise KeyError(f"unknown task {t}")
    n = count_paths(graph, source, sink)
    if n == 0 or source == sink:
        raise NoPath(source, sink)
    if n > cap:
        raise PathExplosion(source, sink, n, cap)
    useful = graph.ancestors(sink)
    succ = graph.successors
    w = graph.wcet
    out: list[Path] = []
    trail = [source]

    def walk(u: str, length: int) -> None:
        for v in succ[u]:
            if v == sink:
                out.append(Path(tuple(trail) + (v,), length + w[v]))
            elif v in useful:
                trail.append(v)
                walk(v, length + w[v])
                trail.pop()

    walk(source, w[source])
    return PathSet(source, sink, tuple(out))


@dataclass(frozen=True)
class PairConfiguration:
    """How two latency constraints relate.

    ``forward`` links a task under the first constraint to a task under the
    second; ``backward`` links the other way. Each is ``None`` when absent.
    """

    kind: str
    forward: tuple[str, ...] | None = None
    backward: tuple[str, ...] | None = None

    PARALLEL = "Parallel"
    Z = "Z"
    X = "X"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "forward": list(self.forward) if self.forward else None,
            "backward": list(self.backward) if self.backward else None,
        }


def _linking_path(graph: TaskGraph, sources: frozenset[str], targets: frozenset[str]) -> tuple[str, ...] | None:
    """Shortest path of at least one edge from some task in ``sources`` to a different task in ``targets``."""
    succ = graph.successors
    for s in sorted(sources, key=natural_key):
        parent = {s: None}
        queue = deque([s])
        hit = None
        while queue and hit is None:
            u = queue.popleft()
            for v in succ[u]:
                if v in parent:
                    continue
                parent[v] = u
                if v in targets:
                    hit = v
                    break
                queue.append(v)
        if hit is not None:
            path = [hit]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return tuple(reversed(path))
    return None


def classify_pair(graph: TaskGraph, c1: LatencyConstraint, c2: LatencyConstraint) -> PairConfiguration:
    """Parallel, Z or X, from reachability between the two constraints' task sets."""
    graph.require_valid()
    v1, v2 = graph.under(c1), graph.under(c2)
    fwd = _linking_path(graph, v1, v2)
    bwd = _linking_path(graph, v2, v1)
    if fwd and bwd:
        kind = PairConfiguration.X
    elif fwd or bwd:
        kind = PairConfiguration.Z
    else:
        kind = PairConfiguration.PARALLEL
    return PairConfiguration(kind, fwd, bwd)
