"""Seeded random task graphs with one latency constraint or two constraints in X.

Tasks are laid out along a random linear extension and every edge points
forward, so the result is acyclic by construction. A greedy covering pass
first links tasks under a common constraint until every task is reachable
from its constraint sources and reaches its constraint sinks. The rest of the
density budget goes to random forward edges, rejecting any edge that would
pull a task under a constraint it does not belong to.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .allocation import as_fraction
from .errors import InfeasibleSpec
from .graph import LatencyConstraint, TaskGraph, classify_pair, count_paths


def edge_budget(n: int, density) -> int:
    """``density * n(n-1)/2`` rounded half up."""
    exact = as_fraction(density) * n * (n - 1) / 2
    return int(exact + Fraction(1, 2))


def group_sizes(n: int) -> tuple[int, int, int]:
    """Sizes of the first-only, second-only and shared groups (40/40/20)."""
    each = int(Fraction(2, 5) * n + Fraction(1, 2))
    return each, each, n - 2 * each


@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    density: Fraction
    seed: int = 0
    wcet_range: tuple[int, int] = (1, 10)

    def __post_init__(self):
        object.__setattr__(self, "density", as_fraction(self.density))
        object.__setattr__(self, "wcet_range", tuple(self.wcet_range))
        lo, hi = self.wcet_range
        if not 0 < self.density <= 1:
            raise ValueError("density must lie in (0, 1]")
        if not 1 <= lo <= hi:
            raise ValueError("wcet range must satisfy 1 <= lo <= hi")

    @property
    def budget(self) -> int:
        return edge_budget(self.n, self.density)


class _Builder:
    def __init__(self, order, groups, sources, sinks, rng):
        # groups: task -> frozenset of constraint labels it must lie under
        self.order = order
        self.pos = {t: i for i, t in enumerate(order)}
        self.groups = groups
        self.sources = sources  # label -> source task
        self.sinks = sinks
        self.rng = rng
        self.edges: list[tuple[str, str]] = []
        self.edge_set: set[tuple[str, str]] = set()
        self.succ = {t: [] for t in order}
        self.pred = {t: [] for t in order}

    def allowed(self, u, v) -> bool:
        return self.pos[u] < self.pos[v] and bool(self.groups[u] & self.groups[v]) and (u, v) not in self.edge_set

    def add(self, u, v):
        self.edges.append((u, v))
        self.edge_set.add((u, v))
        self.succ[u].append(v)
        self.pred[v].append(u)

    def reached_from(self):
        got = {t: {lab for lab, s in self.sources.items() if s == t} for t in self.order}
        for t in self.order:
            for v in self.succ[t]:
                got[v] |= got[t]
        return got

    def reaching(self):
        got = {t: {lab for lab, s in self.sinks.items() if s == t} for t in self.order}
        for t in reversed(self.order):
            for v in self.succ[t]:
                got[t] |= got[v]
        return got

    def reset(self):
        self.edges.clear()
        self.edge_set.clear()
        for t in self.order:
            self.succ[t].clear()
            self.pred[t].clear()

    def cover(self, frugal=False):
        """Give each task random predecessors, then successors, until it lies under all its constraints.

        Predecessors are drawn uniformly among admissible earlier tasks, which
        grows a branching skeleton rather than one long chain. ``frugal``
        prefers predecessors without successors, which avoids dead ends and
        so spends fewer edges.
        """
        for t in self.order:
            reach = self.reached_from()
            need = set(self.groups[t]) - reach[t]
            need -= {lab for lab, s in self.sources.items() if s == t}
            while need:
                cands = [u for u in self.order if self.allowed(u, t) and reach[u] & need]
                best = max(len(reach[u] & need) for u in cands)
                cands = [u for u in cands if len(reach[u] & need) == best]
                if frugal and any(not self.succ[u] for u in cands):
                    cands = [u for u in cands if not self.succ[u]]
                u = self.rng.choice(cands)
                self.add(u, t)
                need -= reach[u]
        for t in reversed(self.order):
            back = self.reaching()
            need = set(self.groups[t]) - back[t]
            need -= {lab for lab, s in self.sinks.items() if s == t}
            while need:
                cands = [v for v in self.order if self.allowed(t, v) and back[v] & need]
                best = max(len(back[v] & need) for v in cands)
                v = self.rng.choice([v for v in cands if len(back[v] & need) == best])
                self.add(t, v)
                need -= back[v]

    def membership(self) -> dict:
        fwd, back = self.reached_from(), self.reaching()
        return {t: frozenset(fwd[t] & back[t]) for t in self.order}

    def fill(self, budget):
        """Spend the remaining budget on random forward edges that leave every task's constraint membership unchanged."""
        pool = [(u, v) for u in self.order for v in self.order if self.pos[u] < self.pos[v] and (u, v) not in self.edge_set]
        self.rng.shuffle(pool)
        want = self.membership()
        for u, v in pool:
            if len(self.edges) >= budget:
                break
            self.add(u, v)
            if self.membership() != want:
                self.edges.pop()
                self.edge_set.discard((u, v))
                self.succ[u].pop()
                self.pred[v].pop()
        if len(self.edges) < budget:
            raise InfeasibleSpec(f"edge budget {budget} exceeds the {len(self.edges)} admissible edges")


def _wcets(order, spec: GeneratorSpec, rng) -> dict[str, int]:
    lo, hi = spec.wcet_range
    return {t: rng.randint(lo, hi) for t in order}


def _finish(builder: _Builder, spec: GeneratorSpec, rng) -> TaskGraph:
    builder.cover()
    if len(builder.edges) > spec.budget:
        builder.reset()
        builder.cover(frugal=True)
    if len(builder.edges) > spec.budget:
        raise InfeasibleSpec(
            f"n={spec.n}, density={spec.density}: budget {spec.budget} edges is below the "
            f"{len(builder.edges)} needed to connect every group"
        )
    builder.fill(spec.budget)
    order = builder.order
    wcet = _wcets(order, spec, rng)
    edges = sorted(builder.edges, key=lambda e: (builder.pos[e[0]], builder.pos[e[1]]))
    return TaskGraph.from_edges(edges, wcet, tasks=order)


def generate_x_instance(spec: GeneratorSpec) -> tuple[TaskGraph, LatencyConstraint, LatencyConstraint]:
    """Random graph with two latency constraints in X.

    About 40% of tasks lie under the first constraint only, 40% under the
    second only, and the rest under both. Sources of both constraints come
    first in the task order, sinks last, and the shared tasks sit in the
    middle, so the first-only tasks before the shared block can never reach
    the second sink and those after it can never be reached from the second
    source. Each constraint's bound is the total WCET of its tasks.
    """
    n = spec.n
    if n < 6:
        raise InfeasibleSpec("X instances need at least 6 tasks")
    g1, g2, gb = group_sizes(n)
    rng = random.Random(spec.seed)
    ids = [f"t{i}" for i in range(1, n + 1)]
    ta, tc, tb, td = ids[0], ids[1], ids[-2], ids[-1]
    inner = ids[2:-2]
    rng.shuffle(inner)
    a_inner, b_inner, both = inner[: g1 - 2], inner[g1 - 2 : g1 + g2 - 4], inner[g1 + g2 - 4 :]
    pre, post = [], []
    for t in a_inner + b_inner:
        (pre if rng.random() < 0.5 else post).append(t)
    rng.shuffle(pre)
    rng.shuffle(post)
    rng.shuffle(both)
    order = [ta, tc, *pre, *both, *post, tb, td]
    one, two = frozenset({1}), frozenset({2})
    groups = {t: one for t in [ta, tb, *a_inner]}
    groups.update({t: two for t in [tc, td, *b_inner]})
    groups.update({t: one | two for t in both})
    # rename along the order so ids read as a topological numbering
    rename = {t: f"t{i}" for i, t in enumerate(order, 1)}
    order = [rename[t] for t in order]
    groups = {rename[t]: g for t, g in groups.items()}
    ta, tc, tb, td = (rename[t] for t in (ta, tc, tb, td))
    builder = _Builder(order, groups, {1: ta, 2: tc}, {1: tb, 2: td}, rng)
    graph = _finish(builder, spec, rng)
    c1 = LatencyConstraint(ta, tb, 0)
    c2 = LatencyConstraint(tc, td, 0)
    c1 = LatencyConstraint(ta, tb, graph.path_length(graph.under(c1)))
    c2 = LatencyConstraint(tc, td, graph.path_length(graph.under(c2)))
    return graph, c1, c2


def generate_single_instance(spec: GeneratorSpec) -> tuple[TaskGraph, LatencyConstraint]:
    """Random single-rooted, single-leaved graph with one constraint from root to leaf."""
    n = spec.n
    if n < 2:
        raise InfeasibleSpec("a constraint needs at least 2 tasks")
    rng = random.Random(spec.seed)
    order = [f"t{i}" for i in range(1, n + 1)]
    groups = {t: frozenset({1}) for t in order}
    builder = _Builder(order, groups, {1: order[0]}, {1: order[-1]}, rng)
    graph = _finish(builder, spec, rng)
    c = LatencyConstraint(order[0], order[-1], graph.total_wcet())
    return graph, c


@dataclass(frozen=True)
class InstanceStats:
    tasks: int
    edges: int
    density: float
    first_only: int
    second_only: int
    both: int
    paths1: int
    paths2: int
    kind: str

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def instance_stats(graph: TaskGraph, c1: LatencyConstraint, c2: LatencyConstraint) -> InstanceStats:
    n = len(graph.tasks)
    v1, v2 = graph.under(c1), graph.under(c2)
    return InstanceStats(
        tasks=n,
        edges=len(graph.edges),
        density=len(graph.edges) / (n * (n - 1) / 2) if n > 1 else 0.0,
        first_only=len(v1 - v2),
        second_only=len(v2 - v1),
        both=len(v1 & v2),
        paths1=count_paths(graph, c1.source, c1.sink),
        paths2=count_paths(graph, c2.source, c2.sink),
        kind=classify_pair(graph, c1, c2).kind,
    )

