"""Exact non-preemptive scheduler used to obtain optimal latency values.

The search builds schedules one task at a time: pick a ready task and a
processor, start the task as early as its predecessors and the processor's
last task allow. Every feasible schedule is dominated by one reachable this
way, so exhausting the tree certifies optimality. Only the objective tasks
and their ancestors are searched; the remaining tasks are appended afterwards
and cannot delay anything already placed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .allocation import ZERO_COMM, CommModel, allocate_pair
from .analysis import LITERAL, lower_bounds_x
from .graph import DEFAULT_PATH_CAP, LatencyConstraint, TaskGraph, Violation, natural_key

DEFAULT_TIME_BUDGET = 60.0


@dataclass(frozen=True)
class Objective:
    """Minimise the start of ``primary``, then of ``secondary``."""

    primary: str
    secondary: str | None = None

    @property
    def targets(self) -> tuple[str, ...]:
        return (self.primary,) if self.secondary is None else (self.primary, self.secondary)


@dataclass(frozen=True)
class Schedule:
    assignment: Mapping[str, tuple[int, int]]
    num_procs: int
    makespan: int
    optimal: bool = True
    objective: tuple[int, ...] = ()
    nodes: int = 0

    def start(self, task: str) -> int:
        return self.assignment[task][1]

    def processor(self, task: str) -> int:
        return self.assignment[task][0]

    def to_dict(self) -> dict:
        return {
            "num_procs": self.num_procs,
            "makespan": self.makespan,
            "optimal": self.optimal,
            "objective": list(self.objective),
            "assignment": {
                t: {"processor": p, "start": s}
                for t, (p, s) in sorted(self.assignment.items(), key=lambda kv: natural_key(kv[0]))
            },
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "Schedule":
        assignment = {t: (int(v["processor"]), int(v["start"])) for t, v in d["assignment"].items()}
        return cls(
            assignment,
            int(d["num_procs"]),
            int(d["makespan"]),
            bool(d.get("optimal", True)),
            tuple(d.get("objective", ())),
        )


def validate_schedule(schedule: Schedule, graph: TaskGraph, q_edge: int = 0) -> list[Violation]:
    """Every task placed once, no processor overlap, every edge respected."""
    out: list[Violation] = []
    w = graph.wcet
    for t in graph.ids:
        if t not in schedule.assignment:
            out.append(Violation("unscheduled", (t,), f"task {t} has no start time"))
    for t, (p, s) in schedule.assignment.items():
        if t not in w:
            out.append(Violation("unknown-task", (t,), f"schedule places unknown task {t}"))
        if not 0 <= p < schedule.num_procs:
            out.append(Violation("bad-processor", (t,), f"task {t} on processor {p} outside 0..{schedule.num_procs - 1}"))
        if s < 0:
            out.append(Violation("negative-start", (t,), f"task {t} starts at {s}"))
    by_proc: dict[int, list[tuple[int, str]]] = {}
    for t, (p, s) in schedule.assignment.items():
        if t in w:
            by_proc.setdefault(p, []).append((s, t))
    for p, items in by_proc.items():
        items.sort()
        for (s1, t1), (s2, t2) in zip(items, items[1:]):
            if s1 + w[t1] > s2:
                out.append(Violation("overlap", (t1, t2), f"{t1} and {t2} overlap on processor {p}"))
    for u, v in graph.edges:
        if u in schedule.assignment and v in schedule.assignment:
            pu, su = schedule.assignment[u]
            pv, sv = schedule.assignment[v]
            need = su + w[u] + (q_edge if pu != pv else 0)
            if sv < need:
                out.append(Violation("precedence", (u, v), f"edge ({u}, {v}): {v} starts at {sv}, needs >= {need}"))
    return out


class _Search:
    """Depth-first branch and bound over (ready task, processor) decisions."""

    def __init__(self, graph: TaskGraph, num_procs: int, q_edge: int, deadline: float):
        self.graph = graph
        self.ids = list(graph.topological_order)
        self.index = {t: i for i, t in enumerate(self.ids)}
        n = len(self.ids)
        self.n = n
        self.w = [graph.wcet[t] for t in self.ids]
        self.preds = [[self.index[p] for p in graph.predecessors[t]] for t in self.ids]
        self.succs = [[self.index[s] for s in graph.successors[t]] for t in self.ids]
        self.pred_mask = [sum(1 << j for j in ps) for ps in self.preds]
        self.anc = [0] * n
        for i in range(n):  # topological order: predecessors already done
            m = 0
            for j in self.preds[i]:
                m |= self.anc[j] | (1 << j)
            self.anc[i] = m
        self.P = num_procs
        self.q = q_edge
        self.deadline = deadline
        self.timed_out = False
        self.nodes = 0

    # ---- state helpers -------------------------------------------------
    def est(self, i: int, p: int, proc, finish, free) -> int:
        s = free[p]
        q = self.q
        for j in self.preds[i]:
            f = finish[j] + (q if q and proc[j] != p else 0)
            if f > s:
                s = f
        return s

    def list_schedule(self, mask_todo: int, proc, start, finish, free, prio) -> None:
        """Greedy earliest-start completion of the tasks in ``mask_todo`` (in place)."""
        while mask_todo:
            best = None
            for i in range(self.n):
                if mask_todo >> i & 1 and self.pred_mask[i] & mask_todo == 0:
                    for p in range(self.P):
                        s = self.est(i, p, proc, finish, free)
                        key = (s, -prio[i], i, p)
                        if best is None or key < best:
                            best = key
            s, _, i, p = best
            proc[i], start[i], finish[i] = p, s, s + self.w[i]
            free[p] = finish[i]
            mask_todo &= ~(1 << i)

    def bottom_levels(self, targets: Sequence[int], relevant: int) -> list[int]:
        """Longest WCET chain from each task to any target (0 if none)."""
        bl = [0] * self.n
        tset = set(targets)
        for i in reversed(range(self.n)):
            if not relevant >> i & 1:
                continue
            best = self.w[i] if i in tset else 0
            for j in self.succs[i]:
                if bl[j]:
                    best = max(best, self.w[i] + bl[j])
            bl[i] = best
        return bl

    # ---- bounds --------------------------------------------------------
    def lower_bound(self, x: int, scheduled: int, finish, free) -> int:
        """Earliest start of unscheduled target ``x``: longest-chain head and a workload bound."""
        lo = min(free)
        head = {}
        anc = self.anc[x] & ~scheduled
        m = anc
        while m:
            low = m & -m
            i = low.bit_length() - 1
            m ^= low
            h = lo
            for j in self.preds[i]:
                f = finish[j] if scheduled >> j & 1 else head[j] + self.w[j]
                if f > h:
                    h = f
            head[i] = h
        hx = lo
        for j in self.preds[x]:
            f = finish[j] if scheduled >> j & 1 else head[j] + self.w[j]
            if f > hx:
                hx = f
        work = 0
        m = anc
        while m:
            low = m & -m
            work += self.w[low.bit_length() - 1]
            m ^= low
        if work:
            hx = max(hx, _fill_level(sorted(free), work))
        return hx

    # ---- search --------------------------------------------------------
    def run(self, targets: Sequence[int], relevant: int, incumbent, prio) -> tuple:
        n, P = self.n, self.P
        proc = [-1] * n
        start = [0] * n
        finish = [0] * n
        free = [0] * P
        used = [0] * P  # number of tasks placed on each processor
        self.best_value, self.best_state = incumbent
        seen: set = set()
        target_mask = sum(1 << t for t in targets)
        # targets are ordered primary first; processing order follows priority
        order = sorted(range(n), key=lambda i: (-prio[i], i))
        check_every = 256

        def key(scheduled):
            frontier = []
            m = scheduled
            while m:
                low = m & -m
                i = low.bit_length() - 1
                m ^= low
                if any(not scheduled >> j & 1 and relevant >> j & 1 for j in self.succs[i]):
                    frontier.append((i, finish[i], proc[i]) if self.q else (i, finish[i]))
            tstarts = tuple(start[t] if scheduled >> t & 1 else -1 for t in targets)
            fr = tuple(free) if self.q else tuple(sorted(free))
            return scheduled, fr, tuple(frontier), tstarts

        def dfs(scheduled: int) -> None:
            self.nodes += 1
            if self.nodes % check_every == 0 and time.perf_counter() > self.deadline:
                self.timed_out = True
            if self.timed_out:
                return
            if scheduled & target_mask == target_mask:
                value = tuple(start[t] for t in targets)
                if value < self.best_value:
                    self.best_value = value
                    self.best_state = (scheduled, proc[:], start[:], finish[:])
                return
            bound = tuple(
                start[t] if scheduled >> t & 1 else self.lower_bound(t, scheduled, finish, free) for t in targets
            )
            if bound >= self.best_value:
                return
            k = key(scheduled)
            if k in seen:
                return
            seen.add(k)
            todo = relevant & ~scheduled
            for i in order:
                if not todo >> i & 1 or self.pred_mask[i] & ~scheduled:
                    continue
                tried = set()
                options = []
                for p in range(P):
                    if self.q:
                        sig = ("empty",) if used[p] == 0 else p
                    else:
                        sig = free[p]
                    if sig in tried:
                        continue
                    tried.add(sig)
                    options.append((self.est(i, p, proc, finish, free), p))
                options.sort()
                for s, p in options:
                    old_free = free[p]
                    proc[i], start[i], finish[i] = p, s, s + self.w[i]
                    free[p] = finish[i]
                    used[p] += 1
                    dfs(scheduled | (1 << i))
                    used[p] -= 1
                    free[p] = old_free
                    proc[i] = -1
                    if self.timed_out:
                        return

        dfs(0)
        return self.best_value, self.best_state


def _fill_level(free_sorted: Sequence[int], work: int) -> int:
    """Smallest T with sum(max(0, T - f)) >= work over processor free times ``f``."""
    total = 0
    k = 0
    P = len(free_sorted)
    level = free_sorted[0]
    while True:
        k += 1
        nxt = free_sorted[k] if k < P else None
        capacity = (nxt - level) * k if nxt is not None else None
        if capacity is None or total + capacity >= work:
            remaining = work - total
            return level + -(-remaining // k)
        total += capacity
        level = nxt


def _complete(search: _Search, state, relevant: int, prio) -> tuple:
    scheduled, proc, start, finish = state
    proc, start, finish = proc[:], start[:], finish[:]
    free = [0] * search.P
    for i in range(search.n):
        if scheduled >> i & 1:
            free[proc[i]] = max(free[proc[i]], finish[i])
    todo = relevant & ~scheduled
    search.list_schedule(todo, proc, start, finish, free, prio)
    return scheduled | todo, proc, start, finish


def optimal_schedule(
    graph: TaskGraph,
    num_procs: int,
    objective: Objective | str,
    q_edge: int = 0,
    time_budget: float | None = DEFAULT_TIME_BUDGET,
) -> Schedule:
    """Lexicographically optimal non-preemptive schedule on ``num_procs`` identical processors.

    ``q_edge`` delays a successor placed on a different processor from its
    predecessor. If the time budget runs out, the best schedule found so far
    is returned with ``optimal=False``.
    """
    graph.require_valid()
    if num_procs < 1:
        raise ValueError("num_procs must be >= 1")
    if isinstance(objective, str):
        objective = Objective(objective)
    for t in objective.targets:
        if t not in graph.wcet:
            raise KeyError(f"unknown objective task {t}")
    deadline = time.perf_counter() + (time_budget if time_budget is not None else float("inf"))
    search = _Search(graph, num_procs, q_edge, deadline)
    targets = [search.index[t] for t in objective.targets]
    full = (1 << search.n) - 1

    state = None
    value: tuple = ()
    for k in range(1, len(targets) + 1):
        phase = targets[:k]
        relevant = 0
        for t in phase:
            relevant |= search.anc[t] | (1 << t)
        prio = search.bottom_levels(phase, relevant)
        if state is None:
            empty = (0, [-1] * search.n, [0] * search.n, [0] * search.n)
            state = _complete(search, empty, relevant, prio)
        else:
            state = _complete(search, state, relevant, prio)
        value = tuple(state[2][t] for t in phase)
        value, state = search.run(phase, relevant, (value, state), prio)
        if search.timed_out:
            break
    # finish with a full-graph completion; these tasks cannot move earlier ones
    prio = search.bottom_levels(list(range(search.n)), full)
    scheduled, proc, start, finish = _complete(search, state, full, prio)
    if search.timed_out:
        value = tuple(start[t] for t in targets)
    assignment = {t: (proc[i], start[i]) for i, t in enumerate(search.ids)}
    makespan = max(finish) if finish else 0
    return Schedule(
        assignment,
        num_procs,
        makespan,
        optimal=not search.timed_out,
        objective=tuple(start[t] for t in targets),
        nodes=search.nodes,
    )


@dataclass(frozen=True)
class RhoResult:
    procs: int
    m: int
    mode: str
    lower: tuple
    opt: tuple[int, int]
    rho: tuple[Fraction, Fraction]
    optimal: bool
    schedules: tuple[Schedule, Schedule] = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "procs": self.procs,
            "m": self.m,
            "mode": self.mode,
            "L1_lb": _num(self.lower[0]),
            "L2_lb": _num(self.lower[1]),
            "L1_opt": self.opt[0],
            "L2_opt": self.opt[1],
            "rho1": round(float(self.rho[0]), 3),
            "rho2": round(float(self.rho[1]), 3),
            "optimal": self.optimal,
        }


def _num(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    return x


def _ratio(opt, lb) -> Fraction:
    return Fraction(opt) / Fraction(lb)


def compute_rho(
    graph: TaskGraph,
    c1: LatencyConstraint,
    c2: LatencyConstraint,
    procs: int | None = None,
    mode: str = LITERAL,
    comm: CommModel = ZERO_COMM,
    q_edge: int = 0,
    time_budget: float | None = DEFAULT_TIME_BUDGET,
    cap: int = DEFAULT_PATH_CAP,
) -> RhoResult:
    """Optimal-to-bound ratios for a pair in X.

    The first constraint's optimum is ``StartOf(sink1)`` minimising sink1 then
    sink2; the second's is ``StartOf(sink2)`` minimising sink2 then sink1.
    ``procs=None`` uses the processor count of the joint allocation.
    """
    m = allocate_pair(graph, c1, c2, cap).m
    if procs is None:
        procs = m
    lb = lower_bounds_x(graph, c1, c2, comm, mode, cap).values
    s1 = optimal_schedule(graph, procs, Objective(c1.sink, c2.sink), q_edge, time_budget)
    s2 = optimal_schedule(graph, procs, Objective(c2.sink, c1.sink), q_edge, time_budget)
    opt = (s1.start(c1.sink), s2.start(c2.sink))
    return RhoResult(
        procs,
        m,
        mode,
        tuple(lb),
        opt,
        (_ratio(opt[0], lb[0]), _ratio(opt[1], lb[1])),
        s1.optimal and s2.optimal,
        (s1, s2),
    )
