import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latsched import CommModel, LatencyConstraint, TaskGraph, allocate, allocate_pair, check_parallelism_optimality, enumerate_paths
from latsched.allocation import comm_overhead, fits
from latsched.graph import sequence_key
from oracles import all_paths, random_dag


def reference_allocate(edges, wcet, source, sink):
    """Straight-line rendering of the longest-first / greatest-new-WCET selection."""
    paths = all_paths(edges, source, sink)
    length = lambda p: sum(wcet[t] for t in p)
    paths.sort(key=lambda p: (-length(p), sequence_key(p)))
    universe = {t for p in paths for t in p}
    chosen = [paths.pop(0)]
    claimed = set(chosen[0])
    while claimed != universe:
        gain = lambda p: sum(wcet[t] for t in p if t not in claimed)
        best = max(gain(p) for p in paths)
        pick = min((p for p in paths if gain(p) == best), key=sequence_key)
        paths.remove(pick)
        chosen.append(pick)
        claimed |= set(pick)
    return chosen


def test_ladder_allocation(ladder, ladder_constraint):
    a = allocate(ladder, ladder_constraint)
    assert a.m == 3
    assert [p.tasks for p in a.selected_paths] == [
        ("t1", "t2", "t3", "t4", "t5", "t6", "t7"),
        ("t1", "t8", "t9", "t4", "t5", "t10", "t7"),
        ("t1", "t2", "t11", "t4", "t5", "t6", "t7"),
    ]
    expected = {f"t{i}": 0 for i in range(1, 8)} | {"t8": 1, "t9": 1, "t10": 1, "t11": 2}
    assert dict(a.assignment) == expected
    assert a.to_dict()["m"] == 3
    assert check_parallelism_optimality(ladder, a) == []


def test_ladder_adversarial_assignment(ladder, ladder_constraint):
    a = dict(allocate(ladder, ladder_constraint).assignment)
    a["t8"] = a["t3"]
    assert ("t3", "t8") in check_parallelism_optimality(ladder, a)


def test_chain_allocation():
    g = TaskGraph.from_edges([("a", "b"), ("b", "c")])
    a = allocate(g, LatencyConstraint("a", "c", 3))
    assert a.m == 1
    assert set(a.assignment.values()) == {0}
    assert check_parallelism_optimality(g, a) == []


def test_pair_allocation_shares_pool(cross):
    g, c1, c2 = cross
    pa = allocate_pair(g, c1, c2)
    assert (pa.first.m, pa.second.m) == (2, 2)
    assert pa.m == 4
    assert set(pa.assignment) == g.under(c1) | g.under(c2)
    assert check_parallelism_optimality(g, pa) == []


def test_pair_allocation_overlap_saves_processors():
    # both constraints cover the same diamond
    g = TaskGraph.from_edges([("a", "b"), ("a", "c"), ("b", "d"), ("c", "d"), ("d", "e")])
    pa = allocate_pair(g, LatencyConstraint("a", "d", 9), LatencyConstraint("a", "e", 9))
    m2 = allocate(g, LatencyConstraint("a", "e", 9)).m
    assert (pa.first.m, m2) == (2, 2)
    assert pa.m == 3 < pa.first.m + m2


@pytest.mark.parametrize(
    "kind,q,m,expected",
    [("linear", 2, 3, 4), ("log", 2, 1, 0), ("linear", 0, 7, 0), ("log", 3, 8, 9), ("linear", "1/2", 3, 1)],
)
def test_comm_overhead(kind, q, m, expected):
    assert comm_overhead(CommModel(kind, q), m) == expected


def test_log_non_power_and_exact_fit():
    model = CommModel("logarithmic", 1)
    assert comm_overhead(model, 3) == pytest.approx(math.log2(3))
    assert fits(0, model, 3, 2)  # log2(3) <= 2
    assert not fits(0, model, 3, Fraction(3, 2))  # 3**2 > 2**3
    assert fits(0, model, 3, Fraction(8, 5))  # 3**5 = 243 <= 2**8 = 256


def test_comm_model_rejects_bad_input():
    with pytest.raises(ValueError):
        CommModel("quadratic", 1)
    with pytest.raises(ValueError):
        CommModel("linear", -1)
    with pytest.raises(ValueError):
        comm_overhead(CommModel(), 0)


def test_comm_model_round_trip():
    m = CommModel("log", "3/4", 3)
    assert CommModel.from_dict(m.to_dict()) == m


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["linear", "log"]), st.integers(0, 5), st.integers(1, 20))
def test_comm_overhead_monotone(kind, q, m):
    model = CommModel(kind, q)
    assert comm_overhead(model, m) <= comm_overhead(model, m + 1)
    assert comm_overhead(model, 1) == 0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 12), st.floats(0.2, 0.6))
def test_allocation_properties(seed, n, p):
    rng = random.Random(seed)
    tasks, edges, wcet = random_dag(rng, n, p)
    if not all_paths(edges, tasks[0], tasks[-1]):
        return
    g = TaskGraph.from_edges(edges, wcet=wcet, tasks=tasks)
    c = LatencyConstraint(tasks[0], tasks[-1], 0)
    a = allocate(g, c)
    ref = reference_allocate(edges, wcet, tasks[0], tasks[-1])
    assert [p.tasks for p in a.selected_paths] == ref
    ps = enumerate_paths(g, c.source, c.sink)
    assert 1 <= a.m <= len(ps)
    # one processor exactly when the longest path already covers every task
    assert (a.m == 1) == (set(a.selected_paths[0].tasks) == ps.tasks)
    if len(ps) == 1:
        assert a.m == 1
    assert set(a.assignment) == ps.tasks
    assert a.processors() == set(range(a.m))
    assert a.selected_paths[0].length == ps.longest()
    assert check_parallelism_optimality(g, a) == []
    assert allocate(g, c) == a
