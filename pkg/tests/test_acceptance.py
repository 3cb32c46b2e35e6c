"""Acceptance criteria, one test and one PASS/FAIL line each."""

import random
import statistics
import time
from fractions import Fraction

from conftest import LADDER_EDGES, LADDER_PATHS, record
from latsched import (
    STRICT,
    LatencyConstraint,
    Objective,
    TaskGraph,
    allocate,
    allocate_pair,
    check_parallelism_optimality,
    compute_rho,
    enumerate_paths,
    lower_bound_single,
    optimal_schedule,
    validate_schedule,
)
from latsched.bench import bench_runtime
from latsched.generator import GeneratorSpec, edge_budget, generate_single_instance, generate_x_instance
from oracles import all_paths, exhaustive_objective, random_dag

SINGLE_SUITE = [(8 + s % 5, s) for s in range(100)]
X_SUITE = list(range(20))


def _single_suite():
    """Strict lower bound and exact optimum per instance of the single-constraint suite."""
    rows = []
    for n, seed in SINGLE_SUITE:
        g, c = generate_single_instance(GeneratorSpec(n, 0.4, seed=seed))
        m = allocate(g, c).m
        lb = lower_bound_single(g, c, mode=STRICT).values[0]
        s = optimal_schedule(g, m, c.sink)
        assert validate_schedule(s, g) == []
        rows.append((n, seed, m, lb, s.start(c.sink) - s.start(c.source), s.optimal))
    return rows


_CACHE = {}


def single_suite():
    if "single" not in _CACHE:
        t0 = time.perf_counter()
        _CACHE["single"] = _single_suite()
        _CACHE["single_time"] = time.perf_counter() - t0
    return _CACHE["single"], _CACHE["single_time"]


def test_c1_ladder_paths():
    t0 = time.perf_counter()
    ps = enumerate_paths(TaskGraph.from_edges(LADDER_EDGES), "t1", "t7")
    elapsed = time.perf_counter() - t0
    got = sorted(p.tasks for p in ps.paths)
    ok = got == sorted(LADDER_PATHS) and elapsed < 0.010
    record("C1", ok, f"{len(got)} paths (expected 7, exact match {got == sorted(LADDER_PATHS)}), {elapsed * 1e3:.2f} ms (< 10 ms)")
    assert ok


def test_c2_ladder_allocation():
    t0 = time.perf_counter()
    a = allocate(TaskGraph.from_edges(LADDER_EDGES), LatencyConstraint("t1", "t7", 9))
    elapsed = time.perf_counter() - t0
    ok = a.m == 3 and elapsed < 0.010
    record("C2", ok, f"m = {a.m} (expected 3), {elapsed * 1e3:.2f} ms (< 10 ms)")
    assert ok


def test_c3_generator_density():
    got = []
    for density, want in ((0.25, 17), (0.5, 33)):
        g, _, _ = generate_x_instance(GeneratorSpec(12, density, seed=42))
        got.append((density, edge_budget(12, density), len(g.edges), want))
    ok = all(b == e == w for _, b, e, w in got)
    record("C3", ok, "; ".join(f"n=12 density={d}: budget {b}, emitted {e} (expected {w})" for d, b, e, w in got))
    assert ok


def test_c4_parallelism_optimality():
    violations, instances, seed = 0, 0, 0
    while instances < 200:
        rng = random.Random(seed)
        seed += 1
        n = rng.randint(3, 12)
        tasks, edges, wcet = random_dag(rng, n, rng.uniform(0.15, 0.6))
        if not all_paths(edges, tasks[0], tasks[-1]):
            continue
        g = TaskGraph.from_edges(edges, wcet=wcet, tasks=tasks)
        violations += len(check_parallelism_optimality(g, allocate(g, LatencyConstraint(tasks[0], tasks[-1], 0))))
        instances += 1
    pair_violations = 0
    for s in range(200):
        g, c1, c2 = generate_x_instance(GeneratorSpec(8 + s % 5, 0.4, seed=s))
        pair_violations += len(check_parallelism_optimality(g, allocate_pair(g, c1, c2)))
    ok = violations == 0 and pair_violations == 0
    record("C4", ok, f"{violations} violations over {instances} random instances; {pair_violations} over 200 generated X pairs (expected 0)")
    assert ok


def test_c5_lower_bound_soundness():
    rows, elapsed = single_suite()
    bad = [(n, seed, lb, opt) for n, seed, _, lb, opt, _ in rows if lb > opt]
    ok = not bad and elapsed < 300
    record("C5", ok, f"{len(bad)} strict L_lb > L_opt violations over {len(rows)} instances at procs=m, {elapsed:.1f} s (< 300 s)")
    assert ok


def test_c6_rho_one_at_m():
    rows, _ = single_suite()
    certified = [r for r in rows if r[5]]
    ones = [r for r in certified if Fraction(r[4]) / Fraction(r[3]) == 1]
    share = len(ones) / len(certified)
    exceptions = [f"n={n}/seed={s}: {opt}/{lb}" for n, s, _, lb, opt, _ in certified if Fraction(opt) / Fraction(lb) != 1]
    literal_gap = max(
        lower_bound_single(*generate_single_instance(GeneratorSpec(n, 0.4, seed=s))).values[0] - opt
        for n, s, _, _, opt, _ in certified
    )
    x_ones = x_total = 0
    for seed in X_SUITE:
        g, c1, c2 = generate_x_instance(GeneratorSpec(12, 0.4, seed=seed))
        r = compute_rho(g, c1, c2, mode=STRICT)
        x_total += 2
        x_ones += sum(v == 1 for v in r.rho)
    ok = share >= 0.9
    record(
        "C6",
        ok,
        f"{len(ones)}/{len(certified)} certified runs with strict rho = 1 ({share:.0%}, need >= 90%); "
        f"largest literal L_lb - L_opt {literal_gap}; X suite at m: {x_ones}/{x_total} rho = 1",
    )
    print("C6 exceptions: " + ", ".join(exceptions))
    assert ok


def test_c7_rho_growth():
    per_instance, flat, not_monotone, uncertified = [], [], [], 0
    for seed in X_SUITE:
        g, c1, c2 = generate_x_instance(GeneratorSpec(12, 0.4, seed=seed))
        res = [compute_rho(g, c1, c2, procs=p, mode=STRICT) for p in (4, 3, 2)]
        if not all(r.optimal for r in res):
            uncertified += 1
            continue
        for i in (0, 1):
            seq = [r.rho[i] for r in res]
            if seq != sorted(seq):
                not_monotone.append((seed, i + 1, seq))
            flat.extend(seq)
        per_instance.append(res)
    median = statistics.median(flat)
    med2 = statistics.median([v for res in per_instance for v in res[2].rho])
    ok = not not_monotone and len(per_instance) >= 20 and 1 <= median <= 2
    record(
        "C7",
        ok,
        f"{len(per_instance)} instances, {len(not_monotone)} monotonicity breaks, median rho over procs 4/3/2 "
        f"= {float(median):.3f} (in [1, 2]); median at 2 procs {float(med2):.3f}; {uncertified} uncertified",
    )
    assert ok


def test_c8_runtime_trend():
    ns = range(8, 17)
    densities = (0.2, 0.4, 0.6)
    recs = list(bench_runtime(ns, densities, 20))
    at16 = {d: [r.runtime_us for r in recs if r.n == 16 and r.density == d and not r.error] for d in densities}
    means = [statistics.mean(at16[d]) for d in densities]
    worst = max(at16[0.4])
    errors = sum(1 for r in recs if r.error)
    ok = means[0] < means[1] < means[2] and worst < 1e6
    record(
        "C8",
        ok,
        "mean runtime at n=16: " + " < ".join(f"{m:.0f} us (d={d})" for m, d in zip(means, densities))
        + f"; slowest (16, 0.4) run {worst / 1e3:.2f} ms (< 1 s); {errors} infeasible rows of {len(recs)}",
    )
    assert ok


def test_c9_oracle_exact():
    t0 = time.perf_counter()
    mismatches = []
    for i in range(50):
        rng = random.Random(1000 + i)
        n, procs = 5 + i % 4, 1 + i % 3
        tasks, edges, wcet = random_dag(rng, n, rng.uniform(0.15, 0.5))
        g = TaskGraph.from_edges(edges, wcet=wcet, tasks=tasks)
        a, b = tasks[-1], tasks[rng.randrange(n - 1)]
        s = optimal_schedule(g, procs, Objective(a, b))
        assert validate_schedule(s, g) == []
        want = exhaustive_objective(tasks, edges, wcet, procs, (a, b))
        if s.objective != want or not s.optimal:
            mismatches.append((i, s.objective, want))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 600
    record("C9", ok, f"{len(mismatches)} mismatches against exhaustive search over 50 instances, {elapsed:.1f} s (< 600 s)")
    assert ok


def test_c10_oracle_monotone():
    breaks, checked = [], 0
    for seed in X_SUITE:
        g, c1, c2 = generate_x_instance(GeneratorSpec(12, 0.4, seed=seed))
        m = allocate_pair(g, c1, c2).m
        for obj in (Objective(c1.sink, c2.sink), Objective(c2.sink, c1.sink)):
            vals = [optimal_schedule(g, p, obj).objective for p in range(1, m + 1)]
            checked += 1
            if any(b > a for a, b in zip(vals, vals[1:])):
                breaks.append((seed, obj.primary, vals))
    for n, seed in SINGLE_SUITE[:20]:
        g, c = generate_single_instance(GeneratorSpec(n, 0.4, seed=seed))
        m = allocate(g, c).m
        vals = [optimal_schedule(g, p, c.sink).objective for p in range(1, m + 1)]
        checked += 1
        if any(b > a for a, b in zip(vals, vals[1:])):
            breaks.append((n, seed, vals))
    ok = not breaks
    record("C10", ok, f"{len(breaks)} increases in the objective when adding a processor across {checked} sweeps over procs 1..m")
    assert ok
