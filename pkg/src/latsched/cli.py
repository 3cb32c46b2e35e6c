"""Command-line entry point: ``latsched <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager

from . import io
from .allocation import CommModel, allocate, allocate_pair
from .analysis import LITERAL, MODES, analyze_system
from .bench import RHO_FIELDS, RUNTIME_FIELDS, bench_rho, bench_runtime, write_csv
from .errors import LatschedError
from .generator import GeneratorSpec, generate_single_instance, generate_x_instance
from .graph import DEFAULT_PATH_CAP, enumerate_paths, validate_graph
from .oracle import DEFAULT_TIME_BUDGET, Objective, compute_rho, optimal_schedule, validate_schedule

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _emit(args, payload: dict, text: str | None = None) -> None:
    with _output(getattr(args, "out", None)) as fh:
        if text is None or args.json or getattr(args, "out", None):
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        else:
            fh.write(text)


def _instance(args) -> io.Instance:
    inst = io.load(args.graph)
    if args.comm is not None or args.q is not None:
        comm = CommModel(
            args.comm if args.comm is not None else inst.comm.kind,
            args.q if args.q is not None else inst.comm.q,
        )
        inst = io.Instance(inst.graph, inst.constraints, comm)
    return inst


def _header(args, comm) -> str:
    return f"# mode={getattr(args, 'mode', LITERAL)} comm={comm.kind} q={comm.q}\n"


def cmd_validate(args) -> int:
    inst = io.load(args.graph)
    report = validate_graph(inst.graph, inst.constraints)
    lines = ["ok\n" if report.ok else "invalid\n"]
    lines += [f"  {v.rule}: {v.message}\n" for v in report.violations]
    lines += [f"  warning {v.rule}: {v.message}\n" for v in report.warnings]
    _emit(args, report.to_dict(), "".join(lines))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_paths(args) -> int:
    inst = io.load(args.graph)
    pairs = [(args.source, args.sink)] if args.source else [(c.source, c.sink) for c in inst.constraints]
    out = []
    for s, t in pairs:
        ps = enumerate_paths(inst.graph, s, t, args.cap)
        out.append(
            {
                "source": s,
                "sink": t,
                "paths": [{"tasks": list(p.tasks), "length": p.length} for p in ps.paths],
                "shared": sorted(ps.shared),
            }
        )
    text = "".join(f"{o['source']} -> {o['sink']}: {len(o['paths'])} paths\n" + "".join(
        f"  [{p['length']}] {' '.join(p['tasks'])}\n" for p in o["paths"]) for o in out)
    _emit(args, {"path_sets": out}, text)
    return EXIT_OK


def cmd_allocate(args) -> int:
    inst = io.load(args.graph)
    cs = inst.constraints
    if args.pair:
        i, j = args.pair
        alloc = allocate_pair(inst.graph, cs[i], cs[j], args.cap)
    else:
        alloc = allocate(inst.graph, cs[args.constraint], args.cap)
    d = alloc.to_dict()
    text = f"m = {d['m']}\n" + "".join(f"  P{i}: {' '.join(p)}\n" for i, p in enumerate(d["selected_paths"]))
    _emit(args, d, text)
    return EXIT_OK


def _report_text(args, report) -> str:
    lines = [_header(args, report.comm)]
    for c in report.constraints:
        if c.verdict is None:
            lines.append(f"L({c.constraint.source},{c.constraint.sink}) error: {c.error}\n")
            continue
        v = c.verdict
        status = "schedulable" if v.schedulable else "not schedulable under the path-based allocation"
        lines.append(f"L({c.constraint.source},{c.constraint.sink}) <= {v.bound}: lhs={v.lhs} m={v.m} slack={v.slack} {status}\n")
    for p in report.pairs:
        kind = p.config.kind if p.config else "?"
        line = f"pair ({p.i},{p.j}): {kind}"
        if p.x is not None:
            line += f" m1={p.x.m1} m2={p.x.m2} m={p.x.m} cross=({p.x.cross1},{p.x.cross2}) {'ok' if p.x.schedulable else 'fails'}"
        lines.append(line + "\n")
    lines.append(f"system: {'schedulable' if report.system_schedulable else 'not schedulable'}\n")
    return "".join(lines)


def cmd_check(args) -> int:
    try:
        inst = _instance(args)
        report = analyze_system(inst.graph, inst.constraints, inst.comm, args.mode, args.cap)
    except (LatschedError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _emit(args, report.to_dict(), _report_text(args, report))
    if report.errors:
        return EXIT_ERROR
    return EXIT_OK if report.system_schedulable else EXIT_FAIL


def cmd_bounds(args) -> int:
    inst = _instance(args)
    report = analyze_system(inst.graph, inst.constraints, inst.comm, args.mode, args.cap)
    full = report.to_dict()
    payload = {
        "mode": args.mode,
        "comm": inst.comm.to_dict(),
        "constraints": [
            {k: c[k] for k in ("index", "source", "sink", "bound", "lower_bound", "necessarily_unschedulable") if k in c}
            for c in full["constraints"]
        ],
        "pairs": [
            {"c1": p["c1"], "c2": p["c2"], "kind": p["kind"], "lower_bounds": p.get("lower_bounds")}
            for p in full["pairs"]
        ],
    }
    text = _header(args, inst.comm) + "".join(
        f"L({c['source']},{c['sink']}) lower bound {c.get('lower_bound')} (bound {c['bound']})\n" for c in payload["constraints"]
    ) + "".join(f"X pair ({p['c1']},{p['c2']}) lower bounds {p['lower_bounds']}\n" for p in payload["pairs"] if p["lower_bounds"])
    _emit(args, payload, text)
    return EXIT_OK


def cmd_generate(args) -> int:
    spec = GeneratorSpec(args.n, args.density, args.seed, (args.wcet_min, args.wcet_max))
    if args.single:
        graph, c = generate_single_instance(spec)
        inst = io.Instance(graph, (c,))
    else:
        graph, c1, c2 = generate_x_instance(spec)
        inst = io.Instance(graph, (c1, c2))
    _emit(args, inst.to_dict())
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = io.load(args.graph)
    sched = optimal_schedule(inst.graph, args.procs, Objective(args.objective, args.secondary), args.q_edge, args.time_budget)
    problems = validate_schedule(sched, inst.graph, args.q_edge)
    if problems:  # pragma: no cover - certifier guard
        print("internal error: " + "; ".join(v.message for v in problems), file=sys.stderr)
        return EXIT_ERROR
    _emit(args, sched.to_dict())
    return EXIT_OK


def cmd_rho(args) -> int:
    inst = io.load(args.graph)
    c1, c2 = inst.constraints[args.pair[0]], inst.constraints[args.pair[1]]
    res = compute_rho(inst.graph, c1, c2, args.procs, args.mode, inst.comm, args.q_edge, args.time_budget, args.cap)
    _emit(args, res.to_dict())
    return EXIT_OK


def _csv(args, records, fields) -> int:
    with _output(args.out) as fh:
        write_csv(records, fields, fh)
    return EXIT_OK


def cmd_bench_runtime(args) -> int:
    comm = CommModel(args.comm or "linear", args.q or 0)
    recs = bench_runtime(args.n, args.density, args.reps, args.seed, comm, args.mode, args.cap)
    return _csv(args, recs, RUNTIME_FIELDS)


def cmd_bench_rho(args) -> int:
    recs = bench_rho(args.n, args.procs, args.reps, args.seed, args.time_budget, args.mode, args.density, args.cap)
    return _csv(args, recs, RHO_FIELDS)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=MODES, default=LITERAL)
    common.add_argument("--comm", choices=["linear", "log"], default=None)
    common.add_argument("--q", default=None, help="communication cost per processor pair")
    common.add_argument("--cap", type=int, default=DEFAULT_PATH_CAP, help="maximum number of paths per endpoint pair")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None)
    common.add_argument("--json", action="store_true", help="print JSON instead of text")

    p = argparse.ArgumentParser(prog="latsched", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, graph=True, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        if graph:
            sp.add_argument("--graph", required=True)
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, help="check DAG and constraint well-formedness")
    sp = add("paths", cmd_paths, help="enumerate source-to-sink paths")
    sp.add_argument("--source")
    sp.add_argument("--sink")
    sp = add("allocate", cmd_allocate, help="path-based processor allocation")
    sp.add_argument("--constraint", type=int, default=0)
    sp.add_argument("--pair", type=int, nargs=2, metavar=("I", "J"))
    add("check", cmd_check, help="schedulability verdicts (exit 0 ok, 1 not schedulable, 2 error)")
    add("bounds", cmd_bounds, help="lower bounds on latency values")
    sp = add("generate", cmd_generate, graph=False, help="random benchmark instance")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--density", required=True)
    sp.add_argument("--wcet-min", type=int, default=1)
    sp.add_argument("--wcet-max", type=int, default=10)
    sp.add_argument("--single", action="store_true", help="one constraint from root to leaf instead of an X pair")
    sp = add("oracle", cmd_oracle, help="exact optimal schedule")
    sp.add_argument("--procs", type=int, required=True)
    sp.add_argument("--objective", required=True)
    sp.add_argument("--secondary")
    sp.add_argument("--q-edge", type=int, default=0)
    sp.add_argument("--time-budget", type=float, default=DEFAULT_TIME_BUDGET)
    sp = add("rho", cmd_rho, help="optimal / lower-bound ratios for an X pair")
    sp.add_argument("--procs", type=int, default=None, help="defaults to the allocation's processor count")
    sp.add_argument("--pair", type=int, nargs=2, default=(0, 1), metavar=("I", "J"))
    sp.add_argument("--q-edge", type=int, default=0)
    sp.add_argument("--time-budget", type=float, default=DEFAULT_TIME_BUDGET)
    sp = add("bench-runtime", cmd_bench_runtime, graph=False, help="analysis runtime sweep (CSV)")
    sp.add_argument("--n", type=int, nargs="+", default=[8, 10, 12, 14, 16])
    sp.add_argument("--density", type=float, nargs="+", default=[0.2, 0.4, 0.6])
    sp.add_argument("--reps", type=int, default=20)
    sp = add("bench-rho", cmd_bench_rho, graph=False, help="optimal vs lower bound sweep (CSV)")
    sp.add_argument("--n", type=int, nargs="+", default=[12, 14, 16])
    sp.add_argument("--procs", type=int, nargs="+", default=[4, 3, 2])
    sp.add_argument("--reps", type=int, default=20)
    sp.add_argument("--density", type=float, default=0.4)
    sp.add_argument("--time-budget", type=float, default=DEFAULT_TIME_BUDGET)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LatschedError, ValueError, KeyError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
