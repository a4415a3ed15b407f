"""``swmap`` command line.

Every subcommand writes its CSV/JSON outputs under ``--out`` and prints a
one-line JSON summary on stdout. Failures print a one-line JSON error on
stderr and exit with status 1 (2 for usage errors).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from dataclasses import replace
from pathlib import Path

from ..clock import make_clock
from ..ilp import build_ilp, exact_solve, export_lp
from ..model import (SIZE_FAMILIES, Scenario, generate_scenario, load_scenario, save_scenario, scaling_family,
                     scenario_to_dict)
from ..solver import DEFAULT_PARAMS, PARAMETER_DOMAINS, SAParams, solve
from ..tuner import REFERENCE_SETTINGS, load_settings, run_experiment, solver_space
from .common import write
from .scaling import SCALING_HWC, bench_scaling
from .table import ORACLE_NODES, bench_table
from .trace import bench_trace, solve_trace_csv
from .tune import bench_tune


class CliError(Exception):
    pass


def slug(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")


def parse_params(pairs, base: SAParams = DEFAULT_PARAMS) -> SAParams:
    """``K=V`` pairs over the tunable parameters."""
    kw = {}
    for p in pairs or ():
        if "=" not in p:
            raise CliError(f"parameter {p!r} is not K=V")
        k, v = p.split("=", 1)
        if k not in PARAMETER_DOMAINS:
            raise CliError(f"unknown parameter {k!r}; expected one of {sorted(PARAMETER_DOMAINS)}")
        try:
            kw[k] = int(v) if k == "neighborhoodSize" else float(v)
        except ValueError:
            raise CliError(f"parameter {k} needs a number, got {v!r}") from None
    return base.with_(**kw)


def params_file(path) -> SAParams:
    doc = json.loads(Path(path).read_text())
    return parse_params([f"{k}={v}" for k, v in doc.items()])


def family_by_key(key: str):
    if key.isdigit():
        i = int(key)
        if not 0 <= i < len(SIZE_FAMILIES):
            raise CliError(f"family index {i} out of range 0..{len(SIZE_FAMILIES) - 1}")
        return SIZE_FAMILIES[i]
    for f in SIZE_FAMILIES:
        if slug(f.name) == slug(key):
            return f
    raise CliError(f"unknown family {key!r}")


def scenario_arg(args) -> tuple[str, Scenario]:
    if getattr(args, "scenario", None):
        return Path(args.scenario).stem, load_scenario(args.scenario)
    if getattr(args, "family", None) is not None:
        f = family_by_key(args.family)
        return f.name, f.generate(args.seed)
    raise CliError("give --scenario FILE or --family NAME|INDEX")


def out_dir(args) -> Path:
    p = Path(args.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def emit(**kw) -> None:
    print(json.dumps(kw, sort_keys=True, default=str))


# subcommands ---------------------------------------------------------------

def cmd_gen(args) -> None:
    if args.scaling is not None:
        fam = scaling_family(args.scaling)
        sc, name = fam.generate(args.seed), fam.name
    elif args.family is not None:
        fam = family_by_key(args.family)
        sc, name = fam.generate(args.seed), fam.name
    else:
        sc = generate_scenario(args.requests, args.hw_scale, args.depth, args.branching, args.seed,
                               impls_per_type=args.impls_per_type, root_types=args.roots)
        name = "custom"
    path = out_dir(args) / f"{slug(name)}-s{args.seed}.json"
    save_scenario(sc, path)
    emit(scenario=str(path), implementations=len(sc.implementations), hardware=len(sc.hardware),
         requests=len(sc.requests))


def cmd_solve(args) -> None:
    _, sc = scenario_arg(args)
    params = parse_params(args.params).with_(timeLimit=args.time_limit, seed=args.seed)
    _, trace = solve(sc, params, make_clock(args.virtual_clock))
    if args.trace:
        write(solve_trace_csv(trace), args.trace)
    best = trace.best
    emit(valid=best.hard == 0, hard=best.hard, soft=best.soft, firstValidAt=trace.firstValidAt,
         lastImprovementAt=trace.lastImprovementAt, evaluations=trace.evaluations)


def cmd_ilp_gen(args) -> None:
    name, sc = scenario_arg(args)
    model, seconds = build_ilp(sc, make_clock(args.virtual_clock))
    path = out_dir(args) / f"{slug(name)}.lp"
    export_lp(model, path)
    emit(lp=str(path), variables=model.n_vars, rows=model.n_rows, nonzeros=model.n_nonzeros, seconds=seconds)


def cmd_trace(args) -> None:
    name, sc = scenario_arg(args)
    params = parse_params(args.params).with_(timeLimit=args.time_limit, seed=args.seed)
    exact = exact_solve(sc, nodeBudget=args.node_budget)
    opt = exact.objective if exact.provedOptimal else None
    path = out_dir(args) / f"trace-{slug(name)}.csv"
    write(bench_trace(sc, params, args.virtual_clock, opt), path)
    emit(trace=str(path), oracle=exact.status)


def cmd_table(args) -> None:
    fams = SIZE_FAMILIES if args.families == "all" else [family_by_key(k) for k in args.families.split(",")]
    tuned = params_file(args.tuned) if args.tuned else None
    default = DEFAULT_PARAMS.with_(timeLimit=args.time_limit, seed=args.seed)
    if tuned is not None:
        tuned = tuned.with_(timeLimit=args.time_limit, seed=args.seed)
    scenarios = [(f.name, f.generate(args.seed)) for f in fams]
    path = out_dir(args) / "table.csv"
    write(bench_table(scenarios, default, tuned, args.virtual_clock, args.node_budget), path)
    emit(table=str(path), rows=len(scenarios))


def cmd_scaling(args) -> None:
    counts = [int(x) for x in args.hwc.split(",")]
    params = DEFAULT_PARAMS.with_(timeLimit=args.time_limit, seed=args.seed)
    path = out_dir(args) / "scaling.csv"
    write(bench_scaling(counts, params, args.seed, args.virtual_clock, args.reps), path)
    emit(scaling=str(path), rows=len(counts))


def _settings(args):
    s = load_settings(args.settings) if args.settings else REFERENCE_SETTINGS
    return replace(s, seed=args.seed, virtual_clock=args.virtual_clock or s.virtual_clock)


def cmd_tune(args) -> None:
    name, sc = scenario_arg(args)
    settings = _settings(args)
    result = bench_tune(settings, sc, production_time=args.production_time, compare_seeds=range(args.compare_seeds),
                        processes=args.processes)
    d = out_dir(args)
    result.report.write(d / "tune-report.csv")
    write(result.comparison_csv(), d / "tune-compare.csv")
    write(json.dumps(result.tuned.tunables(), indent=1, sort_keys=True) + "\n", d / "tuned-params.json")
    emit(report=str(d / "tune-report.csv"), best=result.tuned.tunables(), stop=result.report.stop_reason,
         evaluations=result.report.evaluations, default_median=result.default_median,
         tuned_median=result.tuned_median)


def _host_port(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not port.isdigit():
        raise CliError(f"expected HOST:PORT, got {text!r}")
    return host or "127.0.0.1", int(port)


def cmd_worker(args) -> None:
    from ..orchestrator.net import run_worker

    host, port = _host_port(args.connect)
    n = run_worker(host, port, args.id or f"worker-{os.getpid()}")
    emit(tasks=n)


def cmd_main_node(args) -> None:
    from ..orchestrator.net import RemoteEvaluator, WorkerService

    name, sc = scenario_arg(args)
    settings = _settings(args)
    service = WorkerService(args.host, args.listen).start()
    print(json.dumps({"listening": service.port}), flush=True)
    ref = str(Path(args.scenario).resolve()) if args.scenario else scenario_to_dict(sc)
    evaluator = RemoteEvaluator(service, ref, settings.perEvalTimeLimit, settings.seed, settings.virtual_clock)
    try:
        best, report = run_experiment(settings, solver_space(), evaluator)
    finally:
        service.stop()
    d = out_dir(args)
    report.write(d / "tune-report.csv")
    emit(report=str(d / "tune-report.csv"), best=best.as_dict() if best else None, stop=report.stop_reason)


# parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--virtual-clock", action="store_true", help="step-counted time for reproducible output")
    common.add_argument("-v", "--verbose", action="store_true")

    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("--scenario", help="scenario JSON file")
    scen.add_argument("--family", help="generate a size class by name or index instead")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--params", nargs="*", default=[], metavar="K=V")
    solver.add_argument("--time-limit", type=float, default=10.0)

    p = argparse.ArgumentParser(prog="swmap", description="Software/hardware mapping solver, tuner and benchmarks.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a scenario file")
    g.add_argument("--family")
    g.add_argument("--scaling", type=int, metavar="HWC", help="chain family with HWC hardware units")
    g.add_argument("--requests", type=int, default=1)
    g.add_argument("--hw-scale", type=float, default=2.0)
    g.add_argument("--depth", type=int, default=2)
    g.add_argument("--branching", type=int, default=2)
    g.add_argument("--impls-per-type", type=int, default=2)
    g.add_argument("--roots", type=int, default=1)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", parents=[common, scen, solver], help="run the annealing solver")
    s.add_argument("--trace", help="write the score trace CSV here")
    s.set_defaults(func=cmd_solve)

    i = sub.add_parser("ilp-gen", parents=[common, scen], help="build the ILP and export it in LP format")
    i.set_defaults(func=cmd_ilp_gen)

    t = sub.add_parser("trace", parents=[common, scen, solver], help="quality-over-time trace")
    t.add_argument("--node-budget", type=int, default=ORACLE_NODES)
    t.set_defaults(func=cmd_trace)

    tb = sub.add_parser("table", parents=[common], help="scenario comparison table")
    tb.add_argument("--families", default="all", help="comma separated names or indices, or 'all'")
    tb.add_argument("--tuned", help="JSON file with tuned parameter values")
    tb.add_argument("--time-limit", type=float, default=10.0)
    tb.add_argument("--node-budget", type=int, default=ORACLE_NODES)
    tb.set_defaults(func=cmd_table)

    sc = sub.add_parser("scaling", parents=[common], help="first-valid window sweep")
    sc.add_argument("--hwc", default=",".join(map(str, SCALING_HWC)))
    sc.add_argument("--time-limit", type=float, default=10.0)
    sc.add_argument("--reps", type=int, default=3)
    sc.set_defaults(func=cmd_scaling)

    tu = sub.add_parser("tune", parents=[common, scen], help="tune solver parameters on one scenario")
    tu.add_argument("--settings", help="experiment settings JSON (default: reference settings)")
    tu.add_argument("--production-time", type=float, help="override the production time limit")
    tu.add_argument("--compare-seeds", type=int, default=5)
    tu.add_argument("--processes", type=int, default=0, help="solve in a process pool (0 = inline)")
    tu.set_defaults(func=cmd_tune)

    w = sub.add_parser("worker", parents=[common], help="connect to a main node and solve tasks")
    w.add_argument("--connect", required=True, metavar="HOST:PORT")
    w.add_argument("--id")
    w.set_defaults(func=cmd_worker)

    m = sub.add_parser("main-node", parents=[common, scen], help="run a tuning experiment over socket workers")
    m.add_argument("--listen", type=int, default=0, metavar="PORT")
    m.add_argument("--host", default="127.0.0.1")
    m.add_argument("--experiment", dest="settings", metavar="SETTINGS", help="experiment settings JSON")
    m.set_defaults(func=cmd_main_node)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, stream=sys.stderr)
    try:
        args.func(args)
    except (CliError, ValueError, OSError, KeyError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
