"""Command-line frontend: ``check``, ``gen`` and ``bench``.

Exit codes of ``check``: 0 when the target is not reachable, 1 when it is,
2 on errors and inconclusive runs.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional

from .automaton import ModelError, TimedAutomaton, format_constraint, parse_model, trace_feasible
from .domain import DomainMode
from .enumerative import CheckResult, EnumerativeChecker, Verdict
from .oracle import GeneratorConfig, OracleBudgetExceeded, generate_text, zone_reach_baseline
from .symbolic import SymbolicChecker

log = logging.getLogger("tacegar")

EXIT_UNREACHABLE = 0
EXIT_REACHABLE = 1
EXIT_ERROR = 2

CSV_VERSION = 1
CSV_COLUMNS = ["model", "engine", "verdict", "time_ms", "refinements"]
ENGINES = ("enum", "sym", "oracle")


def read_model(path: str) -> TimedAutomaton:
    if path == "-":
        return parse_model(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def run_engine(ta: TimedAutomaton, engine: str, mode: str = "global", search: str = "dfs",
               max_nodes: int = 100000, max_refinements: int = 10000,
               timeout: Optional[float] = None) -> CheckResult:
    if engine == "enum":
        return EnumerativeChecker(ta, DomainMode.parse(mode), search=search, max_nodes=max_nodes,
                                  max_refinements=max_refinements, time_limit=timeout).run()
    if engine == "sym":
        return SymbolicChecker(ta, max_refinements=max_refinements, time_limit=timeout).run()
    if engine == "oracle":
        start = time.perf_counter()
        try:
            hit, path = zone_reach_baseline(ta, max_nodes=max_nodes, with_trace=True)
        except OracleBudgetExceeded as exc:
            return CheckResult(Verdict.INCONCLUSIVE, reason=str(exc))
        res = CheckResult(Verdict.REACHABLE if hit else Verdict.NOT_REACHABLE, path)
        res.stats = {"time_ms": round((time.perf_counter() - start) * 1000, 3)}
        return res
    raise ValueError(f"unknown engine {engine!r}")


def render_edge(ta: TimedAutomaton, ei: int) -> str:
    e = ta.edges[ei]
    s = f"{ta.locations[e.src]} -> {ta.locations[e.dst]}"
    if e.guard:
        s += " guard " + " and ".join(format_constraint(ta, c) for c in e.guard)
    if e.resets:
        s += " reset " + " ".join(ta.clocks[x - 1] for x in sorted(e.resets))
    return s


def _exit_code(res: CheckResult) -> int:
    if res.verdict is Verdict.REACHABLE:
        return EXIT_REACHABLE
    if res.verdict is Verdict.NOT_REACHABLE:
        return EXIT_UNREACHABLE
    return EXIT_ERROR


def cmd_check(args) -> int:
    try:
        ta = read_model(args.model)
    except (OSError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    start = time.perf_counter()
    res = run_engine(ta, args.engine, args.domain_mode, args.search, args.max_nodes,
                     args.max_refinements, args.timeout)
    elapsed = round((time.perf_counter() - start) * 1000, 3)
    if res.verdict is Verdict.REACHABLE:
        if res.trace is None or trace_feasible(ta, res.trace) is None:
            print("error: engine reported a witness that does not replay", file=sys.stderr)
            return EXIT_ERROR
    trace = [render_edge(ta, ei) for ei in res.trace] if res.trace is not None else None
    if args.json:
        out = {"verdict": res.verdict.value, "trace": trace, "stats": res.stats, "time_ms": elapsed}
        if res.reason:
            out["reason"] = res.reason
        print(json.dumps(out, sort_keys=True, default=str))
    else:
        print(res.verdict.value)
        if res.reason:
            print(f"reason: {res.reason}")
        if args.trace and trace is not None:
            for i, step in enumerate(trace):
                print(f"  {i + 1}. {step}")
        if args.stats:
            for k, v in sorted(res.stats.items()):
                print(f"  {k}: {v}")
            print(f"  wall_ms: {elapsed}")
    return _exit_code(res)


def cmd_gen(args) -> int:
    try:
        cfg = GeneratorConfig(max_locations=args.locations, max_clocks=args.clocks, max_edges=args.edges,
                              max_constant=args.max_constant, guard_density=args.guard_density,
                              reset_density=args.reset_density, diagonal_density=args.diagonal_density,
                              seed=args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = generate_text(cfg)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _bench_one(job):
    path, engine, timeout = job
    name = os.path.basename(path)
    try:
        ta = read_model(path)
        res = run_engine(ta, engine, timeout=timeout)
        verdict = res.verdict.value
        t = res.stats.get("time_ms", "")
        refs = res.stats.get("refinements", 0)
    except ModelError as exc:
        verdict, t, refs = f"error: {exc}", "", ""
    return [name, engine, verdict, t, refs]


def cmd_bench(args) -> int:
    try:
        files = sorted(f for f in os.listdir(args.directory) if f.endswith(".ta"))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    bad = [e for e in engines if e not in ENGINES]
    if bad:
        print(f"error: unknown engine(s): {', '.join(bad)}", file=sys.stderr)
        return EXIT_ERROR
    jobs = [(os.path.join(args.directory, f), e, args.timeout) for f in files for e in engines]
    if args.jobs > 1 and jobs:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    try:
        fh = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        fh.write(f"# tacegar-bench v{CSV_VERSION}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tacegar", description="Timed automata reachability by abstraction refinement.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="decide whether the target location is reachable")
    c.add_argument("model", help="model file, or - for stdin")
    c.add_argument("--engine", choices=ENGINES, default="enum")
    c.add_argument("--domain-mode", default="global", choices=["global", "per-node", "per-location"],
                   help="how abstract domains are shared (enum engine only)")
    c.add_argument("--search", choices=["dfs", "bfs"], default="dfs")
    c.add_argument("--max-nodes", type=int, default=100000)
    c.add_argument("--max-refinements", type=int, default=10000)
    c.add_argument("--timeout", type=float, default=None, help="seconds per run")
    c.add_argument("--json", action="store_true", help="machine-readable report")
    c.add_argument("--trace", action="store_true", help="print the witness path")
    c.add_argument("--stats", action="store_true", help="print engine statistics")
    c.add_argument("--seed", type=int, default=0, help="accepted for symmetry; the engines are deterministic")
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("gen", help="print a random model")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--locations", type=int, default=5)
    g.add_argument("--clocks", type=int, default=3)
    g.add_argument("--edges", type=int, default=8)
    g.add_argument("--max-constant", type=int, default=5)
    g.add_argument("--guard-density", type=float, default=0.5)
    g.add_argument("--reset-density", type=float, default=0.3)
    g.add_argument("--diagonal-density", type=float, default=0.15)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="run every .ta file of a directory under each engine, CSV out")
    b.add_argument("directory")
    b.add_argument("--engines", default="enum,sym,oracle")
    b.add_argument("--timeout", type=float, default=10.0)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
