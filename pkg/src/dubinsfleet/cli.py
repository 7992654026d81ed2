"""Command-line interface: solve, plot, verify, bench.

Exit codes: 0 success, 2 invalid scenario or mismatched inputs,
3 infeasible instance.
"""

from __future__ import annotations

import argparse
import sys

from .errors import (CapacityError, DubinsFleetError, InfeasibleError,
                     IncompleteSolutionError, InvalidTourError, ScenarioError)
from .instance import Scenario
from .oracle import export_lp
from .pipeline import (bench_rows, bench_table, solution_dict, solve_scenario,
                       verify_scenario)
from .plotting import render_solution
from .scenario_io import (canonical_json, load_scenario, load_solution,
                          scenario_fingerprint, write_json)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3


def _apply_overrides(scenario: Scenario, args) -> Scenario:
    if args.samples_per_cluster is None and args.seed is None:
        return scenario
    return Scenario(
        tasks=scenario.tasks,
        vehicles=scenario.vehicles,
        samples_per_cluster=(args.samples_per_cluster
                             or scenario.samples_per_cluster),
        depot_terminal_samples=scenario.depot_terminal_samples,
        seed=scenario.seed if args.seed is None else args.seed,
        region=scenario.region,
    )


def _cmd_solve(args) -> int:
    scenario, prefs = load_scenario(args.scenario)
    scenario = _apply_overrides(scenario, args)
    method = args.method or prefs["method"]
    effort = args.effort or prefs["effort"]
    result = solve_scenario(scenario, method=method, effort=effort,
                            use_exact=args.exact)
    if args.export_lp:
        with open(args.export_lp, "w", encoding="utf-8") as fh:
            fh.write(export_lp(result.graph))
    payload = solution_dict(result, include_timings=args.timings)
    write_json(args.output, payload)
    if not args.timings:
        stages = " ".join(f"{k}={v:.3f}s" for k, v in result.timings.items())
        print(f"timings: {stages}", file=sys.stderr)
    print(f"method={method} solver={result.solver} "
          f"cost={payload['total_cost']:.6f} -> {args.output}")
    return EXIT_OK


def _cmd_plot(args) -> int:
    scenario, _ = load_scenario(args.scenario)
    solution = load_solution(args.solution)
    if solution["scenario_fingerprint"] != scenario_fingerprint(scenario):
        print("error: solution was not produced from this scenario",
              file=sys.stderr)
        return EXIT_INVALID
    svg = render_solution(scenario, solution)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    scenario, prefs = load_scenario(args.scenario)
    lines, ok = verify_scenario(scenario, effort=prefs["effort"])
    for line in lines:
        print(line)
    return EXIT_OK if ok else 1


def _cmd_bench(args) -> int:
    scenario, prefs = load_scenario(args.scenario)
    values = [int(v) for v in args.values.split(",")]
    methods = args.methods.split(",") if args.methods else None
    seeds = ([int(s) for s in args.seeds.split(",")]
             if args.seeds else None)
    rows = bench_rows(scenario, args.sweep, values, methods=methods,
                      seeds=seeds, effort=args.effort or prefs["effort"],
                      use_exact=args.exact)
    table = bench_table(rows)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(table)
        print(f"wrote {args.output}")
    else:
        print(table, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dubinsfleet",
        description="Multi-vehicle Dubins touring with necessarily-"
                    "intersecting regions")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a scenario and write a solution")
    p.add_argument("scenario")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--method", choices=["nonin", "nin", "ninpr"])
    p.add_argument("--effort", choices=["low", "medium", "high"])
    p.add_argument("--seed", type=int)
    p.add_argument("--samples-per-cluster", type=int)
    p.add_argument("--exact", action="store_true",
                   help="use the exact solver (small instances only)")
    p.add_argument("--export-lp", metavar="PATH",
                   help="also write the MILP in LP format")
    p.add_argument("--timings", action="store_true",
                   help="embed stage timings in the solution file"
                        " (breaks byte-for-byte reproducibility)")
    p.set_defaults(run=_cmd_solve)

    p = sub.add_parser("plot", help="render a solved scenario as SVG")
    p.add_argument("solution")
    p.add_argument("scenario")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(run=_cmd_plot)

    p = sub.add_parser("verify", help="run self-checks on a scenario")
    p.add_argument("scenario")
    p.set_defaults(run=_cmd_verify)

    p = sub.add_parser("bench", help="sweep instance size and tabulate")
    p.add_argument("scenario")
    p.add_argument("--sweep", choices=["samples", "tasks"], default="samples")
    p.add_argument("--values", required=True,
                   help="comma-separated sweep values, e.g. 4,6,8,10")
    p.add_argument("--methods", help="comma-separated subset of nonin,nin,ninpr")
    p.add_argument("--seeds", help="comma-separated seeds to average over")
    p.add_argument("--effort", choices=["low", "medium", "high"])
    p.add_argument("--exact", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(run=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except ScenarioError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except (InfeasibleError, InvalidTourError, IncompleteSolutionError,
            CapacityError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DubinsFleetError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
