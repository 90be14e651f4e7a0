"""Command-line front end.

    llp solve INSTANCE.json [--mode seq|rounds|priority|async] [--workers N]
              [--seed S] [--staleness K] [--verify] [--trace] [--out PATH]
    llp check-linearity NAME --dims 4 4 4 [--params JSON]
    llp bench INSTANCE.json [--repeat N] [solve flags]

Exit codes: 0 ok, 2 infeasible, 3 invalid input, 4 oracle mismatch,
5 lattice-linearity counterexample.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from . import knapsack, lis, obst, oracles
from .engine import ScheduleConfig, SolveReport, solve
from .jobs import jobs_spec, normalize_pre, topological_order
from .linearity import BUILTINS, EnumerationTooLarge, check_builtin

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_INVALID = 3
EXIT_MISMATCH = 4
EXIT_COUNTEREXAMPLE = 5

CLI_MODES = {"seq": "sequential", "rounds": "rounds", "priority": "priority", "async": "async-stale"}


class InstanceError(ValueError):
    pass


# --- instance parsing ----------------------------------------------------------

def _int(data: dict, key: str, *, required: bool = True, default: Any = None) -> Any:
    if key not in data:
        if required:
            raise InstanceError(f"field {key!r}: missing")
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceError(f"field {key!r}: expected an integer, got {json.dumps(value)}")
    return value


def _ints(data: dict, key: str, *, required: bool = True) -> Optional[list[int]]:
    if key not in data:
        if required:
            raise InstanceError(f"field {key!r}: missing")
        return None
    value = data[key]
    if not isinstance(value, list):
        raise InstanceError(f"field {key!r}: expected a list of integers")
    for k, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, int):
            raise InstanceError(f"field {key!r}[{k}]: expected an integer, got {json.dumps(x)}")
    return value


def _bool(data: dict, key: str) -> bool:
    value = data.get(key, False)
    if not isinstance(value, bool):
        raise InstanceError(f"field {key!r}: expected true or false")
    return value


def parse_instance(data: Any) -> tuple[str, Any]:
    """Validate a decoded JSON instance and build the problem object."""
    if not isinstance(data, dict):
        raise InstanceError("instance must be a JSON object")
    tag = data.get("problem")
    try:
        if tag == "lis":
            return tag, lis.LisInstance(
                tuple(_ints(data, "A")),
                gap_k=_int(data, "gap_k", required=False),
                odd_bound=_bool(data, "odd_bound"),
                odd_only=_bool(data, "odd_only"),
            )
        if tag == "obst":
            balanced = data.get("balanced", False)
            scope = "recursive"
            if balanced in ("recursive", "root"):
                balanced, scope = True, balanced
            elif not isinstance(balanced, bool):
                raise InstanceError("field 'balanced': expected true, false, \"recursive\" or \"root\"")
            return tag, obst.ObstInstance(
                tuple(_ints(data, "p")),
                forbidden_root=_int(data, "forbidden_root", required=False),
                balanced=balanced,
                balance_scope=scope,
                strict=_bool(data, "strict"),
            )
        if tag == "chain":
            return tag, obst.ChainInstance(tuple(_ints(data, "dims")))
        if tag == "knapsack":
            pairs = data.get("implications", [])
            if not isinstance(pairs, list) or not all(
                isinstance(p, list) and len(p) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in p)
                for p in pairs
            ):
                raise InstanceError("field 'implications': expected a list of [a, b] integer pairs")
            return tag, knapsack.KnapsackInstance(
                tuple(_ints(data, "w")), tuple(_ints(data, "v")), _int(data, "W"), tuple(map(tuple, pairs))
            )
        if tag == "jobs":
            t = _ints(data, "t")
            pre = data.get("pre", [[] for _ in t])
            if not isinstance(pre, list) or not all(isinstance(p, list) for p in pre):
                raise InstanceError("field 'pre': expected a list of lists of job ids")
            pre = normalize_pre(len(t), pre)
            topological_order(pre)
            return tag, (tuple(t), pre)
    except InstanceError:
        raise
    except ValueError as exc:
        raise InstanceError(f"{tag}: {exc}") from None
    raise InstanceError(
        f"field 'problem': expected one of lis, obst, chain, knapsack, jobs; got {json.dumps(tag)}"
    )


def load_instance(path: str) -> tuple[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InstanceError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return parse_instance(data)
    except InstanceError as exc:
        raise InstanceError(f"{path}: {exc}") from None


# --- per-problem presentation --------------------------------------------------

@dataclass
class Outcome:
    report: SolveReport
    G: Any
    optimum: Optional[int]
    witness: Any
    per_subproblem: dict


def _range_grid(n: int, table: dict) -> list[list[Optional[int]]]:
    return [[table.get((i, j)) for j in range(1, n + 1)] for i in range(1, n + 1)]


def _solve_problem(tag: str, instance: Any, config: ScheduleConfig, options: argparse.Namespace) -> Outcome:
    if tag == "lis":
        spec = lis.lis_fixed_spec(instance) if options.fixed else lis.lis_spec(instance)
        report = solve(spec, config)
        G = report.values
        return Outcome(report, G, max(G), lis.reconstruct_lis(instance, G) if report.feasible else None,
                       {j: g for j, g in enumerate(G, start=1)})
    if tag == "obst":
        report = solve(obst.obst_spec(instance), config)
        table = report.table()
        ok = report.feasible
        return Outcome(report, _range_grid(instance.n, table), table[(1, instance.n)] if ok else None,
                       obst.reconstruct_tree(instance, table).to_dict() if ok else None, table)
    if tag == "chain":
        report = solve(obst.matrix_chain_spec(instance), config)
        table = report.table()
        return Outcome(report, _range_grid(instance.n, table), table[(1, instance.n)],
                       obst.reconstruct_chain(instance, table), table)
    if tag == "knapsack":
        profit = knapsack.solve_knapsack(instance, config, options.implication_mode)
        items = sorted(knapsack.reconstruct_items(instance, profit))
        per = {(i, j): profit.G[i][j] for i in range(instance.n + 1) for j in range(instance.W + 1)}
        return Outcome(profit.report, profit.G, profit.optimum, items, per)
    if tag == "jobs":
        t, pre = instance
        report = solve(jobs_spec(t, pre), config)
        G = report.values
        return Outcome(report, G, max(G, default=0), _critical_path(t, pre, G) if report.feasible else None,
                       {j: g for j, g in enumerate(G, start=1)})
    raise AssertionError(tag)


def _critical_path(t: Sequence[int], pre: Sequence[Sequence[int]], G: Sequence[int]) -> list[int]:
    if not G:
        return []
    j = G.index(max(G)) + 1
    path = [j]
    while True:
        step = next((i for i in pre[j - 1] if G[i - 1] + t[j - 1] == G[j - 1]), None)
        if step is None:
            return path[::-1]
        path.append(step)
        j = step


def _oracle(tag: str, instance: Any) -> oracles.OracleResult:
    if tag == "lis":
        return oracles.oracle_lis(instance)
    if tag == "obst":
        return oracles.oracle_obst(instance)
    if tag == "chain":
        return oracles.oracle_chain(instance)
    if tag == "knapsack":
        return oracles.oracle_knapsack(instance)
    t, pre = instance
    return oracles.oracle_jobs(t, pre)


def _verify(tag: str, instance: Any, outcome: Outcome) -> bool:
    reference = _oracle(tag, instance)
    if not outcome.report.feasible:
        return reference.optimum is None
    return reference.per_subproblem == outcome.per_subproblem


def _jsonable_coord(coord: Any) -> Any:
    return list(coord) if isinstance(coord, tuple) else coord


# --- commands --------------------------------------------------------------------

@dataclass
class RunRequest:
    instance: str
    mode: str = "seq"
    workers: int = 1
    seed: int = 0
    staleness: int = 0
    verify: bool = False
    trace: bool = False
    out: Optional[str] = None
    fixed: bool = False
    implication_mode: str = "exact"


def _config(request: Any) -> ScheduleConfig:
    return ScheduleConfig(
        mode=CLI_MODES.get(request.mode, request.mode),
        workers=request.workers,
        seed=request.seed,
        staleness_bound=request.staleness,
        trace=getattr(request, "trace", False),
    )


def _emit(payload: dict, out: Optional[str]) -> None:
    lines = [f"  {json.dumps(k)}: {json.dumps(v)}" for k, v in payload.items()]
    text = "{\n" + ",\n".join(lines) + "\n}\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(request: RunRequest) -> int:
    try:
        tag, instance = load_instance(request.instance)
        config = _config(request)
    except (InstanceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    outcome = _solve_problem(tag, instance, config, request)
    report = outcome.report
    payload: dict[str, Any] = {
        "problem": tag,
        "mode": report.mode,
        "feasible": report.feasible,
        "G": outcome.G,
        "optimum": outcome.optimum,
        "witness": outcome.witness,
        "rounds": report.rounds,
        "advances": report.total_advances,
    }
    if report.violation is not None:
        v = report.violation
        payload["violation"] = {
            "index": _jsonable_coord(report.state.index_map.coord(v.index)),
            "alpha": v.alpha,
            "top": v.top,
        }
    code = EXIT_OK if report.feasible else EXIT_INFEASIBLE
    if request.verify:
        try:
            payload["verified"] = _verify(tag, instance, outcome)
        except oracles.InstanceTooLarge as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
        if not payload["verified"]:
            code = EXIT_MISMATCH
    if report.trace is not None:
        coords = report.state.index_map
        payload["trace"] = [
            {"round": e.round, "index": _jsonable_coord(coords.coord(e.index)), "old": e.old, "new": e.new}
            for e in report.trace
        ]
    _emit(payload, request.out)
    return code


def check_linearity_cmd(name: str, dims: Sequence[int], params: Optional[dict] = None) -> int:
    if name not in BUILTINS:
        print(f"error: unknown predicate {name!r}; expected one of {', '.join(BUILTINS)}", file=sys.stderr)
        return EXIT_INVALID
    try:
        found = check_builtin(name, dims, params)
    except (EnumerationTooLarge, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if found is None:
        print("ok")
        return EXIT_OK
    where = f" at index {found.index}" if found.index is not None else ""
    print(f"counterexample {tuple(found.state)} ({found.reason}{where})")
    return EXIT_COUNTEREXAMPLE


def bench(request: Any, repeat: int) -> int:
    try:
        tag, instance = load_instance(request.instance)
        config = _config(request)
    except (InstanceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    times, rounds = [], []
    for _ in range(repeat):
        start = time.perf_counter()
        outcome = _solve_problem(tag, instance, config, request)
        times.append(time.perf_counter() - start)
        rounds.append(outcome.report.rounds)
    _emit(
        {
            "problem": tag,
            "mode": config.mode,
            "workers": config.workers,
            "repeat": repeat,
            "seconds": {"min": min(times), "median": statistics.median(times), "max": max(times)},
            "rounds": rounds,
            "advances": outcome.report.total_advances,
        },
        getattr(request, "out", None),
    )
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # usage errors are input errors
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _solve_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("instance", help="path to a JSON instance")
    p.add_argument("--mode", choices=sorted(CLI_MODES), default="seq")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--staleness", type=int, default=0, help="max versions behind for async reads")
    p.add_argument("--fixed", action="store_true", help="LIS: use the fixed-flag formulation")
    p.add_argument("--implication-mode", choices=knapsack.IMPLICATION_MODES, default="exact")
    p.add_argument("--out", help="write JSON here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="llp", description="Lattice-linear predicate solver for DP problems")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_solve = sub.add_parser("solve", help="solve one instance")
    _solve_flags(p_solve)
    p_solve.add_argument("--verify", action="store_true", help="compare against brute force")
    p_solve.add_argument("--trace", action="store_true", help="include every advance in the output")

    p_check = sub.add_parser("check-linearity", help="brute-force lattice-linearity check")
    p_check.add_argument("name", help=f"one of: {', '.join(BUILTINS)}")
    p_check.add_argument("--dims", type=int, nargs="+", required=True)
    p_check.add_argument("--params", help="JSON object overriding the default instance")

    p_bench = sub.add_parser("bench", help="time repeated solves (no assertions)")
    _solve_flags(p_bench)
    p_bench.add_argument("--repeat", type=int, default=5)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "solve":
        return run(
            RunRequest(
                instance=args.instance, mode=args.mode, workers=args.workers, seed=args.seed,
                staleness=args.staleness, verify=args.verify, trace=args.trace, out=args.out,
                fixed=args.fixed, implication_mode=args.implication_mode,
            )
        )
    if args.command == "check-linearity":
        params = None
        if args.params:
            try:
                params = json.loads(args.params)
            except json.JSONDecodeError as exc:
                print(f"error: --params: {exc}", file=sys.stderr)
                return EXIT_INVALID
        return check_linearity_cmd(args.name, args.dims, params)
    return bench(args, args.repeat)


if __name__ == "__main__":
    sys.exit(main())
