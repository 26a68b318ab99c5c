"""Command-line front end: generation, solving, heuristics, benchmarks.

File formats:
  instance JSON  {"schema": "gmkp/1", "capacities": [...],
                  "groups": [{"reward": int, "items": [weight, ...]}, ...],
                  "meta": {...}}
  result JSON    {"schema": "gmkp-result/1", ...}
  sweep CSV      schema,factor,reward,max_exceeded,dominated
  bench CSV      schema,instance,algo,reward,max_exceeded,time_ms

Items live inside their group, so a malformed partition is unrepresentable.
Exit codes: 0 success, 2 input error, 3 search budget exceeded, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import gen, heuristics, oracle, pipeline
from .model import (
    BudgetExceededError,
    GmkpError,
    InconsistentSolutionError,
    Instance,
    normalize,
    validate,
)

INSTANCE_SCHEMA = "gmkp/1"
RESULT_SCHEMA = "gmkp-result/1"
SWEEP_SCHEMA = "gmkp-sweep/1"
BENCH_SCHEMA = "gmkp-bench/1"
SUMMARY_SCHEMA = "gmkp-bench-summary/1"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_INTERNAL = 4

ALGO_CHOICES = ("lp", "kp", "2mkp", "3mkp", "mkpd", "mkpprime", "100mkp", "best")


class CliInputError(Exception):
    pass


# ---------------------------------------------------------------- instances


def instance_to_json(instance: Instance) -> dict:
    """Serialize with items nested in their groups (group-major order)."""
    groups = []
    for l, g in enumerate(instance.groups):
        groups.append(
            {
                "reward": instance.rewards[l],
                "items": [instance.item_weights[j] for j in g],
            }
        )
    return {
        "schema": INSTANCE_SCHEMA,
        "capacities": list(instance.capacities),
        "groups": groups,
        "meta": {"id": instance.meta},
    }


def instance_from_json(doc: dict) -> Instance:
    """Parse the nested form; item indices are assigned group-major."""
    if doc.get("schema") != INSTANCE_SCHEMA:
        raise CliInputError(f"unsupported instance schema {doc.get('schema')!r}")
    weights: list[int] = []
    groups: list[tuple[int, ...]] = []
    rewards: list[int] = []
    for entry in doc["groups"]:
        start = len(weights)
        weights.extend(int(w) for w in entry["items"])
        groups.append(tuple(range(start, len(weights))))
        rewards.append(int(entry["reward"]))
    return Instance(
        capacities=tuple(int(c) for c in doc["capacities"]),
        item_weights=tuple(weights),
        groups=tuple(groups),
        rewards=tuple(rewards),
        meta=str(doc.get("meta", {}).get("id", "")),
    )


def canonical_item_order(instance: Instance) -> Instance:
    """Reindex items group-major so that JSON round-trips are bit-exact."""
    weights: list[int] = []
    groups: list[tuple[int, ...]] = []
    for g in instance.groups:
        start = len(weights)
        weights.extend(instance.item_weights[j] for j in g)
        groups.append(tuple(range(start, len(weights))))
    return Instance(
        capacities=instance.capacities,
        item_weights=tuple(weights),
        groups=tuple(groups),
        rewards=instance.rewards,
        meta=instance.meta,
    )


def load_instance(path) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliInputError(f"cannot read instance {path}: {exc}") from exc
    inst = instance_from_json(doc)
    problems = [v for v in validate(inst) if not v.startswith("plain-mkp")]
    if problems:
        raise CliInputError(f"invalid instance {path}: " + "; ".join(problems))
    return inst


def dump_json(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def result_to_json(result: pipeline.SolveResult, instance: Instance) -> dict:
    assignment = []
    for l, g in enumerate(instance.groups):
        for pos, j in enumerate(g):
            if result.assignment.placement[j] is not None:
                assignment.append([l, pos, result.assignment.placement[j]])
    return {
        "schema": RESULT_SCHEMA,
        "algorithm": result.algorithm,
        "selection": list(result.selection.indices()),
        "assignment": assignment,
        "loads": list(result.assignment.loads),
        "reward": result.metrics.reward,
        "max_exceeded": result.metrics.max_exceeded,
        "timings_ms": result.timings_ms,
        "swap_opt": result.swap_opt_applied,
    }


# ------------------------------------------------------------------- algos


def parse_d_set(text: Optional[str], instance: Instance) -> Optional[list[Fraction]]:
    if text is None:
        return None
    if text.strip() == "canonical":
        from .subset_select import canonical_D

        return sorted(canonical_D(instance), reverse=True)
    try:
        return [Fraction(part.strip()) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise CliInputError(f"bad --d-set {text!r}: {exc}") from exc


def run_named_algo(
    instance: Instance,
    algo: str,
    swap_opt: bool,
    total_capacity: Optional[int] = None,
    d_set_text: Optional[str] = None,
    node_budget: Optional[int] = None,
) -> pipeline.SolveResult:
    if algo == "best":
        return pipeline.run_best(instance, swap_opt=swap_opt, node_budget=node_budget)
    if algo == "100mkp":
        return pipeline.run_algorithm(
            instance,
            "mkpd",
            swap_opt=swap_opt,
            total_capacity=total_capacity,
            d_set=pipeline.hundred_mkp_d_set(instance.c_max),
            node_budget=node_budget,
        )
    d_set = parse_d_set(d_set_text, instance)
    if algo == "mkpd" and d_set is None:
        raise CliInputError("--algo mkpd requires --d-set")
    return pipeline.run_algorithm(
        instance,
        algo,
        swap_opt=swap_opt,
        total_capacity=total_capacity,
        d_set=d_set,
        node_budget=node_budget,
    )


# -------------------------------------------------------------- subcommands


def cmd_generate(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    points = gen.latin_hypercube(args.count, args.seed)
    scheme = gen.RewardScheme(args.reward_scheme, seed=args.seed)
    manifest = {"schema": "gmkp-manifest/1", "seed": args.seed, "count": args.count,
                "reward_scheme": args.reward_scheme, "rng": gen.RNG_NAME, "instances": []}
    for idx in range(args.count):
        params = gen.materialize(points[idx], capacity=args.capacity, seed=args.seed * 1_000_003 + idx)
        inst = gen.generate_instance(params)
        if args.reward_scheme != "R0":
            inst = gen.apply_reward_scheme(inst, scheme)
        inst = canonical_item_order(inst)
        name = f"inst_{args.seed}_{idx}.json"
        dump_json(instance_to_json(inst), out_dir / name)
        manifest["instances"].append(
            {
                "file": name,
                "m": params.m,
                "w_split": params.w_split,
                "w_min": params.w_min,
                "w_mode": params.w_mode,
                "r_load": str(params.r_load),
                "r_conc": str(params.r_conc),
                "capacity": params.capacity,
                "seed": params.seed,
            }
        )
    dump_json(manifest, out_dir / f"manifest_{args.seed}.json")
    print(f"wrote {args.count} instances to {out_dir}")
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    inst, _ = normalize(inst)
    result = run_named_algo(
        inst,
        args.algo,
        swap_opt=args.swap_opt,
        total_capacity=args.total_capacity,
        d_set_text=args.d_set,
        node_budget=args.node_budget,
    )
    doc = result_to_json(result, inst)
    if args.out:
        dump_json(doc, args.out)
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        print()
    return EXIT_OK


def cmd_feasible(args) -> int:
    inst = load_instance(args.instance)
    inst, _ = normalize(inst)
    if args.algo in ("best",):
        raise CliInputError("feasible search needs a single algorithm")
    d_set = None
    algo = args.algo
    if algo == "100mkp":
        algo, d_set = "mkpd", pipeline.hundred_mkp_d_set(inst.c_max)
    elif args.d_set:
        d_set = parse_d_set(args.d_set, inst)
    search = heuristics.binary_search_feasible(
        inst, algo, swap_opt=not args.no_swap_opt, d_set=d_set, node_budget=args.node_budget
    )
    doc = result_to_json(search.result, inst)
    doc["probes"] = search.probes
    doc["aborted_early"] = search.aborted_early
    if args.out:
        dump_json(doc, args.out)
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        print()
    return EXIT_OK


def cmd_sweep(args) -> int:
    inst = load_instance(args.instance)
    inst, _ = normalize(inst)
    factors = (
        [Fraction(f) for f in args.factors.split(",")]
        if args.factors
        else list(heuristics.DEFAULT_SWEEP_FACTORS)
    )
    algo = args.algo
    d_set = None
    if algo == "100mkp":
        algo, d_set = "mkpd", pipeline.hundred_mkp_d_set(inst.c_max)
    elif args.d_set:
        d_set = parse_d_set(args.d_set, inst)
    entries = heuristics.capacity_sweep(
        inst, algo, factors=factors, swap_opt=not args.no_swap_opt, d_set=d_set
    )
    frontier = heuristics.pareto_frontier([e.result for e in entries if e.result])
    frontier_ids = {id(r) for r in frontier}
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["schema", "factor", "reward", "max_exceeded", "dominated"])
        for e in entries:
            if e.result is None:
                writer.writerow([SWEEP_SCHEMA, str(e.factor), "", "", f"error:{e.error}"])
            else:
                writer.writerow(
                    [
                        SWEEP_SCHEMA,
                        str(e.factor),
                        e.result.metrics.reward,
                        e.result.metrics.max_exceeded,
                        0 if id(e.result) in frontier_ids else 1,
                    ]
                )
    print(f"wrote {len(entries)} sweep rows to {args.out}")
    return EXIT_OK


def cmd_exact(args) -> int:
    inst = load_instance(args.instance)
    inst, _ = normalize(inst)
    value, selection, assignment = oracle.exact_gmkp(inst, node_budget=args.node_budget)
    doc = {
        "schema": RESULT_SCHEMA,
        "algorithm": "exact",
        "optimal_reward": value,
        "selection": list(selection.indices()),
        "loads": list(assignment.loads),
        "max_exceeded": assignment.max_exceeded(inst),
    }
    if args.out:
        dump_json(doc, args.out)
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        print()
    return EXIT_OK


def _bench_one(path: Path, algo: str, swap_opt: bool, node_budget) -> list:
    import time

    try:
        inst = load_instance(path)
        inst, _ = normalize(inst)
        t0 = time.perf_counter()
        result = run_named_algo(inst, algo, swap_opt=swap_opt, node_budget=node_budget)
        dt = (time.perf_counter() - t0) * 1000.0
        return [BENCH_SCHEMA, path.name, algo, result.metrics.reward,
                result.metrics.max_exceeded, f"{dt:.3f}"]
    except Exception as exc:  # per-row failures keep the batch going
        return [BENCH_SCHEMA, path.name, algo, "", "", f"error:{exc}"]


def _percentile(sorted_values: Sequence[float], p: float) -> float:
    if not sorted_values:
        return float("nan")
    idx = min(len(sorted_values) - 1, max(0, int(round(p / 100 * (len(sorted_values) - 1)))))
    return sorted_values[idx]


def cmd_bench(args) -> int:
    in_dir = Path(args.instances)
    paths = sorted(p for p in in_dir.glob("inst_*.json"))
    if not paths:
        raise CliInputError(f"no inst_*.json files in {in_dir}")
    algos = [a.strip() for a in args.algos.split(",")]
    for a in algos:
        if a not in ALGO_CHOICES:
            raise CliInputError(f"unknown algorithm {a!r}")
    jobs = [(p, a) for p in paths for a in algos]
    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            rows = list(
                pool.map(lambda job: _bench_one(job[0], job[1], args.swap_opt, args.node_budget), jobs)
            )
    else:
        rows = [_bench_one(p, a, args.swap_opt, args.node_budget) for p, a in jobs]

    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["schema", "instance", "algo", "reward", "max_exceeded", "time_ms"])
        writer.writerows(rows)

    summary_path = args.summary or (os.path.splitext(args.out)[0] + "_summary.csv")
    with open(summary_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["schema", "algo", "p50", "p75", "p90", "p95", "p99"])
        for a in algos:
            times = sorted(
                float(r[5]) for r in rows if r[2] == a and not str(r[5]).startswith("error")
            )
            writer.writerow(
                [SUMMARY_SCHEMA, a]
                + [f"{_percentile(times, p):.3f}" for p in (50, 75, 90, 95, 99)]
            )
    print(f"wrote {len(rows)} bench rows to {args.out}; summary in {summary_path}")
    return EXIT_OK


# -------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmkp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate random instances")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--capacity", type=int, default=100)
    p.add_argument("--reward-scheme", choices=("R0", "R1", "R2", "R3"), default="R0")
    p.add_argument("--out-dir", default=os.environ.get("GMKP_OUT_DIR", "instances"))
    p.set_defaults(func=cmd_generate)

    def add_solver_args(p, with_capacity=True):
        p.add_argument("instance")
        p.add_argument("--algo", choices=ALGO_CHOICES, default="3mkp")
        p.add_argument("--d-set", default=None,
                       help="comma-separated thresholds (e.g. 100/2,100/3) or 'canonical'")
        p.add_argument("--node-budget", type=int, default=None)
        p.add_argument("--out", default=None)
        if with_capacity:
            p.add_argument("--total-capacity", type=int, default=None)

    p = sub.add_parser("solve", help="run one algorithm on one instance")
    add_solver_args(p)
    p.add_argument("--swap-opt", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("feasible", help="binary-search a capacity-feasible solution")
    add_solver_args(p, with_capacity=False)
    p.add_argument("--no-swap-opt", action="store_true")
    p.set_defaults(func=cmd_feasible)

    p = sub.add_parser("sweep", help="capacity sweep with Pareto frontier CSV")
    p.add_argument("instance")
    p.add_argument("--algo", choices=ALGO_CHOICES, default="2mkp")
    p.add_argument("--d-set", default=None)
    p.add_argument("--factors", default=None, help="comma-separated factors, default 0.75..1.25")
    p.add_argument("--no-swap-opt", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("exact", help="exact optimum for a small instance")
    p.add_argument("instance")
    p.add_argument("--node-budget", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("bench", help="run a directory of instances against algorithms")
    p.add_argument("--instances", required=True)
    p.add_argument("--algos", default="lp,kp,2mkp,3mkp")
    p.add_argument("--swap-opt", action="store_true")
    p.add_argument("--node-budget", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--summary", default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InconsistentSolutionError, AssertionError) as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except GmkpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
