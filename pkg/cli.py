"""Command-line front door.

Exit codes: 0 property holds / witness found, 1 property fails / no witness,
2 input error, 3 enumeration limit exceeded. Results go to stdout; JSON log
events go to stderr.
"""
from typing import Any, Dict, Optional, Sequence
import argparse
import csv
import json
import sys
import time
from fractions import Fraction

import config
from config import log_event
from core import (
    FairnessReport,
    Instance,
    assignment_to_dict,
    check_pareto_prop,
    check_pef,
    fairness_report,
    format_rational,
    instance_to_dict,
    load_assignment,
    load_instance,
    pareto_prop_failures,
)
from generators import NAMED_INSTANCES, TIGHT_KINDS, named_instance, random_dorm, random_general, tight_instance
from matching import load_graph
from oracle import EnumerationLimitExceeded, decide_ef, decide_pef
from pef_solver import SolverInvariantError, solve_pef_cap2
from reductions import CliqueInstance, reduce

EXIT_OK = 0
EXIT_FAILS = 1
EXIT_INPUT = 2
EXIT_LIMIT = 3


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _pairs(pairs) -> str:
    return " ".join(f"({i},{j})" for i, j in pairs) or "none"


def render_report(report: FairnessReport, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True)

    summary = []
    if report.is_ef is not None:
        summary.append(f"EF: {_yes(report.is_ef)}")
    if report.is_pef is not None:
        summary.append(f"PEF: {_yes(report.is_pef)}")
    if report.is_prop is not None:
        summary.append(f"PROP: {_yes(report.is_prop)}")
    lines = [" / ".join(summary)]
    if report.ef_violations is not None:
        lines.append(f"EF violations: {_pairs(report.ef_violations)}")
    if report.pef_violations is not None:
        lines.append(f"PEF violations: {_pairs(report.pef_violations)}")
    if report.prop_ratios is not None:
        lines.append(f"min PROP ratio = {format_rational(report.min_prop_ratio)}")
    lines.append("agent  internal  external  total  PROP  ratio")
    for i, u in enumerate(report.utilities):
        share = ratio = "-"
        if report.prop_shares is not None:
            share = str(format_rational(report.prop_shares[i]))
            r = report.prop_ratios[i]
            ratio = "satisfied" if r is None else str(format_rational(r))
        lines.append(
            f"{i}  {format_rational(u.internal)}  {format_rational(u.external)}  "
            f"{format_rational(u.total)}  {share}  {ratio}"
        )
    return "\n".join(lines)


def _emit(doc: Dict[str, Any], out: Optional[str]) -> None:
    text = json.dumps(doc, indent=2)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load(path: str) -> Instance:
    inst = load_instance(path)
    log_event(
        "instance_validated",
        path=path,
        n=inst.n,
        m=inst.m,
        dorm_sharing=inst.profile.is_dorm_sharing,
    )
    return inst


# ---------- Commands ----------


def cmd_validate(args) -> int:
    inst = _load(args.file)
    profile = inst.profile
    _emit({
        "status": "success",
        "n": inst.n,
        "m": inst.m,
        "capacities": list(inst.capacities),
        "dorm_sharing": profile.is_dorm_sharing,
        "uniform_capacity": profile.uniform_capacity,
    }, None)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    try:
        x, trace = solve_pef_cap2(inst)
    except SolverInvariantError as e:
        print(f"error: {e}", file=sys.stderr)
        print(json.dumps(e.trace.to_dict()), file=sys.stderr)
        return EXIT_FAILS
    doc = assignment_to_dict(x)
    if args.trace:
        doc["trace"] = trace.to_dict()
    _emit(doc, args.output)
    return EXIT_OK


def cmd_check(args) -> int:
    inst = _load(args.instance)
    x = load_assignment(args.assignment, inst)

    if args.notion == "pprop":
        failures = pareto_prop_failures(inst, x)
        checks = [check_pareto_prop(inst, x, i) for i in range(inst.n)]
        if args.json:
            _emit({
                "notion": "pprop",
                "holds": not failures,
                "failures": failures,
                "agents": [c._asdict() for c in checks],
            }, None)
        else:
            print(f"PPROP: {_yes(not failures)}")
            for i, c in enumerate(checks):
                print(
                    f"{i}  cond1={_yes(c.cond1)} (count {c.weakly_worse_count})  "
                    f"cond2={_yes(c.cond2)} (threshold {c.external_threshold})"
                )
        return EXIT_OK if not failures else EXIT_FAILS

    report = fairness_report(inst, x)
    if args.notion == "prop" and report.is_prop is None:
        raise ValueError("PROP needs at least two agents")
    print(render_report(report, "json" if args.json else "text"))
    holds = {"ef": report.is_ef, "pef": report.is_pef, "prop": report.is_prop}[args.notion]
    return EXIT_OK if holds else EXIT_FAILS


def cmd_decide(args) -> int:
    inst = _load(args.instance)
    decide = decide_ef if args.notion == "ef" else decide_pef
    witness = decide(inst, limit=args.limit, workers=args.workers)
    if witness is None:
        print(f"no {args.notion.upper()} assignment exists")
        return EXIT_FAILS
    _emit(assignment_to_dict(witness), None)
    return EXIT_OK


def cmd_reduce(args) -> int:
    with open(args.graph, "r", encoding="utf-8") as fh:
        g = load_graph(json.load(fh))
    inst = reduce(CliqueInstance(g, args.k), args.target)
    _emit(instance_to_dict(inst), args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind in NAMED_INSTANCES:
        inst, x = named_instance(args.kind)
    elif args.kind in TIGHT_KINDS:
        inst, x = tight_instance(args.kind, c=args.c, m=args.m, t=args.T)
    elif args.kind == "random-dorm":
        inst, x = random_dorm(args.seed, args.m, args.c, args.p, args.value_max), None
    elif args.kind == "random-general":
        inst, x = random_general(args.seed, [args.c] * args.m, args.value_max), None
    else:
        raise ValueError(f"unknown kind {args.kind!r}")
    doc = instance_to_dict(inst)
    if x is not None:
        doc.update(assignment_to_dict(x))
    _emit(doc, args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.max_m < 2:
        raise ValueError(f"--max-m must be >= 2 (got {args.max_m})")
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["seed", "n", "m", "case1", "case2", "case3", "case4", "wall_ms", "pef_verified"])
    all_ok = True
    for t in range(args.trials):
        seed = args.seed + t
        m = 2 + t % (args.max_m - 1)
        n = 2 * m
        p = min(Fraction(1), Fraction(config.BENCH_MEAN_DEGREE, n - 1))
        inst = random_dorm(seed, m, 2, p, value_max=3)
        started = time.perf_counter()
        x, trace = solve_pef_cap2(inst)
        wall_ms = (time.perf_counter() - started) * 1000
        verified = check_pef(inst, x).is_pef
        all_ok = all_ok and verified
        counts = trace.case_counts()
        writer.writerow([seed, n, m, counts[1], counts[2], counts[3], counts[4], f"{wall_ms:.2f}", str(verified).lower()])
    return EXIT_OK if all_ok else EXIT_FAILS


# ---------- Parser ----------


def _positive_int(raw: str) -> int:
    if not raw.strip():
        raise argparse.ArgumentTypeError("expected a positive integer (got an empty value)")
    try:
        return config._parse_positive_int("value", raw, 1)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dormshare", description="Fair resource sharing with externalities")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate an instance file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="PEF assignment for capacity-2 dorm sharing")
    p.add_argument("--instance", required=True)
    p.add_argument("--trace", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="check an assignment against a fairness notion")
    p.add_argument("--instance", required=True)
    p.add_argument("--assignment", required=True)
    p.add_argument("--notion", choices=["ef", "pef", "prop", "pprop"], required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("decide", help="brute-force EF/PEF existence")
    p.add_argument("--instance", required=True)
    p.add_argument("--notion", choices=["ef", "pef"], required=True)
    p.add_argument("--limit", type=_positive_int, default=None)
    p.add_argument("--workers", type=_positive_int, default=None)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("reduce", help="build the EF/PEF instance for a clique question")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--target", choices=["ef", "pef"], required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("gen", help="generate a named, tight or random instance")
    p.add_argument(
        "--kind",
        required=True,
        choices=list(NAMED_INSTANCES) + list(TIGHT_KINDS) + ["random-dorm", "random-general"],
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--c", type=int, default=2)
    p.add_argument("--p", default="1/2")
    p.add_argument("--value-max", type=int, default=3)
    p.add_argument("--T", default="1")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time the solver on random capacity-2 instances (CSV)")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-m", type=int, default=6)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        code = args.func(args)
    except EnumerationLimitExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        code = EXIT_LIMIT
    except (ValueError, OSError) as e:
        log_event("input_error", command=args.command, error=str(e), error_type=type(e).__name__)
        print(f"error: {e}", file=sys.stderr)
        code = EXIT_INPUT
    log_event(
        "command_finished",
        command=args.command,
        exit_code=code,
        duration_ms=round((time.perf_counter() - started) * 1000, 2),
    )
    return code


if __name__ == "__main__":
    sys.exit(main())
