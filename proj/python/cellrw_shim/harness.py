"""Equivalence and timing harness.

    cellrw-harness run [--rules id,...] [--seeds N] [--rows M] [--report json|text] [--engine PATH]
"""

import argparse
import dataclasses
import json
import os
import statistics
import sys
import tempfile
import time

from . import cases as _cases
from . import engine as _engine
from . import oracle


@dataclasses.dataclass
class Verdict:
    equal: bool
    detail: str = ""
    rewritten: bool = False
    fast_path: bool = None  # guard outcome in the rewritten run

    @property
    def status(self):
        return "equal" if self.equal else "divergent"


def _rewrite(case, engine, timeout):
    with tempfile.TemporaryDirectory(prefix="cellrw-harness-") as tmp:
        history = None
        if case.history:
            history = os.path.join(tmp, "history.py")
            with open(history, "w", encoding="utf-8") as f:
                f.write(case.history)
        source, _ = _engine.rewrite(case.cell, engine=engine, history=history, rules=[case.rule], timeout=timeout)
        return source


def _prepared(case):
    ns = case.namespace()
    if case.setup:
        result = oracle.execute(case.setup, ns)
        if result.error:
            raise RuntimeError("case setup raised %s" % result.error.__name__)
    return ns


def check_equivalence(case, engine=None, timeout=10.0):
    """Runs the original and rewritten cell on identically seeded inputs."""
    rewritten = _rewrite(case, engine, timeout)
    if rewritten == case.cell:
        return Verdict(False, "cell was not rewritten")
    original = oracle.execute(case.cell, _prepared(case))
    result = oracle.execute(rewritten, _prepared(case))
    fast = oracle.guard_outcome(result.namespace)
    if "index-wrap" in case.divergence:
        for run in (original, result):
            if hasattr(run.value, "reset_index"):
                run.value = run.value.reset_index(drop=True)
    problem = oracle.compare(original, result)
    if problem is None and case.expect_fast is not None and fast != case.expect_fast:
        problem = "guard evaluated to %r, case expects %r" % (fast, case.expect_fast)
    return Verdict(problem is None, problem or "", True, fast)


def time_pair(case, rows, trials=10, engine=None):
    """Median wall time of the original and rewritten cell; returns (t_original, t_rewritten, ratio)."""
    case = dataclasses.replace(case, spec=dataclasses.replace(case.spec, rows=rows))
    rewritten = _rewrite(case, engine, 10.0)

    def median(source):
        samples = []
        for _ in range(trials):
            ns = _prepared(case)
            start = time.perf_counter()
            oracle.execute(source, ns)
            samples.append(time.perf_counter() - start)
        return statistics.median(samples)

    t_original, t_rewritten = median(case.cell), median(rewritten)
    return t_original, t_rewritten, t_original / t_rewritten if t_rewritten > 0 else float("inf")


def run_suite(rules, seeds, rows, engine=None):
    """Per-rule summaries over random cases and the fallback fixtures."""
    summaries = []
    fallbacks = _cases.fallback_cases()
    for rule in rules:
        summary = {"rule": rule, "seeds": seeds, "rows": rows, "equal": 0, "divergent": 0, "fast_path": 0,
                   "fallback_equal": 0, "fallback_divergent": 0, "failures": []}
        for seed in range(seeds):
            case = _cases.make_case(rule, seed, rows)
            v = check_equivalence(case, engine)
            summary["equal" if v.equal else "divergent"] += 1
            summary["fast_path"] += bool(v.fast_path)
            if not v.equal:
                summary["failures"].append({"case": case.name, "detail": v.detail, "cell": case.cell})
        for case in fallbacks:
            if case.rule != rule:
                continue
            v = check_equivalence(case, engine)
            summary["fallback_equal" if v.equal else "fallback_divergent"] += 1
            if not v.equal:
                summary["failures"].append({"case": case.name, "detail": v.detail, "cell": case.cell})
        summaries.append(summary)
    return summaries


def main(argv=None):
    parser = argparse.ArgumentParser(prog="cellrw-harness")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="check original and rewritten cells for equal behaviour")
    run.add_argument("--rules", default=",".join(_cases.RULES))
    run.add_argument("--seeds", type=int, default=100)
    run.add_argument("--rows", type=int, default=200)
    run.add_argument("--report", choices=("json", "text"), default="text")
    run.add_argument("--engine")
    timing = sub.add_parser("time", help="median timings of original and rewritten cells")
    timing.add_argument("--rules", default=",".join(_cases.RULES))
    timing.add_argument("--rows", type=int, default=1_000_000)
    timing.add_argument("--trials", type=int, default=10)
    timing.add_argument("--seed", type=int, default=0)
    timing.add_argument("--engine")
    args = parser.parse_args(argv)

    rules = [r for r in args.rules.split(",") if r]
    unknown = [r for r in rules if r not in _cases.RULES]
    if unknown:
        parser.error("unknown rule(s): %s" % ", ".join(unknown))
    try:
        _engine.find_engine(args.engine)
    except _engine.EngineError as e:
        print(e, file=sys.stderr)
        return 2

    if args.command == "time":
        for rule in rules:
            case = _cases.make_case(rule, args.seed, args.rows)
            t_o, t_r, ratio = time_pair(case, args.rows, args.trials, args.engine)
            print(json.dumps({"rule": rule, "rows": args.rows, "t_original": t_o, "t_rewritten": t_r, "ratio": ratio}))
        return 0

    summaries = run_suite(rules, args.seeds, args.rows, args.engine)
    failed = False
    for s in summaries:
        failed |= bool(s["divergent"] or s["fallback_divergent"])
        if args.report == "json":
            print(json.dumps(s))
        else:
            print("%-16s %d/%d equal (%d fast path), fallback %d/%d equal" % (
                s["rule"], s["equal"], s["seeds"], s["fast_path"], s["fallback_equal"],
                s["fallback_equal"] + s["fallback_divergent"]))
            for f in s["failures"][:5]:
                print("  %s: %s" % (f["case"], f["detail"]))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
