"""Command-line front end.

Verbs: ``run``, ``oracle``, ``render`` and ``validate``. Exit codes are 0 on
success, 1 for validation or oracle failures, 2 for usage errors and 3 for
I/O errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import oracle
from .allocation import MpmeSnapshot
from .classification import Player
from .errors import ApolloniusError, MaxTimeExceeded, ValidationFailure
from .engine import run as run_engine
from .render import render_trace
from .serialization import (
    load_scenario,
    read_trace_csv,
    write_events_jsonl,
    write_run,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("apollonius")


def _n_headings(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 4:
        raise argparse.ArgumentTypeError("n-headings must be at least 4")
    return n


def _positive(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _seed_range(text: str) -> range:
    try:
        a, b = (int(x) for x in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError("expected a..b, e.g. 0..9") from None
    if b < a:
        raise argparse.ArgumentTypeError("empty seed range")
    return range(a, b + 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apollonius",
        description="Apollonius-circle pursuer allocation: simulate, validate and plot.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    def scenario_args(p):
        p.add_argument("scenario", help="scenario YAML file")
        p.add_argument("--dt", type=_positive)
        p.add_argument("--seed", type=int)
        p.add_argument("--alloc-period", type=int)
        p.add_argument("--max-time", type=_positive)

    p = sub.add_parser("run", help="simulate a scenario and write trace.csv / events.jsonl")
    scenario_args(p)
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--seeds", type=_seed_range,
                   help="batch mode: run every seed in a..b into OUT/seed_<n>")

    p = sub.add_parser("oracle", help="brute-force check of the classification and CST slope")
    scenario_args(p)
    p.add_argument("--out", default="out", help="output directory for oracle.jsonl")
    p.add_argument("--n-headings", type=_n_headings, default=oracle.DEFAULT_HEADINGS)
    p.add_argument("--oracle-dt", type=_positive, default=oracle.DEFAULT_DT)

    p = sub.add_parser("render", help="plot a trace as SVG snapshots and trajectories")
    p.add_argument("trace", help="trace.csv written by `run`")
    p.add_argument("--out", default=None, help="output directory (default: next to the trace)")
    p.add_argument("--at", default="0", help="comma-separated times: numbers, start, mid, end")
    p.add_argument("--voronoi", action="store_true", help="overlay the evader Voronoi partition")

    p = sub.add_parser("validate", help="parse and validate a scenario file")
    scenario_args(p)
    return parser


def _overrides(args) -> dict:
    return {"dt": args.dt, "seed": args.seed, "alloc_period": args.alloc_period,
            "max_time": args.max_time}


def _fail(code: int, kind: str, message: str, **extra) -> int:
    print(json.dumps({"error": kind, "message": message, **extra}, default=str), file=sys.stderr)
    return code


def _summary(trace) -> list:
    lines = []
    for e in trace.config.evaders:
        if e.id in trace.captures:
            tc, by = trace.captures[e.id]
            lines.append(f"{e.id}: captured at t={tc:.4f} by {{{', '.join(sorted(map(str, by)))}}}")
        else:
            lines.append(f"{e.id}: free")
    return lines


def _run_one(config, out_dir) -> tuple:
    try:
        trace = run_engine(config)
        ok = True
    except MaxTimeExceeded as exc:
        trace, ok = exc.trace, False
    write_run(trace, out_dir)
    return ok, _summary(trace)


def cmd_run(args) -> int:
    config = load_scenario(args.scenario, **_overrides(args))
    if args.seeds is None:
        ok, lines = _run_one(config, args.out)
        print("\n".join(lines))
        if not ok:
            return _fail(EXIT_FAIL, "MaxTimeExceeded",
                         f"max_time={config.max_time} reached before all evaders were captured")
        return EXIT_OK
    out = Path(args.out)
    jobs = [(dataclasses.replace(config, seed=s), out / f"seed_{s}") for s in args.seeds]
    with ProcessPoolExecutor() as pool:
        results = list(pool.map(_run_one, *zip(*jobs)))
    status = EXIT_OK
    for (cfg, _), (ok, lines) in zip(jobs, results):
        print(f"[seed {cfg.seed}]")
        print("\n".join(lines))
        if not ok:
            status = EXIT_FAIL
    return status


def cmd_oracle(args) -> int:
    config = load_scenario(args.scenario, **_overrides(args))
    if not config.evaders:
        print("no evaders: nothing to check")
        return EXIT_OK
    snap = MpmeSnapshot(config.pursuers,
                        tuple(Player(e.id, e.position, e.speed) for e in config.evaders))
    records = []
    failure = None
    for e in snap.evaders_free:
        report = oracle.validate_active_classification(
            snap.sub_snapshot(e.id), args.n_headings, args.oracle_dt, raise_on_failure=False)
        for rec in report.to_records():
            rec["ids"] = [e.id] + rec["ids"]
            records.append(rec)
        status = "ok" if report.passed else "FAIL"
        print(f"{e.id}: active={sorted(map(str, report.active))} "
              f"winners={sorted(map(str, report.winner_ids))} [{status}]")
        if not report.passed and failure is None:
            failure = {"evader": e.id, **report.violations[0]}
    try:
        slope = oracle.cst_slope_probe(config, raise_on_failure=False)
    except MaxTimeExceeded as exc:
        return _fail(EXIT_FAIL, "MaxTimeExceeded", str(exc))
    records.extend(slope.to_records())
    print(f"CST slope: max excess over bound {slope.max_excess:.3e} "
          f"[{'ok' if slope.passed else 'FAIL'}]")
    if not slope.passed and failure is None:
        failure = slope.violations[0]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_events_jsonl(records, out / "oracle.jsonl")
    if failure is not None:
        return _fail(EXIT_FAIL, "ValidationFailure", "oracle found a counterexample",
                     counterexample=failure)
    return EXIT_OK


def cmd_render(args) -> int:
    trace_path = Path(args.trace)
    try:
        rows = read_trace_csv(trace_path)
    except ValueError as exc:
        return _fail(EXIT_FAIL, "MalformedTrace", str(exc))
    if not rows:
        return _fail(EXIT_FAIL, "MalformedTrace", f"{trace_path}: no rows")
    out = Path(args.out) if args.out else trace_path.parent
    for path in render_trace(rows, out, at=args.at.split(","), voronoi=args.voronoi):
        print(path)
    return EXIT_OK


def cmd_validate(args) -> int:
    config = load_scenario(args.scenario, **_overrides(args))
    print(f"ok: {len(config.pursuers)} pursuer(s), {len(config.evaders)} evader(s)")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "oracle": cmd_oracle, "render": cmd_render, "validate": cmd_validate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.verb](args)
    except OSError as exc:
        return _fail(EXIT_IO, type(exc).__name__, str(exc))
    except ValidationFailure as exc:
        return _fail(EXIT_FAIL, "ValidationFailure", str(exc), counterexample=exc.counterexample)
    except (ApolloniusError, ValueError) as exc:
        return _fail(EXIT_FAIL, type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
