"""Scenario (YAML), trace (CSV) and event-log (JSON lines) file formats."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable

import yaml

from .classification import Player
from .engine import EvaderConfig, ScenarioConfig, SimEvent, SimTrace, TraceRow
from .errors import InvalidScenario, InvalidSpec
from .strategies import StrategySpec

TRACE_COLUMNS = ("t", "agent_id", "kind", "x", "y", "heading", "status",
                 "assigned_evader", "speed")

_SCALARS = ("capture_radius", "dt", "alloc_period", "max_time", "seed", "tol", "trace_every")


def scenario_to_dict(config: ScenarioConfig) -> dict:
    d = {k: getattr(config, k) for k in _SCALARS if getattr(config, k) is not None}
    d["pursuers"] = [{"id": p.id, "position": [p.position.x, p.position.y], "speed": p.speed}
                     for p in config.pursuers]
    d["evaders"] = [{"id": e.id, "position": [float(e.position[0]), float(e.position[1])],
                     "speed": e.speed, "strategy": e.strategy.to_dict()}
                    for e in config.evaders]
    return d


def scenario_from_dict(d: dict, **overrides) -> ScenarioConfig:
    """Build a validated config; ``overrides`` replace top-level scalars when not None."""
    if not isinstance(d, dict):
        raise InvalidScenario("scenario must be a mapping")
    unknown = set(d) - set(_SCALARS) - {"pursuers", "evaders"}
    if unknown:
        raise InvalidScenario(f"unknown scenario keys: {sorted(unknown)}")
    try:
        pursuers = tuple(Player(p["id"], tuple(p["position"]), float(p["speed"]))
                         for p in d.get("pursuers") or ())
        evaders = []
        for e in d.get("evaders") or ():
            spec = e.get("strategy") or {"kind": "BlindSwitching"}
            evaders.append(EvaderConfig(e["id"], tuple(map(float, e["position"])),
                                        float(e["speed"]), StrategySpec.from_dict(spec)))
        kwargs = {k: d[k] for k in _SCALARS if k in d}
    except (KeyError, TypeError, ValueError, InvalidSpec) as exc:
        raise InvalidScenario(f"malformed scenario: {exc}") from None
    for k, v in overrides.items():
        if v is not None:
            kwargs[k] = v
    return ScenarioConfig(pursuers, tuple(evaders), **kwargs)


def dump_scenario(config: ScenarioConfig) -> str:
    return yaml.safe_dump(scenario_to_dict(config), sort_keys=False, default_flow_style=None)


def parse_scenario(text: str, **overrides) -> ScenarioConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise InvalidScenario(f"scenario is not valid YAML: {exc}") from None
    return scenario_from_dict(data, **overrides)


def load_scenario(path, **overrides) -> ScenarioConfig:
    return parse_scenario(Path(path).read_text(), **overrides)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_trace_csv(rows: Iterable[TraceRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for r in rows:
            w.writerow([_fmt(getattr(r, c)) for c in TRACE_COLUMNS])


def read_trace_csv(path) -> list:
    """Rows back as ``TraceRow``; ids come back as strings."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames[:8]) != TRACE_COLUMNS[:8]:
            raise ValueError(f"{path}: not a trace file (header {reader.fieldnames!r})")
        for n, rec in enumerate(reader, start=2):
            try:
                rows.append(TraceRow(
                    float(rec["t"]), rec["agent_id"], rec["kind"], float(rec["x"]),
                    float(rec["y"]), float(rec["heading"]), rec["status"],
                    rec["assigned_evader"] or None,
                    float(rec["speed"]) if rec.get("speed") else math.nan))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{n}: {exc}") from None
    return rows


def write_events_jsonl(events: Iterable, path) -> None:
    with open(path, "w") as fh:
        for ev in events:
            rec = ev.to_record() if isinstance(ev, SimEvent) else ev
            fh.write(json.dumps(rec, sort_keys=True, default=str) + "\n")


def read_events_jsonl(path) -> list:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def write_run(trace: SimTrace, out_dir) -> dict:
    """Write ``trace.csv`` and ``events.jsonl`` into ``out_dir``; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"trace": out / "trace.csv", "events": out / "events.jsonl"}
    write_trace_csv(trace.rows, paths["trace"])
    write_events_jsonl(trace.events, paths["events"])
    return paths
