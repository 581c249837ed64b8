import math
from pathlib import Path

import pytest

from apollonius.engine import run
from apollonius.errors import InvalidScenario
from apollonius.scenarios import random_mpme_config
from apollonius.serialization import (
    TRACE_COLUMNS,
    dump_scenario,
    load_scenario,
    parse_scenario,
    read_events_jsonl,
    read_trace_csv,
    scenario_from_dict,
    scenario_to_dict,
    write_run,
)
from apollonius.strategies import StrategySpec

DOCS = Path(__file__).resolve().parent.parent / "docs"


@pytest.mark.parametrize("name", ["scenario_1v1.yaml", "scenario_mpse.yaml", "scenario_mpme.yaml"])
def test_shipped_scenarios_round_trip(name):
    config = load_scenario(DOCS / name)
    assert parse_scenario(dump_scenario(config)) == config


@pytest.mark.parametrize("seed", range(5))
def test_random_round_trip(seed):
    config = random_mpme_config(seed, strategy=StrategySpec.blind(seed=seed, switch_times=(0.5, 1.5)),
                                dt=0.01, trace_every=3)
    assert scenario_from_dict(scenario_to_dict(config)) == config
    assert parse_scenario(dump_scenario(config)) == config


def test_overrides():
    config = load_scenario(DOCS / "scenario_1v1.yaml", dt=0.01, seed=None, max_time=3.0)
    assert config.dt == 0.01 and config.max_time == 3.0 and config.seed == 0


@pytest.mark.parametrize("text", [
    "pursuers: [",
    "- just\n- a list",
    "colour: red\npursuers: []\nevaders: []",
    "pursuers:\n  - {id: P1, speed: 1.0}\n",
    "pursuers:\n  - {id: P1, position: [0, 0], speed: 1.0}\n"
    "evaders:\n  - {id: E1, position: [1, 0], speed: 0.5, strategy: {kind: Teleport}}\n",
    "pursuers:\n  - {id: P1, position: [0, 0], speed: 0.4}\n"
    "evaders:\n  - {id: E1, position: [1, 0], speed: 0.5}\n",
])
def test_bad_scenarios(text):
    with pytest.raises(InvalidScenario):
        parse_scenario(text)


def test_trace_and_events_round_trip(tmp_path):
    trace = run(random_mpme_config(4, dt=0.02, max_time=60))
    paths = write_run(trace, tmp_path)
    header = paths["trace"].read_text().splitlines()[0]
    assert tuple(header.split(",")) == TRACE_COLUMNS
    rows = read_trace_csv(paths["trace"])
    assert len(rows) == len(trace.rows)
    for a, b in zip(rows, trace.rows):
        # floats are written with repr, so they come back exactly
        assert (a.t, a.x, a.y, a.heading, a.speed) == (b.t, b.x, b.y, b.heading, b.speed)
        assert a.agent_id == str(b.agent_id) and a.status == b.status
        assert a.assigned_evader == (None if b.assigned_evader is None else str(b.assigned_evader))
    events = read_events_jsonl(paths["events"])
    assert [e["kind"] for e in events] == [e.kind for e in trace.events]
    assert all(set(e) >= {"t", "kind", "ids"} for e in events)


def test_read_trace_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError):
        read_trace_csv(bad)
    bad.write_text(",".join(TRACE_COLUMNS) + "\n0.0,P1,pursuer,x,0,0,Active,,1.0\n")
    with pytest.raises(ValueError, match=":2:"):
        read_trace_csv(bad)


def test_trace_without_speed_column(tmp_path):
    f = tmp_path / "t.csv"
    f.write_text(",".join(TRACE_COLUMNS[:8]) + "\n0.5,P1,pursuer,1.0,2.0,0.0,Active,E1\n")
    (row,) = read_trace_csv(f)
    assert row.assigned_evader == "E1" and math.isnan(row.speed)
