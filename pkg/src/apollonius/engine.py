"""Deterministic fixed-step simulation of the pursuit-evasion game.

Each step runs, in order: capture detection, A2 allocation (on allocation
epochs), evader heading selection, constant-bearing heading updates for the
assigned pursuers, straight-line propagation and the clock update. Pursuers
with no evader hold position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Hashable, Optional

from .allocation import (
    AllocationMaps,
    MpmeSnapshot,
    a2_run,
    current_shortest_time,
)
from .classification import MpseSnapshot, Player
from .errors import (
    InvalidScenario,
    MaxTimeExceeded,
    SimulationComplete,
)
from .geometry import GEOM_TOL, Point2, as_point, distance
from .kinematics import AgentState, advance, cb_heading, relative_state
from .strategies import StrategyKind, StrategySpec, derive_seed, evader_heading

ACTIVE = "Active"
REDUNDANT = "Redundant"
UNASSIGNED = "Unassigned"
FREE = "Free"
CAPTURED = "Captured"

CAPTURE = "Capture"
ASSIGNMENT_CHANGE = "AssignmentChange"
HEADING_SWITCH = "HeadingSwitch"
STATUS_CHANGE = "StatusChange"


@dataclass(frozen=True)
class EvaderConfig:
    id: Hashable
    position: Point2
    speed: float
    strategy: StrategySpec = field(default_factory=lambda: StrategySpec.blind())

    def __post_init__(self):
        object.__setattr__(self, "position", as_point(self.position))


@dataclass(frozen=True)
class ScenarioConfig:
    pursuers: tuple[Player, ...]
    evaders: tuple[EvaderConfig, ...]
    capture_radius: float = 0.1
    dt: float = 1e-3
    alloc_period: int = 1
    max_time: float = 100.0
    seed: int = 0
    tol: float = GEOM_TOL
    trace_every: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "pursuers", tuple(self.pursuers))
        object.__setattr__(self, "evaders", tuple(self.evaders))
        self.validate()

    def validate(self) -> None:
        if not self.pursuers:
            raise InvalidScenario("scenario needs at least one pursuer")
        ids = [p.id for p in self.pursuers] + [e.id for e in self.evaders]
        if len(set(ids)) != len(ids):
            raise InvalidScenario(f"agent ids must be unique across pursuers and evaders: {ids!r}")
        for e in self.evaders:
            if not (math.isfinite(e.speed) and e.speed > 0.0):
                raise InvalidScenario(f"evader {e.id!r} needs a positive speed")
        if self.evaders:
            u = min(p.speed for p in self.pursuers)
            v = max(e.speed for e in self.evaders)
            if not u > v:
                raise InvalidScenario(
                    f"A1 violated: slowest pursuer speed {u!r} must exceed fastest evader speed {v!r}")
        if not (self.capture_radius > 0.0 and math.isfinite(self.capture_radius)):
            raise InvalidScenario("capture_radius must be positive")
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise InvalidScenario("dt must be positive")
        if not (self.max_time > 0.0):
            raise InvalidScenario("max_time must be positive")
        if int(self.alloc_period) != self.alloc_period or self.alloc_period < 1:
            raise InvalidScenario("alloc_period must be an integer >= 1")
        if self.trace_every is not None and self.trace_every < 1:
            raise InvalidScenario("trace_every must be >= 1")

    @property
    def decimation(self) -> int:
        if self.trace_every is not None:
            return int(self.trace_every)
        return 1 if len(self.pursuers) + len(self.evaders) <= 20 else 10


@dataclass(frozen=True)
class PursuerRecord:
    id: Hashable
    state: AgentState
    status: str = UNASSIGNED
    target: Optional[Hashable] = None
    moving: bool = False


@dataclass(frozen=True)
class EvaderRecord:
    id: Hashable
    state: AgentState
    strategy: StrategySpec
    captured: bool = False
    capture_time: Optional[float] = None
    captured_by: frozenset = frozenset()


@dataclass(frozen=True)
class WorldState:
    t: float
    step_index: int
    pursuers: tuple[PursuerRecord, ...]
    evaders: tuple[EvaderRecord, ...]
    allocation: Optional[AllocationMaps] = None
    previous_positions: Optional[dict] = None

    @property
    def free_evaders(self) -> tuple[EvaderRecord, ...]:
        return tuple(e for e in self.evaders if not e.captured)

    @property
    def done(self) -> bool:
        return all(e.captured for e in self.evaders)

    def mpme_snapshot(self) -> MpmeSnapshot:
        return MpmeSnapshot(
            tuple(Player(p.id, p.state.position, p.state.speed) for p in self.pursuers),
            tuple(Player(e.id, e.state.position, e.state.speed) for e in self.free_evaders),
            frozenset(e.id for e in self.evaders if e.captured),
        )


@dataclass(frozen=True)
class SimEvent:
    t: float
    kind: str
    ids: tuple
    data: Optional[dict] = None

    def to_record(self) -> dict:
        rec = {"t": self.t, "kind": self.kind, "ids": list(self.ids)}
        if self.data:
            rec["data"] = self.data
        return rec


@dataclass(frozen=True)
class TraceRow:
    t: float
    agent_id: Hashable
    kind: str
    x: float
    y: float
    heading: float
    status: str
    assigned_evader: Optional[Hashable]
    speed: float


@dataclass
class SimTrace:
    config: ScenarioConfig
    rows: list = field(default_factory=list)
    events: list = field(default_factory=list)
    cst_log: list = field(default_factory=list)
    final_state: Optional[WorldState] = None

    @property
    def captures(self) -> dict:
        """Evader id -> ``(capture_time, capturing pursuer ids)``."""
        if self.final_state is None:
            return {}
        return {e.id: (e.capture_time, e.captured_by)
                for e in self.final_state.evaders if e.captured}

    @property
    def completed(self) -> bool:
        return self.final_state is not None and self.final_state.done


def initial_state(config: ScenarioConfig) -> WorldState:
    pursuers = tuple(PursuerRecord(p.id, AgentState(p.position, p.speed, 0.0))
                     for p in config.pursuers)
    evaders = []
    for k, e in enumerate(config.evaders):
        strategy = e.strategy
        if strategy.kind is StrategyKind.BLIND_SWITCHING and strategy.rng_seed is None:
            strategy = replace(strategy, rng_seed=derive_seed(config.seed, k))
        evaders.append(EvaderRecord(e.id, AgentState(e.position, e.speed, 0.0), strategy))
    return WorldState(0.0, 0, pursuers, tuple(evaders))


def detect_captures(state: WorldState, epsilon: float) -> set:
    """All ``(pursuer, evader)`` pairs with range ``<= epsilon`` on free evaders."""
    hits = set()
    for e in state.evaders:
        if e.captured:
            continue
        for p in state.pursuers:
            if distance(p.state.position, e.state.position) <= epsilon:
                hits.add((p.id, e.id))
    return hits


def _refine_capture_time(state: WorldState, pids, eid, epsilon: float, dt: float) -> float:
    """Linear interpolation of the range crossing ``epsilon`` within the last step."""
    prev = state.previous_positions
    if prev is None:
        return state.t
    e_now = next(e for e in state.evaders if e.id == eid).state.position
    best = state.t
    for pid in pids:
        p_now = next(p for p in state.pursuers if p.id == pid).state.position
        r_now = distance(p_now, e_now)
        r_prev = distance(prev[pid], prev[eid])
        if r_prev > epsilon and r_prev > r_now:
            frac = (r_prev - epsilon) / (r_prev - r_now)
            best = min(best, state.t - dt + frac * dt)
    return best


def _apply_captures(state: WorldState, config: ScenarioConfig, events: list) -> WorldState:
    hits = detect_captures(state, config.capture_radius)
    if not hits:
        return state
    by_evader: dict = {}
    for pid, eid in hits:
        by_evader.setdefault(eid, set()).add(pid)
    captured = []
    evaders = []
    for e in state.evaders:
        if e.id in by_evader:
            pids = frozenset(by_evader[e.id])
            tc = _refine_capture_time(state, pids, e.id, config.capture_radius, config.dt)
            e = replace(e, captured=True, capture_time=tc, captured_by=pids)
            captured.append(e)
        evaders.append(e)
    for e in sorted(captured, key=lambda e: (e.capture_time, str(e.id))):
        events.append(SimEvent(e.capture_time, CAPTURE,
                               (e.id,) + tuple(sorted(e.captured_by, key=str))))
    return replace(state, evaders=tuple(evaders))


def _allocate(state: WorldState, config: ScenarioConfig, events: list) -> WorldState:
    if not state.free_evaders:
        pursuers = tuple(replace(p, status=UNASSIGNED, target=None, moving=False)
                         for p in state.pursuers)
        return replace(state, pursuers=pursuers, allocation=None)
    free = {e.id for e in state.free_evaders}
    if state.step_index % config.alloc_period == 0:
        result = a2_run(state.mpme_snapshot(), tol=config.tol)
        final, initial = result.final, result.initial
        targets = {p.id: final.target_of(p.id) for p in state.pursuers}
        statuses = {}
        for p in state.pursuers:
            if targets[p.id] is not None:
                statuses[p.id] = ACTIVE
            elif p.id in initial.assigned:
                statuses[p.id] = UNASSIGNED
            else:
                statuses[p.id] = REDUNDANT
        allocation = final
    else:
        # between epochs keep the previous assignment, minus captured evaders
        targets = {p.id: p.target if p.target in free else None for p in state.pursuers}
        statuses = {p.id: p.status if targets[p.id] is not None or p.status != ACTIVE
                    else UNASSIGNED for p in state.pursuers}
        allocation = state.allocation
    pursuers = []
    for p in state.pursuers:
        new_target, new_status = targets[p.id], statuses[p.id]
        if new_status != p.status:
            events.append(SimEvent(state.t, STATUS_CHANGE, (p.id,),
                                   {"from": p.status, "to": new_status}))
        if new_target != p.target:
            events.append(SimEvent(state.t, ASSIGNMENT_CHANGE, (p.id,),
                                   {"from": p.target, "to": new_target}))
        pursuers.append(replace(p, status=new_status, target=new_target))
    return replace(state, pursuers=tuple(pursuers), allocation=allocation)


def _steer(state: WorldState, events: list) -> WorldState:
    pursuer_players = tuple(Player(p.id, p.state.position, p.state.speed) for p in state.pursuers)
    evaders = []
    for e in state.evaders:
        if not e.captured:
            snap = None
            if e.strategy.kind in (StrategyKind.HEAD_ON_NEAREST, StrategyKind.FLEE_NEAREST):
                snap = MpseSnapshot(pursuer_players, Player(e.id, e.state.position, e.state.speed))
            heading = evader_heading(e.strategy, state.t, snap)
            if (e.strategy.kind is StrategyKind.BLIND_SWITCHING and state.step_index > 0
                    and heading != e.state.heading):
                events.append(SimEvent(state.t, HEADING_SWITCH, (e.id,), {"heading": heading}))
            e = replace(e, state=e.state.with_heading(heading))
        evaders.append(e)
    by_id = {e.id: e for e in evaders}
    pursuers = []
    for p in state.pursuers:
        target = by_id.get(p.target) if p.target is not None else None
        if target is None or target.captured:
            pursuers.append(replace(p, moving=False))
            continue
        los = relative_state(p.state, target.state).los_angle
        heading = cb_heading(target.state.heading, los, target.state.speed / p.state.speed)
        pursuers.append(replace(p, state=p.state.with_heading(heading), moving=True))
    return replace(state, pursuers=tuple(pursuers), evaders=tuple(evaders))


def decide(state: WorldState, config: ScenarioConfig) -> tuple[WorldState, list]:
    """Phases 1-4 of a step: captures, allocation and heading selection.

    The returned state still sits at time ``state.t``; its headings and
    statuses are those that will be applied over the next ``dt``.
    """
    if state.done:
        raise SimulationComplete("every evader has already been captured")
    events: list = []
    state = _apply_captures(state, config, events)
    state = _allocate(state, config, events)
    if not state.done:
        state = _steer(state, events)
    return state, events


def move(state: WorldState, config: ScenarioConfig) -> WorldState:
    """Phases 5-6: propagate every moving agent by ``dt`` and advance the clock."""
    if state.done:
        raise SimulationComplete("every evader has already been captured")
    next_index = state.step_index + 1
    t_next = next_index * config.dt
    if t_next > config.max_time * (1.0 + 1e-12):
        raise MaxTimeExceeded(
            f"max_time={config.max_time} reached with "
            f"{len(state.free_evaders)} evader(s) still free")
    prev = {p.id: p.state.position for p in state.pursuers}
    prev.update({e.id: e.state.position for e in state.evaders})
    pursuers = tuple(replace(p, state=advance(p.state, config.dt)) if p.moving else p
                     for p in state.pursuers)
    evaders = tuple(e if e.captured else replace(e, state=advance(e.state, config.dt))
                    for e in state.evaders)
    return replace(state, t=t_next, step_index=next_index, pursuers=pursuers,
                   evaders=evaders, previous_positions=prev)


def step(state: WorldState, config: ScenarioConfig) -> tuple[WorldState, list]:
    """Advance the world by one timestep, returning the new state and its events.

    If the capture phase removes the last free evader, the state is returned
    at the same time without motion.
    """
    state, events = decide(state, config)
    if state.done:
        return state, events
    return move(state, config), events


def _rows(state: WorldState) -> list:
    rows = []
    for p in state.pursuers:
        s = p.state
        rows.append(TraceRow(state.t, p.id, "pursuer", s.position.x, s.position.y,
                             s.heading, p.status, p.target, s.speed))
    for e in state.evaders:
        s = e.state
        rows.append(TraceRow(state.t, e.id, "evader", s.position.x, s.position.y,
                             s.heading, CAPTURED if e.captured else FREE, None, s.speed))
    return rows


def run(config: ScenarioConfig,
        observer: Optional[Callable[[WorldState, list], None]] = None) -> SimTrace:
    """Simulate until every evader is captured.

    ``observer`` is called with each decided state (positions at ``t`` plus
    the headings and statuses applied from ``t``) and that step's events.
    Raises ``MaxTimeExceeded`` (carrying the partial trace) when the clock
    runs out first.
    """
    trace = SimTrace(config)
    state = initial_state(config)
    if state.done:
        trace.final_state = state
        return trace
    every = config.decimation
    while True:
        state, events = decide(state, config)
        trace.events.extend(events)
        if state.free_evaders:
            cst = current_shortest_time(state.mpme_snapshot())
            trace.cst_log.append((state.t, cst.t_s, cst.pair))
        if observer is not None:
            observer(state, events)
        if state.done or state.step_index % every == 0:
            trace.rows.extend(_rows(state))
        if state.done:
            break
        try:
            state = move(state, config)
        except MaxTimeExceeded as exc:
            if state.step_index % every != 0:
                trace.rows.extend(_rows(state))
            trace.final_state = state
            exc.trace = trace
            raise
    trace.final_state = state
    return trace
