"""Apollonius Allocation (A2): dynamic pursuer-to-evader assignment for the
multi-pursuer multi-evader game, and the current shortest time (CST).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Optional

from .classification import MpseSnapshot, Player, active_set
from .errors import EmptyEvaderSet, InvalidSpeeds, IterationLimitExceeded
from .geometry import GEOM_TOL, distance

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MpmeSnapshot:
    pursuers: tuple[Player, ...]
    evaders_free: tuple[Player, ...]
    evaders_captured: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "pursuers", tuple(self.pursuers))
        object.__setattr__(self, "evaders_free", tuple(self.evaders_free))
        object.__setattr__(self, "evaders_captured", frozenset(self.evaders_captured))
        pids = [p.id for p in self.pursuers]
        eids = [e.id for e in self.evaders_free]
        if len(set(pids)) != len(pids) or len(set(eids)) != len(eids):
            raise ValueError("pursuer and evader ids must be unique")
        if self.evaders_captured & set(eids):
            raise ValueError("an evader cannot be both free and captured")
        if self.pursuers and self.evaders_free:
            u = min(p.speed for p in self.pursuers)
            v = max(e.speed for e in self.evaders_free)
            if u <= v:
                raise InvalidSpeeds(f"slowest pursuer ({u!r}) must outrun fastest evader ({v!r})")

    @classmethod
    def build(cls, pursuers: Iterable, evaders: Iterable, captured: Iterable = ()):
        """Construct from ``(id, (x, y), speed)`` triples."""
        ps = tuple(p if isinstance(p, Player) else Player(*p) for p in pursuers)
        es = tuple(e if isinstance(e, Player) else Player(*e) for e in evaders)
        return cls(ps, es, frozenset(captured))

    def evader(self, eid) -> Player:
        for e in self.evaders_free:
            if e.id == eid:
                return e
        raise KeyError(eid)

    def sub_snapshot(self, eid, pursuer_ids: Optional[Iterable] = None) -> MpseSnapshot:
        """Single-evader view, optionally restricted to a subset of pursuers."""
        if pursuer_ids is None:
            ps = self.pursuers
        else:
            keep = set(pursuer_ids)
            ps = tuple(p for p in self.pursuers if p.id in keep)
        return MpseSnapshot(ps, self.evader(eid))


@dataclass(frozen=True)
class AllocationMaps:
    """Evader -> pursuer-set map together with its derived views.

    ``dual`` is the transpose of ``assign``; ``assigned`` / ``unassigned``
    partition the pursuer ids.
    """

    assign: Mapping[Hashable, frozenset]
    dual: Mapping[Hashable, frozenset]
    assigned: frozenset
    unassigned: frozenset

    @classmethod
    def from_assign(cls, assign: Mapping, pursuer_ids: Iterable) -> "AllocationMaps":
        pursuer_ids = list(pursuer_ids)
        assign = {j: frozenset(s) for j, s in assign.items()}
        dual = {i: set() for i in pursuer_ids}
        for j, ps in assign.items():
            for i in ps:
                dual[i].add(j)
        dual = {i: frozenset(js) for i, js in dual.items()}
        assigned = frozenset(i for i, js in dual.items() if js)
        return cls(assign, dual, assigned, frozenset(pursuer_ids) - assigned)

    @property
    def is_final(self) -> bool:
        return all(len(js) <= 1 for js in self.dual.values())

    def target_of(self, pid):
        """The single evader a pursuer is assigned to, or ``None``."""
        js = self.dual.get(pid, ())
        return next(iter(js)) if len(js) == 1 else None


@dataclass(frozen=True)
class CstRecord:
    t_s: float
    pair: tuple


def capture_time_metric(p: Player, e: Player) -> float:
    """Head-on meeting time ``|p - e| / (u + v)``."""
    return distance(p.position, e.position) / (p.speed + e.speed)


def _sort_key(x):
    # ids may be ints or strings; keep ordering total and deterministic
    return (str(type(x).__name__), x)


def current_shortest_time(snapshot: MpmeSnapshot) -> CstRecord:
    """Smallest head-on capture time over all pursuer/free-evader pairs.

    Ties are resolved by the lexicographically smallest ``(pursuer, evader)``.
    """
    if not snapshot.evaders_free:
        raise EmptyEvaderSet("no free evaders")
    best = None
    for p in snapshot.pursuers:
        for e in snapshot.evaders_free:
            key = (capture_time_metric(p, e), _sort_key(p.id), _sort_key(e.id))
            if best is None or key < best[0]:
                best = (key, (p.id, e.id))
    return CstRecord(best[0][0], best[1])


def _pids(snapshot):
    return [p.id for p in snapshot.pursuers]


def initial_allocation(snapshot: MpmeSnapshot, tol: float = GEOM_TOL) -> AllocationMaps:
    """Map every free evader to its active pursuers among all pursuers."""
    if not snapshot.evaders_free:
        raise EmptyEvaderSet("no free evaders")
    assign = {e.id: active_set(snapshot.sub_snapshot(e.id), tol) for e in snapshot.evaders_free}
    return AllocationMaps.from_assign(assign, _pids(snapshot))


def tie_break(maps: AllocationMaps, snapshot: MpmeSnapshot) -> AllocationMaps:
    """Keep each multiply-assigned pursuer only on its quickest-to-capture evader.

    Metric ties go to the evader with the lowest id.
    """
    pursuers = {p.id: p for p in snapshot.pursuers}
    evaders = {e.id: e for e in snapshot.evaders_free}
    keep = {}
    for i, js in maps.dual.items():
        if len(js) > 1:
            p = pursuers[i]
            keep[i] = min(js, key=lambda j: (capture_time_metric(p, evaders[j]), _sort_key(j)))
    assign = {j: frozenset(i for i in ps if i not in keep or keep[i] == j)
              for j, ps in maps.assign.items()}
    return AllocationMaps.from_assign(assign, maps.dual.keys())


def reconsider_unassigned(g_maps: AllocationMaps, snapshot: MpmeSnapshot,
                          unassigned: Optional[Iterable] = None,
                          tol: float = GEOM_TOL) -> AllocationMaps:
    """Recompute each evader's active set over its kept pursuers plus the idle ones.

    ``unassigned`` is the idle pool; it defaults to the pursuers that
    ``g_maps`` leaves without an evader.
    """
    pool = g_maps.unassigned if unassigned is None else frozenset(unassigned)
    assign = {}
    for e in snapshot.evaders_free:
        candidates = g_maps.assign.get(e.id, frozenset()) | pool
        if candidates:
            assign[e.id] = active_set(snapshot.sub_snapshot(e.id, candidates), tol)
        else:
            assign[e.id] = frozenset()
    return AllocationMaps.from_assign(assign, _pids(snapshot))


@dataclass(frozen=True)
class A2Result:
    initial: AllocationMaps
    final: AllocationMaps
    passes: int


def a2_run(snapshot: MpmeSnapshot, tol: float = GEOM_TOL,
           max_iter: Optional[int] = None) -> A2Result:
    """A2 with its intermediate products; see ``a2_allocate``."""
    initial = maps = initial_allocation(snapshot, tol)
    cap = max(len(snapshot.pursuers), 1) if max_iter is None else max_iter
    passes = 0
    while not maps.is_final:
        if passes >= cap:
            log.error("A2 did not settle after %d passes; snapshot=%r", passes, snapshot)
            raise IterationLimitExceeded(f"A2 did not settle after {passes} passes", snapshot)
        idle = maps.unassigned
        g_maps = tie_break(maps, snapshot)
        maps = reconsider_unassigned(g_maps, snapshot, unassigned=idle, tol=tol)
        passes += 1
    return A2Result(initial, maps, passes)


def a2_allocate(snapshot: MpmeSnapshot, tol: float = GEOM_TOL,
                max_iter: Optional[int] = None) -> AllocationMaps:
    """Run A2 to its final allocation, where no pursuer serves two evaders.

    Alternates the minimum-time tie-break with a reconsideration of the idle
    pursuers until the allocation is final. Gives up after ``max_iter``
    passes (default: number of pursuers) with ``IterationLimitExceeded``.
    """
    return a2_run(snapshot, tol, max_iter).final
