"""Active/redundant pursuer classification (Apollonius-circle based Active
Pursuer Check, AAPC) for a single evader.

A pursuer is *active* when its Apollonius circle contributes to the
Apollonius boundary around the evader, i.e. there is some direction in which
the evader would meet that pursuer first.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Optional

from .errors import DegenerateGeometry, InvalidSpeeds, UnknownId
from .geometry import (
    DEGENERACY_TOL,
    GEOM_TOL,
    Circle,
    Point2,
    apollonius_circle,
    as_point,
    circle_circle_intersections,
    distance,
    nearest_capture_point,
    segment_crosses_any,
)


class PursuerStatus(enum.Enum):
    ACTIVE = "Active"
    REDUNDANT = "Redundant"

    def __str__(self):
        return self.value


@dataclass(frozen=True, slots=True)
class Player:
    """Position and constant speed of one pursuer or evader."""

    id: Hashable
    position: Point2
    speed: float

    def __post_init__(self):
        object.__setattr__(self, "position", as_point(self.position))
        if not (math.isfinite(self.speed) and self.speed > 0.0):
            raise ValueError(f"speed of {self.id!r} must be positive, got {self.speed!r}")


@dataclass(frozen=True)
class MpseSnapshot:
    """Instantaneous multi-pursuer single-evader configuration."""

    pursuers: tuple[Player, ...]
    evader: Player

    def __post_init__(self):
        object.__setattr__(self, "pursuers", tuple(self.pursuers))
        if not self.pursuers:
            raise ValueError("snapshot needs at least one pursuer")
        ids = [p.id for p in self.pursuers]
        if len(set(ids)) != len(ids):
            raise ValueError(f"pursuer ids must be unique, got {ids!r}")
        slowest = min(p.speed for p in self.pursuers)
        if slowest <= self.evader.speed:
            raise InvalidSpeeds(
                f"every pursuer must be faster than the evader "
                f"(min u={slowest!r}, v={self.evader.speed!r})")
        for p in self.pursuers:
            if distance(p.position, self.evader.position) < DEGENERACY_TOL:
                raise DegenerateGeometry(f"pursuer {p.id!r} coincides with the evader")

    @classmethod
    def build(cls, pursuers: Iterable, evader, evader_speed: Optional[float] = None):
        """Convenience constructor from ``(id, (x, y), u)`` triples.

        ``evader`` is either a ``Player`` or an ``(x, y)`` pair together with
        ``evader_speed``.
        """
        ps = tuple(p if isinstance(p, Player) else Player(*p) for p in pursuers)
        if not isinstance(evader, Player):
            evader = Player("E", evader, evader_speed)
        return cls(ps, evader)

    def pursuer(self, pid) -> Player:
        for p in self.pursuers:
            if p.id == pid:
                return p
        raise UnknownId(pid)


def apollonius_circles(snapshot: MpseSnapshot) -> dict:
    e = snapshot.evader
    return {p.id: apollonius_circle(p.position, e.position, p.speed, e.speed)
            for p in snapshot.pursuers}


class _Aapc:
    """Shared state for classifying every pursuer of one snapshot.

    Pairwise circle intersections are computed lazily and cached so that
    ``active_set`` does not repeat work across pursuers.
    """

    def __init__(self, snapshot: MpseSnapshot, tol: float):
        self.snapshot = snapshot
        self.tol = tol
        self.e = snapshot.evader.position
        self.ids = [p.id for p in snapshot.pursuers]
        self.circles = [apollonius_circle(p.position, self.e, p.speed, snapshot.evader.speed)
                        for p in snapshot.pursuers]
        self._pairs: dict = {}

    def intersections(self, i: int, j: int):
        key = (i, j) if i < j else (j, i)
        pts = self._pairs.get(key)
        if pts is None:
            pts = circle_circle_intersections(self.circles[key[0]], self.circles[key[1]], self.tol)
            self._pairs[key] = pts
        return pts

    def status(self, i: int) -> PursuerStatus:
        n = len(self.circles)
        circles = self.circles
        intersected = False
        for j in range(n):
            if j == i:
                continue
            points = self.intersections(i, j)
            if not points:
                continue
            intersected = True
            occluders = [circles[k] for k in range(n) if k != i and k != j]
            for x in points:
                if distance(x, self.e) <= self.tol:
                    continue
                if not segment_crosses_any(self.e, x, occluders, self.tol):
                    return PursuerStatus.ACTIVE
        if intersected:
            return PursuerStatus.REDUNDANT
        p = self.snapshot.pursuers[i]
        t_point, _ = nearest_capture_point(p.position, self.e, p.speed, self.snapshot.evader.speed)
        others = [circles[j] for j in range(n) if j != i]
        if segment_crosses_any(self.e, t_point, others, self.tol):
            return PursuerStatus.REDUNDANT
        return PursuerStatus.ACTIVE


def classify_pursuer(snapshot: MpseSnapshot, pid, tol: float = GEOM_TOL) -> PursuerStatus:
    """Active/redundant status of pursuer ``pid`` against the snapshot's evader.

    If the pursuer's circle meets any other circle, it is active iff one of
    those intersection points is visible from the evader (no third circle
    crossed on the way). Otherwise it is active iff the segment from the
    evader to the head-on capture point crosses no other circle.
    """
    try:
        i = [p.id for p in snapshot.pursuers].index(pid)
    except ValueError:
        raise UnknownId(pid) from None
    return _Aapc(snapshot, tol).status(i)


def classify_all(snapshot: MpseSnapshot, tol: float = GEOM_TOL) -> dict:
    aapc = _Aapc(snapshot, tol)
    return {pid: aapc.status(i) for i, pid in enumerate(aapc.ids)}


def active_set(snapshot: MpseSnapshot, tol: float = GEOM_TOL) -> frozenset:
    """Ids of every pursuer classified active for the snapshot's evader."""
    return frozenset(pid for pid, s in classify_all(snapshot, tol).items()
                     if s is PursuerStatus.ACTIVE)
