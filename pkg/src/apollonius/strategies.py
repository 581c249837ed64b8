"""Evader heading policies."""

from __future__ import annotations

import bisect
import enum
import functools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .classification import MpseSnapshot
from .errors import InvalidSpec
from .kinematics import wrap_angle

#: Heading set used for blind evasion in the reference simulations.
BLIND_HEADINGS = (-math.pi / 4, math.pi / 2, 3 * math.pi / 4)
DEFAULT_SWITCH_PERIOD = 1.0


class StrategyKind(str, enum.Enum):
    CONSTANT_HEADING = "ConstantHeading"
    BLIND_SWITCHING = "BlindSwitching"
    HEAD_ON_NEAREST = "HeadOnNearest"
    FLEE_NEAREST = "FleeNearest"


@dataclass(frozen=True)
class StrategySpec:
    """Evader policy description.

    ``BlindSwitching`` draws a fresh heading from ``heading_set`` at ``t = 0``
    and at each switch time. Switch times are either listed explicitly in
    ``switch_times`` or generated every ``switch_period`` time units.
    """

    kind: StrategyKind
    heading: Optional[float] = None
    heading_set: tuple = BLIND_HEADINGS
    switch_times: Optional[tuple] = None
    switch_period: float = DEFAULT_SWITCH_PERIOD
    rng_seed: Optional[int] = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", StrategyKind(self.kind))
        except ValueError:
            raise InvalidSpec(f"unknown strategy kind {self.kind!r}") from None
        object.__setattr__(self, "heading_set", tuple(float(h) for h in self.heading_set))
        if self.kind is StrategyKind.CONSTANT_HEADING:
            if self.heading is None or not math.isfinite(self.heading):
                raise InvalidSpec("ConstantHeading needs a finite heading")
        if self.kind is StrategyKind.BLIND_SWITCHING:
            if not self.heading_set:
                raise InvalidSpec("heading_set must be nonempty")
            if self.switch_times is not None:
                times = tuple(float(t) for t in self.switch_times)
                if any(b <= a for a, b in zip(times, times[1:])):
                    raise InvalidSpec("switch_times must be strictly increasing")
                if times and times[0] <= 0.0:
                    raise InvalidSpec("switch_times must be positive")
                object.__setattr__(self, "switch_times", times)
            elif not (self.switch_period > 0.0):
                raise InvalidSpec("switch_period must be positive")

    @classmethod
    def constant(cls, heading: float) -> "StrategySpec":
        return cls(StrategyKind.CONSTANT_HEADING, heading=heading)

    @classmethod
    def blind(cls, heading_set=BLIND_HEADINGS, seed: Optional[int] = None, switch_times=None,
              switch_period: float = DEFAULT_SWITCH_PERIOD) -> "StrategySpec":
        return cls(StrategyKind.BLIND_SWITCHING, heading_set=heading_set,
                   switch_times=switch_times, switch_period=switch_period, rng_seed=seed)

    def switch_index(self, t: float) -> int:
        """Number of switches that have happened by time ``t``."""
        if self.switch_times is not None:
            return bisect.bisect_right(self.switch_times, t)
        # small guard so that k * period lands on the switch, not just before
        return int(math.floor(t / self.switch_period + 1e-9))

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind is StrategyKind.CONSTANT_HEADING:
            d["heading"] = self.heading
        elif self.kind is StrategyKind.BLIND_SWITCHING:
            d["heading_set"] = list(self.heading_set)
            if self.switch_times is not None:
                d["switch_times"] = list(self.switch_times)
            else:
                d["switch_period"] = self.switch_period
            if self.rng_seed is not None:
                d["rng_seed"] = self.rng_seed
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StrategySpec":
        d = dict(d)
        if "switch_times" in d and d["switch_times"] is not None:
            d["switch_times"] = tuple(d["switch_times"])
        if "heading_set" in d:
            d["heading_set"] = tuple(d["heading_set"])
        try:
            return cls(**d)
        except TypeError as exc:
            raise InvalidSpec(str(exc)) from None


@functools.lru_cache(maxsize=4096)
def _blind_draw(spec: StrategySpec, k: int) -> float:
    # one independent generator per (seed, switch index) keeps the draw a pure
    # function of time, independent of how often the policy is queried
    rng = np.random.default_rng([int(spec.rng_seed or 0) & 0xFFFFFFFF, k])
    return spec.heading_set[int(rng.integers(len(spec.heading_set)))]


def nearest_pursuer(snapshot: MpseSnapshot):
    e = snapshot.evader
    return min(snapshot.pursuers,
               key=lambda p: (math.hypot(p.position.x - e.position.x, p.position.y - e.position.y)
                              / (p.speed + e.speed), str(p.id)))


def evader_heading(spec: StrategySpec, t: float, snapshot: Optional[MpseSnapshot] = None) -> float:
    """Heading chosen by an evader following ``spec`` at time ``t``.

    ``snapshot`` is only consulted by the reactive policies.
    """
    if t < 0.0:
        raise InvalidSpec(f"time must be non-negative, got {t!r}")
    kind = spec.kind
    if kind is StrategyKind.CONSTANT_HEADING:
        return wrap_angle(spec.heading)
    if kind is StrategyKind.BLIND_SWITCHING:
        return _blind_draw(spec, spec.switch_index(t))
    if snapshot is None:
        raise InvalidSpec(f"{kind.value} needs a snapshot of the pursuers")
    p = nearest_pursuer(snapshot)
    e = snapshot.evader.position
    toward = math.atan2(p.position.y - e.y, p.position.x - e.x)
    if kind is StrategyKind.HEAD_ON_NEAREST:
        return wrap_angle(toward)
    return wrap_angle(toward + math.pi)


def derive_seed(base_seed: int, index: int) -> int:
    """Independent per-evader seed derived from the scenario seed."""
    ss = np.random.SeedSequence([int(base_seed) & 0xFFFFFFFF, int(index)])
    return int(ss.generate_state(1)[0])
