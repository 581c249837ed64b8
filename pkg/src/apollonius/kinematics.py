"""Agent state, line-of-sight geometry and the constant-bearing heading law."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .errors import InvalidSpeeds, InvalidTimestep
from .geometry import Point2, as_point

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Wrap an angle to ``(-pi, pi]``."""
    w = math.fmod(theta + math.pi, TWO_PI)
    if w <= 0.0:
        w += TWO_PI
    return w - math.pi


@dataclass(frozen=True, slots=True)
class AgentState:
    position: Point2
    speed: float
    heading: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.speed) and self.speed > 0.0):
            raise ValueError(f"speed must be positive and finite, got {self.speed!r}")
        if not math.isfinite(self.heading):
            raise ValueError("heading must be finite")
        object.__setattr__(self, "position", as_point(self.position))
        object.__setattr__(self, "heading", wrap_angle(self.heading))

    def with_heading(self, heading: float) -> "AgentState":
        return replace(self, heading=heading)


@dataclass(frozen=True, slots=True)
class RelativeState:
    range: float
    los_angle: float


def relative_state(pursuer: AgentState, evader: AgentState) -> RelativeState:
    dx = evader.position.x - pursuer.position.x
    dy = evader.position.y - pursuer.position.y
    rng = math.hypot(dx, dy)
    los = math.atan2(dy, dx) if rng > 0.0 else 0.0
    return RelativeState(rng, los)


def cb_heading(evader_heading: float, los: float, rho: float) -> float:
    """Constant-bearing pursuer heading for the given line of sight.

    Solves ``u sin(theta - los) = v sin(theta_e - los)`` on the branch with
    ``cos(theta - los) > 0``, which keeps the range strictly decreasing
    whenever ``rho = v / u < 1``.
    """
    if not (0.0 < rho < 1.0):
        raise InvalidSpeeds(f"speed ratio must lie in (0, 1), got {rho!r}")
    return wrap_angle(los + math.asin(rho * math.sin(evader_heading - los)))


def closing_rate(pursuer: AgentState, evader: AgentState) -> float:
    """Range rate ``v cos(theta_e - los) - u cos(theta_p - los)``."""
    los = relative_state(pursuer, evader).los_angle
    return (evader.speed * math.cos(evader.heading - los)
            - pursuer.speed * math.cos(pursuer.heading - los))


def advance(agent: AgentState, dt: float) -> AgentState:
    x, y = agent.position
    step = agent.speed * dt
    return replace(agent, position=Point2(x + step * math.cos(agent.heading),
                                          y + step * math.sin(agent.heading)))


def propagate(agents: Sequence[AgentState], dt: float) -> list[AgentState]:
    """Move every agent ``speed * dt`` along its current heading."""
    if not (dt > 0.0 and math.isfinite(dt)):
        raise InvalidTimestep(f"dt must be positive, got {dt!r}")
    return [advance(a, dt) for a in agents]
