"""Seeded random scenario generators used by the test ensembles and the CLI."""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from .classification import MpseSnapshot, Player
from .engine import EvaderConfig, ScenarioConfig
from .strategies import BLIND_HEADINGS, StrategySpec

REFERENCE_PURSUER_SPEEDS = (0.8, 1.0, 1.2)


def _scatter(rng, count, half_width, avoid=(), min_sep=0.0):
    pts = []
    while len(pts) < count:
        x, y = rng.uniform(-half_width, half_width, size=2)
        if all(math.hypot(x - a, y - b) > min_sep for a, b in list(avoid) + pts):
            pts.append((float(x), float(y)))
    return pts


def random_mpse_snapshot(seed: int, n_pursuers: int = 5,
                         speeds: Sequence[float] = REFERENCE_PURSUER_SPEEDS,
                         evader_speed: float = 0.6, half_width: float = 3.0,
                         min_sep: float = 0.3) -> MpseSnapshot:
    """Evader at the origin, pursuers scattered uniformly in a square around it."""
    rng = np.random.default_rng(seed)
    pts = _scatter(rng, n_pursuers, half_width, avoid=[(0.0, 0.0)], min_sep=min_sep)
    us = rng.choice(np.asarray(speeds, dtype=float), size=n_pursuers)
    pursuers = tuple(Player(f"P{k + 1}", pt, float(u)) for k, (pt, u) in enumerate(zip(pts, us)))
    return MpseSnapshot(pursuers, Player("E1", (0.0, 0.0), evader_speed))


def random_mpme_config(seed: int, n_pursuers: int = 10, n_evaders: int = 5,
                       speeds: Sequence[float] = REFERENCE_PURSUER_SPEEDS,
                       evader_speed: float = 0.6, half_width: float = 4.0,
                       strategy: Optional[StrategySpec] = None,
                       **config_kwargs) -> ScenarioConfig:
    """Pursuers and evaders scattered in one square; blind evasion by default."""
    rng = np.random.default_rng(seed)
    evader_pts = _scatter(rng, n_evaders, half_width * 0.6, min_sep=0.3)
    pursuer_pts = _scatter(rng, n_pursuers, half_width, avoid=evader_pts, min_sep=0.3)
    us = rng.choice(np.asarray(speeds, dtype=float), size=n_pursuers)
    strategy = strategy or StrategySpec.blind(BLIND_HEADINGS)
    pursuers = tuple(Player(f"P{k + 1}", pt, float(u))
                     for k, (pt, u) in enumerate(zip(pursuer_pts, us)))
    evaders = tuple(EvaderConfig(f"E{k + 1}", pt, evader_speed, strategy)
                    for k, pt in enumerate(evader_pts))
    config_kwargs.setdefault("seed", seed)
    return ScenarioConfig(pursuers, evaders, **config_kwargs)


def mpse_config(snapshot: MpseSnapshot, strategy: StrategySpec, **config_kwargs) -> ScenarioConfig:
    """Wrap a single-evader snapshot as a runnable scenario."""
    e = snapshot.evader
    return ScenarioConfig(snapshot.pursuers, (EvaderConfig(e.id, e.position, e.speed, strategy),),
                          **config_kwargs)


def capture_time_budget(config: ScenarioConfig, factor: float = 10.0) -> float:
    """``factor * m * max_j min_i |p_i - e_j| / (u_i + v_j)``, the finite-capture horizon."""
    worst = 0.0
    for e in config.evaders:
        best = min(math.hypot(p.position[0] - e.position[0], p.position[1] - e.position[1])
                   / (p.speed + e.speed) for p in config.pursuers)
        worst = max(worst, best)
    return factor * worst * max(len(config.evaders), 1)
