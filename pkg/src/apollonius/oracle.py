"""Brute-force validators for the classification and CST claims.

``sampled_capture_map`` deliberately avoids the engine and the kinematics
module: it runs its own vectorised constant-bearing propagation over a fan of
constant evader headings, sharing nothing with the main implementation but
the snapshot type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import classification
from .classification import MpseSnapshot
from .engine import ScenarioConfig, SimTrace, WorldState, run
from .errors import NoCapture, ValidationFailure
from .strategies import StrategyKind

DEFAULT_HEADINGS = 360
DEFAULT_DT = 1e-3


@dataclass(frozen=True)
class CaptureSample:
    heading: float
    winner: object
    time: float
    point: tuple


def sampled_capture_map(snapshot: MpseSnapshot, n_headings: int = DEFAULT_HEADINGS,
                        dt: float = DEFAULT_DT) -> dict:
    """First capturer and meeting point for evenly spaced constant evader headings.

    Every pursuer re-solves the constant-bearing condition each step. Capture
    is resolved to the exact zero crossing of the range, which is linear in
    time while the evader holds its heading.
    """
    if n_headings < 4:
        raise ValueError("n_headings must be at least 4")
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    ids = [p.id for p in snapshot.pursuers]
    u = np.array([p.speed for p in snapshot.pursuers])
    v = snapshot.evader.speed
    p0 = np.array([p.position for p in snapshot.pursuers], dtype=float)
    e0 = np.asarray(snapshot.evader.position, dtype=float)
    rho = v / u

    headings = 2.0 * np.pi * np.arange(n_headings) / n_headings
    # any single pursuer closes at no less than u - v, which bounds first capture
    horizon = float(np.min(np.hypot(*(p0 - e0).T) / (u - v))) * 1.05 + 10 * dt

    live = np.arange(n_headings)
    px = np.tile(p0[:, 0], (n_headings, 1))
    py = np.tile(p0[:, 1], (n_headings, 1))
    ex = np.full(n_headings, e0[0])
    ey = np.full(n_headings, e0[1])
    cos_e, sin_e = np.cos(headings), np.sin(headings)
    r = np.hypot(ex[:, None] - px, ey[:, None] - py)

    out: dict = {}
    t = 0.0
    k = 0
    while live.size:
        if t > horizon:
            raise NoCapture(f"no capture within {horizon:g} for {live.size} heading(s)")
        los = np.arctan2(ey[:, None] - py, ex[:, None] - px)
        th = los + np.arcsin(rho * np.sin(headings[live][:, None] - los))
        px = px + u * dt * np.cos(th)
        py = py + u * dt * np.sin(th)
        ex = ex + v * dt * cos_e[live]
        ey = ey + v * dt * sin_e[live]
        k += 1
        t_now = k * dt
        r_new = np.hypot(ex[:, None] - px, ey[:, None] - py)
        rate = (r_new - r) / dt
        # time until the range hits zero, predicted one step ahead
        with np.errstate(divide="ignore", invalid="ignore"):
            eta = np.where(rate < 0.0, r_new / -rate, np.inf)
        done = eta.min(axis=1) <= dt
        if done.any():
            for row in np.flatnonzero(done):
                w = int(np.argmin(eta[row]))
                tc = t_now + float(eta[row, w])
                h = int(live[row])
                lag = tc - t_now
                point = (float(ex[row] + v * lag * cos_e[h]), float(ey[row] + v * lag * sin_e[h]))
                out[float(headings[h])] = CaptureSample(float(headings[h]), ids[w], tc, point)
            keep = ~done
            live, px, py, ex, ey, r_new = (live[keep], px[keep], py[keep], ex[keep],
                                           ey[keep], r_new[keep])
        r = r_new
        t = t_now
    return dict(sorted(out.items()))


@dataclass
class ClassificationReport:
    active: frozenset
    winners: dict
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def winner_ids(self) -> frozenset:
        return frozenset(s.winner for s in self.winners.values())

    def to_records(self) -> list:
        recs = [{"t": 0.0, "kind": "OracleSample", "ids": [s.winner],
                 "data": {"heading": h, "capture_time": s.time, "point": list(s.point)}}
                for h, s in self.winners.items()]
        recs.append({"t": 0.0, "kind": "OracleVerdict", "ids": sorted(map(str, self.active)),
                     "data": {"passed": self.passed, "violations": self.violations}})
        return recs


def validate_active_classification(snapshot: MpseSnapshot, n_headings: int = DEFAULT_HEADINGS,
                                   dt: float = DEFAULT_DT,
                                   classifier: Optional[Callable] = None,
                                   raise_on_failure: bool = True) -> ClassificationReport:
    """Check that every sampled first capturer is classified active.

    Only the necessary direction can be checked this way: constant headings
    cannot show that an active pursuer wins under *some* strategy.
    """
    classify = classifier or classification.active_set
    active = frozenset(classify(snapshot))
    winners = sampled_capture_map(snapshot, n_headings, dt)
    violations = [{"heading": h, "winner": s.winner, "time": s.time}
                  for h, s in winners.items() if s.winner not in active]
    report = ClassificationReport(active, winners, violations)
    if violations and raise_on_failure:
        first = violations[0]
        raise ValidationFailure(
            f"pursuer {first['winner']!r} wins heading {first['heading']:.6f} "
            f"but is not in the active set {sorted(map(str, active))}", first)
    return report


def slope_bound(u: float, v: float) -> float:
    """Worst-case CST rate ``(v - u) / (v + u)`` for the critical pair."""
    return (v - u) / (v + u)


@dataclass
class CstSlopeReport:
    samples: list = field(default_factory=list)  # (t, slope, bound)
    violations: list = field(default_factory=list)
    attainment_checked: bool = False
    trace: Optional[SimTrace] = None

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def max_excess(self) -> float:
        return max((s - b for _, s, b in self.samples), default=-math.inf)

    def to_records(self) -> list:
        recs = [{"t": t, "kind": "CstSlope", "ids": [], "data": {"slope": s, "bound": b}}
                for t, s, b in self.samples]
        recs.append({"t": self.samples[-1][0] if self.samples else 0.0, "kind": "CstVerdict",
                     "ids": [], "data": {"passed": self.passed, "violations": self.violations}})
        return recs


def _attains_bound(config: ScenarioConfig) -> bool:
    return (len(config.pursuers) == 1 and len(config.evaders) == 1
            and config.evaders[0].strategy.kind is StrategyKind.FLEE_NEAREST)


def cst_slope_probe(config: ScenarioConfig, slack: float = 1e-2, attain_tol: float = 1e-3,
                    expect_attainment: Optional[bool] = None,
                    raise_on_failure: bool = True) -> CstSlopeReport:
    """Finite-difference CST slope along an engine run, checked against its bound.

    Every step must satisfy ``slope <= (v - u) / (v + u) + slack`` for the
    CST pair at the start of the step. When the evader flees straight away
    from a lone pursuer the bound is tight, and the slope must match it to
    within ``attain_tol``.
    """
    if expect_attainment is None:
        expect_attainment = _attains_bound(config)
    speeds = {p.id: p.speed for p in config.pursuers}
    speeds.update({e.id: e.speed for e in config.evaders})
    log: list = []

    def observe(state: WorldState, events):
        free = frozenset(e.id for e in state.free_evaders)
        if not free:
            return
        snap = state.mpme_snapshot()
        best = min(((math.hypot(p.position.x - e.position.x, p.position.y - e.position.y)
                     / (p.speed + e.speed), str(p.id), str(e.id), p.id, e.id)
                    for p in snap.pursuers for e in snap.evaders_free))
        log.append((state.t, free, best[0], best[3], best[4]))

    trace = run(config, observer=observe)
    report = CstSlopeReport(attainment_checked=expect_attainment, trace=trace)
    for (t0, free0, ts0, i, j), (t1, free1, ts1, _, _) in zip(log, log[1:]):
        if free0 != free1:
            continue
        slope = (ts1 - ts0) / (t1 - t0)
        bound = slope_bound(speeds[i], speeds[j])
        report.samples.append((t0, slope, bound))
        if slope > bound + slack:
            report.violations.append({"t": t0, "slope": slope, "bound": bound,
                                      "reason": "slope above bound"})
        elif expect_attainment and abs(slope - bound) > attain_tol:
            report.violations.append({"t": t0, "slope": slope, "bound": bound,
                                      "reason": "bound not attained"})
    if report.violations and raise_on_failure:
        first = report.violations[0]
        raise ValidationFailure(
            f"CST slope {first['slope']:.6f} vs bound {first['bound']:.6f} at t={first['t']:.6f} "
            f"({first['reason']})", first)
    return report
