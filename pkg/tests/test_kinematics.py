import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apollonius.errors import InvalidSpeeds, InvalidTimestep
from apollonius.geometry import apollonius_circle, distance
from apollonius.kinematics import (
    AgentState,
    advance,
    cb_heading,
    closing_rate,
    propagate,
    relative_state,
    wrap_angle,
)

PI = math.pi


@pytest.mark.parametrize("p, e, rng, los", [
    ((0, 0), (1, 0), 1.0, 0.0),
    ((0, 0), (0, 2), 2.0, PI / 2),
    ((1, 1), (0, 0), math.sqrt(2), -3 * PI / 4),
    ((3, 4), (3, 4), 0.0, 0.0),
])
def test_relative_state(p, e, rng, los):
    rs = relative_state(AgentState(p, 1.0), AgentState(e, 0.5))
    assert rs.range == pytest.approx(rng)
    assert rs.los_angle == pytest.approx(los)


def test_wrap_angle():
    assert wrap_angle(PI) == pytest.approx(PI)
    assert wrap_angle(-PI) == pytest.approx(PI)
    assert wrap_angle(3 * PI / 2) == pytest.approx(-PI / 2)
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(-5 * PI / 2) == pytest.approx(-PI / 2)


def test_agent_state_validation():
    with pytest.raises(ValueError):
        AgentState((0, 0), 0.0)
    with pytest.raises(ValueError):
        AgentState((0, 0), 1.0, math.inf)
    assert AgentState((0, 0), 1.0, 3 * PI).heading == pytest.approx(PI)


def test_cb_heading_examples():
    los = 0.3
    assert cb_heading(los, los, 0.6) == pytest.approx(los)
    assert cb_heading(los + PI, los, 0.6) == pytest.approx(los)
    assert cb_heading(los + PI / 2, los, 0.6) == pytest.approx(los + math.asin(0.6))
    assert math.asin(0.6) == pytest.approx(0.6435, abs=1e-4)


@pytest.mark.parametrize("rho", [0.0, 1.0, 1.3, -0.2, math.nan])
def test_cb_heading_rejects_bad_ratio(rho):
    with pytest.raises(InvalidSpeeds):
        cb_heading(0.0, 0.0, rho)


def _pair_with_cb(u, v, evader_heading, p=(0.0, 0.0), e=(1.0, 0.0)):
    evader = AgentState(e, v, evader_heading)
    los = relative_state(AgentState(p, u), evader).los_angle
    pursuer = AgentState(p, u, cb_heading(evader_heading, los, v / u))
    return pursuer, evader


def test_closing_rate_examples():
    # pursuer at origin, evader on +x: head-on means the evader heads to pi
    assert closing_rate(*_pair_with_cb(1.0, 0.6, PI)) == pytest.approx(-1.6)
    assert closing_rate(*_pair_with_cb(1.0, 0.6, 0.0)) == pytest.approx(-0.4)
    assert closing_rate(*_pair_with_cb(1.0, 0.6, PI / 2)) == pytest.approx(-0.8)


def test_propagate_examples():
    a, b, c = propagate([AgentState((0, 0), 1.0, 0.0),
                         AgentState((1, 1), 2.0, PI / 2),
                         AgentState((0, 0), 0.6, 3 * PI / 4)], 0.5)
    assert a.position == pytest.approx((0.5, 0.0))
    assert b.position == pytest.approx((1.0, 2.0))
    assert advance(AgentState((1, 1), 2.0, PI / 2), 0.25).position == pytest.approx((1.0, 1.5))
    disp = advance(AgentState((0, 0), 0.6, 3 * PI / 4), 1.0).position
    assert disp == pytest.approx((-0.6 / math.sqrt(2), 0.6 / math.sqrt(2)))
    assert c.heading == pytest.approx(3 * PI / 4)


@pytest.mark.parametrize("dt", [0.0, -1e-3, math.nan])
def test_propagate_rejects_bad_dt(dt):
    with pytest.raises(InvalidTimestep):
        propagate([AgentState((0, 0), 1.0)], dt)


angles = st.floats(-PI, PI)
ratios = st.floats(0.01, 0.99)


@settings(max_examples=500, deadline=None)
@given(angles, angles, ratios, st.floats(0.2, 5.0))
def test_eq4_residual_and_closure(theta_e, los, rho, u):
    v = rho * u
    theta = cb_heading(theta_e, los, rho)
    assert abs(u * math.sin(theta - los) - v * math.sin(theta_e - los)) < 1e-12 * max(u, 1.0)
    assert math.cos(theta - los) > 0.0
    rdot = v * math.cos(theta_e - los) - u * math.cos(theta - los)
    assert -(u + v) - 1e-12 <= rdot <= -(u - v) + 1e-12


@settings(max_examples=200, deadline=None)
@given(angles, angles, ratios)
def test_closing_rate_matches_bounds(theta_e, los, rho):
    p = (0.0, 0.0)
    e = (math.cos(los), math.sin(los))
    pursuer, evader = _pair_with_cb(1.0, rho, theta_e, p, e)
    assert -(1 + rho) - 1e-12 <= closing_rate(pursuer, evader) <= -(1 - rho) + 1e-12


def _chase(p, e, u, v, heading, dt, radius=1e-6):
    """Step a CB pursuer against a straight-line evader until the range is tiny."""
    pursuer, evader = AgentState(p, u), AgentState(e, v, heading)
    los0 = relative_state(pursuer, evader).los_angle
    drift = 0.0
    for _ in range(10**6):
        rs = relative_state(pursuer, evader)
        if rs.range <= (u + v) * dt:
            # finish the last partial step in closed form
            lag = rs.range / -closing_rate(pursuer, evader)
            return advance(evader, lag).position, drift
        drift = max(drift, abs(wrap_angle(rs.los_angle - los0)))
        pursuer = pursuer.with_heading(cb_heading(heading, rs.los_angle, v / u))
        pursuer, evader = propagate([pursuer, evader], dt)
    raise AssertionError("no capture")


@pytest.mark.parametrize("heading", [0.0, 0.7, PI / 2, 2.5, PI, -1.2])
def test_constant_bearing_and_capture_on_circle(heading):
    p, e, u, v, dt = (0.0, 0.0), (1.0, 0.5), 1.0, 0.6, 1e-3
    meet, drift = _chase(p, e, u, v, heading, dt)
    # straight-moving evader: the pursuer path is straight too and the LoS does not turn
    assert drift < 1e-9
    c = apollonius_circle(p, e, u, v)
    assert abs(distance(meet, c.center) - c.radius) < 1e-9
