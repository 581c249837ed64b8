"""Apollonius-circle pursuer classification and allocation for multi-agent pursuit-evasion."""

from .allocation import (
    AllocationMaps,
    CstRecord,
    MpmeSnapshot,
    a2_allocate,
    a2_run,
    current_shortest_time,
    initial_allocation,
    reconsider_unassigned,
    tie_break,
)
from .classification import (
    MpseSnapshot,
    Player,
    PursuerStatus,
    active_set,
    classify_all,
    classify_pursuer,
)
from .engine import EvaderConfig, ScenarioConfig, SimTrace, run
from .errors import (
    ApolloniusError,
    DegenerateGeometry,
    EmptyEvaderSet,
    InvalidScenario,
    InvalidSpec,
    InvalidSpeeds,
    InvalidTimestep,
    IterationLimitExceeded,
    MaxTimeExceeded,
    NoCapture,
    SimulationComplete,
    UnknownId,
    ValidationFailure,
)
from .estimators import ActivePursuerClassifier, ApolloniusAllocator
from .geometry import (
    Circle,
    Point2,
    apollonius_circle,
    circle_circle_intersections,
    is_boundary_point,
    nearest_capture_point,
    segment_circle_crossings,
)
from .kinematics import AgentState, cb_heading, closing_rate, propagate, relative_state
from .oracle import cst_slope_probe, validate_active_classification
from .strategies import StrategyKind, StrategySpec, evader_heading

__version__ = "0.1.0"
