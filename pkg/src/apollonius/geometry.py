"""Planar primitives: Apollonius circles, circle/segment intersections and
the Apollonius-boundary membership test.

All functions are pure. Points are plain ``Point2`` named tuples so they can
be unpacked and compared like ordinary ``(x, y)`` pairs.
"""

from __future__ import annotations

import math
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import DegenerateGeometry, InvalidSpeeds

#: Absolute tolerance for tangency, on-curve and endpoint-exclusion tests.
GEOM_TOL = 1e-9
#: Below this pursuer-evader separation the pair is treated as captured.
DEGENERACY_TOL = 1e-12


class Point2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):
        return Point2(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point2(self.x - other[0], self.y - other[1])

    def scaled(self, k: float) -> "Point2":
        return Point2(self.x * k, self.y * k)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


def as_point(p) -> Point2:
    """Coerce an ``(x, y)`` pair to ``Point2``, rejecting non-finite input."""
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"point components must be finite, got {p!r}")
    return Point2(x, y)


def distance(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True, slots=True)
class Circle:
    center: Point2
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0.0):
            raise ValueError(f"radius must be positive and finite, got {self.radius!r}")
        object.__setattr__(self, "center", as_point(self.center))

    def point_at(self, phi: float) -> Point2:
        return Point2(self.center.x + self.radius * math.cos(phi),
                      self.center.y + self.radius * math.sin(phi))

    def on_curve(self, x, tol: float = GEOM_TOL) -> bool:
        return abs(distance(x, self.center) - self.radius) <= tol


# Counts calls to the two intersection predicates; used to check AAPC cost.
_counters: list[Counter] = []


@contextmanager
def count_predicates():
    """Count geometry predicate invocations made inside the ``with`` block.

    >>> with count_predicates() as calls:
    ...     _ = circle_circle_intersections(Circle((0, 0), 1), Circle((1, 0), 1))
    >>> calls["circle_circle"]
    1
    """
    calls: Counter = Counter()
    _counters.append(calls)
    try:
        yield calls
    finally:
        _counters.remove(calls)


def _tick(name: str) -> None:
    for c in _counters:
        c[name] += 1


def check_speeds(u: float, v: float) -> float:
    """Validate a pursuer/evader speed pair and return the ratio ``v / u``."""
    if not (math.isfinite(u) and math.isfinite(v)) or v <= 0.0 or u <= v:
        raise InvalidSpeeds(f"need u > v > 0, got u={u!r}, v={v!r}")
    return v / u


def _pair(p, e, u, v):
    p, e = as_point(p), as_point(e)
    rho = check_speeds(u, v)
    d = distance(p, e)
    if d < DEGENERACY_TOL:
        raise DegenerateGeometry(f"pursuer and evader coincide (separation {d:g})")
    return p, e, rho, d


def apollonius_circle(p, e, u: float, v: float) -> Circle:
    """Locus of points the evader at ``e`` reaches no later than the pursuer at ``p``.

    Every point ``X`` on the returned circle satisfies
    ``|X - e| = (v / u) * |X - p|``.
    """
    p, e, rho, d = _pair(p, e, u, v)
    k = 1.0 - rho * rho
    center = Point2((e.x - rho * rho * p.x) / k, (e.y - rho * rho * p.y) / k)
    return Circle(center, rho * d / k)


def nearest_capture_point(p, e, u: float, v: float) -> tuple[Point2, float]:
    """Head-on meeting point on the line of sight and its distance from ``e``."""
    p, e, rho, d = _pair(p, e, u, v)
    dist = v * d / (u + v)
    k = dist / d
    return Point2(e.x + k * (p.x - e.x), e.y + k * (p.y - e.y)), dist


def circles_coincide(a: Circle, b: Circle, tol: float = GEOM_TOL) -> bool:
    return distance(a.center, b.center) <= tol and abs(a.radius - b.radius) <= tol


def circle_circle_intersections(a: Circle, b: Circle, tol: float = GEOM_TOL) -> tuple[Point2, ...]:
    """Intersection points of two circle curves.

    Returns zero, one (tangency, decided within ``tol``) or two points.
    Concentric and coincident circles yield no points.
    """
    _tick("circle_circle")
    dx = b.center.x - a.center.x
    dy = b.center.y - a.center.y
    d = math.hypot(dx, dy)
    if d <= tol:
        return ()
    r1, r2 = a.radius, b.radius
    outer = r1 + r2
    inner = abs(r1 - r2)
    if d > outer + tol or d < inner - tol:
        return ()
    ux, uy = dx / d, dy / d
    along = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    if abs(d - outer) <= tol or abs(d - inner) <= tol:
        return (Point2(a.center.x + along * ux, a.center.y + along * uy),)
    h = math.sqrt(max(r1 * r1 - along * along, 0.0))
    mx, my = a.center.x + along * ux, a.center.y + along * uy
    return (Point2(mx - h * uy, my + h * ux), Point2(mx + h * uy, my - h * ux))


def segment_circle_crossings(a, b, c: Circle, exclude_endpoint=None,
                             tol: float = GEOM_TOL) -> tuple[Point2, ...]:
    """Points where the closed segment ``[a, b]`` meets the curve of ``c``.

    Points within ``tol`` of ``exclude_endpoint`` are dropped.
    """
    _tick("segment_circle")
    a, b = Point2(*a), Point2(*b)
    dx, dy = b.x - a.x, b.y - a.y
    length = math.hypot(dx, dy)
    if length <= tol:
        raise DegenerateGeometry("segment endpoints coincide")
    fx, fy = a.x - c.center.x, a.y - c.center.y
    # distance from the center to the supporting line
    offset = abs(fx * dy - fy * dx) / length
    if offset > c.radius + tol:
        return ()
    qa = dx * dx + dy * dy
    qb = fx * dx + fy * dy
    if abs(offset - c.radius) <= tol:
        params = (-qb / qa,)
    else:
        qc = fx * fx + fy * fy - c.radius * c.radius
        disc = math.sqrt(max(qb * qb - qa * qc, 0.0))
        q = -(qb + math.copysign(disc, qb))
        if q == 0.0:
            params = (0.0,)
        else:
            params = (q / qa, qc / q)
    slack = tol / length
    out = []
    for t in params:
        if -slack <= t <= 1.0 + slack:
            x = Point2(a.x + t * dx, a.y + t * dy)
            if exclude_endpoint is not None and distance(x, exclude_endpoint) <= tol:
                continue
            if any(distance(x, y) <= tol for y in out):
                continue
            out.append(x)
    return tuple(out)


def segment_crosses_any(e, x, circles: Iterable[Circle], tol: float = GEOM_TOL) -> bool:
    """True if ``[e, x]`` meets any of ``circles`` at a point other than ``e`` or ``x``."""
    for c in circles:
        for hit in segment_circle_crossings(e, x, c, exclude_endpoint=x, tol=tol):
            if distance(hit, e) > tol:
                return True
    return False


def is_boundary_point(x, e, circles: Sequence[Circle], tol: float = GEOM_TOL) -> bool:
    """Whether ``x`` belongs to the Apollonius boundary seen from ``e``.

    That is, the segment from the evader to ``x`` touches the union of the
    circle curves only at ``x`` itself.
    """
    x, e = as_point(x), as_point(e)
    if distance(x, e) <= tol:
        raise DegenerateGeometry("boundary test point coincides with the evader")
    return not segment_crosses_any(e, x, circles, tol)


def ray_hit_distance(e, phi: float, c: Circle) -> Optional[float]:
    """Distance along the ray from ``e`` at angle ``phi`` to its first forward hit on ``c``."""
    ux, uy = math.cos(phi), math.sin(phi)
    fx, fy = e[0] - c.center.x, e[1] - c.center.y
    qb = fx * ux + fy * uy
    qc = fx * fx + fy * fy - c.radius * c.radius
    disc = qb * qb - qc
    if disc < 0.0:
        return None
    root = math.sqrt(disc)
    for s in (-qb - root, -qb + root):
        if s >= 0.0:
            return s
    return None
