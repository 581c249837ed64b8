"""SVG rendering of traces: snapshots with Apollonius circles, and trajectories.

Pursuers are squares (blue when active, cyan otherwise); evaders are
triangles (red while free, magenta once captured).
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import Circle as CirclePatch  # noqa: E402

from .geometry import DEGENERACY_TOL, apollonius_circle, distance  # noqa: E402

PURSUER_ACTIVE = "tab:blue"
PURSUER_IDLE = "cyan"
EVADER_FREE = "red"
EVADER_CAPTURED = "magenta"

_RC = {"svg.hashsalt": "apollonius", "svg.fonttype": "none", "path.simplify": False}


def frames(rows) -> dict:
    """Group trace rows by timestamp, preserving order."""
    out: dict = defaultdict(list)
    for r in rows:
        out[r.t].append(r)
    return dict(out)


def resolve_times(tokens: Iterable[str], times: Sequence[float]) -> list:
    """Map ``--at`` tokens (numbers, ``start``, ``mid``, ``end``) to recorded times."""
    times = sorted(times)
    picked = []
    for tok in tokens:
        tok = str(tok).strip()
        if tok in ("start", "0"):
            t = times[0]
        elif tok == "mid":
            t = times[len(times) // 2]
        elif tok == "end":
            t = times[-1]
        else:
            target = float(tok)
            t = min(times, key=lambda s: (abs(s - target), s))
        if t not in picked:
            picked.append(t)
    return picked


def _bounds(rows, pad=0.5):
    xs = [r.x for r in rows]
    ys = [r.y for r in rows]
    return min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad


def _voronoi(ax, generators, box):
    """Voronoi partition with the evaders as generators, drawn as dashed lines."""
    pts = np.asarray(generators, dtype=float)
    if len(pts) < 2:
        return
    x0, x1, y0, y1 = box
    span = 4.0 * max(x1 - x0, y1 - y0)
    style = dict(color="0.5", lw=0.8, ls="--", zorder=0)
    if len(pts) == 2:
        mid = pts.mean(axis=0)
        d = pts[1] - pts[0]
        n = np.array([-d[1], d[0]]) / np.hypot(*d)
        a, b = mid - span * n, mid + span * n
        ax.plot([a[0], b[0]], [a[1], b[1]], **style)
        return
    from scipy.spatial import Voronoi

    vor = Voronoi(pts, qhull_options="Qbb Qc Qz QJ")
    center = pts.mean(axis=0)
    for (i, j), ridge in zip(vor.ridge_points, vor.ridge_vertices):
        ridge = np.asarray(ridge)
        if np.all(ridge >= 0):
            seg = vor.vertices[ridge]
        else:
            finite = vor.vertices[ridge[ridge >= 0][0]]
            t = pts[j] - pts[i]
            t /= np.linalg.norm(t)
            n = np.array([-t[1], t[0]])
            midpoint = pts[[i, j]].mean(axis=0)
            direction = np.sign(np.dot(midpoint - center, n)) * n
            seg = np.array([finite, finite + direction * span])
        ax.plot(seg[:, 0], seg[:, 1], **style)


def _decorate(ax, box, title):
    x0, x1, y0, y1 = box
    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title)


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _markers(ax, frame):
    for r in frame:
        if r.kind == "pursuer":
            color = PURSUER_ACTIVE if r.status == "Active" else PURSUER_IDLE
            ax.plot(r.x, r.y, "s", color=color, ms=7, mec="k", mew=0.5, zorder=3)
        else:
            color = EVADER_CAPTURED if r.status == "Captured" else EVADER_FREE
            ax.plot(r.x, r.y, "^", color=color, ms=8, mec="k", mew=0.5, zorder=3)
        ax.annotate(str(r.agent_id), (r.x, r.y), textcoords="offset points", xytext=(4, 4),
                    fontsize=7)


def _circles(ax, frame):
    pursuers = [r for r in frame if r.kind == "pursuer"]
    free = [r for r in frame if r.kind == "evader" and r.status != "Captured"]
    for e in free:
        if len(free) == 1:
            chasing = pursuers
        else:
            chasing = [p for p in pursuers if str(p.assigned_evader) == str(e.agent_id)]
        for p in chasing:
            if not (p.speed > e.speed) or distance((p.x, p.y), (e.x, e.y)) < DEGENERACY_TOL:
                continue
            c = apollonius_circle((p.x, p.y), (e.x, e.y), p.speed, e.speed)
            active = p.status == "Active"
            ax.add_patch(CirclePatch(c.center, c.radius, fill=False, lw=1.0 if active else 0.6,
                                     ls="-" if active else ":",
                                     ec=PURSUER_ACTIVE if active else PURSUER_IDLE))


def render_snapshot(rows, t: float, path, voronoi: bool = False, circles: bool = True) -> Path:
    frame = frames(rows)[t]
    box = _bounds(rows)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 6))
        if voronoi:
            _voronoi(ax, [(r.x, r.y) for r in frame if r.kind == "evader"
                          and r.status != "Captured"], box)
        if circles:
            _circles(ax, frame)
        _markers(ax, frame)
        _decorate(ax, box, f"t = {t:.3f}")
        _save(fig, path)
    return Path(path)


def render_trajectories(rows, path, voronoi: bool = False) -> Path:
    by_agent: dict = defaultdict(list)
    for r in rows:
        by_agent[(r.kind, r.agent_id)].append(r)
    times = sorted(frames(rows))
    box = _bounds(rows)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 6))
        if voronoi:
            start = frames(rows)[times[0]]
            _voronoi(ax, [(r.x, r.y) for r in start if r.kind == "evader"], box)
        for (kind, aid), track in by_agent.items():
            xs = [r.x for r in track]
            ys = [r.y for r in track]
            color = PURSUER_ACTIVE if kind == "pursuer" else EVADER_FREE
            ax.plot(xs, ys, "-", color=color, lw=0.9)
            ax.plot(xs[0], ys[0], "s" if kind == "pursuer" else "^", color=color,
                    mfc="none", ms=7)
        _markers(ax, frames(rows)[times[-1]])
        _decorate(ax, box, f"trajectories, t in [{times[0]:.3f}, {times[-1]:.3f}]")
        _save(fig, path)
    return Path(path)


def render_trace(rows, out_dir, at: Sequence[str] = ("0",), voronoi: bool = False) -> list:
    """Write one snapshot per requested time plus ``trajectories.svg``."""
    if not rows:
        raise ValueError("trace is empty")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for t in resolve_times(at, list(frames(rows))):
        name = "snapshot_t" + f"{t:.4f}".replace(".", "p") + ".svg"
        written.append(render_snapshot(rows, t, out / name, voronoi=voronoi))
    written.append(render_trajectories(rows, out / "trajectories.svg", voronoi=voronoi))
    return written
