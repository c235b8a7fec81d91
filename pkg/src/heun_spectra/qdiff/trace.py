"""Level-set tracing of horizontal and vertical trajectories.

Along a horizontal trajectory ``Im w`` is constant, where ``w = int sqrt(R)``
is the canonical coordinate; along a vertical one ``Re w`` is constant.  The
tracer carries ``w`` along the path (Gauss-Legendre on every chord) and
after each predictor step projects the new point back onto the level.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import TraceError
from .core import HORIZONTAL, QuadDiff, SingularPoint

__all__ = ["TraceControls", "TrajectorySegment", "trace", "trace_from", "HIT", "ESCAPED", "CLOSED", "EXHAUSTED"]

HIT, ESCAPED, CLOSED, EXHAUSTED = "hit", "escaped", "closed", "exhausted"

# relative mismatch of the critical level that still counts as "on" it
LEVEL_TOL = 1e-8

_GX, _GW = np.polynomial.legendre.leggauss(6)
_GX = (_GX + 1) / 2
_GW = _GW / 2


@dataclass(frozen=True)
class TraceControls:
    """Radii are fractions of the diameter of the finite singular set."""

    r_cap: float = 1e-3
    r_esc: float = 50.0
    launch_offset: float = 1e-2
    h_max: float = 2.5e-3
    capture_tol: float = 1e-9
    max_length: float = 60.0
    max_steps: int = 200_000

    def scaled(self, diam: float) -> dict:
        return {
            "r_cap": self.r_cap * diam,
            "r_esc": self.r_esc * diam,
            "launch": self.launch_offset * diam,
            "h_max": self.h_max * diam,
            "capture": self.capture_tol * diam,
            "max_length": self.max_length * diam,
        }


@dataclass(frozen=True, eq=False)
class TrajectorySegment:
    """Traced polyline with the canonical coordinate at every vertex."""

    points: np.ndarray
    w: np.ndarray
    origin: tuple  # (singular point id, direction index) or (None, None)
    terminal: str
    kind: str
    target: int | None = None
    gap: float = float("nan")
    arrival: complex = 0j
    diagnostics: dict = field(default_factory=dict)

    @property
    def length(self) -> float:
        return float(np.sum(np.abs(np.diff(self.points))))


def _heading_field(qd: QuadDiff, z: complex, kind: str) -> complex:
    ang = -np.angle(qd.R(z)) / 2
    if kind != HORIZONTAL:
        ang += np.pi / 2
    return complex(np.exp(1j * ang))


def _oriented(h: complex, prev: complex) -> complex:
    return h if (h * np.conj(prev)).real >= 0 else -h


def _branch(qd: QuadDiff, z, direction: complex, kind: str):
    """``sqrt(R(z))`` with ``sqrt(R) * direction`` real positive (horizontal) or in the upper half plane."""
    s = np.sqrt(qd.R(z))
    prod = s * direction
    key = prod.real if kind == HORIZONTAL else prod.imag
    return np.where(key < 0, -s, s)


def _chord(qd: QuadDiff, z0: complex, z1: complex, kind: str) -> complex:
    d = z1 - z0
    if d == 0:
        return 0j
    u = d / abs(d)
    t = z0 + d * _GX
    return complex(np.sum(_GW * _branch(qd, t, u, kind)) * d)


def _level(w: complex, kind: str) -> float:
    return w.imag if kind == HORIZONTAL else w.real


def _correct(qd, z_prev, w_prev, z, heading, level, kind, iters=4):
    """Project ``z`` onto the level set, moving along the normal ``i * heading``."""
    w = w_prev + _chord(qd, z_prev, z, kind)
    for _ in range(iters):
        err = _level(w, kind) - level
        if abs(err) <= 1e-15 * (1 + abs(w)):
            break
        s = abs(np.sqrt(qd.R(z)))
        # d(level)/d(normal) = +|s| horizontally, -|s| vertically
        rate = s if kind == HORIZONTAL else -s
        z = z - err / rate * (1j * heading)
        w = w_prev + _chord(qd, z_prev, z, kind)
    return z, w


def _nearest(qd: QuadDiff, z: complex):
    best, arg = np.inf, None
    for s in qd.singular:
        d = abs(z - s.pos)
        if d < best:
            best, arg = d, s
    return arg, best


def trace(
    qd: QuadDiff,
    start: complex,
    direction: complex,
    kind: str = HORIZONTAL,
    controls: TraceControls = TraceControls(),
    *,
    w0: complex = 0j,
    origin: SingularPoint | None = None,
    origin_dir: int | None = None,
) -> TrajectorySegment:
    """Trace from a regular point ``start`` along ``direction``.

    Terminates on capture at a singular point (``hit``), on leaving the
    escape radius (``escaped``), on returning to the start (``closed``) or on
    the length cap (``exhausted``).
    """
    c = controls.scaled(qd.diameter)
    center = qd.center
    z = complex(start)
    near, dist = _nearest(qd, z)
    if dist < c["capture"]:
        raise TraceError("start point coincides with a singular point", last_point=z,
                         diagnostics={"nearest": near.pos, "distance": dist})
    heading = _oriented(_heading_field(qd, z, kind), direction)
    w = complex(w0)
    level = _level(w, kind)
    pts, ws = [z], [w]
    length = 0.0
    for _ in range(controls.max_steps):
        near, dist = _nearest(qd, z)
        if near is not None and dist < c["r_cap"] and (near is not origin or length > 10 * c["r_cap"]):
            homed = _home(qd, z, w, heading, near, level, kind, c)
            if homed is not None:
                hp, hw, gap = homed
                # the arrival direction is read where homing starts: closer in,
                # the level set is resolved only to rounding
                arrival = (z - near.pos) / abs(z - near.pos)
                return _finish(qd, pts + hp, ws + hw, heading, near, gap, kind, origin, origin_dir, arrival)
        h = min(c["h_max"], 0.2 * dist)
        if h < 1e-14 * qd.diameter:
            raise TraceError("step collapse near an unresolved singularity", last_point=z,
                             diagnostics={"nearest": near.pos if near else None, "distance": dist})
        # midpoint predictor on the direction field
        hm = _oriented(_heading_field(qd, z + 0.5 * h * heading, kind), heading)
        z_new, w_new = _correct(qd, z, w, z + h * hm, hm, level, kind)
        new_heading = _oriented(_heading_field(qd, z_new, kind), hm)
        length += abs(z_new - z)
        z, w, heading = z_new, w_new, new_heading
        pts.append(z)
        ws.append(w)
        if abs(z - center) > c["r_esc"]:
            return TrajectorySegment(np.array(pts), np.array(ws), (_id(origin), origin_dir), ESCAPED, kind)
        if origin is None and length > 10 * c["r_cap"] and abs(z - pts[0]) < c["r_cap"]:
            if (heading * np.conj(direction)).real > 0:
                pts.append(pts[0])
                ws.append(ws[-1] + _chord(qd, z, pts[0], kind))
                return TrajectorySegment(np.array(pts), np.array(ws), (None, None), CLOSED, kind)
        if length > c["max_length"]:
            break
    return TrajectorySegment(np.array(pts), np.array(ws), (_id(origin), origin_dir), EXHAUSTED, kind,
                             diagnostics={"length": length})


def _home(qd, z, w, heading, target, level, kind, c):
    """Follow the singular trajectory into ``target`` if the current level is critical.

    Near a simple zero or pole the critical trajectory is asymptotically a
    ray, so the predictor aims straight at the point and the corrector keeps
    the level.  Returns ``None`` when the level or the heading rules it out.
    """
    to = target.pos - z
    if (to * np.conj(heading)).real <= 0:
        return None
    end = w - qd.endpoint_integral(target, z, complex(_branch(qd, z, heading, kind)))
    if abs(_level(end, kind) - level) > LEVEL_TOL * (1.0 + abs(w)):
        return None
    pts, ws = [], []
    dist = abs(to)
    while dist > c["capture"]:
        u = (target.pos - z) / dist
        z_new, w_new = _correct(qd, z, w, z + 0.5 * dist * u, u, level, kind)
        d_new = abs(target.pos - z_new)
        if d_new >= dist:
            break
        z, w, dist = z_new, w_new, d_new
        pts.append(z)
        ws.append(w)
    return pts, ws, dist


def _id(s):
    return None if s is None else s.id


def _finish(qd, pts, ws, heading, target, gap, kind, origin, origin_dir, arrival):
    z = pts[-1]
    heading = _oriented(target.pos - z, heading)
    heading /= abs(heading)
    # exact tail from the last vertex into the singular point
    tail = -qd.endpoint_integral(target, z, complex(_branch(qd, z, heading, kind)))
    pts = pts + [target.pos]
    ws = ws + [ws[-1] + tail]
    return TrajectorySegment(
        np.array(pts),
        np.array(ws),
        (_id(origin), origin_dir),
        HIT,
        kind,
        target=target.id,
        gap=gap,
        arrival=complex(arrival),
    )


def trace_from(
    qd: QuadDiff,
    s: SingularPoint,
    index: int,
    direction: complex,
    kind: str = HORIZONTAL,
    controls: TraceControls = TraceControls(),
) -> TrajectorySegment:
    """Launch the singular trajectory leaving ``s`` along ``direction``.

    The launch point is moved onto the exact singular level using the
    end-point integral from ``s``.
    """
    c = controls.scaled(qd.diameter)
    z = s.pos + c["launch"] * direction
    for _ in range(6):
        w0 = qd.endpoint_integral(s, z, complex(_branch(qd, z, direction, kind)))
        err = _level(w0, kind)
        if abs(err) < 1e-15 * (1 + abs(w0)):
            break
        rate = abs(np.sqrt(qd.R(z)))
        rate = rate if kind == HORIZONTAL else -rate
        z = z - err / rate * (1j * direction)
    seg = trace(qd, z, direction, kind, controls, w0=w0, origin=s, origin_dir=index)
    # fill the launch chord with points on the level curve itself
    back = _home(qd, z, w0, -direction, s, _level(w0, kind), kind, c)
    fill_p, fill_w = (back[0][::-1], [2 * w0 - x for x in back[1][::-1]]) if back is not None else ([], [])
    pts = np.concatenate([[s.pos], fill_p, seg.points])
    ws = np.concatenate([[0j], fill_w, seg.w])
    return TrajectorySegment(pts, ws, (s.id, index), seg.terminal, kind, seg.target, seg.gap, seg.arrival,
                             seg.diagnostics)
