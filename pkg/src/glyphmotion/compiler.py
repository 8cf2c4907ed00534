"""Compiles prepared glyph trajectories into step/pen/dwell command programs.

The target device is a 2-axis stepper stage carrying a solenoid stylus:
each axis advances in fixed increments (step_resolution), the solenoid is
binary, and timing comes from dwells between commands.  Compilation is a
time-domain DDA: within each linear inter-sample interval an axis steps
exactly when the interpolated position crosses the next half-step boundary,
so the stepped position never strays more than half a step per axis from
the straight-line interpolant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import GlyphMotionError
from .trajectory import GlyphTrajectory, bounding_box

OP_STEP_X = "SX"
OP_STEP_Y = "SY"
OP_PEN = "PEN"
OP_DWELL = "W"

# event ordering at equal timestamps: pen acts before steps
_PRIO = {OP_PEN: 0, OP_STEP_X: 1, OP_STEP_Y: 2}


class Command(NamedTuple):
    op: str
    arg: float  # direction (+1/-1), pen state (0/1), or dwell microseconds


@dataclass(frozen=True)
class DeviceConfig:
    workspace_x: float = 50.0             # mm
    workspace_y: float = 50.0             # mm
    step_resolution: float = 0.01         # mm per step
    solenoid_travel: float = 1.0          # mm, informational
    max_step_rate: float = 20000.0        # steps/s per axis
    solenoid_actuation_delay: float = 0.0  # ms

    def __post_init__(self):
        for name in ("workspace_x", "workspace_y", "step_resolution",
                     "solenoid_travel", "max_step_rate"):
            if not (getattr(self, name) > 0):
                raise GlyphMotionError("format", f"{name} must be > 0")
        if self.solenoid_actuation_delay < 0:
            raise GlyphMotionError("format", "solenoid_actuation_delay must be >= 0")

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * self.workspace_x, 0.5 * self.workspace_y)


@dataclass(frozen=True)
class CommandProgram:
    origin: tuple[float, float]   # stage position at program start, mm
    commands: tuple[Command, ...]
    declared_duration: float      # ms

    def __post_init__(self):
        object.__setattr__(self, "commands", tuple(self.commands))


def _axis_steps(u0: float, u1: float, m0: int, t0: float, t1: float):
    """Half-boundary crossings of a linear ramp in step units.

    Returns (times, direction, m_end).  Moving up, the counter advances when
    the ramp reaches m + 0.5; moving down, when it reaches m - 0.5.
    """
    if u1 > u0:
        m1 = int(np.floor(u1 + 0.5))
        if m1 <= m0:
            return None, 0, m0
        bounds = np.arange(m0, m1, dtype=np.float64) + 0.5
        direction = 1
    elif u1 < u0:
        m1 = int(np.ceil(u1 - 0.5))
        if m1 >= m0:
            return None, 0, m0
        bounds = np.arange(m0, m1, -1, dtype=np.float64) - 0.5
        direction = -1
    else:
        return None, 0, m0
    times = t0 + (bounds - u0) / (u1 - u0) * (t1 - t0)
    return times, direction, m1


def compile_glyph(traj: GlyphTrajectory, cfg: DeviceConfig | None = None) -> CommandProgram:
    """Compile a prepared (uniformly sampled) trajectory into a command program.

    The glyph is placed so its bounding-box center sits at the workspace
    center; the program origin is the stage position of the first sample.
    """
    cfg = cfg or DeviceConfig()
    box = bounding_box(traj)
    if box.width > cfg.workspace_x:
        raise GlyphMotionError("workspace-overflow", f"x: {box.width:.3f} mm > {cfg.workspace_x} mm")
    if box.height > cfg.workspace_y:
        raise GlyphMotionError("workspace-overflow", f"y: {box.height:.3f} mm > {cfg.workspace_y} mm")

    cx, cy = box.center
    wcx, wcy = cfg.center
    # device coordinates of every sample; origin is where the stage starts
    dx = traj.x - cx + wcx
    dy = traj.y - cy + wcy
    origin = (float(dx[0]), float(dy[0]))

    res = cfg.step_resolution
    ux = (dx - origin[0]) / res
    uy = (dy - origin[1]) / res
    t = traj.t - traj.t[0]

    events: list[tuple[float, int, str, float]] = []
    events.append((0.0, _PRIO[OP_PEN], OP_PEN, float(traj.pen[0])))
    for i in np.nonzero(np.diff(traj.pen) != 0)[0]:
        events.append((float(t[i + 1]), _PRIO[OP_PEN], OP_PEN, float(traj.pen[i + 1])))

    mx = my = 0
    for i in range(len(t) - 1):
        t0, t1 = float(t[i]), float(t[i + 1])
        span = t1 - t0
        for op, u, m in ((OP_STEP_X, ux, mx), (OP_STEP_Y, uy, my)):
            times, direction, m_end = _axis_steps(float(u[i]), float(u[i + 1]), m, t0, t1)
            count = abs(m_end - m)
            if count:
                rate = count / (span / 1000.0) if span > 0 else float("inf")
                if rate > cfg.max_step_rate:
                    raise GlyphMotionError(
                        "rate-limit",
                        f"interval {i}: {op} needs {rate:.0f} steps/s > {cfg.max_step_rate:g}")
                prio = _PRIO[op]
                for tt in times:
                    events.append((float(tt), prio, op, float(direction)))
            if op == OP_STEP_X:
                mx = m_end
            else:
                my = m_end

    events.sort(key=lambda e: (e[0], e[1]))

    commands: list[Command] = []
    cursor = 0.0
    for ev_t, _, op, arg in events:
        gap_us = (ev_t - cursor) * 1000.0
        if gap_us > 1e-9:
            commands.append(Command(OP_DWELL, gap_us))
        cursor = ev_t
        commands.append(Command(op, arg))
    total = float(t[-1])
    tail_us = (total - cursor) * 1000.0
    if tail_us > 1e-9:
        commands.append(Command(OP_DWELL, tail_us))
    return CommandProgram(origin, tuple(commands), total)


class LimitReport(NamedTuple):
    peak_rate_x: float    # steps/s
    peak_rate_y: float
    x_min: float          # mm, stage coordinates
    x_max: float
    y_min: float
    y_max: float
    pen_toggles: int
    flags: tuple[str, ...]


def _peak_rate(step_count: int, duration_us: float) -> float:
    # sustained per-axis rate; boundary-grazing reversal pairs make
    # adjacent-pulse gaps meaningless as a rate measure
    if step_count == 0:
        return 0.0
    if duration_us <= 0:
        return float("inf")
    return step_count / (duration_us / 1e6)


def check_limits(prog: CommandProgram, cfg: DeviceConfig | None = None) -> LimitReport:
    """Static audit of a program: peak per-axis step rates, position extremes,
    pen toggle count, plus flags for rate or workspace violations."""
    cfg = cfg or DeviceConfig()
    res = cfg.step_resolution
    t_us = 0.0
    kx = ky = 0
    x_min = x_max = prog.origin[0]
    y_min = y_max = prog.origin[1]
    n_steps_x = n_steps_y = 0
    pen_toggles = 0
    pen_state: float | None = None
    for op, arg in prog.commands:
        if op == OP_DWELL:
            t_us += arg
        elif op == OP_STEP_X:
            kx += int(arg)
            n_steps_x += 1
            x = prog.origin[0] + kx * res
            x_min, x_max = min(x_min, x), max(x_max, x)
        elif op == OP_STEP_Y:
            ky += int(arg)
            n_steps_y += 1
            y = prog.origin[1] + ky * res
            y_min, y_max = min(y_min, y), max(y_max, y)
        elif op == OP_PEN:
            if pen_state is not None and arg != pen_state:
                pen_toggles += 1
            pen_state = arg
        else:
            raise GlyphMotionError("format", f"unknown command {op!r}")

    duration_us = prog.declared_duration * 1000.0
    rx = _peak_rate(n_steps_x, duration_us)
    ry = _peak_rate(n_steps_y, duration_us)
    flags: list[str] = []
    if rx > cfg.max_step_rate:
        flags.append(f"rate-limit: x {rx:.0f} steps/s")
    if ry > cfg.max_step_rate:
        flags.append(f"rate-limit: y {ry:.0f} steps/s")
    if x_min < 0 or x_max > cfg.workspace_x:
        flags.append("workspace-overflow: x")
    if y_min < 0 or y_max > cfg.workspace_y:
        flags.append("workspace-overflow: y")
    return LimitReport(rx, ry, x_min, x_max, y_min, y_max, pen_toggles, tuple(flags))


def program_duration(prog: CommandProgram) -> float:
    """Sum of dwell time in milliseconds."""
    return sum(arg for op, arg in prog.commands if op == OP_DWELL) / 1000.0


# ---------------------------------------------------------------------------
# Program text format, one command per line:
#   ORIGIN <x mm> <y mm>
#   DUR <ms>
#   SX +1 | SX -1 | SY +1 | SY -1 | PEN 0 | PEN 1 | W <microseconds>
# Floats are written with repr so the round-trip is bit-exact.
# ---------------------------------------------------------------------------


def serialize_program(prog: CommandProgram) -> str:
    lines = [f"ORIGIN {prog.origin[0]!r} {prog.origin[1]!r}", f"DUR {prog.declared_duration!r}"]
    for op, arg in prog.commands:
        if op == OP_DWELL:
            lines.append(f"W {arg!r}")
        elif op == OP_PEN:
            lines.append(f"PEN {int(arg)}")
        else:
            lines.append(f"{op} {'+1' if arg > 0 else '-1'}")
    return "\n".join(lines) + "\n"


def parse_program(text: str) -> CommandProgram:
    origin = None
    duration = None
    commands: list[Command] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "ORIGIN" and len(parts) == 3:
                origin = (float(parts[1]), float(parts[2]))
            elif parts[0] == "DUR" and len(parts) == 2:
                duration = float(parts[1])
            elif parts[0] in (OP_STEP_X, OP_STEP_Y) and len(parts) == 2 and parts[1] in ("+1", "-1"):
                commands.append(Command(parts[0], 1.0 if parts[1] == "+1" else -1.0))
            elif parts[0] == OP_PEN and len(parts) == 2 and parts[1] in ("0", "1"):
                commands.append(Command(OP_PEN, float(parts[1])))
            elif parts[0] == OP_DWELL and len(parts) == 2:
                w = float(parts[1])
                if not (w > 0):
                    raise ValueError("dwell must be > 0")
                commands.append(Command(OP_DWELL, w))
            else:
                raise ValueError(f"unrecognized command {parts[0]!r}")
        except ValueError as e:
            raise GlyphMotionError("format", f"line {ln}: {e}") from e
    if origin is None or duration is None:
        raise GlyphMotionError("format", "missing ORIGIN or DUR header")
    return CommandProgram(origin, tuple(commands), duration)
