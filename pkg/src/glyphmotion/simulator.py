"""Idealized execution of command programs on the stage + solenoid model.

Steps land instantaneously at their scheduled times; the solenoid follows
pen commands after a configurable actuation delay.  The trace records the
device state after every command (and at every delayed pen transition), so
downstream comparison against the intended trajectory needs no knowledge of
the command stream itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compiler import (
    OP_DWELL,
    OP_PEN,
    OP_STEP_X,
    OP_STEP_Y,
    CommandProgram,
    DeviceConfig,
    check_limits,
)
from .errors import GlyphMotionError
from .trajectory import PEN_UP, GlyphTrajectory


@dataclass(frozen=True)
class SimulatedTrace:
    """Device states over time: parallel arrays, one row per state change."""

    t_us: np.ndarray
    x: np.ndarray
    y: np.ndarray
    pen: np.ndarray

    @property
    def final_position(self) -> tuple[float, float]:
        return (float(self.x[-1]), float(self.y[-1]))

    @property
    def duration_ms(self) -> float:
        return float(self.t_us[-1]) / 1000.0


def execute(prog: CommandProgram, cfg: DeviceConfig | None = None) -> SimulatedTrace:
    """Run a program; returns the realized state trace.

    Raises "limit-violation" when the static audit flags the program, and
    "runaway" if the position somehow leaves the workspace mid-run.
    """
    cfg = cfg or DeviceConfig()
    report = check_limits(prog, cfg)
    if report.flags:
        raise GlyphMotionError("limit-violation", "; ".join(report.flags))

    res = cfg.step_resolution
    delay_us = cfg.solenoid_actuation_delay * 1000.0

    n = len(prog.commands)
    if n == 0:
        end_us = prog.declared_duration * 1000.0
        t_rows = [0.0] if end_us == 0 else [0.0, end_us]
        k = len(t_rows)
        return SimulatedTrace(
            np.asarray(t_rows),
            np.full(k, prog.origin[0]),
            np.full(k, prog.origin[1]),
            np.full(k, PEN_UP, dtype=np.int8),
        )
    dt = np.zeros(n)
    dkx = np.zeros(n)
    dky = np.zeros(n)
    for i, (op, arg) in enumerate(prog.commands):
        if op == OP_DWELL:
            dt[i] = arg
        elif op == OP_STEP_X:
            dkx[i] = arg
        elif op == OP_STEP_Y:
            dky[i] = arg
    cmd_t = np.cumsum(dt)                      # time after each command, µs
    cmd_x = prog.origin[0] + np.cumsum(dkx) * res
    cmd_y = prog.origin[1] + np.cumsum(dky) * res

    if (cmd_x.size and (cmd_x.min() < 0 or cmd_x.max() > cfg.workspace_x
                        or cmd_y.min() < 0 or cmd_y.max() > cfg.workspace_y)):
        raise GlyphMotionError("runaway", "position left the workspace")

    # pen commands take effect delay_us after they are issued
    pen_eff_t: list[float] = []
    pen_eff_s: list[int] = []
    for i, (op, arg) in enumerate(prog.commands):
        if op == OP_PEN:
            t_issue = cmd_t[i - 1] if i > 0 else 0.0
            pen_eff_t.append(t_issue + delay_us)
            pen_eff_s.append(int(arg))

    eff_t = np.asarray(pen_eff_t)
    eff_s = np.asarray(pen_eff_s, dtype=np.int8)

    def pen_at(ts: np.ndarray) -> np.ndarray:
        if eff_t.size == 0:
            return np.full(len(ts), PEN_UP, dtype=np.int8)
        idx = np.searchsorted(eff_t, ts, side="right") - 1
        out = np.where(idx >= 0, eff_s[np.clip(idx, 0, None)], PEN_UP)
        return out.astype(np.int8)

    # state rows: t=0 start, one row per command, one row per pen effect,
    # and a terminal row at the declared end
    times = [np.zeros(1), cmd_t, eff_t]
    end_us = prog.declared_duration * 1000.0
    if eff_t.size:
        end_us = max(end_us, float(eff_t.max()))
    times.append(np.asarray([end_us]))
    t_all = np.concatenate(times)
    order = np.argsort(t_all, kind="stable")
    t_all = t_all[order]

    pos_idx = np.searchsorted(cmd_t, t_all, side="right") - 1
    x_all = np.where(pos_idx >= 0, cmd_x[np.clip(pos_idx, 0, None)], prog.origin[0])
    y_all = np.where(pos_idx >= 0, cmd_y[np.clip(pos_idx, 0, None)], prog.origin[1])
    pen_all = pen_at(t_all)
    return SimulatedTrace(t_all, x_all, y_all, pen_all)


@dataclass(frozen=True)
class TrackingError:
    max_mm: float
    rms_mm: float


def tracking_error(intended: GlyphTrajectory, trace: SimulatedTrace) -> TrackingError:
    """Pointwise position error between intent and realized trace.

    Both are sampled on a common 1 ms grid; the trace holds its last state
    between rows (the stage really does sit still between steps).  The trace
    lives in device coordinates while the glyph keeps its own frame, so the
    intent is shifted by the placement offset before comparing.  The trace
    starts exactly where the compiler placed the first sample, which makes
    that offset recoverable without knowing the device geometry.
    """
    t0 = float(intended.t[0])
    dur_int = intended.duration
    if abs(dur_int - trace.duration_ms) > 1e-3:
        raise GlyphMotionError(
            "duration-mismatch",
            f"intended {dur_int} ms vs trace {trace.duration_ms} ms")

    ts = np.arange(0.0, dur_int + 0.5, 1.0)
    sx = float(trace.x[0]) - float(intended.x[0])
    sy = float(trace.y[0]) - float(intended.y[0])
    ix = np.interp(ts, intended.t - t0, intended.x) + sx
    iy = np.interp(ts, intended.t - t0, intended.y) + sy

    idx = np.clip(np.searchsorted(trace.t_us, ts * 1000.0, side="right") - 1, 0, None)
    err = np.hypot(ix - trace.x[idx], iy - trace.y[idx])
    return TrackingError(float(err.max()), float(np.sqrt(np.mean(err * err))))


def pen_transition_times(trace: SimulatedTrace) -> list[tuple[float, int]]:
    """(t_ms, new_state) for every pen change in the trace, in order."""
    out = []
    for i in range(1, len(trace.pen)):
        if trace.pen[i] != trace.pen[i - 1]:
            out.append((float(trace.t_us[i]) / 1000.0, int(trace.pen[i])))
    return out


def trace_rows_ms(trace: SimulatedTrace) -> list[list[float]]:
    """Trace resampled at 1 ms in the four-column sample format [t, x, y, pen]."""
    ts = np.arange(0.0, trace.duration_ms + 0.5, 1.0)
    idx = np.clip(np.searchsorted(trace.t_us, ts * 1000.0, side="right") - 1, 0, None)
    return [
        [float(t), float(trace.x[i]), float(trace.y[i]), int(trace.pen[i])]
        for t, i in zip(ts, idx)
    ]
