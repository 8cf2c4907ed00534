"""Trajectory conditioning: resampling, smoothing, spatial and temporal scaling.

The pipeline order is fixed: resample to a uniform grid, zero-phase FIR
smoothing, spatial resize to a target mean letter height, then temporal
stretch to a constant per-letter duration.  Spatial before temporal keeps
the velocity profile of a glyph a pure rescaling of the original, which is
what lets differently sized and paced variants of the same letter feel like
the same motion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import GlyphMotionError
from .trajectory import (
    GlyphTrajectory,
    StrokeFont,
    bounding_box,
    font_mean_height,
)

DEFAULT_DT = 5.0        # output sampling interval, ms (200 Hz)
DEFAULT_WINDOW = 5      # moving-average length, samples

# uniform-grid tolerance, relative to the spacing
_UNIFORM_RTOL = 1e-9


@dataclass(frozen=True)
class PresentationCondition:
    """A (letter height, display duration) pair."""

    target_mean_height: float   # mm
    target_duration: float      # ms

    def __post_init__(self):
        if not (self.target_mean_height > 0):
            raise GlyphMotionError("format", "target_mean_height must be > 0")
        if not (self.target_duration > 0):
            raise GlyphMotionError("format", "target_duration must be > 0")

    def label(self) -> str:
        return f"{self.target_mean_height:g}mm/{self.target_duration:g}ms"


@dataclass(frozen=True)
class SmoothingSpec:
    """Zero-phase moving average, applied per contiguous same-pen segment."""

    window_length: int = DEFAULT_WINDOW

    def __post_init__(self):
        if self.window_length < 1 or self.window_length % 2 == 0:
            raise GlyphMotionError("format", f"window_length={self.window_length}, must be odd and >= 1")


def resample_uniform(traj: GlyphTrajectory, dt: float) -> GlyphTrajectory:
    """Resample onto the uniform grid t0, t0+dt, ..., extended to cover the end.

    The grid runs to the first multiple of dt at or past the source end, so
    the output spacing is exactly dt everywhere and downstream filtering
    never sees an odd-length tail interval.  Positions on ticks past the
    source end hold the final sample.  x and y are linearly interpolated.
    Pen transitions are never interpolated: each transition snaps to the
    first output tick at or after its original time, so a transition can
    only move later, never earlier, and the pen-down ink never starts ahead
    of the source.
    """
    total = traj.duration
    if not (dt > 0) or dt >= total:
        raise GlyphMotionError("degenerate-dt", f"dt={dt} ms against a {total} ms trajectory")
    t0 = float(traj.t[0])
    ratio = total / dt
    n = int(np.ceil(ratio))
    if n - ratio > 1.0 - _UNIFORM_RTOL:   # ratio is an integer up to rounding
        n -= 1
    ticks = t0 + np.arange(n + 1, dtype=np.float64) * dt

    x = np.interp(ticks, traj.t, traj.x)
    y = np.interp(ticks, traj.t, traj.y)
    pen = np.full(len(ticks), traj.pen[0], dtype=np.int8)
    flips = np.nonzero(np.diff(traj.pen) != 0)[0] + 1
    for i in flips:
        k = int(np.searchsorted(ticks, traj.t[i], side="left"))
        if k < len(ticks):
            pen[k:] = traj.pen[i]
    return GlyphTrajectory(traj.letter, ticks, x, y, pen)


def _is_uniform(t: np.ndarray) -> bool:
    if len(t) < 2:
        return False
    d = np.diff(t)
    return bool(np.all(np.abs(d - d[0]) <= _UNIFORM_RTOL * max(abs(d[0]), 1.0)))


def _pen_runs(pen: np.ndarray):
    """Yield (start, stop) index ranges of contiguous equal pen state."""
    edges = np.nonzero(np.diff(pen) != 0)[0] + 1
    bounds = np.concatenate([[0], edges, [len(pen)]])
    for a, b in zip(bounds[:-1], bounds[1:]):
        yield int(a), int(b)


def smooth_fir(traj: GlyphTrajectory, spec: SmoothingSpec) -> GlyphTrajectory:
    """Zero-phase moving average of x and y within each same-pen segment.

    Reflection padding at segment ends keeps endpoints anchored without
    inventing positions outside the segment; pen-up repositioning is never
    blended into written strokes.  window_length 1 is the identity.
    """
    if not _is_uniform(traj.t):
        raise GlyphMotionError("requires-uniform", "smoothing needs a uniformly resampled trajectory")
    w = spec.window_length
    if w == 1:
        return traj
    kernel = np.full(w, 1.0 / w)
    pad = w // 2
    x = traj.x.copy()
    y = traj.y.copy()
    for a, b in _pen_runs(traj.pen):
        for arr in (x, y):
            seg = np.pad(arr[a:b], pad, mode="reflect")
            arr[a:b] = np.convolve(seg, kernel, mode="valid")
    return GlyphTrajectory(traj.letter, traj.t, x, y, traj.pen)


def scale_font_to_mean_height(font: StrokeFont, h: float) -> StrokeFont:
    """Scale all glyphs by one factor so the mean glyph height becomes h.

    The factor is applied about each glyph's own bounding-box center, so
    every letter stays centered where it was while relative proportions
    across the font are preserved.
    """
    if not (h > 0):
        raise GlyphMotionError("format", f"target height {h} must be > 0")
    mean = font_mean_height(font)
    if mean == 0:
        raise GlyphMotionError("degenerate-font", "font mean glyph height is zero")
    s = h / mean

    def scaled(g: GlyphTrajectory) -> GlyphTrajectory:
        cx, cy = bounding_box(g).center
        return GlyphTrajectory(g.letter, g.t, cx + s * (g.x - cx), cy + s * (g.y - cy), g.pen)

    return font.map_glyphs(scaled)


def scale_temporal(traj: GlyphTrajectory, d: float) -> GlyphTrajectory:
    """Multiply every timestamp by d / duration; the final time is exactly d."""
    total = traj.duration
    if total == 0 or not (d > 0):
        raise GlyphMotionError("degenerate-duration", f"cannot stretch {total} ms to {d} ms")
    t = traj.t * (d / total)
    t[-1] = d
    return GlyphTrajectory(traj.letter, t, traj.x, traj.y, traj.pen)


class VelocityProfile(NamedTuple):
    t: np.ndarray       # ms
    speed: np.ndarray   # mm/s


def velocity_profile(traj: GlyphTrajectory) -> VelocityProfile:
    """Speed magnitude per sample: central differences inside, one-sided at the ends."""
    if len(traj) < 2:
        raise GlyphMotionError("too-short", "need at least 2 samples for a velocity profile")
    dx = np.gradient(traj.x, traj.t)
    dy = np.gradient(traj.y, traj.t)
    return VelocityProfile(traj.t.copy(), np.hypot(dx, dy) * 1000.0)


def prepare_presentation(font: StrokeFont, cond: PresentationCondition,
                         smoothing: SmoothingSpec | None = None,
                         dt: float = DEFAULT_DT) -> StrokeFont:
    """Full conditioning pipeline over a font.

    Stage order is fixed: resample at dt, smooth, spatial resize to the
    target mean height, temporal stretch to the target duration.  The
    condition enters only after smoothing, so every variant of a glyph is
    the same filtered signal under a pure rescale of space and time; that
    is what keeps its velocity profile shape identical across conditions.
    The output grid spacing within a glyph is dt scaled by the same factor
    as its duration.  Provenance records the condition applied.
    """
    smoothing = smoothing if smoothing is not None else SmoothingSpec()
    conditioned = font.map_glyphs(lambda g: smooth_fir(
        resample_uniform(g, dt), smoothing))
    sized = scale_font_to_mean_height(conditioned, cond.target_mean_height)
    timed = sized.map_glyphs(lambda g: scale_temporal(g, cond.target_duration))
    return StrokeFont(timed.glyphs, font.units,
                      f"{font.provenance} | prepared {cond.label()} dt={dt:g}ms w={smoothing.window_length}")
