"""Deterministic built-in stroke font: 26 timed lowercase letter trajectories.

Glyph geometry is authored as line/arc segments on a shared grid
(baseline y=0, x-height 1.0, ascenders 1.85, descenders to about -0.8) and
rendered to timed samples with a smooth ease-in/ease-out speed profile.
Ascenders on b/d/h/k/l are deliberately exaggerated (>= 1.8x the x-height)
to keep look-alike pairs such as a/d apart when traced by hand.

Timing is isochronous: every letter takes exactly the same raw duration,
with the nominal writing speed set per letter from its path length, the way
handwriting paces itself (long letters are written faster, not longer).
A constant duration that is a whole number of sample intervals also means
the conditioning pipeline resamples this font onto its own grid, so a
prepared variant reproduces the authored geometry exactly at every node.

Pen-up repositioning between strokes is generated as straight travel at a
fixed multiple of the letter's writing speed, so the timing structure of
multi-stroke letters (dots, crossbars) survives the downstream duration
scaling.  The stage parks briefly on both sides of every pen transition;
lifting or dropping mid-motion would smear the contact point once the
solenoid lag is added, and the pause also keeps per-segment smoothing from
widening the position jump across the transition.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .trajectory import LETTERS, PEN_DOWN, PEN_UP, GlyphTrajectory, StrokeFont

UNIT_MM = 8.0          # grid unit -> mm (x-height = 8 mm in the raw font)
RAW_DURATION = 1000.0  # every raw glyph lasts exactly this long, ms
TRAVEL_RATIO = 1.4     # pen-up travel speed as a multiple of writing speed
EASE = 0.3             # ease-in/out depth; instantaneous speed in [0.7, 1.3] x nominal
SAMPLE_DT = 5.0        # raw sampling interval, ms
PEN_SETTLE_MS = 25.0   # park time on each side of a pen transition

PROVENANCE = "glyphmotion fixture font v1 (generated, isochronous, exaggerated ascenders)"


def _line(x0, y0, x1, y1):
    return ("line", (x0, y0, x1, y1))


def _arc(cx, cy, r, deg0, deg1):
    return ("arc", (cx, cy, r, deg0, deg1))


def _arc_pt(cx, cy, r, deg):
    a = math.radians(deg)
    return (cx + r * math.cos(a), cy + r * math.sin(a))


def _build_glyph_table() -> dict[str, list[list[tuple]]]:
    # Segments per stroke; consecutive segments are continuous.  Strokes
    # within a letter are separated by generated pen-up travel.
    A = _arc_pt
    t = {}
    t["a"] = [[_arc(0.4, 0.5, 0.4, 45, 405),
               _line(*A(0.4, 0.5, 0.4, 45), 0.8, 1.0),
               _line(0.8, 1.0, 0.8, 0.0)]]
    t["b"] = [[_line(0.0, 1.85, 0.0, 0.0),
               _line(0.0, 0.0, 0.0, 0.4),
               _arc(0.4, 0.4, 0.4, 180, -180)]]
    t["c"] = [[_arc(0.45, 0.5, 0.45, 55, 305)]]
    t["d"] = [[_arc(0.4, 0.45, 0.4, 45, 405),
               _line(*A(0.4, 0.45, 0.4, 45), 0.8, 1.85),
               _line(0.8, 1.85, 0.8, 0.0)]]
    t["e"] = [[_line(0.05, 0.52, 0.85, 0.52),
               _arc(0.45, 0.52, 0.4, 0, 315)]]
    t["f"] = [[_arc(0.55, 1.45, 0.35, 30, 180),
               _line(0.2, 1.45, 0.2, 0.0)],
              [_line(0.0, 1.0, 0.6, 1.0)]]
    t["g"] = [[_arc(0.4, 0.5, 0.4, 45, 405),
               _line(*A(0.4, 0.5, 0.4, 45), 0.8, 1.0),
               _line(0.8, 1.0, 0.8, -0.4),
               _arc(0.4, -0.4, 0.4, 0, -180)]]
    t["h"] = [[_line(0.0, 1.85, 0.0, 0.0),
               _line(0.0, 0.0, 0.0, 0.55),
               _arc(0.4, 0.55, 0.4, 180, 0),
               _line(0.8, 0.55, 0.8, 0.0)]]
    t["i"] = [[_line(0.0, 1.0, 0.0, 0.0)],
              [_arc(0.0, 1.32, 0.05, 90, 450)]]
    t["j"] = [[_line(0.55, 1.0, 0.55, -0.35),
               _arc(0.25, -0.35, 0.3, 0, -150)],
              [_arc(0.55, 1.32, 0.05, 90, 450)]]
    t["k"] = [[_line(0.0, 1.85, 0.0, 0.0)],
              [_line(0.62, 1.0, 0.05, 0.42),
               _line(0.05, 0.42, 0.68, 0.0)]]
    t["l"] = [[_line(0.0, 1.85, 0.0, 0.16),
               _arc(0.16, 0.16, 0.16, 180, 270)]]
    t["m"] = [[_line(0.0, 1.0, 0.0, 0.0),
               _line(0.0, 0.0, 0.0, 0.72),
               _arc(0.24, 0.72, 0.24, 180, 0),
               _line(0.48, 0.72, 0.48, 0.0),
               _line(0.48, 0.0, 0.48, 0.72),
               _arc(0.72, 0.72, 0.24, 180, 0),
               _line(0.96, 0.72, 0.96, 0.0)]]
    t["n"] = [[_line(0.0, 1.0, 0.0, 0.0),
               _line(0.0, 0.0, 0.0, 0.6),
               _arc(0.4, 0.6, 0.4, 180, 0),
               _line(0.8, 0.6, 0.8, 0.0)]]
    t["o"] = [[_arc(0.5, 0.5, 0.5, 90, 450)]]
    t["p"] = [[_line(0.0, 1.0, 0.0, -0.8),
               _line(0.0, -0.8, 0.0, 0.4),
               _arc(0.4, 0.4, 0.4, 180, -180)]]
    t["q"] = [[_arc(0.4, 0.5, 0.4, 45, 405),
               _line(*A(0.4, 0.5, 0.4, 45), 0.8, 1.0),
               _line(0.8, 1.0, 0.8, -0.6),
               _line(0.8, -0.6, 0.98, -0.38)]]
    t["r"] = [[_line(0.0, 1.0, 0.0, 0.0),
               _line(0.0, 0.0, 0.0, 0.62),
               _arc(0.3, 0.62, 0.3, 180, 20)]]
    t["s"] = [[_arc(0.38, 0.7, 0.3, 50, 270),
               _arc(0.38, 0.2, 0.2, 90, -125)]]
    t["t"] = [[_line(0.3, 1.4, 0.3, 0.15),
               _arc(0.45, 0.15, 0.15, 180, 300)],
              [_line(0.0, 1.0, 0.6, 1.0)]]
    t["u"] = [[_line(0.0, 1.0, 0.0, 0.4),
               _arc(0.4, 0.4, 0.4, 180, 360),
               _line(0.8, 0.4, 0.8, 1.0),
               _line(0.8, 1.0, 0.8, 0.0)]]
    t["v"] = [[_line(0.0, 1.0, 0.4, 0.0),
               _line(0.4, 0.0, 0.8, 1.0)]]
    t["w"] = [[_line(0.0, 1.0, 0.25, 0.0),
               _line(0.25, 0.0, 0.5, 0.75),
               _line(0.5, 0.75, 0.75, 0.0),
               _line(0.75, 0.0, 1.0, 1.0)]]
    t["x"] = [[_line(0.0, 1.0, 0.7, 0.0)],
              [_line(0.7, 1.0, 0.0, 0.0)]]
    t["y"] = [[_line(0.0, 1.0, 0.0, 0.4),
               _arc(0.4, 0.4, 0.4, 180, 360),
               _line(0.8, 0.4, 0.8, 1.0),
               _line(0.8, 1.0, 0.8, -0.4),
               _arc(0.4, -0.4, 0.4, 0, -120)]]
    t["z"] = [[_line(0.0, 1.0, 0.75, 1.0),
               _line(0.75, 1.0, 0.0, 0.0),
               _line(0.0, 0.0, 0.75, 0.0)]]
    return t


class _Segment:
    __slots__ = ("kind", "p", "length", "start", "end")

    def __init__(self, kind, p):
        self.kind = kind
        self.p = p
        if kind == "line":
            x0, y0, x1, y1 = p
            self.length = math.hypot(x1 - x0, y1 - y0)
            self.start = (x0, y0)
            self.end = (x1, y1)
        else:
            cx, cy, r, d0, d1 = p
            self.length = r * abs(math.radians(d1 - d0))
            self.start = _arc_pt(cx, cy, r, d0)
            self.end = _arc_pt(cx, cy, r, d1)

    def point_at(self, s: float) -> tuple[float, float]:
        u = 0.0 if self.length == 0 else min(max(s / self.length, 0.0), 1.0)
        if self.kind == "line":
            x0, y0, x1, y1 = self.p
            return (x0 + u * (x1 - x0), y0 + u * (y1 - y0))
        cx, cy, r, d0, d1 = self.p
        return _arc_pt(cx, cy, r, d0 + u * (d1 - d0))


class _Stroke:
    """One continuous pen state: a chain of segments traversed in a set time."""

    __slots__ = ("segments", "cum", "length", "pen", "duration")

    def __init__(self, segments: list[_Segment], pen: int, duration_ms: float):
        self.segments = segments
        self.cum = np.concatenate([[0.0], np.cumsum([s.length for s in segments])])
        self.length = float(self.cum[-1])  # grid units
        self.pen = pen
        self.duration = duration_ms

    def point_at(self, s: float) -> tuple[float, float]:
        i = int(np.searchsorted(self.cum, s, side="right")) - 1
        i = min(max(i, 0), len(self.segments) - 1)
        return self.segments[i].point_at(s - self.cum[i])


class _Hold:
    """Zero-motion phase: park at a point while the pen settles."""

    __slots__ = ("point", "pen", "duration", "length")

    def __init__(self, point: tuple[float, float], pen: int):
        self.point = point
        self.pen = pen
        self.duration = PEN_SETTLE_MS
        self.length = 0.0

    def point_at(self, s: float) -> tuple[float, float]:
        return self.point


def _ease(u: float) -> float:
    # Monotone arc-length warp: speed = 1 - EASE*cos(2*pi*u), slow at the
    # ends and fast mid-stroke, like relaxed handwriting.
    return u - EASE * math.sin(2.0 * math.pi * u) / (2.0 * math.pi)


def _render_letter(letter: str, strokes_spec: list[list[tuple]]) -> GlyphTrajectory:
    stroke_segs: list[list[_Segment]] = []
    for spec in strokes_spec:
        segs = [_Segment(k, p) for k, p in spec]
        for a, b in zip(segs, segs[1:]):
            if math.dist(a.end, b.start) > 1e-9:
                raise AssertionError(f"{letter}: discontinuous stroke at {a.end} -> {b.start}")
        stroke_segs.append(segs)
    travels = [_Segment("line", (*prev[-1].end, *nxt[0].start))
               for prev, nxt in zip(stroke_segs, stroke_segs[1:])]

    # isochrony: pick the writing pace that fills the fixed duration after
    # subtracting the settle holds, counting travel at its speed advantage
    write_len = sum(s.length for segs in stroke_segs for s in segs)
    travel_len = sum(tr.length for tr in travels)
    moving_ms = RAW_DURATION - 4.0 * PEN_SETTLE_MS * len(travels)
    pace = (write_len + travel_len / TRAVEL_RATIO) / moving_ms   # units per ms

    phases: list[_Stroke | _Hold] = []
    for i, segs in enumerate(stroke_segs):
        if i > 0:
            tr = travels[i - 1]
            phases.append(_Hold(tr.start, PEN_DOWN))
            phases.append(_Hold(tr.start, PEN_UP))
            phases.append(_Stroke([tr], PEN_UP, tr.length / (pace * TRAVEL_RATIO)))
            phases.append(_Hold(tr.end, PEN_UP))
            phases.append(_Hold(tr.end, PEN_DOWN))
        phases.append(_Stroke(segs, PEN_DOWN, sum(s.length for s in segs) / pace))

    starts = np.concatenate([[0.0], np.cumsum([p.duration for p in phases])])
    assert abs(starts[-1] - RAW_DURATION) < 1e-9, f"{letter}: phases sum to {starts[-1]} ms"
    n = int(round(RAW_DURATION / SAMPLE_DT))
    times = [i * SAMPLE_DT for i in range(n)] + [RAW_DURATION]

    xs, ys, pens = [], [], []
    for tm in times:
        k = int(np.searchsorted(starts, tm, side="right")) - 1
        k = min(max(k, 0), len(phases) - 1)
        st = phases[k]
        u = 1.0 if st.duration == 0 else min((tm - starts[k]) / st.duration, 1.0)
        px, py = st.point_at(st.length * _ease(u))
        xs.append(px * UNIT_MM)
        ys.append(py * UNIT_MM)
        pens.append(st.pen)
    return GlyphTrajectory(letter, np.asarray(times), np.asarray(xs), np.asarray(ys),
                           np.asarray(pens, dtype=np.int8))


@lru_cache(maxsize=1)
def fixture_font() -> StrokeFont:
    """The built-in deterministic font (raw scale: x-height 8 mm)."""
    table = _build_glyph_table()
    glyphs = {c: _render_letter(c, table[c]) for c in LETTERS}
    return StrokeFont(glyphs, "mm_ms", PROVENANCE)
