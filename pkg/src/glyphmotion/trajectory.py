"""Trajectory and stroke-font data model, validation, metrics, and file I/O.

A glyph trajectory is the timed 2D path of one lowercase letter as written,
plus the pen contact state per sample.  Units are fixed package-wide:
millimeters for x/y and milliseconds for t.  Pen state is encoded as
1 = down (tip on the plate) and 0 = up (repositioning travel).

Trajectories are stored as parallel read-only numpy arrays so the pipeline
stages can stay vectorized; ``samples`` exposes the per-sample tuple view.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import GlyphMotionError

LETTERS = tuple(string.ascii_lowercase)

PEN_DOWN = 1
PEN_UP = 0


class TimedSample(NamedTuple):
    t: float
    x: float
    y: float
    pen: int


class Diagnostic(NamedTuple):
    """One validation finding: the violated rule and the sample it points at."""

    rule: str
    index: int
    detail: str


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GlyphTrajectory:
    """Timed (t, x, y, pen) samples for one letter.

    The arrays are read-only and share one length.  Construction is
    permissive about semantic invariants (monotone time, pen-down presence,
    no repeated consecutive samples); ``validate_glyph`` reports violations.
    """

    letter: str
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    pen: np.ndarray

    def __post_init__(self):
        n = len(self.t)
        if not (len(self.x) == len(self.y) == len(self.pen) == n):
            raise GlyphMotionError("format", "sample arrays differ in length")
        object.__setattr__(self, "t", _readonly(np.asarray(self.t, dtype=np.float64)))
        object.__setattr__(self, "x", _readonly(np.asarray(self.x, dtype=np.float64)))
        object.__setattr__(self, "y", _readonly(np.asarray(self.y, dtype=np.float64)))
        object.__setattr__(self, "pen", _readonly(np.asarray(self.pen, dtype=np.int8)))

    @classmethod
    def from_samples(cls, letter: str, samples: Iterable[TimedSample | tuple]) -> "GlyphTrajectory":
        rows = [tuple(s) for s in samples]
        if not rows:
            raise GlyphMotionError("empty", f"glyph '{letter}' has no samples")
        arr = np.asarray(rows, dtype=np.float64)
        return cls(letter, arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3].astype(np.int8))

    @property
    def samples(self) -> list[TimedSample]:
        return [
            TimedSample(float(t), float(x), float(y), int(p))
            for t, x, y, p in zip(self.t, self.x, self.y, self.pen)
        ]

    def __len__(self) -> int:
        return len(self.t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GlyphTrajectory):
            return NotImplemented
        return (
            self.letter == other.letter
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.pen, other.pen)
        )

    @property
    def duration(self) -> float:
        """Total time span in milliseconds."""
        return float(self.t[-1] - self.t[0])


@dataclass(frozen=True)
class StrokeFont:
    """The complete 26-lowercase-letter trajectory set."""

    glyphs: Mapping[str, GlyphTrajectory]
    units: str = "mm_ms"
    provenance: str = ""

    def __post_init__(self):
        object.__setattr__(self, "glyphs", dict(self.glyphs))

    def __getitem__(self, letter: str) -> GlyphTrajectory:
        return self.glyphs[letter]

    def map_glyphs(self, fn, provenance: str | None = None) -> "StrokeFont":
        """New font with ``fn`` applied to every glyph."""
        out = {k: fn(g) for k, g in self.glyphs.items()}
        return StrokeFont(out, self.units, self.provenance if provenance is None else provenance)


@dataclass(frozen=True)
class BoundingBox:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise GlyphMotionError("format", "inverted bounding box")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def union(self, other: "BoundingBox") -> "BoundingBox":
        return BoundingBox(
            min(self.x_min, other.x_min),
            max(self.x_max, other.x_max),
            min(self.y_min, other.y_min),
            max(self.y_max, other.y_max),
        )


def validate_glyph(traj: GlyphTrajectory) -> list[Diagnostic]:
    """Check every trajectory invariant; an empty list means the glyph is valid.

    Rules reported: "letter", "length", "non-finite", "start-time",
    "time-order", "no-pen-down", "duplicate-sample", "pen-value".
    """
    diags: list[Diagnostic] = []
    if traj.letter not in LETTERS:
        diags.append(Diagnostic("letter", -1, f"letter {traj.letter!r} not in a-z"))
    n = len(traj)
    if n < 2:
        diags.append(Diagnostic("length", n - 1, f"{n} samples, need at least 2"))

    finite = np.isfinite(traj.t) & np.isfinite(traj.x) & np.isfinite(traj.y)
    for i in np.nonzero(~finite)[0]:
        diags.append(Diagnostic("non-finite", int(i), "t/x/y must be finite"))

    bad_pen = (traj.pen != PEN_DOWN) & (traj.pen != PEN_UP)
    for i in np.nonzero(bad_pen)[0]:
        diags.append(Diagnostic("pen-value", int(i), f"pen={int(traj.pen[i])}, expected 0 or 1"))

    if n and traj.t[0] != 0.0:
        diags.append(Diagnostic("start-time", 0, f"first sample at t={traj.t[0]}, expected 0"))
    if n > 1:
        decreasing = np.nonzero(np.diff(traj.t) < 0)[0]
        for i in decreasing:
            diags.append(Diagnostic("time-order", int(i) + 1, "t decreases"))
    if n and not np.any(traj.pen == PEN_DOWN):
        diags.append(Diagnostic("no-pen-down", -1, "no pen-down sample"))
    if n > 1:
        same = (
            (np.diff(traj.t) == 0)
            & (np.diff(traj.x) == 0)
            & (np.diff(traj.y) == 0)
            & (np.diff(traj.pen) == 0)
        )
        for i in np.nonzero(same)[0]:
            diags.append(Diagnostic("duplicate-sample", int(i) + 1, "identical consecutive sample"))
    return diags


def validate_font(font: StrokeFont) -> list[Diagnostic]:
    """Font-level validation: exact letter coverage plus per-glyph validity."""
    diags: list[Diagnostic] = []
    missing = [c for c in LETTERS if c not in font.glyphs]
    extra = [c for c in font.glyphs if c not in LETTERS]
    for c in missing:
        diags.append(Diagnostic("incomplete-font", -1, c))
    for c in extra:
        diags.append(Diagnostic("extra-letter", -1, c))
    for c, g in sorted(font.glyphs.items()):
        for d in validate_glyph(g):
            diags.append(Diagnostic(d.rule, d.index, f"{c}: {d.detail}"))
    return diags


def bounding_box(traj: GlyphTrajectory) -> BoundingBox:
    """Tight axis-aligned box over all samples, pen-up travel included."""
    if len(traj) == 0:
        raise GlyphMotionError("empty", "cannot bound an empty trajectory")
    return BoundingBox(
        float(traj.x.min()), float(traj.x.max()), float(traj.y.min()), float(traj.y.max())
    )


def glyph_height(traj: GlyphTrajectory) -> float:
    """Vertical extent (y_max - y_min) of the full trajectory, in mm."""
    return bounding_box(traj).height


def font_mean_height(font: StrokeFont) -> float:
    return float(np.mean([glyph_height(g) for g in font.glyphs.values()]))


def pen_down_path_length(traj: GlyphTrajectory) -> float:
    """Sum of segment lengths whose leading sample is pen-down, in mm."""
    if len(traj) == 0:
        raise GlyphMotionError("empty", "cannot measure an empty trajectory")
    if len(traj) == 1:
        return 0.0
    seg = np.hypot(np.diff(traj.x), np.diff(traj.y))
    down = traj.pen[:-1] == PEN_DOWN
    return float(seg[down].sum())


# ---------------------------------------------------------------------------
# Font file format: UTF-8 JSON
#   {"units": "mm_ms", "provenance": <str>, "glyphs": {"a": [[t,x,y,pen], ...], ...}}
# pen: 1 = down, 0 = up.  Numbers round-trip bit-exact through decimal text.
# ---------------------------------------------------------------------------


def _glyph_rows(g: GlyphTrajectory) -> list[list[float]]:
    return [
        [float(t), float(x), float(y), int(p)]
        for t, x, y, p in zip(g.t, g.x, g.y, g.pen)
    ]


def serialize_font(font: StrokeFont) -> bytes:
    doc = {
        "units": font.units,
        "provenance": font.provenance,
        "glyphs": {c: _glyph_rows(font.glyphs[c]) for c in sorted(font.glyphs)},
    }
    return json.dumps(doc, allow_nan=False, indent=None).encode("utf-8")


def _rows_to_glyph(letter: str, rows, where: str) -> GlyphTrajectory:
    if not isinstance(rows, list) or not rows:
        raise GlyphMotionError("format", f"{where}: glyph must be a non-empty array")
    t = np.empty(len(rows))
    x = np.empty(len(rows))
    y = np.empty(len(rows))
    pen = np.empty(len(rows), dtype=np.int8)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != 4:
            raise GlyphMotionError("format", f"{where}[{i}]: expected [t, x, y, pen]")
        ti, xi, yi, pi = row
        for v in (ti, xi, yi):
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise GlyphMotionError("format", f"{where}[{i}]: non-numeric value {v!r}")
        if pi not in (0, 1):
            raise GlyphMotionError("format", f"{where}[{i}]: pen={pi!r}, expected 0 or 1")
        t[i], x[i], y[i], pen[i] = ti, xi, yi, pi
    return GlyphTrajectory(letter, t, x, y, pen)


def parse_font(data: bytes | str) -> StrokeFont:
    """Parse the font file format; inverse of ``serialize_font``.

    Raises "format" (with line/column for syntax problems) or
    "incomplete-font" naming the first missing letter.  Structural checks
    only; run ``validate_font`` for the semantic invariants.
    """
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GlyphMotionError("format", f"line {e.lineno} column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise GlyphMotionError("format", "top level must be an object")
    units = doc.get("units")
    if units != "mm_ms":
        raise GlyphMotionError("format", f"units={units!r}, expected 'mm_ms'")
    provenance = doc.get("provenance", "")
    if not isinstance(provenance, str):
        raise GlyphMotionError("format", "provenance must be a string")
    glyphs_doc = doc.get("glyphs")
    if not isinstance(glyphs_doc, dict):
        raise GlyphMotionError("format", "missing 'glyphs' object")
    for c in LETTERS:
        if c not in glyphs_doc:
            raise GlyphMotionError("incomplete-font", c)
    for c in glyphs_doc:
        if c not in LETTERS:
            raise GlyphMotionError("format", f"unexpected glyph key {c!r}")
    glyphs = {c: _rows_to_glyph(c, glyphs_doc[c], f"glyphs[{c!r}]") for c in LETTERS}
    return StrokeFont(glyphs, "mm_ms", provenance)


# Single-glyph file: {"letter": "a", "units": "mm_ms", "samples": [[t,x,y,pen], ...]}
# Same four-column arrays as the font file; used by the CLI and trace export.


def serialize_glyph(traj: GlyphTrajectory) -> bytes:
    doc = {"letter": traj.letter, "units": "mm_ms", "samples": _glyph_rows(traj)}
    return json.dumps(doc, allow_nan=False).encode("utf-8")


def parse_glyph(data: bytes | str) -> GlyphTrajectory:
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GlyphMotionError("format", f"line {e.lineno} column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict) or "samples" not in doc:
        raise GlyphMotionError("format", "expected object with 'samples'")
    letter = doc.get("letter", "")
    if letter not in LETTERS:
        raise GlyphMotionError("format", f"letter {letter!r} not in a-z")
    return _rows_to_glyph(letter, doc["samples"], "samples")
