"""Synthetic participant: nearest-template classification under DTW.

The classifier consumes the same prepared trajectories a human hand would
receive and confuses letters whose motions are genuinely similar.  It is a
test instrument for the experiment engine, not a model of human perception.

Distances use classic dynamic time warping over (x, y, pen) samples with a
fixed pen-mismatch penalty, normalized by warping-path length so sequences
of different sample counts compare on one scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import GlyphMotionError
from .trajectory import LETTERS, GlyphTrajectory, StrokeFont

DEFAULT_PEN_PENALTY = 2.0  # mm; on the order of feature sizes at 7 mm height


@dataclass(frozen=True)
class NoiseSpec:
    """Per-sample spatial Gaussian noise, deterministic in the seed."""

    sigma: float
    seed: int

    def __post_init__(self):
        if self.sigma < 0:
            raise GlyphMotionError("format", "sigma must be >= 0")


def add_noise(traj: GlyphTrajectory, noise: NoiseSpec) -> GlyphTrajectory:
    """Independent Gaussian offsets on x and y; times and pen untouched."""
    rng = np.random.default_rng(noise.seed)
    x = traj.x + rng.normal(0.0, noise.sigma, len(traj))
    y = traj.y + rng.normal(0.0, noise.sigma, len(traj))
    return GlyphTrajectory(traj.letter, traj.t, x, y, traj.pen)


@njit(cache=True)
def _dtw(xa, ya, pa, xb, yb, pb, penalty):
    """Min accumulated cost / its path length; steps (1,1), (1,0), (0,1).

    Among equal-cost alignments the shortest path is taken, which makes the
    normalized value deterministic.
    """
    n = xa.shape[0]
    m = xb.shape[0]
    cost = np.full((n + 1, m + 1), np.inf)
    plen = np.zeros((n + 1, m + 1), dtype=np.int64)
    cost[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            dx = xa[i - 1] - xb[j - 1]
            dy = ya[i - 1] - yb[j - 1]
            c = np.sqrt(dx * dx + dy * dy)
            if pa[i - 1] != pb[j - 1]:
                c += penalty
            best = cost[i - 1, j - 1]
            bl = plen[i - 1, j - 1]
            if cost[i - 1, j] < best or (cost[i - 1, j] == best and plen[i - 1, j] < bl):
                best = cost[i - 1, j]
                bl = plen[i - 1, j]
            if cost[i, j - 1] < best or (cost[i, j - 1] == best and plen[i, j - 1] < bl):
                best = cost[i, j - 1]
                bl = plen[i, j - 1]
            cost[i, j] = best + c
            plen[i, j] = bl + 1
    return cost[n, m] / plen[n, m]


@njit(cache=True)
def _dtw_batch(xa, ya, pa, xs, ys, ps, offsets, penalty):
    out = np.empty(offsets.shape[0] - 1)
    for k in range(offsets.shape[0] - 1):
        a, b = offsets[k], offsets[k + 1]
        out[k] = _dtw(xa, ya, pa, xs[a:b], ys[a:b], ps[a:b], penalty)
    return out


def _seq(traj: GlyphTrajectory):
    if len(traj) == 0:
        raise GlyphMotionError("empty", "cannot align an empty trajectory")
    return (
        np.ascontiguousarray(traj.x),
        np.ascontiguousarray(traj.y),
        np.ascontiguousarray(traj.pen),
    )


def dtw_distance(a: GlyphTrajectory, b: GlyphTrajectory,
                 penalty: float = DEFAULT_PEN_PENALTY) -> float:
    xa, ya, pa = _seq(a)
    xb, yb, pb = _seq(b)
    return float(_dtw(xa, ya, pa, xb, yb, pb, penalty))


class TemplateSet:
    """Prebuilt template arrays for repeated classification against one font."""

    def __init__(self, font: StrokeFont, penalty: float = DEFAULT_PEN_PENALTY):
        self.penalty = penalty
        self.letters = LETTERS
        xs, ys, ps = [], [], []
        offsets = [0]
        for c in LETTERS:
            x, y, p = _seq(font.glyphs[c])
            xs.append(x)
            ys.append(y)
            ps.append(p)
            offsets.append(offsets[-1] + len(x))
        self.xs = np.concatenate(xs)
        self.ys = np.concatenate(ys)
        self.ps = np.concatenate(ps)
        self.offsets = np.asarray(offsets, dtype=np.int64)

    def distances(self, traj: GlyphTrajectory) -> np.ndarray:
        xa, ya, pa = _seq(traj)
        return _dtw_batch(xa, ya, pa, self.xs, self.ys, self.ps, self.offsets, self.penalty)


def classify(traj: GlyphTrajectory, templates: StrokeFont | TemplateSet,
             penalty: float = DEFAULT_PEN_PENALTY) -> tuple[str, list[tuple[str, float]]]:
    """Nearest template letter plus the full (letter, distance) ranking.

    Ties in distance resolve alphabetically.
    """
    if isinstance(templates, StrokeFont):
        templates = TemplateSet(templates, penalty)
    scores = templates.distances(traj)
    ranking = sorted(zip(LETTERS, (float(s) for s in scores)), key=lambda kv: (kv[1], kv[0]))
    return ranking[0][0], ranking
