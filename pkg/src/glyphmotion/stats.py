"""Paired t-test, balanced two-way ANOVA, and presentation-rate arithmetic.

p-values come from the exact t and F distribution functions, evaluated
through the regularized incomplete beta function, so results are
reproducible to full precision rather than table-limited.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.special import betainc

from .errors import GlyphMotionError


@dataclass(frozen=True)
class StatsReport:
    effect: str
    statistic: float
    df: tuple[float, ...]
    p_value: float

    def __post_init__(self):
        if not (0.0 <= self.p_value <= 1.0):
            raise GlyphMotionError("format", f"p_value {self.p_value} outside [0, 1]")


def t_cdf(t: float, df: float) -> float:
    """Student t distribution function; exact 0.5 at t = 0."""
    if df < 1:
        raise GlyphMotionError("bad-df", f"df={df}, need >= 1")
    if t == 0.0:
        return 0.5
    tail = 0.5 * float(betainc(df / 2.0, 0.5, df / (df + t * t)))  # P(T >= |t|)
    return 1.0 - tail if t > 0 else tail


def f_cdf(f: float, df1: float, df2: float) -> float:
    """F distribution function; 0 at and below f = 0."""
    if df1 < 1 or df2 < 1:
        raise GlyphMotionError("bad-df", f"df=({df1}, {df2}), need >= 1")
    if f <= 0.0:
        return 0.0
    return float(betainc(df1 / 2.0, df2 / 2.0, df1 * f / (df1 * f + df2)))


def _t_sf_two_sided(t: float, df: float) -> float:
    # 2 P(T >= |t|) without the 1-x cancellation of going through the cdf
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def _f_sf(f: float, df1: float, df2: float) -> float:
    if f <= 0.0:
        return 1.0
    # I_x(a,b) = 1 - I_{1-x}(b,a)
    return float(betainc(df2 / 2.0, df1 / 2.0, df2 / (df1 * f + df2)))


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> StatsReport:
    """Two-sided paired t on per-participant differences a - b."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise GlyphMotionError("length-mismatch", f"paired samples of {len(a)} vs {len(b)} values")
    d = a - b
    n = len(d)
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    df = n - 1
    if sd == 0.0:
        if mean == 0.0:
            return StatsReport("paired-t", 0.0, (float(df),), 1.0)
        raise GlyphMotionError("degenerate-variance", "all differences identical and nonzero")
    t = mean / (sd / np.sqrt(n))
    return StatsReport("paired-t", float(t), (float(df),), _t_sf_two_sided(float(t), df))


@dataclass(frozen=True)
class AnovaTable:
    """Balanced two-factor table: (level_a, level_b) -> replicate values."""

    cells: Mapping[tuple, Sequence[float]]
    factor_a: str = "A"
    factor_b: str = "B"

    def levels(self) -> tuple[list, list]:
        la = sorted({k[0] for k in self.cells})
        lb = sorted({k[1] for k in self.cells})
        return la, lb

    def as_array(self) -> np.ndarray:
        """Values as an (a, b, n) array; raises "unbalanced" when not a full
        equal-count design with >= 2 levels per factor and >= 2 replicates."""
        la, lb = self.levels()
        if len(la) < 2 or len(lb) < 2:
            raise GlyphMotionError("unbalanced", "need at least 2 levels per factor")
        sizes = {len(v) for v in self.cells.values()}
        if len(self.cells) != len(la) * len(lb) or len(sizes) != 1:
            raise GlyphMotionError("unbalanced", "missing cells or unequal replicate counts")
        n = sizes.pop()
        if n < 2:
            raise GlyphMotionError("unbalanced", "need at least 2 replicates per cell")
        out = np.empty((len(la), len(lb), n))
        for i, va in enumerate(la):
            for j, vb in enumerate(lb):
                out[i, j] = np.asarray(self.cells[(va, vb)], dtype=np.float64)
        return out


def two_way_anova(tbl: AnovaTable) -> dict[str, StatsReport]:
    """Fixed-effects decomposition with replication.

    Returns reports keyed "factor_a", "factor_b", "interaction".  A table of
    identical constants yields F = 0, p = 1 for all three effects; zero
    error variance against nonzero effects is refused as "degenerate-error".
    """
    y = tbl.as_array()
    a, b, n = y.shape
    if np.all(y == y.flat[0]):
        df = ((float(a - 1),), (float(b - 1),), (float((a - 1) * (b - 1)),))
        return {
            "factor_a": StatsReport(tbl.factor_a, 0.0, df[0] + (float(a * b * (n - 1)),), 1.0),
            "factor_b": StatsReport(tbl.factor_b, 0.0, df[1] + (float(a * b * (n - 1)),), 1.0),
            "interaction": StatsReport(f"{tbl.factor_a}x{tbl.factor_b}", 0.0,
                                       df[2] + (float(a * b * (n - 1)),), 1.0),
        }

    y = y - y.mean()   # shift for conditioning; all SS are shift-invariant
    gm = y.mean()
    am = y.mean(axis=(1, 2))
    bm = y.mean(axis=(0, 2))
    cm = y.mean(axis=2)

    ss_a = b * n * float(((am - gm) ** 2).sum())
    ss_b = a * n * float(((bm - gm) ** 2).sum())
    ss_ab = n * float(((cm - am[:, None] - bm[None, :] + gm) ** 2).sum())
    ss_err = float(((y - cm[:, :, None]) ** 2).sum())

    df_a, df_b = a - 1, b - 1
    df_ab = df_a * df_b
    df_err = a * b * (n - 1)
    ms_err = ss_err / df_err
    if ms_err == 0.0:
        raise GlyphMotionError("degenerate-error", "zero within-cell variance with nonzero effects")

    def report(label: str, ss: float, df_eff: int) -> StatsReport:
        f = (ss / df_eff) / ms_err
        return StatsReport(label, float(f), (float(df_eff), float(df_err)),
                           _f_sf(float(f), df_eff, df_err))

    return {
        "factor_a": report(tbl.factor_a, ss_a, df_a),
        "factor_b": report(tbl.factor_b, ss_b, df_b),
        "interaction": report(f"{tbl.factor_a}x{tbl.factor_b}", ss_ab, df_ab),
    }


def anova_sum_of_squares(tbl: AnovaTable) -> dict[str, float]:
    """The raw decomposition (SS_a, SS_b, SS_ab, SS_err, SS_total)."""
    y = tbl.as_array()
    a, b, n = y.shape
    y = y - y.mean()   # shift-invariant; keeps the identity well conditioned
    gm = y.mean()
    am = y.mean(axis=(1, 2))
    bm = y.mean(axis=(0, 2))
    cm = y.mean(axis=2)
    return {
        "ss_a": b * n * float(((am - gm) ** 2).sum()),
        "ss_b": a * n * float(((bm - gm) ** 2).sum()),
        "ss_ab": n * float(((cm - am[:, None] - bm[None, :] + gm) ** 2).sum()),
        "ss_err": float(((y - cm[:, :, None]) ** 2).sum()),
        "ss_total": float(((y - gm) ** 2).sum()),
    }


def joint_angular_velocity(linear_speed: float, arm_length: float) -> float:
    """Elbow angular rate (deg/s) equivalent to a fingertip linear speed (mm/s)."""
    if not (arm_length > 0):
        raise GlyphMotionError("bad-arm", f"arm_length={arm_length}, need > 0")
    return (linear_speed / arm_length) * (180.0 / np.pi)


def letters_per_minute(duration_ms_per_letter: float) -> float:
    if not (duration_ms_per_letter > 0):
        raise GlyphMotionError("bad-duration", f"duration={duration_ms_per_letter}, need > 0")
    return 60000.0 / duration_ms_per_letter


def format_reports(reports: Sequence[StatsReport]) -> str:
    """Plain-text table: effect, statistic, df, p."""
    lines = [f"{'effect':<16} {'statistic':>12} {'df':>12} {'p':>12}"]
    for r in reports:
        df = "x".join(f"{v:g}" for v in r.df)
        lines.append(f"{r.effect:<16} {r.statistic:>12.6g} {df:>12} {r.p_value:>12.6g}")
    return "\n".join(lines) + "\n"


def reports_to_json(reports: Sequence[StatsReport]) -> str:
    return json.dumps({
        r.effect: {"statistic": r.statistic, "df": list(r.df), "p_value": r.p_value}
        for r in reports
    })
