"""t / F machinery against quadrature oracles, ANOVA against direct sums.

The oracles come first and share nothing with the implementation: density
functions written from the textbook formulas in log space, integrated with
scipy.integrate.quad, and a pure-Python sums-of-squares decomposition.
"""

import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

from glyphmotion.errors import GlyphMotionError
from glyphmotion.stats import (
    AnovaTable,
    StatsReport,
    anova_sum_of_squares,
    f_cdf,
    format_reports,
    joint_angular_velocity,
    letters_per_minute,
    paired_t_test,
    reports_to_json,
    t_cdf,
    two_way_anova,
)

# --- oracles, written before the tests that use them -------------------------------


def t_pdf(x, df):
    log_c = math.lgamma((df + 1) / 2) - math.lgamma(df / 2) - 0.5 * math.log(df * math.pi)
    return math.exp(log_c - ((df + 1) / 2) * math.log1p(x * x / df))


def t_cdf_quad(t, df):
    if t <= 0:
        return quad(t_pdf, -np.inf, t, args=(df,), epsabs=1e-14, limit=300)[0]
    return 1.0 - quad(t_pdf, t, np.inf, args=(df,), epsabs=1e-14, limit=300)[0]


def t_p_two_sided_quad(t, df):
    return 2.0 * quad(t_pdf, abs(t), np.inf, args=(df,), epsabs=1e-14, limit=300)[0]


def f_pdf(x, d1, d2):
    if x <= 0:
        return 0.0
    lbeta = math.lgamma(d1 / 2) + math.lgamma(d2 / 2) - math.lgamma((d1 + d2) / 2)
    return math.exp((d1 / 2) * math.log(d1 / d2) + (d1 / 2 - 1) * math.log(x)
                    - ((d1 + d2) / 2) * math.log1p(d1 * x / d2) - lbeta)


def f_sf_quad(f, d1, d2):
    return quad(f_pdf, f, np.inf, args=(d1, d2), epsabs=1e-14, limit=300)[0]


def ss_direct(cells):
    """Textbook sums of squares, plain Python arithmetic, no mean shifting."""
    la = sorted({k[0] for k in cells})
    lb = sorted({k[1] for k in cells})
    vals = {k: [float(x) for x in v] for k, v in cells.items()}
    a, b = len(la), len(lb)
    n = len(next(iter(vals.values())))
    everything = [x for v in vals.values() for x in v]
    gm = sum(everything) / len(everything)
    am = {va: sum(x for (ka, _), v in vals.items() if ka == va for x in v) / (b * n)
          for va in la}
    bm = {vb: sum(x for (_, kb), v in vals.items() if kb == vb for x in v) / (a * n)
          for vb in lb}
    cm = {k: sum(v) / n for k, v in vals.items()}
    return {
        "ss_a": b * n * sum((am[va] - gm) ** 2 for va in la),
        "ss_b": a * n * sum((bm[vb] - gm) ** 2 for vb in lb),
        "ss_ab": n * sum((cm[(va, vb)] - am[va] - bm[vb] + gm) ** 2
                         for va in la for vb in lb),
        "ss_err": sum((x - cm[k]) ** 2 for k, v in vals.items() for x in v),
        "ss_total": sum((x - gm) ** 2 for x in everything),
    }


def random_cells(rng, a, b, n):
    return {(i, j): rng.normal(70.0, 10.0, n).tolist()
            for i in range(a) for j in range(b)}


# --- distribution functions ----------------------------------------------------------


def test_t_cdf_center_is_exactly_half():
    for df in (1, 2.5, 7, 120):
        assert t_cdf(0.0, df) == 0.5


def test_f_cdf_is_zero_at_and_below_zero():
    assert f_cdf(0.0, 3, 10) == 0.0
    assert f_cdf(-2.0, 3, 10) == 0.0


def test_degree_of_freedom_validation():
    with pytest.raises(GlyphMotionError) as e:
        t_cdf(1.0, 0.5)
    assert e.value.code == "bad-df"
    for d1, d2 in ((0, 5), (3, 0.2)):
        with pytest.raises(GlyphMotionError) as e:
            f_cdf(1.0, d1, d2)
        assert e.value.code == "bad-df"


def test_t_cdf_hits_the_textbook_quantile():
    assert t_cdf(1.725, 20) == pytest.approx(0.95, abs=1e-3)


def test_t_cdf_matches_quadrature():
    for df in (1, 2, 5, 20, 120):
        for t in (-40.0, -8.0, -2.1, -0.5, 0.3, 1.725, 6.0, 40.0):
            assert t_cdf(t, df) == pytest.approx(t_cdf_quad(t, df), abs=1e-10)


def test_f_cdf_matches_quadrature():
    for d1, d2 in ((1, 8), (2, 10), (3, 3), (5, 40), (12, 2)):
        for f in (0.3, 1.0, 2.4, 8.0, 100.0, 9999.0):
            assert f_cdf(f, d1, d2) == pytest.approx(1.0 - f_sf_quad(f, d1, d2),
                                                     abs=1e-10)


def test_t_cdf_is_monotone_bounded_and_symmetric():
    ts = np.arange(-50.0, 50.0, 0.5)
    vals = np.array([t_cdf(t, 7) for t in ts])
    assert np.all(np.diff(vals) >= 0)
    assert np.all((vals >= 0) & (vals <= 1))
    for t in (0.3, 1.9, 12.0):
        assert t_cdf(-t, 7) + t_cdf(t, 7) == pytest.approx(1.0, abs=1e-14)


def test_f_cdf_is_monotone_and_bounded():
    fs = np.arange(0.0, 100.0, 0.25)
    vals = np.array([f_cdf(f, 3, 9) for f in fs])
    assert np.all(np.diff(vals) >= 0)
    assert np.all((vals >= 0) & (vals <= 1))


# --- paired t-test --------------------------------------------------------------------


def test_identical_samples_give_the_null_result():
    a = [71.9, 80.0, 64.4, 90.1]
    report = paired_t_test(a, a)
    assert report.effect == "paired-t"
    assert report.statistic == 0.0
    assert report.p_value == 1.0
    assert report.df == (3.0,)


def test_swapping_samples_negates_t_exactly():
    rng = np.random.default_rng(7)
    for _ in range(10):
        a = rng.normal(70, 12, 8).tolist()
        b = rng.normal(60, 12, 8).tolist()
        fwd = paired_t_test(a, b)
        rev = paired_t_test(b, a)
        assert rev.statistic == -fwd.statistic
        assert rev.p_value == fwd.p_value
        assert rev.df == fwd.df


def test_unit_slope_differences_match_the_quadrature_oracle():
    a = [1.0, 2.0, 3.0, 4.0, 5.0]
    b = [0.0, 0.0, 0.0, 0.0, 0.0]
    report = paired_t_test(a, b)
    expected_t = 3.0 / math.sqrt(0.5)
    assert report.statistic == pytest.approx(expected_t, rel=1e-12)
    assert report.df == (4.0,)
    assert report.p_value == pytest.approx(t_p_two_sided_quad(expected_t, 4), abs=1e-8)


def test_constant_nonzero_differences_are_degenerate():
    with pytest.raises(GlyphMotionError) as e:
        paired_t_test([3.0, 4.0, 5.0], [1.0, 2.0, 3.0])
    assert e.value.code == "degenerate-variance"


def test_length_mismatch():
    for a, b in (([1.0, 2.0, 3.0], [1.0, 2.0]), ([5.0], [5.0])):
        with pytest.raises(GlyphMotionError) as e:
            paired_t_test(a, b)
        assert e.value.code == "length-mismatch"


# --- two-way ANOVA ---------------------------------------------------------------------


def constant_cells(value=7.25):
    return {(i, j): [value, value] for i in range(2) for j in range(2)}


def test_constant_table_is_null_everywhere():
    reports = two_way_anova(AnovaTable(constant_cells()))
    assert set(reports) == {"factor_a", "factor_b", "interaction"}
    for key, r in reports.items():
        assert r.statistic == 0.0 and r.p_value == 1.0
        assert r.df == (1.0, 4.0)
    assert reports["factor_a"].effect == "A"
    assert reports["factor_b"].effect == "B"
    assert reports["interaction"].effect == "AxB"


def test_hand_picked_integers_match_direct_summation_exactly():
    cells = {(0, 0): [1, 2, 3], (0, 1): [4, 5, 6],
             (1, 0): [7, 8, 9], (1, 1): [10, 11, 18]}
    # every mean in this table is an exact binary float, so == is fair
    expected = {"ss_a": 147.0, "ss_b": 48.0, "ss_ab": 3.0,
                "ss_err": 44.0, "ss_total": 242.0}
    assert ss_direct(cells) == expected
    assert anova_sum_of_squares(AnovaTable(cells)) == expected

    reports = two_way_anova(AnovaTable(cells))
    ms_err = 44.0 / 8.0
    assert reports["factor_a"].statistic == 147.0 / ms_err
    assert reports["factor_b"].statistic == 48.0 / ms_err
    assert reports["interaction"].statistic == 3.0 / ms_err
    for r in reports.values():
        assert r.df == (1.0, 8.0)
        assert r.p_value == pytest.approx(f_sf_quad(r.statistic, 1, 8), abs=1e-10)


def test_decomposition_identity_on_random_tables():
    rng = np.random.default_rng(31)
    for _ in range(25):
        a = int(rng.integers(2, 5))
        b = int(rng.integers(2, 5))
        n = int(rng.integers(2, 6))
        cells = random_cells(rng, a, b, n)
        ss = anova_sum_of_squares(AnovaTable(cells))
        assert ss["ss_total"] == pytest.approx(
            ss["ss_a"] + ss["ss_b"] + ss["ss_ab"] + ss["ss_err"], rel=1e-9)
        oracle = ss_direct(cells)
        for key in oracle:
            assert ss[key] == pytest.approx(oracle[key], rel=1e-9, abs=1e-9)


def test_shift_invariance_of_f_statistics():
    rng = np.random.default_rng(37)
    cells = random_cells(rng, 3, 3, 4)
    shifted = {k: [x + 12345.678 for x in v] for k, v in cells.items()}
    base = two_way_anova(AnovaTable(cells))
    moved = two_way_anova(AnovaTable(shifted))
    for key in base:
        assert moved[key].statistic == pytest.approx(base[key].statistic, rel=1e-9)


def additive_table(seed):
    # sample cell means made exactly additive: the interaction component of
    # the noise is projected out, so only main effects carry signal
    rng = np.random.default_rng(seed)
    alpha = np.array([-6.0, 0.0, 6.0])
    beta = np.array([-4.0, -1.0, 2.0, 3.0])
    y = 50.0 + alpha[:, None, None] + beta[None, :, None] + rng.normal(0.0, 0.05, (3, 4, 5))
    m = y.mean(axis=2)
    resid = m - m.mean(axis=1, keepdims=True) - m.mean(axis=0, keepdims=True) + m.mean()
    y = y - resid[:, :, None]
    return AnovaTable({(i, j): y[i, j].tolist() for i in range(3) for j in range(4)})


def test_additive_tables_show_main_effects_without_interaction():
    hits = 0
    for seed in range(100):
        reports = two_way_anova(additive_table(seed))
        if (reports["interaction"].p_value > 0.9
                and reports["factor_a"].p_value < 0.01
                and reports["factor_b"].p_value < 0.01):
            hits += 1
    assert hits >= 95


def test_zero_error_variance_with_effects_is_degenerate():
    cells = {(0, 0): [0, 0], (0, 1): [1, 1], (1, 0): [2, 2], (1, 1): [3, 3]}
    with pytest.raises(GlyphMotionError) as e:
        two_way_anova(AnovaTable(cells))
    assert e.value.code == "degenerate-error"


def test_unbalanced_tables_are_rejected():
    bad = [
        {(0, 0): [1, 2], (0, 1): [3, 4]},                                  # one A level
        {(0, 0): [1, 2], (0, 1): [3, 4], (1, 0): [5, 6]},                  # missing cell
        {(0, 0): [1, 2], (0, 1): [3, 4], (1, 0): [5, 6], (1, 1): [7, 8, 9]},
        {(0, 0): [1], (0, 1): [3], (1, 0): [5], (1, 1): [7]},              # n = 1
    ]
    for cells in bad:
        with pytest.raises(GlyphMotionError) as e:
            two_way_anova(AnovaTable(cells))
        assert e.value.code == "unbalanced"


def test_factor_labels_flow_into_reports():
    tbl = AnovaTable(constant_cells(), factor_a="height", factor_b="duration")
    reports = two_way_anova(tbl)
    assert reports["factor_a"].effect == "height"
    assert reports["factor_b"].effect == "duration"
    assert reports["interaction"].effect == "heightxduration"


# --- derived quantities and report formats ----------------------------------------------


def test_joint_angular_velocity():
    v = joint_angular_velocity(7.0, 350.0)
    assert v == pytest.approx((7.0 / 350.0) * (180.0 / math.pi), rel=1e-12)
    assert 1.14 < v < 1.15
    assert joint_angular_velocity(0.0, 350.0) == 0.0
    assert joint_angular_velocity(14.0, 700.0) == v
    for arm in (0.0, -1.0):
        with pytest.raises(GlyphMotionError) as e:
            joint_angular_velocity(7.0, arm)
        assert e.value.code == "bad-arm"


def test_letters_per_minute():
    assert letters_per_minute(1000.0) == 60.0
    assert letters_per_minute(500.0) == 120.0
    assert letters_per_minute(60000.0) == 1.0
    for d in (0.0, -3.0):
        with pytest.raises(GlyphMotionError) as e:
            letters_per_minute(d)
        assert e.value.code == "bad-duration"


def test_report_table_format():
    reports = list(two_way_anova(AnovaTable(constant_cells())).values())
    text = format_reports(reports)
    lines = text.splitlines()
    assert len(lines) == 4
    assert "effect" in lines[0] and "p" in lines[0]
    for r, line in zip(reports, lines[1:]):
        assert line.startswith(r.effect)
    assert text.endswith("\n")


def test_reports_to_json_shape():
    reports = list(two_way_anova(AnovaTable(constant_cells())).values())
    obj = json.loads(reports_to_json(reports))
    assert set(obj) == {"A", "B", "AxB"}
    for entry in obj.values():
        assert set(entry) == {"statistic", "df", "p_value"}
        assert entry["df"] == [1.0, 4.0]


def test_stats_report_validates_p():
    for p in (1.5, -0.1):
        with pytest.raises(GlyphMotionError) as e:
            StatsReport("x", 1.0, (1.0,), p)
        assert e.value.code == "format"
