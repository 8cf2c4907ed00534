"""Command-line entry point: pipeline batch use plus the service launcher.

Verb-noun subcommands; every file format is one of the module text formats,
so outputs pipe between subcommands.  Exit codes: 0 success, 1 validation
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .compiler import DeviceConfig, check_limits, compile_glyph, parse_program, program_duration, serialize_program
from .errors import GlyphMotionError
from .experiment import (
    MODE_TEST,
    MODE_TRAINING,
    SessionConfig,
    SyntheticParticipant,
    accuracy,
    confusion_matrix,
    confusion_to_csv,
    records_to_ndjson,
    run_session,
)
from .fixture_font import fixture_font
from .preprocess import (
    DEFAULT_DT,
    DEFAULT_WINDOW,
    PresentationCondition,
    SmoothingSpec,
    prepare_presentation,
)
from .simulator import execute, tracking_error, trace_rows_ms
from .stats import AnovaTable, format_reports, paired_t_test, reports_to_json, two_way_anova
from .trajectory import LETTERS, parse_font, parse_glyph, serialize_glyph, validate_font

CONDITIONS = {
    "14x1000": PresentationCondition(14.0, 1000.0),
    "7x1000": PresentationCondition(7.0, 1000.0),
    "14x500": PresentationCondition(14.0, 500.0),
    "7x500": PresentationCondition(7.0, 500.0),
}


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise GlyphMotionError("format", f"cannot read {path}: {e}") from e


def _write_text(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_font(path: str | None):
    return parse_font(_read(path)) if path else fixture_font()


def _cmd_font_validate(args) -> int:
    font = parse_font(_read(args.file))
    diags = validate_font(font)
    for d in diags:
        print(f"{d.rule} at {d.index}: {d.detail}")
    if diags:
        return 1
    print(f"ok: 26 glyphs, provenance: {font.provenance!r}")
    return 0


def _cmd_glyph_prepare(args) -> int:
    font = parse_font(_read(args.file))
    cond = PresentationCondition(args.height, args.duration)
    prepared = prepare_presentation(font, cond, SmoothingSpec(args.window), args.dt)
    _write_text(args.out, serialize_glyph(prepared.glyphs[args.letter]).decode() + "\n")
    return 0


def _cmd_glyph_compile(args) -> int:
    traj = parse_glyph(_read(args.file))
    prog = compile_glyph(traj, _device_config(args))
    _write_text(args.out, serialize_program(prog))
    return 0


def _device_config(args) -> DeviceConfig:
    return DeviceConfig(
        workspace_x=args.workspace, workspace_y=args.workspace,
        step_resolution=args.resolution, max_step_rate=args.max_rate,
        solenoid_actuation_delay=args.pen_delay,
    )


def _cmd_sim_run(args) -> int:
    prog = parse_program(_read(args.file).decode())
    cfg = _device_config(args)
    trace = execute(prog, cfg)
    print(f"duration {program_duration(prog):.3f} ms, "
          f"final position ({trace.final_position[0]:.3f}, {trace.final_position[1]:.3f}) mm")
    if args.report:
        rep = check_limits(prog, cfg)
        print(f"peak rates {rep.peak_rate_x:.0f}/{rep.peak_rate_y:.0f} steps/s, "
              f"x [{rep.x_min:.3f}, {rep.x_max:.3f}], y [{rep.y_min:.3f}, {rep.y_max:.3f}], "
              f"pen toggles {rep.pen_toggles}")
        for flag in rep.flags:
            print(f"flag: {flag}")
    if args.against:
        intended = parse_glyph(_read(args.against))
        err = tracking_error(intended, trace)
        print(f"tracking error max {err.max_mm:.6f} mm, rms {err.rms_mm:.6f} mm")
    if args.trace:
        import json

        rows = trace_rows_ms(trace)
        _write_text(args.trace, json.dumps({"units": "mm_ms", "samples": rows}) + "\n")
    return 0


def _session_config(args, mode: str) -> SessionConfig:
    return SessionConfig(
        condition=PresentationCondition(args.height, args.duration),
        repeats_per_letter=args.repeats,
        mode=mode,
        seed=args.seed,
        participant=SyntheticParticipant(args.sigma),
    )


def _cmd_exp_run(args) -> int:
    if args.participant != "synthetic":
        raise GlyphMotionError("format", "only synthetic participants run in batch; "
                                         "use 'exp serve' for interactive sessions")
    font = _load_font(args.font)
    mode = MODE_TRAINING if args.train else MODE_TEST
    records = run_session(_session_config(args, mode), font, SmoothingSpec(args.window), args.dt)
    m = confusion_matrix(records)
    print(f"{len(records)} trials, accuracy {accuracy(m):.2f}%")
    if args.out:
        _write_text(args.out, records_to_ndjson(records))
    return 0


def _cmd_exp_batch(args) -> int:
    font = _load_font(args.font)
    names = list(CONDITIONS) if args.conditions == "all" else args.conditions.split(",")
    for name in names:
        if name not in CONDITIONS:
            raise GlyphMotionError("format", f"unknown condition {name!r}, "
                                             f"expected one of {', '.join(CONDITIONS)} or all")
    for ci, name in enumerate(names):
        cond = CONDITIONS[name]
        pooled = None
        for p in range(args.participants):
            cfg = SessionConfig(condition=cond, repeats_per_letter=args.repeats,
                                mode=MODE_TEST, seed=args.seed + 7919 * ci + p,
                                participant=SyntheticParticipant(args.sigma))
            m = confusion_matrix(run_session(cfg, font, SmoothingSpec(args.window), args.dt))
            pooled = m if pooled is None else pooled + m
        print(f"{name}: {args.participants} participants, accuracy {accuracy(pooled):.2f}%")
        if args.out_dir:
            out = Path(args.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"confusion_{name}.csv").write_text(confusion_to_csv(pooled))
    return 0


def _cmd_exp_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.data_dir, _load_font(args.font), args.dt)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _read_column(path: str) -> list[float]:
    values = []
    for ln, line in enumerate(_read(path).decode().splitlines(), start=1):
        s = line.strip()
        if not s:
            continue
        try:
            values.append(float(s))
        except ValueError as e:
            raise GlyphMotionError("format", f"{path} line {ln}: {e}") from e
    return values


def _cmd_stats_ttest(args) -> int:
    report = paired_t_test(_read_column(args.a), _read_column(args.b))
    sys.stdout.write(reports_to_json([report]) + "\n" if args.json else format_reports([report]))
    return 0


def _cmd_stats_anova(args) -> int:
    cells: dict[tuple, list[float]] = {}
    lines = _read(args.file).decode().splitlines()
    for ln, line in enumerate(lines, start=1):
        s = line.strip()
        if not s:
            continue
        parts = [p.strip() for p in s.split(",")]
        if len(parts) != 3:
            raise GlyphMotionError("format", f"line {ln}: expected 'levelA,levelB,value'")
        try:
            value = float(parts[2])
        except ValueError:
            if ln == 1:
                continue   # header row
            raise GlyphMotionError("format", f"line {ln}: bad value {parts[2]!r}") from None
        cells.setdefault((parts[0], parts[1]), []).append(value)
    reports = two_way_anova(AnovaTable(cells))
    ordered = [reports["factor_a"], reports["factor_b"], reports["interaction"]]
    sys.stdout.write(reports_to_json(ordered) + "\n" if args.json else format_reports(ordered))
    return 0


def _add_device_flags(p: argparse.ArgumentParser):
    p.add_argument("--workspace", type=float, default=50.0, help="square workspace side, mm")
    p.add_argument("--resolution", type=float, default=0.01, help="mm per step")
    p.add_argument("--max-rate", type=float, default=20000.0, help="steps/s limit per axis")
    p.add_argument("--pen-delay", type=float, default=0.0, help="solenoid actuation delay, ms")


def _add_condition_flags(p: argparse.ArgumentParser):
    p.add_argument("--height", type=float, default=14.0, help="target mean letter height, mm")
    p.add_argument("--duration", type=float, default=1000.0, help="per-letter duration, ms")
    p.add_argument("--dt", type=float, default=DEFAULT_DT, help="output sampling interval, ms")
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW, help="smoothing window, samples")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glyphmotion",
                                     description="stroke-to-motion engine and experiment harness")
    sub = parser.add_subparsers(dest="group", required=True)

    font = sub.add_parser("font", help="font file operations").add_subparsers(
        dest="cmd", required=True)
    v = font.add_parser("validate", help="check a font file")
    v.add_argument("file")
    v.set_defaults(fn=_cmd_font_validate)

    glyph = sub.add_parser("glyph", help="single-glyph pipeline stages").add_subparsers(
        dest="cmd", required=True)
    gp = glyph.add_parser("prepare", help="condition one glyph of a font file")
    gp.add_argument("file", help="font file (JSON)")
    gp.add_argument("--letter", required=True, choices=list(LETTERS))
    _add_condition_flags(gp)
    gp.add_argument("--out", help="output glyph JSON (default stdout)")
    gp.set_defaults(fn=_cmd_glyph_prepare)
    gc = glyph.add_parser("compile", help="compile a prepared glyph to a motion program")
    gc.add_argument("file", help="glyph JSON")
    _add_device_flags(gc)
    gc.add_argument("--out", help="output program text (default stdout)")
    gc.set_defaults(fn=_cmd_glyph_compile)

    sim = sub.add_parser("sim", help="simulated device").add_subparsers(dest="cmd", required=True)
    sr = sim.add_parser("run", help="execute a motion program")
    sr.add_argument("file", help="program text file")
    _add_device_flags(sr)
    sr.add_argument("--report", action="store_true", help="print the limit audit")
    sr.add_argument("--against", help="prepared glyph JSON to measure tracking error against")
    sr.add_argument("--trace", help="write the 1 ms trace as JSON samples")
    sr.set_defaults(fn=_cmd_sim_run)

    exp = sub.add_parser("exp", help="experiment sessions").add_subparsers(dest="cmd", required=True)
    er = exp.add_parser("run", help="run one synthetic session")
    er.add_argument("--participant", default="synthetic", choices=["synthetic"])
    er.add_argument("--sigma", type=float, default=0.0, help="spatial noise std, mm")
    er.add_argument("--seed", type=int, default=0)
    er.add_argument("--repeats", type=int, default=2, help="presentations per letter")
    er.add_argument("--train", action="store_true", help="training mode with feedback")
    er.add_argument("--font", help="font file (default: built-in)")
    _add_condition_flags(er)
    er.add_argument("--out", help="write the session log (NDJSON)")
    er.set_defaults(fn=_cmd_exp_run)

    eb = exp.add_parser("batch", help="pooled synthetic sessions per condition")
    eb.add_argument("--participants", type=int, default=20)
    eb.add_argument("--conditions", default="all",
                    help="comma list of " + ", ".join(CONDITIONS) + ", or all")
    eb.add_argument("--sigma", type=float, default=0.0)
    eb.add_argument("--seed", type=int, default=0)
    eb.add_argument("--repeats", type=int, default=2)
    eb.add_argument("--font", help="font file (default: built-in)")
    eb.add_argument("--dt", type=float, default=DEFAULT_DT)
    eb.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    eb.add_argument("--out-dir", help="write pooled confusion CSVs here")
    eb.set_defaults(fn=_cmd_exp_batch)

    es = exp.add_parser("serve", help="start the interactive session service")
    es.add_argument("--host", default="127.0.0.1")
    es.add_argument("--port", type=int, default=8080)
    es.add_argument("--data-dir", default=os.environ.get("GLYPHMOTION_DATA_DIR", "glyphmotion-data"))
    es.add_argument("--font", help="font file (default: built-in)")
    es.add_argument("--dt", type=float, default=DEFAULT_DT)
    es.set_defaults(fn=_cmd_exp_serve)

    st = sub.add_parser("stats", help="statistics over result files").add_subparsers(
        dest="cmd", required=True)
    tt = st.add_parser("ttest", help="paired t-test over two single-column files")
    tt.add_argument("a")
    tt.add_argument("b")
    tt.add_argument("--json", action="store_true")
    tt.set_defaults(fn=_cmd_stats_ttest)
    an = st.add_parser("anova", help="two-way ANOVA over levelA,levelB,value rows")
    an.add_argument("file")
    an.add_argument("--json", action="store_true")
    an.set_defaults(fn=_cmd_stats_anova)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except GlyphMotionError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
