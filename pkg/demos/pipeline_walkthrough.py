"""One letter, end to end: condition -> compile -> simulate -> audit.

Follows a single glyph through the full motion pipeline at the smallest /
fastest presentation setting (7 mm mean height, 500 ms per letter) and prints
what each stage did to it.  The stages are the same ones the experiment
harness and the HTTP service run internally; this script just slows down and
shows its work.

Run:  python3 demos/pipeline_walkthrough.py
"""

import numpy as np

from glyphmotion import (
    DeviceConfig,
    PresentationCondition,
    check_limits,
    compile_glyph,
    execute,
    fixture_font,
    font_mean_height,
    pen_transition_times,
    prepare_presentation,
    serialize_program,
    tracking_error,
    velocity_profile,
)

LETTER = "k"


def describe(tag, glyph):
    v = velocity_profile(glyph)
    print(
        f"{tag:<12} samples={len(glyph):4d}  duration={glyph.duration:7.1f} ms"
        f"  peak speed={v.speed.max():7.2f} mm/s"
    )


def main():
    font = fixture_font()
    raw = font.glyphs[LETTER]
    cond = PresentationCondition(target_mean_height=7.0, target_duration=500.0)
    print(f"letter '{LETTER}', condition {cond.label()}")
    print()

    describe("raw", raw)

    # Conditioning resamples onto a uniform clock, low-pass filters each
    # pen segment, rescales the whole font so the MEAN letter height hits
    # the target (individual letters keep their relative sizes), and
    # re-paces time to the target duration.
    prepared_font = prepare_presentation(font, cond)
    prepared = prepared_font.glyphs[LETTER]
    describe("prepared", prepared)
    print(f"{'':12} font mean height now {font_mean_height(prepared_font):.3f} mm")
    print()

    device = DeviceConfig()
    prog = compile_glyph(prepared, device)
    ops = [c.op for c in prog.commands]
    print(f"compiled program: origin=({prog.origin[0]:.3f}, {prog.origin[1]:.3f}) mm,"
          f" declared {prog.declared_duration:.1f} ms")
    for op in ("SX", "SY", "PEN", "W"):
        print(f"  {op:>4} x {ops.count(op)}")
    head = serialize_program(prog).splitlines()
    print("  first lines:")
    for line in head[:6]:
        print(f"    {line}")
    print(f"    ... ({len(head)} lines total)")
    print()

    report = check_limits(prog, device)
    print("static audit:")
    print(f"  peak step rate  x {report.peak_rate_x:8.1f} /s   y {report.peak_rate_y:8.1f} /s"
          f"   (limit {device.max_step_rate:.0f})")
    print(f"  stage extents   x [{report.x_min:.2f}, {report.x_max:.2f}] mm"
          f"   y [{report.y_min:.2f}, {report.y_max:.2f}] mm")
    print(f"  pen toggles     {report.pen_toggles}")
    print(f"  flags           {report.flags or 'none'}")
    print()

    trace = execute(prog, device)
    err = tracking_error(prepared, trace)
    print(f"simulated run: {len(trace.t_us)} state changes over {trace.duration_ms:.3f} ms")
    print(f"  tracking error: max {err.max_mm:.6f} mm, rms {err.rms_mm:.6f} mm")
    half_diag = 0.5 * device.step_resolution * np.sqrt(2.0)
    print(f"  (half a step diagonally = {half_diag:.6f} mm)")

    flips = pen_transition_times(trace)
    intended = [
        (float(prepared.t[i] - prepared.t[0]), int(prepared.pen[i]))
        for i in range(1, len(prepared))
        if prepared.pen[i] != prepared.pen[i - 1]
    ]
    print(f"  pen transitions: {len(flips)} realized vs {len(intended)} intended mid-glyph")
    for (tr, sr), (ti, si) in zip(flips[-len(intended):], intended):
        print(f"    realized {tr:8.3f} ms -> {sr}   intended {ti:8.3f} ms -> {si}")


if __name__ == "__main__":
    main()
