"""Tour of the built-in stroke font.

Prints a per-letter summary table (timing, stroke count, geometry) and then
renders a few glyphs as coarse ASCII raster plots so you can eyeball the
shapes without a plotting stack.  Every glyph in the bundled font is a timed
polyline: columns t (ms), x (mm), y (mm), pen (1 = writing, 0 = repositioning).

Run:  python3 demos/font_gallery.py
"""

import numpy as np

from glyphmotion import (
    LETTERS,
    bounding_box,
    fixture_font,
    font_mean_height,
    glyph_height,
    pen_down_path_length,
)


def stroke_count(glyph):
    """Number of pen-down runs (an initial pen-down counts as one)."""
    pen = np.asarray(glyph.pen)
    starts = int(pen[0] == 1) + int(np.sum((pen[1:] == 1) & (pen[:-1] == 0)))
    return starts


def ascii_render(glyph, cols=38, rows=17):
    """Rasterize pen-down samples onto a character grid."""
    box = bounding_box(glyph)
    grid = [[" "] * cols for _ in range(rows)]
    sx = (cols - 1) / max(box.width, 1e-9)
    sy = (rows - 1) / max(box.height, 1e-9)
    for x, y, p in zip(glyph.x, glyph.y, glyph.pen):
        if p != 1:
            continue
        c = int(round((x - box.x_min) * sx))
        r = int(round((y - box.y_min) * sy))
        grid[rows - 1 - r][c] = "#"
    return "\n".join("".join(row) for row in grid)


def main():
    font = fixture_font()
    print(f"font units: {font.units}   glyphs: {len(font.glyphs)}")
    print(f"mean pen-down height: {font_mean_height(font):.3f} mm")
    print()

    header = f"{'letter':>6} {'dur ms':>8} {'samples':>8} {'strokes':>8} {'height mm':>10} {'ink mm':>8}"
    print(header)
    print("-" * len(header))
    for letter in LETTERS:
        g = font.glyphs[letter]
        print(
            f"{letter:>6} {g.duration:8.1f} {len(g):8d} {stroke_count(g):8d}"
            f" {glyph_height(g):10.3f} {pen_down_path_length(g):8.3f}"
        )

    # A couple of shapes, rendered from the pen-down samples only.  The
    # pen-up travels between strokes are invisible here, exactly as they
    # would be on paper.
    for letter in ("a", "k", "z"):
        print(f"\n--- '{letter}' ---")
        print(ascii_render(font.glyphs[letter]))


if __name__ == "__main__":
    main()
