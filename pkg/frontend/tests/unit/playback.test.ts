import { describe, expect, it } from "vitest";
import {
  Player,
  nullSurface,
  realClock,
  type Clock,
  type PlaybackFrame,
  type Surface,
} from "../../src/playback.js";
import type { SampleRow } from "../../src/api.js";

/** Deterministic clock: simulated time advances a fixed step per frame. */
function manualClock(stepMs: number): Clock {
  let t = 0;
  return {
    now: () => t,
    requestFrame: (cb) => {
      t += stepMs;
      return setTimeout(cb, 0) as unknown as number;
    },
    cancelFrame: (id) => clearTimeout(id),
  };
}

class RecordingSurface implements Surface {
  frames: PlaybackFrame[] = [];
  render(frame: PlaybackFrame): void {
    this.frames.push({ ...frame, drawn: [...frame.drawn] });
  }
}

function ramp(durationMs: number, stepMs: number): SampleRow[] {
  const rows: SampleRow[] = [];
  for (let t = 0; t <= durationMs + 1e-9; t += stepMs) {
    rows.push([t, t / 100, 2 * (t / 100), 1]);
  }
  return rows;
}

describe("Player", () => {
  it("paces by clock time and finishes exactly at the payload duration", async () => {
    const surface = new RecordingSurface();
    const player = new Player(surface, manualClock(100));
    const elapsed = await player.play(ramp(500, 25));

    expect(elapsed).toBe(500);
    expect(player.playsCompleted).toBe(1);
    // frames at playhead 0, 100, ..., 500
    expect(surface.frames.map((f) => f.playheadMs)).toEqual([0, 100, 200, 300, 400, 500]);
    expect(surface.frames.at(-1)!.done).toBe(true);
    expect(surface.frames.slice(0, -1).every((f) => !f.done)).toBe(true);
    // drawn sample count grows monotonically and ends complete
    const counts = surface.frames.map((f) => f.drawn.length);
    for (let i = 1; i < counts.length; i++) expect(counts[i]).toBeGreaterThanOrEqual(counts[i - 1]);
    expect(counts.at(-1)).toBe(21);
  });

  it("interpolates the tip between samples", async () => {
    const surface = new RecordingSurface();
    const player = new Player(surface, manualClock(50));
    await player.play([
      [0, 0, 0, 1],
      [100, 10, 20, 1],
    ]);
    const mid = surface.frames.find((f) => f.playheadMs === 50)!;
    expect(mid.tip.x).toBeCloseTo(5, 12);
    expect(mid.tip.y).toBeCloseTo(10, 12);
    expect(mid.tip.pen).toBe(1);
  });

  it("holds pen state from the earlier sample while between samples", async () => {
    const surface = new RecordingSurface();
    const player = new Player(surface, manualClock(50));
    await player.play([
      [0, 0, 0, 1],
      [100, 5, 0, 0],
      [200, 9, 0, 0],
    ]);
    const early = surface.frames.find((f) => f.playheadMs === 50)!;
    expect(early.tip.pen).toBe(1);
    const later = surface.frames.find((f) => f.playheadMs === 150)!;
    expect(later.tip.pen).toBe(0);
  });

  it("normalizes a payload whose clock does not start at zero", async () => {
    const surface = new RecordingSurface();
    const player = new Player(surface, manualClock(100));
    const elapsed = await player.play([
      [300, 0, 0, 1],
      [500, 1, 1, 1],
    ]);
    expect(elapsed).toBe(200);
    expect(surface.frames.at(-1)!.durationMs).toBe(200);
  });

  it("refuses overlapping playback and too-short payloads", async () => {
    const player = new Player(nullSurface, manualClock(10));
    const running = player.play(ramp(100, 10));
    await expect(player.play(ramp(100, 10))).rejects.toThrow("playback-in-progress");
    await running;
    await expect(player.play([[0, 0, 0, 1]])).rejects.toThrow("too-short");
  });

  it("a 1000 ms trial takes 1000 +/- 50 ms of wall time with the real clock", async () => {
    const player = new Player(nullSurface, realClock);
    const t0 = performance.now();
    await player.play(ramp(1000, 25));
    const wall = performance.now() - t0;
    expect(Math.abs(wall - 1000)).toBeLessThanOrEqual(50);
  }, 15000);
});
