/** True-speed playback of a timed stroke trajectory.
 *
 * The player paces by clock time, not frame count: every frame it sets the
 * playhead to (now - start), renders everything inked up to that instant,
 * and finishes the first time the playhead reaches the payload duration.
 * Frame rate therefore affects smoothness only; a 1000 ms trial takes
 * 1000 ms plus at most one frame regardless of how often frames fire.
 *
 * The clock is injectable so tests can either run animations instantly
 * (manual clock) or measure real wall time (real clock).
 */

import type { SampleRow } from "./api.js";

export interface Clock {
  now(): number;
  requestFrame(cb: () => void): number;
  cancelFrame(id: number): void;
}

/** performance.now + requestAnimationFrame, with a timer fallback for
 * environments that lack rAF (jsdom without pretend-to-be-visual, node). */
export const realClock: Clock = {
  now: () => performance.now(),
  requestFrame: (cb) => {
    if (typeof requestAnimationFrame === "function") {
      return requestAnimationFrame(() => cb());
    }
    return setTimeout(cb, 8) as unknown as number;
  },
  cancelFrame: (id) => {
    if (typeof cancelAnimationFrame === "function") {
      cancelAnimationFrame(id);
    } else {
      clearTimeout(id);
    }
  },
};

export interface TracePoint {
  t: number;
  x: number;
  y: number;
  pen: number;
}

export interface PlaybackFrame {
  playheadMs: number;
  durationMs: number;
  /** samples whose time has passed, in order; ink is the pen-down ones */
  drawn: TracePoint[];
  /** interpolated tip position right now */
  tip: TracePoint;
  done: boolean;
}

export interface Surface {
  render(frame: PlaybackFrame): void;
}

export const nullSurface: Surface = { render: () => {} };

function toPoints(samples: SampleRow[]): TracePoint[] {
  const t0 = samples[0][0];
  return samples.map(([t, x, y, pen]) => ({ t: t - t0, x, y, pen }));
}

function tipAt(points: TracePoint[], playhead: number): TracePoint {
  if (playhead <= 0) return points[0];
  const last = points[points.length - 1];
  if (playhead >= last.t) return last;
  let i = 1;
  while (points[i].t < playhead) i++;
  const a = points[i - 1];
  const b = points[i];
  const f = b.t === a.t ? 1 : (playhead - a.t) / (b.t - a.t);
  return {
    t: playhead,
    x: a.x + f * (b.x - a.x),
    y: a.y + f * (b.y - a.y),
    pen: a.pen, // pen state holds until the next sample
  };
}

export class Player {
  framesRendered = 0;
  playsCompleted = 0;

  private active = false;
  private frameId: number | null = null;

  constructor(
    private readonly surface: Surface,
    private readonly clock: Clock = realClock,
  ) {}

  get playing(): boolean {
    return this.active;
  }

  /** Animate one trajectory; resolves with the elapsed clock ms. */
  play(samples: SampleRow[]): Promise<number> {
    if (this.active) {
      return Promise.reject(new Error("playback-in-progress"));
    }
    if (samples.length < 2) {
      return Promise.reject(new Error("too-short"));
    }
    const points = toPoints(samples);
    const duration = points[points.length - 1].t;
    this.active = true;

    return new Promise<number>((resolve) => {
      const t0 = this.clock.now();
      const step = () => {
        const elapsed = this.clock.now() - t0;
        const playhead = Math.min(elapsed, duration);
        const done = elapsed >= duration;
        let n = 0;
        while (n < points.length && points[n].t <= playhead) n++;
        this.surface.render({
          playheadMs: playhead,
          durationMs: duration,
          drawn: points.slice(0, n),
          tip: tipAt(points, playhead),
          done,
        });
        this.framesRendered++;
        if (done) {
          this.active = false;
          this.frameId = null;
          this.playsCompleted++;
          resolve(elapsed);
        } else {
          this.frameId = this.clock.requestFrame(step);
        }
      };
      step();
    });
  }

  /** Abandon an in-flight animation (page teardown); the promise never settles. */
  stop(): void {
    if (this.frameId !== null) {
      this.clock.cancelFrame(this.frameId);
      this.frameId = null;
    }
    this.active = false;
  }
}

/** Draws playback frames onto a canvas at a fixed mm-to-px scale.
 *
 * Scale is a display concern only; trajectory data is never modified.  The
 * y axis is flipped (trajectories are y-up, canvases y-down) and the glyph
 * is centered using the bounds of the full sample set each play.  Pen-down
 * motion leaves ink; pen-up motion only moves the faint cursor ring.
 */
export class CanvasSurface implements Surface {
  private readonly ctx: CanvasRenderingContext2D | null;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    readonly pxPerMm = 10,
  ) {
    this.ctx = canvas.getContext("2d");
  }

  render(frame: PlaybackFrame): void {
    const ctx = this.ctx;
    if (!ctx) return; // headless DOM: playback still paces, just invisibly
    const { width, height } = this.canvas;
    const all = frame.drawn.length ? frame.drawn : [frame.tip];
    let xMin = Infinity, xMax = -Infinity, yMin = Infinity, yMax = -Infinity;
    for (const p of all) {
      if (p.x < xMin) xMin = p.x;
      if (p.x > xMax) xMax = p.x;
      if (p.y < yMin) yMin = p.y;
      if (p.y > yMax) yMax = p.y;
    }
    const ox = (width - (xMax - xMin) * this.pxPerMm) / 2 - xMin * this.pxPerMm;
    const oy = (height + (yMax - yMin) * this.pxPerMm) / 2 + yMin * this.pxPerMm;
    const px = (p: TracePoint): [number, number] => [
      ox + p.x * this.pxPerMm,
      oy - p.y * this.pxPerMm,
    ];

    ctx.clearRect(0, 0, width, height);
    ctx.lineWidth = 2.5;
    ctx.lineCap = "round";
    ctx.lineJoin = "round";
    ctx.strokeStyle = "#1a1a1a";
    ctx.beginPath();
    let penWasDown = false;
    for (let i = 0; i < frame.drawn.length; i++) {
      const p = frame.drawn[i];
      const [cx, cy] = px(p);
      if (i > 0 && penWasDown && p.pen === 1) {
        ctx.lineTo(cx, cy);
      } else {
        ctx.moveTo(cx, cy);
      }
      penWasDown = p.pen === 1;
    }
    // partial segment from the last passed sample to the live tip
    if (frame.drawn.length && penWasDown && frame.tip.pen === 1) {
      const [tx, ty] = px(frame.tip);
      ctx.lineTo(tx, ty);
    }
    ctx.stroke();

    const [tx, ty] = px(frame.tip);
    ctx.beginPath();
    ctx.arc(tx, ty, frame.tip.pen === 1 ? 4 : 7, 0, 2 * Math.PI);
    if (frame.tip.pen === 1) {
      ctx.fillStyle = "#c0392b";
      ctx.fill();
    } else {
      ctx.strokeStyle = "rgba(128, 128, 128, 0.45)"; // faint: stylus is off the skin
      ctx.lineWidth = 1.5;
      ctx.stroke();
    }
  }
}
