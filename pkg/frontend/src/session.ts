/** Participant flow: the sequential trial loop against one live session.
 *
 * fetch trial -> animate exactly once -> wait for one letter -> submit ->
 * (training: show feedback) -> next, until the service reports the session
 * finished, then fetch the report.  All server interaction is sequential
 * and there is never more than one active trial.
 *
 * Test-mode discipline is enforced here, not just in the page: a pending
 * trial's letter is unknown to this class by construction (payloads carry
 * no label), each trial index is animated at most once no matter who asks,
 * and nothing is ever written to the console.
 *
 * Network failures suspend the flow at the exact call that failed; retry()
 * re-issues that one call, so a retried session never duplicates work on
 * the server.  The session id is surfaced so an interrupted participant can
 * resume from another page load.
 */

import {
  ApiClient,
  ApiError,
  isTrainingAck,
  type DemoGlyph,
  type SessionReport,
  type SessionRequest,
  type TrialPayload,
} from "./api.js";
import { Player } from "./playback.js";

export type FlowPhase =
  | "idle"
  | "demo"
  | "fetching"
  | "animating"
  | "answering"
  | "submitting"
  | "feedback"
  | "finished"
  | "error";

export type FlowEvent =
  | { kind: "phase"; phase: FlowPhase }
  | { kind: "progress"; completed: number; total: number | null }
  | { kind: "demo-letter"; letter: string }
  | { kind: "feedback"; correct: boolean; displayed: string }
  | { kind: "report"; report: SessionReport }
  | { kind: "error"; code: string; detail: string; retryable: boolean };

export interface FlowOptions {
  /** how long training feedback stays on screen before the next trial */
  feedbackHoldMs?: number;
  /** animate the labeled alphabet before the first trial */
  withDemo?: boolean;
}

const LETTER_RE = /^[a-z]$/;

export class ParticipantFlow {
  phase: FlowPhase = "idle";
  sessionId: string | null = null;
  mode = "test";
  completed = 0;
  totalTrials: number | null = null;
  lastPlaybackMs: number | null = null;

  private trial: TrialPayload | null = null;
  private animatedIndex = -1;
  private listeners: Array<(ev: FlowEvent) => void> = [];
  private retryWaiter: (() => void) | null = null;
  private readonly feedbackHoldMs: number;
  private readonly withDemo: boolean;

  constructor(
    private readonly api: ApiClient,
    private readonly player: Player,
    opts: FlowOptions = {},
  ) {
    this.feedbackHoldMs = opts.feedbackHoldMs ?? 1200;
    this.withDemo = opts.withDemo ?? false;
  }

  on(fn: (ev: FlowEvent) => void): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((f) => f !== fn);
    };
  }

  private emit(ev: FlowEvent): void {
    for (const fn of [...this.listeners]) fn(ev);
  }

  private setPhase(phase: FlowPhase): void {
    this.phase = phase;
    this.emit({ kind: "phase", phase });
  }

  /** Run one service call, suspending on network failure until retry(). */
  private async call<T>(fn: () => Promise<T>): Promise<T> {
    for (;;) {
      try {
        return await fn();
      } catch (err) {
        if (err instanceof ApiError && err.code === "network") {
          this.setPhase("error");
          this.emit({ kind: "error", code: err.code, detail: err.detail, retryable: true });
          await new Promise<void>((resolve) => {
            this.retryWaiter = resolve;
          });
          continue;
        }
        throw err;
      }
    }
  }

  /** Resume after a network failure; no-op unless the flow is suspended. */
  retry(): void {
    const waiter = this.retryWaiter;
    this.retryWaiter = null;
    if (waiter) waiter();
  }

  /** Create a fresh session and run it until an answer is needed. */
  async start(config: SessionRequest): Promise<void> {
    await this.guard(async () => {
      this.sessionId = await this.call(() => this.api.createSession(config));
      await this.enter();
    });
  }

  /** Reattach to an existing session id (crash recovery, second device). */
  async resume(sessionId: string): Promise<void> {
    await this.guard(async () => {
      this.sessionId = sessionId;
      await this.enter();
    });
  }

  private async enter(): Promise<void> {
    const status = await this.call(() => this.api.status(this.id()));
    this.mode = status.mode;
    this.completed = status.completed;
    this.totalTrials = status.total_trials;
    this.emit({ kind: "progress", completed: this.completed, total: this.totalTrials });
    if (status.finished) {
      await this.finish();
      return;
    }
    if (status.pending) {
      // An interrupted page load left a trial open on the server.  Its
      // glyph was already played once and the service will not re-serve
      // it, so resume lands straight at the answer prompt.
      this.trial = {
        index: status.completed,
        height_mm: status.height_mm,
        duration_ms: status.duration_ms,
        samples: [],
      };
      this.animatedIndex = status.completed;
      this.setPhase("answering");
      return;
    }
    if (this.withDemo) {
      await this.runDemo();
    }
    await this.advance();
  }

  /** Animate all 26 letters with labels visible; consumes no trials. */
  private async runDemo(): Promise<void> {
    this.setPhase("demo");
    const glyphs: DemoGlyph[] = await this.call(() => this.api.demo(this.id()));
    for (const g of glyphs) {
      this.emit({ kind: "demo-letter", letter: g.letter });
      await this.player.play(g.samples);
    }
    this.emit({ kind: "demo-letter", letter: "" });
  }

  private async advance(): Promise<void> {
    this.setPhase("fetching");
    let trial: TrialPayload;
    try {
      trial = await this.call(() => this.api.trial(this.id()));
    } catch (err) {
      if (err instanceof ApiError && err.code === "session-finished") {
        await this.finish();
        return;
      }
      throw err;
    }
    this.trial = trial;
    await this.animateOnce();
    this.setPhase("answering");
  }

  /** Play the pending trial if and only if it has not been shown yet. */
  private async animateOnce(): Promise<void> {
    if (!this.trial || this.trial.index === this.animatedIndex) return;
    this.animatedIndex = this.trial.index;
    this.setPhase("animating");
    this.lastPlaybackMs = await this.player.play(this.trial.samples);
  }

  /** A letter is displayed only once: replaying is always refused. */
  replay(): boolean {
    return false;
  }

  get canReplay(): boolean {
    return false;
  }

  /** Submit one letter guess. Ignored outside the answering phase, so key
   * mashing cannot double-submit or skip ahead. */
  async answer(letter: string): Promise<void> {
    if (this.phase !== "answering" || !this.trial) return;
    if (!LETTER_RE.test(letter)) return;
    const trialIndex = this.trial.index;
    this.setPhase("submitting");
    await this.guard(async () => {
      const ack = await this.call(() => this.api.respond(this.id(), letter));
      this.trial = null;
      this.completed = trialIndex + 1;
      this.emit({ kind: "progress", completed: this.completed, total: this.totalTrials });
      if (isTrainingAck(ack)) {
        this.emit({ kind: "feedback", correct: ack.correct, displayed: ack.displayed });
        this.setPhase("feedback");
        if (this.feedbackHoldMs > 0) {
          await new Promise((r) => setTimeout(r, this.feedbackHoldMs));
        }
      }
      await this.advance();
    });
  }

  private async finish(): Promise<void> {
    const report = await this.call(() => this.api.report(this.id()));
    this.emit({ kind: "report", report });
    this.setPhase("finished");
  }

  /** Protocol-level failures (bad config, lost session) end the flow with a
   * non-retryable error event instead of an unhandled rejection. */
  private async guard(step: () => Promise<void>): Promise<void> {
    try {
      await step();
    } catch (err) {
      if (err instanceof ApiError) {
        this.setPhase("error");
        this.emit({ kind: "error", code: err.code, detail: err.detail, retryable: false });
        return;
      }
      throw err;
    }
  }

  private id(): string {
    if (!this.sessionId) throw new Error("no session");
    return this.sessionId;
  }
}
