/** Page wiring: DOM in, flow events out.
 *
 * All experiment logic lives in session.ts; this file only reads the setup
 * controls, forwards keypresses, and paints flow events into the page.  In
 * test mode the letter label and feedback slots are cleared before every
 * trial and never written while one is pending; only demo playback and
 * training feedback put a letter on screen.
 *
 * boot() is exported for scripted tests; the page itself opts into
 * auto-boot with <html data-autoboot="on">.
 */

import { ApiClient, type FetchLike, type SessionRequest } from "./api.js";
import { CanvasSurface, Player, realClock, type Clock } from "./playback.js";
import { ParticipantFlow } from "./session.js";
import { renderReport } from "./report.js";

export interface BootOptions {
  serverUrl?: string;
  clock?: Clock;
  fetchImpl?: FetchLike;
  feedbackHoldMs?: number;
}

export interface BootHandle {
  api: ApiClient;
  player: Player;
  newFlow(withDemo: boolean): ParticipantFlow;
  currentFlow(): ParticipantFlow | null;
}

const PHASE_TEXT: Record<string, string> = {
  idle: "set up a session to begin",
  demo: "demonstration: watch each letter",
  fetching: "loading the next trial",
  animating: "watch the stylus",
  answering: "type the letter you read",
  submitting: "recording your answer",
  feedback: "",
  finished: "session complete",
  error: "",
};

function el<T extends HTMLElement>(doc: Document, id: string): T {
  const node = doc.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function boot(doc: Document, opts: BootOptions = {}): BootHandle {
  const serverUrl =
    opts.serverUrl ??
    new URLSearchParams(doc.defaultView?.location.search ?? "").get("server") ??
    doc.defaultView?.location.origin ??
    "";
  const api = new ApiClient(serverUrl.replace(/\/$/, ""), opts.fetchImpl);

  const stage = el<HTMLCanvasElement>(doc, "stage");
  const status = el<HTMLElement>(doc, "status");
  const progress = el<HTMLElement>(doc, "progress");
  const glyphLabel = el<HTMLElement>(doc, "glyph-label");
  const feedback = el<HTMLElement>(doc, "feedback");
  const replayBtn = el<HTMLButtonElement>(doc, "replay");
  const retryBtn = el<HTMLButtonElement>(doc, "retry");
  const startBtn = el<HTMLButtonElement>(doc, "start");
  const resumeBtn = el<HTMLButtonElement>(doc, "resume");
  const reportBox = el<HTMLElement>(doc, "report");
  const sessionLine = el<HTMLElement>(doc, "session-line");

  const player = new Player(new CanvasSurface(stage), opts.clock ?? realClock);
  let flow: ParticipantFlow | null = null;

  const bindFlow = (f: ParticipantFlow): void => {
    f.on((ev) => {
      switch (ev.kind) {
        case "phase": {
          if (ev.phase in PHASE_TEXT && PHASE_TEXT[ev.phase]) {
            status.textContent = PHASE_TEXT[ev.phase];
          }
          if (ev.phase === "fetching" || ev.phase === "animating") {
            glyphLabel.textContent = "";
            feedback.textContent = "";
            feedback.className = "";
          }
          replayBtn.disabled = !f.canReplay;
          retryBtn.hidden = ev.phase !== "error";
          if (ev.phase === "finished") {
            sessionLine.textContent = `session ${f.sessionId ?? ""} finished`;
          }
          break;
        }
        case "progress": {
          progress.textContent =
            ev.total === null ? `trial ${ev.completed}` : `trial ${ev.completed} / ${ev.total}`;
          break;
        }
        case "demo-letter": {
          glyphLabel.textContent = ev.letter;
          break;
        }
        case "feedback": {
          if (ev.correct) {
            feedback.textContent = "correct";
            feedback.className = "good";
            glyphLabel.textContent = "";
          } else {
            feedback.textContent = `wrong: it was '${ev.displayed}'`;
            feedback.className = "bad";
            glyphLabel.textContent = ev.displayed;
          }
          break;
        }
        case "report": {
          renderReport(reportBox, ev.report);
          break;
        }
        case "error": {
          status.textContent = `error ${ev.code}: ${ev.detail}`;
          retryBtn.hidden = !ev.retryable;
          break;
        }
      }
    });
  };

  const handle: BootHandle = {
    api,
    player,
    newFlow(withDemo: boolean): ParticipantFlow {
      flow = new ParticipantFlow(api, player, {
        withDemo,
        feedbackHoldMs: opts.feedbackHoldMs,
      });
      bindFlow(flow);
      return flow;
    },
    currentFlow: () => flow,
  };

  doc.addEventListener("keydown", (ev) => {
    const e = ev as KeyboardEvent;
    if (e.altKey || e.ctrlKey || e.metaKey) return;
    const target = e.target as HTMLElement | null;
    if (target && (target.tagName === "INPUT" || target.tagName === "SELECT")) return;
    if (flow && /^[a-z]$/.test(e.key)) {
      void flow.answer(e.key);
    }
  });

  replayBtn.addEventListener("click", () => {
    flow?.replay(); // always refused: each letter is shown exactly once
  });

  retryBtn.addEventListener("click", () => {
    flow?.retry();
  });

  startBtn.addEventListener("click", () => {
    const height = Number(el<HTMLSelectElement>(doc, "height").value);
    const duration = Number(el<HTMLSelectElement>(doc, "duration").value);
    const mode = el<HTMLSelectElement>(doc, "mode").value as "test" | "training";
    const withDemo = el<HTMLInputElement>(doc, "with-demo").checked;
    const req: SessionRequest = { height_mm: height, duration_ms: duration, mode };
    const f = handle.newFlow(withDemo);
    void f.start(req).then(() => {
      if (f.sessionId) {
        sessionLine.textContent = `session ${f.sessionId}`;
      }
    });
  });

  resumeBtn.addEventListener("click", () => {
    const id = el<HTMLInputElement>(doc, "resume-id").value.trim();
    if (!id) return;
    const f = handle.newFlow(false);
    void f.resume(id);
    sessionLine.textContent = `session ${id}`;
  });

  return handle;
}

if (typeof document !== "undefined" && document.documentElement.dataset.autoboot === "on") {
  const run = () => boot(document);
  if (document.readyState === "loading") {
    document.addEventListener("DOMContentLoaded", run);
  } else {
    run();
  }
}
