import { beforeEach, describe, expect, it, vi } from "vitest";
import { readFileSync } from "node:fs";
import { resolve } from "node:path";
import { boot, type BootHandle } from "../../src/main.js";
import type { FetchLike, SampleRow } from "../../src/api.js";
import type { Clock } from "../../src/playback.js";
import type { ParticipantFlow } from "../../src/session.js";

const PAGE = readFileSync(resolve(process.cwd(), "index.html"), "utf8");

function loadPage(): void {
  document.documentElement.innerHTML = PAGE.replace(/<script[\s\S]*?<\/script>/, "");
}

function instantClock(): Clock {
  let t = 0;
  return {
    now: () => t,
    requestFrame: (cb) => {
      t += 250;
      return setTimeout(cb, 0) as unknown as number;
    },
    cancelFrame: (id) => clearTimeout(id),
  };
}

function rows(duration: number): SampleRow[] {
  return [
    [0, 0, 0, 1],
    [duration / 2, 4, 4, 1],
    [duration, 8, 0, 1],
  ];
}

/** Minimal in-memory service with the real API shapes. */
function mockService(letters: string[], mode: "test" | "training"): FetchLike {
  let cursor = 0;
  const answers: string[] = [];
  const json = (status: number, body: unknown) =>
    new Response(JSON.stringify(body), { status });
  return async (url, init) => {
    const path = new URL(url).pathname;
    if (path === "/api/session" && init?.method === "POST") {
      return json(200, { id: "mock1" });
    }
    if (path === "/api/session/mock1") {
      return json(200, {
        id: "mock1",
        mode,
        height_mm: 7,
        duration_ms: 500,
        total_trials: mode === "test" ? letters.length : null,
        completed: cursor,
        pending: false,
        finished: false,
      });
    }
    if (path === "/api/session/mock1/trial") {
      if (cursor >= letters.length) {
        return json(409, { error: "session-finished", detail: "done" });
      }
      return json(200, { index: cursor, height_mm: 7, duration_ms: 500, samples: rows(500) });
    }
    if (path === "/api/session/mock1/response" && init?.method === "POST") {
      const letter = (JSON.parse(String(init.body)) as { letter: string }).letter;
      const displayed = letters[cursor];
      answers.push(letter);
      cursor++;
      return mode === "test"
        ? json(200, { index: cursor - 1, recorded: true })
        : json(200, { index: cursor - 1, correct: letter === displayed, displayed });
    }
    if (path === "/api/session/mock1/report") {
      const matrix = Array.from({ length: 26 }, () => Array(26).fill(0));
      let hits = 0;
      answers.forEach((ans, i) => {
        const row = letters[i].charCodeAt(0) - 97;
        const col = ans.charCodeAt(0) - 97;
        matrix[row][col]++;
        if (ans === letters[i]) hits++;
      });
      return json(200, {
        matrix,
        accuracy: (100 * hits) / Math.max(answers.length, 1),
        records: answers.map((ans, i) => ({
          index: i,
          displayed: letters[i],
          response: ans,
          correct: ans === letters[i],
          height_mm: 7,
          duration_ms: 500,
          mode,
          latency_ms: 0,
        })),
      });
    }
    if (path === "/api/session/mock1/demo") {
      return json(200, { letters: ["a", "b"].map((l) => ({ letter: l, samples: rows(500) })) });
    }
    return json(404, { error: "unknown-session", detail: path });
  };
}

function key(letter: string, target?: HTMLElement): void {
  const ev = new KeyboardEvent("keydown", { key: letter, bubbles: true });
  (target ?? document).dispatchEvent(ev);
}

function waitPhase(flow: ParticipantFlow, phase: string): Promise<void> {
  return new Promise((resolve) => {
    if (flow.phase === phase) return resolve();
    const off = flow.on((ev) => {
      if (ev.kind === "phase" && ev.phase === phase) {
        off();
        resolve();
      }
    });
  });
}

function text(id: string): string {
  return document.getElementById(id)!.textContent ?? "";
}

function startSession(handle: BootHandle, mode: "test" | "training", withDemo = false): ParticipantFlow {
  (document.getElementById("mode") as HTMLSelectElement).value = mode;
  (document.getElementById("with-demo") as HTMLInputElement).checked = withDemo;
  (document.getElementById("start") as HTMLButtonElement).click();
  const flow = handle.currentFlow();
  if (!flow) throw new Error("start did not create a flow");
  return flow;
}

beforeEach(() => {
  loadPage();
  vi.spyOn(HTMLCanvasElement.prototype, "getContext").mockReturnValue(null);
});

describe("boot", () => {
  it("drives a keyboard-only test session with no letter on screen", async () => {
    const logSpy = vi.spyOn(console, "log");
    const errorSpy = vi.spyOn(console, "error");
    const handle = boot(document, {
      serverUrl: "http://svc",
      fetchImpl: mockService(["c", "a", "b"], "test"),
      clock: instantClock(),
      feedbackHoldMs: 0,
    });
    const flow = startSession(handle, "test");

    for (const guess of ["c", "x", "b"]) {
      await waitPhase(flow, "answering");
      // test mode: the label slot and feedback slot stay empty, always
      expect(text("glyph-label")).toBe("");
      expect(text("feedback")).toBe("");
      expect((document.getElementById("replay") as HTMLButtonElement).disabled).toBe(true);
      expect(text("status")).toBe("type the letter you read");
      key(guess);
    }
    await waitPhase(flow, "finished");

    expect(text("progress")).toBe("trial 3 / 3");
    expect(text("report")).toContain("accuracy 66.67% over 3 trials");
    expect(text("session-line")).toContain("mock1");
    expect(logSpy).not.toHaveBeenCalled();
    expect(errorSpy).not.toHaveBeenCalled();
  });

  it("ignores keys typed into the setup inputs", async () => {
    const handle = boot(document, {
      serverUrl: "http://svc",
      fetchImpl: mockService(["m"], "test"),
      clock: instantClock(),
    });
    const flow = startSession(handle, "test");
    await waitPhase(flow, "answering");

    key("z", document.getElementById("resume-id")!);
    expect(flow.phase).toBe("answering"); // not submitted
    key("m");
    await waitPhase(flow, "finished");
    expect(text("report")).toContain("accuracy 100.00%");
  });

  it("shows training feedback with the true letter, then clears it", async () => {
    const handle = boot(document, {
      serverUrl: "http://svc",
      fetchImpl: mockService(["q", "k"], "training"),
      clock: instantClock(),
      // a real (if tiny) hold keeps feedback on screen across the await below
      feedbackHoldMs: 50,
    });
    const flow = startSession(handle, "training");

    await waitPhase(flow, "answering");
    expect(text("progress")).toBe("trial 0"); // unbounded: no total shown
    key("q"); // correct
    await waitPhase(flow, "feedback");
    expect(text("feedback")).toBe("correct");
    expect(text("glyph-label")).toBe("");

    await waitPhase(flow, "answering");
    expect(text("feedback")).toBe(""); // cleared before the next trial
    key("q"); // wrong, true letter is k
    await waitPhase(flow, "feedback");
    expect(text("feedback")).toBe("wrong: it was 'k'");
    expect(text("glyph-label")).toBe("k");
    await waitPhase(flow, "finished");
  });

  it("animates the labeled alphabet demo before the first trial", async () => {
    const handle = boot(document, {
      serverUrl: "http://svc",
      fetchImpl: mockService(["m"], "test"),
      clock: instantClock(),
    });
    const labels: string[] = [];
    const flow = startSession(handle, "test", true);
    flow.on((ev) => {
      if (ev.kind === "demo-letter") labels.push(ev.letter);
    });
    // capture labels as the DOM shows them
    const seen: string[] = [];
    flow.on((ev) => {
      if (ev.kind === "demo-letter" && ev.letter) seen.push(text("glyph-label"));
    });
    await waitPhase(flow, "answering");
    expect(seen).toEqual(["a", "b"]); // labels were visible during the demo
    expect(text("glyph-label")).toBe(""); // and wiped before the real trial
  });

  it("surfaces a retry button on network failure and resumes on click", async () => {
    let drop = 1;
    const inner = mockService(["m"], "test");
    const flaky: FetchLike = async (url, init) => {
      if (url.endsWith("/trial") && drop > 0) {
        drop--;
        throw new TypeError("fetch failed");
      }
      return inner(url, init);
    };
    const handle = boot(document, {
      serverUrl: "http://svc",
      fetchImpl: flaky,
      clock: instantClock(),
    });
    const flow = startSession(handle, "test");

    await waitPhase(flow, "error");
    const retry = document.getElementById("retry") as HTMLButtonElement;
    expect(retry.hidden).toBe(false);
    expect(text("status")).toContain("error network");

    retry.click();
    await waitPhase(flow, "answering");
    expect((document.getElementById("retry") as HTMLButtonElement).hidden).toBe(true);
    key("m");
    await waitPhase(flow, "finished");
  });
});
