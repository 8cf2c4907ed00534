import { describe, expect, it } from "vitest";
import { ApiClient, ApiError, isTrainingAck, type FetchLike } from "../../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("posts session config and unwraps the id", async () => {
    const calls: Array<{ url: string; init?: RequestInit }> = [];
    const fetchImpl: FetchLike = async (url, init) => {
      calls.push({ url, init });
      return jsonResponse(200, { id: "abc123" });
    };
    const api = new ApiClient("http://x", fetchImpl);
    const id = await api.createSession({ height_mm: 7, duration_ms: 500 });
    expect(id).toBe("abc123");
    expect(calls[0].url).toBe("http://x/api/session");
    expect(calls[0].init?.method).toBe("POST");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({ height_mm: 7, duration_ms: 500 });
  });

  it("maps service error bodies to ApiError with the service code", async () => {
    const api = new ApiClient("http://x", async () =>
      jsonResponse(409, { error: "session-finished", detail: "all 52 trials answered" }),
    );
    const err = await api.trial("s").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe("session-finished");
    expect(err.detail).toBe("all 52 trials answered");
    expect(err.status).toBe(409);
  });

  it("maps non-JSON failures to an http-status code", async () => {
    const api = new ApiClient("http://x", async () => new Response("boom", { status: 502 }));
    const err = await api.status("s").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe("http-502");
  });

  it("maps transport failure to code network with status 0", async () => {
    const api = new ApiClient("http://x", async () => {
      throw new TypeError("fetch failed");
    });
    const err = await api.report("s").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe("network");
    expect(err.status).toBe(0);
  });

  it("keeps only playback fields from trial payloads", async () => {
    // even a server bug that leaked a label would be dropped at the client edge
    const api = new ApiClient("http://x", async () =>
      jsonResponse(200, {
        index: 3,
        height_mm: 7,
        duration_ms: 500,
        samples: [[0, 1, 2, 1]],
        displayed: "q",
      }),
    );
    const trial = await api.trial("s");
    expect(trial).toEqual({
      index: 3,
      height_mm: 7,
      duration_ms: 500,
      samples: [[0, 1, 2, 1]],
    });
    expect("displayed" in trial).toBe(false);
  });

  it("discriminates training acks from test acks", () => {
    expect(isTrainingAck({ index: 0, recorded: true })).toBe(false);
    expect(isTrainingAck({ index: 0, correct: false, displayed: "k" })).toBe(true);
  });
});
