/** Typed client for the glyphmotion session service HTTP API.
 *
 * The service is the only backend; every method here maps 1:1 onto one of
 * its endpoints and returns the parsed JSON body.  Service-side failures
 * arrive as `{error, detail}` bodies and are rethrown as ApiError so callers
 * can branch on the machine-readable code ("session-finished",
 * "response-pending", ...).  Transport failures get the code "network".
 */

export type SampleRow = [number, number, number, number]; // t ms, x mm, y mm, pen

export interface SessionRequest {
  height_mm: number;
  duration_ms: number;
  mode?: "test" | "training";
  seed?: number;
  repeats_per_letter?: number;
  training_duration_limit_ms?: number;
}

export interface SessionStatus {
  id: string;
  mode: string;
  height_mm: number;
  duration_ms: number;
  total_trials: number | null;
  completed: number;
  pending: boolean;
  finished: boolean;
}

/** A pending trial. Deliberately letter-free in test mode; we keep only the
 * fields the player needs, so even a misbehaving server could not smuggle a
 * label into the UI through this type. */
export interface TrialPayload {
  index: number;
  height_mm: number;
  duration_ms: number;
  samples: SampleRow[];
}

export interface TestAck {
  index: number;
  recorded: boolean;
}

export interface TrainingAck {
  index: number;
  correct: boolean;
  displayed: string;
}

export type ResponseAck = TestAck | TrainingAck;

export function isTrainingAck(ack: ResponseAck): ack is TrainingAck {
  return "correct" in ack;
}

export interface TrialRecordJson {
  index: number;
  displayed: string;
  response: string;
  correct: boolean;
  height_mm: number;
  duration_ms: number;
  mode: string;
  latency_ms: number;
}

export interface SessionReport {
  matrix: number[][];
  accuracy: number;
  records: TrialRecordJson[];
}

export interface DemoGlyph {
  letter: string;
  samples: SampleRow[];
}

export class ApiError extends Error {
  constructor(
    readonly code: string,
    readonly detail: string,
    readonly status: number,
  ) {
    super(`${code}: ${detail}`);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

const JSON_HEADERS = { "content-type": "application/json" };

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError("network", String(err), 0);
    }
    let body: unknown = null;
    try {
      body = await resp.json();
    } catch {
      // non-JSON body; fall through to the status check
    }
    if (!resp.ok) {
      const rec = (body ?? {}) as Record<string, unknown>;
      const code = typeof rec.error === "string" ? rec.error : `http-${resp.status}`;
      const detail = typeof rec.detail === "string" ? rec.detail : resp.statusText;
      throw new ApiError(code, detail, resp.status);
    }
    return body as T;
  }

  async createSession(req: SessionRequest): Promise<string> {
    const body = await this.request<{ id: string }>("/api/session", {
      method: "POST",
      headers: JSON_HEADERS,
      body: JSON.stringify(req),
    });
    return body.id;
  }

  status(id: string): Promise<SessionStatus> {
    return this.request(`/api/session/${id}`);
  }

  /** Fetch the pending trial, keeping only the letter-free playback fields. */
  async trial(id: string): Promise<TrialPayload> {
    const raw = await this.request<TrialPayload>(`/api/session/${id}/trial`);
    return {
      index: raw.index,
      height_mm: raw.height_mm,
      duration_ms: raw.duration_ms,
      samples: raw.samples,
    };
  }

  respond(id: string, letter: string): Promise<ResponseAck> {
    return this.request(`/api/session/${id}/response`, {
      method: "POST",
      headers: JSON_HEADERS,
      body: JSON.stringify({ letter }),
    });
  }

  report(id: string): Promise<SessionReport> {
    return this.request(`/api/session/${id}/report`);
  }

  async demo(id: string): Promise<DemoGlyph[]> {
    const body = await this.request<{ letters: DemoGlyph[] }>(`/api/session/${id}/demo`);
    return body.letters;
  }
}
