"""HTTP facade for interactive sessions.

The web client drives one trial at a time: fetch playback samples, submit a
single-letter guess, repeat.  Letter labels never ride along with test-mode
payloads; training mode reveals the displayed letter only inside the
feedback to a submitted answer.

Every accepted response is appended to a per-session newline-delimited
log on disk before it is acknowledged, so a restarted service rebuilds all
session states from the data directory.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from .errors import GlyphMotionError
from .experiment import (
    MODE_TEST,
    MODE_TRAINING,
    InteractiveParticipant,
    SessionConfig,
    TrialRecord,
    accuracy,
    build_session,
    confusion_matrix,
    record_to_json_obj,
    records_from_ndjson,
    records_to_ndjson,
)
from .fixture_font import fixture_font
from .preprocess import DEFAULT_DT, PresentationCondition, SmoothingSpec, prepare_presentation
from .trajectory import LETTERS, GlyphTrajectory, StrokeFont, serialize_font

_HTTP_STATUS = {
    "unknown-session": 404,
    "session-finished": 409,
    "response-pending": 409,
    "no-pending-trial": 409,
    "session-unfinished": 409,
    "session-aborted": 409,
}


def _glyph_rows(g: GlyphTrajectory) -> list[list[float]]:
    return [[float(t), float(x), float(y), int(p)]
            for t, x, y, p in zip(g.t, g.x, g.y, g.pen)]


class Session:
    """Interactive session state: fixed plan, cursor, pending trial, log."""

    def __init__(self, sid: str, cfg: SessionConfig, prepared: StrokeFont,
                 log_path: Path | None, started_at: float | None = None):
        self.id = sid
        self.cfg = cfg
        self.prepared = prepared
        self.plan = build_session(cfg)
        self.records: list[TrialRecord] = []
        self.pending: int | None = None
        self.pending_since: float = 0.0
        self.started_at = started_at    # wall clock at first trial fetch (training)
        self.log_path = log_path
        self.lock = threading.Lock()

    @property
    def total_trials(self) -> int | None:
        return len(self.plan) if self.plan.bounded else None

    def finished(self, now: float | None = None) -> bool:
        if self.plan.bounded:
            return len(self.records) >= len(self.plan)
        if self.started_at is None:
            return self.cfg.training_duration_limit <= 0
        now = time.time() if now is None else now
        return (now - self.started_at) * 1000.0 >= self.cfg.training_duration_limit

    def next_trial(self) -> dict:
        if self.pending is not None:
            raise GlyphMotionError("response-pending", f"trial {self.pending} awaits a response")
        now = time.time()
        if not self.plan.bounded and self.started_at is None:
            if self.cfg.training_duration_limit <= 0:
                raise GlyphMotionError("session-finished", "training budget is zero")
            self.started_at = now
            self._rewrite_meta()
        if self.finished(now):
            raise GlyphMotionError("session-finished", "all trials answered")
        i = len(self.records)
        letter = self.plan.letter(i)
        self.pending = i
        self.pending_since = now
        g = self.prepared.glyphs[letter]
        return {
            "index": i,
            "height_mm": self.cfg.condition.target_mean_height,
            "duration_ms": self.cfg.condition.target_duration,
            "samples": _glyph_rows(g),
        }

    def submit(self, letter) -> dict:
        if not isinstance(letter, str) or letter not in LETTERS:
            raise GlyphMotionError("invalid-letter", f"{letter!r} is not a lowercase a-z letter")
        if self.pending is None:
            raise GlyphMotionError("no-pending-trial", "fetch a trial before answering")
        i = self.pending
        displayed = self.plan.letter(i)
        latency = (time.time() - self.pending_since) * 1000.0
        rec = TrialRecord(i, displayed, letter, displayed == letter,
                          self.cfg.condition, self.cfg.mode, latency)
        self._append_log(rec)
        self.records.append(rec)
        self.pending = None
        if self.cfg.mode == MODE_TRAINING:
            return {"index": i, "correct": rec.correct, "displayed": displayed}
        return {"index": i, "recorded": True}

    def report(self) -> dict:
        if self.cfg.mode == MODE_TEST and not self.finished():
            raise GlyphMotionError(
                "session-unfinished",
                f"{len(self.records)} of {len(self.plan)} trials answered")
        m = confusion_matrix(self.records)
        return {
            "matrix": m.counts.tolist(),
            "accuracy": accuracy(m) if self.records else None,
            "records": [record_to_json_obj(r) for r in self.records],
        }

    def demo_payload(self) -> dict:
        return {"letters": [
            {"letter": c, "samples": _glyph_rows(self.prepared.glyphs[c])} for c in LETTERS
        ]}

    def status(self) -> dict:
        return {
            "id": self.id,
            "mode": self.cfg.mode,
            "height_mm": self.cfg.condition.target_mean_height,
            "duration_ms": self.cfg.condition.target_duration,
            "total_trials": self.total_trials,
            "completed": len(self.records),
            "pending": self.pending is not None,
            "finished": self.finished(),
        }

    # persistence -----------------------------------------------------------

    def meta(self) -> dict:
        return {
            "id": self.id,
            "mode": self.cfg.mode,
            "seed": self.cfg.seed,
            "repeats_per_letter": self.cfg.repeats_per_letter,
            "height_mm": self.cfg.condition.target_mean_height,
            "duration_ms": self.cfg.condition.target_duration,
            "training_duration_limit_ms": self.cfg.training_duration_limit,
            "started_at": self.started_at,
        }

    def _rewrite_meta(self):
        if self.log_path is None:
            return
        meta_path = self.log_path.parent / "meta.json"
        meta_path.write_text(json.dumps(self.meta()))

    def _append_log(self, rec: TrialRecord):
        if self.log_path is None:
            return
        with self.log_path.open("a", encoding="utf-8") as fh:
            fh.write(records_to_ndjson([rec]))
            fh.flush()


class SessionStore:
    """All live sessions plus their on-disk mirrors."""

    def __init__(self, data_dir: str | Path | None = None,
                 font: StrokeFont | None = None,
                 dt: float = DEFAULT_DT,
                 smoothing: SmoothingSpec | None = None):
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self.font = font if font is not None else fixture_font()
        self.dt = dt
        self.smoothing = smoothing if smoothing is not None else SmoothingSpec()
        self.sessions: dict[str, Session] = {}
        self.lock = threading.Lock()
        self._prepared: dict[tuple, StrokeFont] = {}
        if self.data_dir is not None:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            self._restore()

    def prepared(self, cond: PresentationCondition) -> StrokeFont:
        key = (cond.target_mean_height, cond.target_duration)
        if key not in self._prepared:
            self._prepared[key] = prepare_presentation(self.font, cond, self.smoothing, self.dt)
        return self._prepared[key]

    def create(self, cfg: SessionConfig) -> Session:
        sid = secrets.token_hex(8)
        log_path = None
        if self.data_dir is not None:
            session_dir = self.data_dir / sid
            session_dir.mkdir(parents=True, exist_ok=True)
            log_path = session_dir / "records.ndjson"
        s = Session(sid, cfg, self.prepared(cfg.condition), log_path)
        if log_path is not None:
            s._rewrite_meta()
            log_path.touch()
        with self.lock:
            self.sessions[sid] = s
        return s

    def get(self, sid: str) -> Session:
        with self.lock:
            s = self.sessions.get(sid)
        if s is None:
            raise GlyphMotionError("unknown-session", sid)
        return s

    def _restore(self):
        for meta_path in sorted(self.data_dir.glob("*/meta.json")):
            try:
                meta = json.loads(meta_path.read_text())
                cfg = SessionConfig(
                    condition=PresentationCondition(meta["height_mm"], meta["duration_ms"]),
                    repeats_per_letter=int(meta.get("repeats_per_letter", 2)),
                    mode=meta["mode"],
                    seed=int(meta["seed"]),
                    participant=InteractiveParticipant(),
                    training_duration_limit=float(meta.get("training_duration_limit_ms", 300000.0)),
                )
                log_path = meta_path.parent / "records.ndjson"
                s = Session(meta["id"], cfg, self.prepared(cfg.condition), log_path,
                            started_at=meta.get("started_at"))
                if log_path.exists():
                    s.records = records_from_ndjson(log_path.read_text())
                self.sessions[s.id] = s
            except (GlyphMotionError, KeyError, ValueError, json.JSONDecodeError):
                continue   # a malformed session dir must not take the service down


def _parse_config(body: dict) -> SessionConfig:
    if not isinstance(body, dict):
        raise GlyphMotionError("format", "config must be a JSON object")
    mode = body.get("mode", MODE_TEST)
    for name in ("height_mm", "duration_ms"):
        if name not in body:
            raise GlyphMotionError("format", f"missing field {name}")
        if not isinstance(body[name], (int, float)) or isinstance(body[name], bool):
            raise GlyphMotionError("format", f"{name} must be a number")
    cond = PresentationCondition(float(body["height_mm"]), float(body["duration_ms"]))
    return SessionConfig(
        condition=cond,
        repeats_per_letter=int(body.get("repeats_per_letter", 2)),
        mode=mode,
        seed=int(body.get("seed", 0)),
        participant=InteractiveParticipant(),
        training_duration_limit=float(body.get("training_duration_limit_ms", 300000.0)),
    )


def create_app(data_dir: str | Path | None = None,
               font: StrokeFont | None = None,
               dt: float = DEFAULT_DT) -> FastAPI:
    app = FastAPI(title="glyphmotion session service")
    store = SessionStore(data_dir, font, dt)
    app.state.store = store

    @app.exception_handler(GlyphMotionError)
    async def _gm_error(_request: Request, exc: GlyphMotionError):
        status = _HTTP_STATUS.get(exc.code, 400)
        return JSONResponse(status_code=status,
                            content={"error": exc.code, "detail": exc.detail})

    @app.post("/api/session")
    async def create_session(request: Request):
        body = await request.json()
        cfg = _parse_config(body)
        s = store.create(cfg)
        return {"id": s.id}

    @app.get("/api/session/{sid}")
    async def session_status(sid: str):
        s = store.get(sid)
        with s.lock:
            return s.status()

    @app.get("/api/session/{sid}/trial")
    async def next_trial(sid: str):
        s = store.get(sid)
        with s.lock:
            return s.next_trial()

    @app.post("/api/session/{sid}/response")
    async def submit_response(sid: str, request: Request):
        body = await request.json()
        if not isinstance(body, dict) or "letter" not in body:
            raise GlyphMotionError("format", "missing field letter")
        s = store.get(sid)
        with s.lock:
            return s.submit(body["letter"])

    @app.get("/api/session/{sid}/report")
    async def report(sid: str):
        s = store.get(sid)
        with s.lock:
            return s.report()

    @app.get("/api/session/{sid}/demo")
    async def demo(sid: str):
        s = store.get(sid)
        with s.lock:
            return s.demo_payload()

    @app.get("/api/font")
    async def font_file():
        return Response(content=serialize_font(store.font), media_type="application/json")

    return app
