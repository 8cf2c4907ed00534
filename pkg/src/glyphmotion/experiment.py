"""Identification-experiment protocol: sessions, trials, confusion counts.

A test session presents each letter a fixed number of times in seeded
random order (default 2 passes over the alphabet, 52 trials).  A training
session is an unbounded seeded letter stream, cut off by a wall-clock
budget for live participants or a trial cap for synthetic ones, with
correctness fed back after every guess.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import GlyphMotionError
from .preprocess import (
    DEFAULT_DT,
    PresentationCondition,
    SmoothingSpec,
    prepare_presentation,
)
from .recognizer import NoiseSpec, TemplateSet, add_noise, classify
from .trajectory import LETTERS, StrokeFont

MODE_TEST = "test"
MODE_TRAINING = "training"

RESPONSE_NONE = "none"


@dataclass(frozen=True)
class SyntheticParticipant:
    """Classifier-backed participant with per-session noise level."""

    sigma: float = 0.0

    def __post_init__(self):
        if self.sigma < 0:
            raise GlyphMotionError("format", "sigma must be >= 0")


@dataclass(frozen=True)
class InteractiveParticipant:
    """Marker: responses arrive over the session service."""


@dataclass(frozen=True)
class SessionConfig:
    condition: PresentationCondition
    repeats_per_letter: int = 2
    mode: str = MODE_TEST
    seed: int = 0
    participant: SyntheticParticipant | InteractiveParticipant = field(
        default_factory=SyntheticParticipant)
    training_duration_limit: float = 300000.0   # ms of wall time, training mode
    synthetic_training_trials: int = 60         # trial cap replacing wall time

    def __post_init__(self):
        if self.repeats_per_letter < 1:
            raise GlyphMotionError("format", "repeats_per_letter must be >= 1")
        if self.mode not in (MODE_TEST, MODE_TRAINING):
            raise GlyphMotionError("format", f"mode {self.mode!r}, expected test or training")


@dataclass(frozen=True)
class TrialRecord:
    index: int
    displayed: str
    response: str                      # a-z, or "none" for an aborted trial
    correct: bool
    condition: PresentationCondition
    mode: str
    response_latency: float = 0.0      # ms; 0 for synthetic participants

    def __post_init__(self):
        if self.correct != (self.displayed == self.response):
            raise GlyphMotionError("format", "correct flag contradicts displayed/response")


class TrialPlan:
    """Letter sequence of one session.

    Test plans are finite seeded permutations; training plans are unbounded
    streams with deterministic random access (the i-th letter depends only
    on the seed and i, so a restarted service regenerates the same stream).
    """

    def __init__(self, letters: tuple[str, ...] | None, seed: int):
        self._letters = letters
        self._seed = seed

    @property
    def bounded(self) -> bool:
        return self._letters is not None

    def __len__(self) -> int:
        if self._letters is None:
            raise GlyphMotionError("format", "training plans are unbounded")
        return len(self._letters)

    def letter(self, i: int) -> str:
        if self._letters is not None:
            return self._letters[i]
        rng = np.random.default_rng([self._seed, i])
        return LETTERS[int(rng.integers(len(LETTERS)))]


def build_session(cfg: SessionConfig) -> TrialPlan:
    """Fix the letter order for a session from its seed."""
    if cfg.mode == MODE_TEST:
        pool = np.array([c for c in LETTERS for _ in range(cfg.repeats_per_letter)])
        rng = np.random.default_rng(cfg.seed)
        return TrialPlan(tuple(rng.permutation(pool).tolist()), cfg.seed)
    return TrialPlan(None, cfg.seed)


def run_session(cfg: SessionConfig, font: StrokeFont,
                smoothing: SmoothingSpec | None = None,
                dt: float = DEFAULT_DT) -> list[TrialRecord]:
    """Run a complete synthetic session; deterministic in cfg.seed.

    The displayed trajectory is the prepared glyph plus per-trial noise
    (seed = session seed + trial index); the response is the nearest
    template under DTW against the same prepared font.
    """
    if not isinstance(cfg.participant, SyntheticParticipant):
        raise GlyphMotionError("format", "interactive sessions run through the session service")
    prepared = prepare_presentation(font, cfg.condition, smoothing, dt)
    templates = TemplateSet(prepared)
    plan = build_session(cfg)
    if plan.bounded:
        n_trials = len(plan)
    else:
        n_trials = 0 if cfg.training_duration_limit <= 0 else cfg.synthetic_training_trials

    sigma = cfg.participant.sigma
    cache: dict[str, str] = {}   # noiseless classification is input-deterministic per letter
    records = []
    for i in range(n_trials):
        letter = plan.letter(i)
        if sigma == 0.0 and letter in cache:
            response = cache[letter]
        else:
            shown = prepared.glyphs[letter]
            if sigma > 0.0:
                shown = add_noise(shown, NoiseSpec(sigma, cfg.seed + i))
            response, _ = classify(shown, templates)
            if sigma == 0.0:
                cache[letter] = response
        records.append(TrialRecord(i, letter, response, letter == response, cfg.condition, cfg.mode))
    return records


@dataclass(frozen=True)
class ConfusionMatrix:
    """26x26 counts: rows = displayed letter, columns = response."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.shape != (len(LETTERS), len(LETTERS)):
            raise GlyphMotionError("format", f"counts shape {c.shape}, expected 26x26")
        if (c < 0).any():
            raise GlyphMotionError("format", "negative count")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.counts + other.counts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return bool(np.array_equal(self.counts, other.counts))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)


def confusion_matrix(records: Iterable[TrialRecord]) -> ConfusionMatrix:
    counts = np.zeros((len(LETTERS), len(LETTERS)), dtype=np.int64)
    idx = {c: i for i, c in enumerate(LETTERS)}
    for r in records:
        if r.response == RESPONSE_NONE:
            raise GlyphMotionError("incomplete-records", f"trial {r.index} has no response")
        counts[idx[r.displayed], idx[r.response]] += 1
    return ConfusionMatrix(counts)


def accuracy(m: ConfusionMatrix) -> float:
    """Percent correct: 100 x trace / total."""
    if m.total == 0:
        raise GlyphMotionError("empty-matrix", "no trials counted")
    return 100.0 * float(np.trace(m.counts)) / m.total


def per_letter_accuracy(m: ConfusionMatrix) -> np.ndarray:
    """Percent correct per displayed letter, alphabetical order."""
    sums = m.row_sums()
    for i, s in enumerate(sums):
        if s == 0:
            raise GlyphMotionError("letter-missing", LETTERS[i])
    return 100.0 * np.diag(m.counts) / sums


def most_confused_pairs(m: ConfusionMatrix, top: int = 5) -> list[tuple[tuple[str, str], int]]:
    """Largest off-diagonal counts as ((displayed, response), count), descending."""
    pairs = []
    for i in range(len(LETTERS)):
        for j in range(len(LETTERS)):
            if i != j and m.counts[i, j] > 0:
                pairs.append(((LETTERS[i], LETTERS[j]), int(m.counts[i, j])))
    pairs.sort(key=lambda kv: (-kv[1], kv[0]))
    return pairs[:top]


# ---------------------------------------------------------------------------
# Session log: newline-delimited JSON, one object per trial, field names
# exactly: index, displayed, response, correct, height_mm, duration_ms,
# mode, latency_ms.
# Confusion matrix export: CSV with a blank+letters header row and one
# letter+counts row per displayed letter.
# ---------------------------------------------------------------------------


def record_to_json_obj(r: TrialRecord) -> dict:
    return {
        "index": r.index,
        "displayed": r.displayed,
        "response": r.response,
        "correct": r.correct,
        "height_mm": r.condition.target_mean_height,
        "duration_ms": r.condition.target_duration,
        "mode": r.mode,
        "latency_ms": r.response_latency,
    }


def records_to_ndjson(records: Iterable[TrialRecord]) -> str:
    return "".join(json.dumps(record_to_json_obj(r)) + "\n" for r in records)


def record_from_json_obj(obj: dict) -> TrialRecord:
    try:
        cond = PresentationCondition(obj["height_mm"], obj["duration_ms"])
        return TrialRecord(int(obj["index"]), obj["displayed"], obj["response"],
                           bool(obj["correct"]), cond, obj["mode"],
                           float(obj.get("latency_ms", 0.0)))
    except (KeyError, TypeError, ValueError) as e:
        raise GlyphMotionError("format", f"bad trial record: {e}") from e


def records_from_ndjson(text: str) -> list[TrialRecord]:
    records = []
    for ln, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise GlyphMotionError("format", f"line {ln}: {e.msg}") from e
        records.append(record_from_json_obj(obj))
    return records


def confusion_to_csv(m: ConfusionMatrix) -> str:
    lines = ["," + ",".join(LETTERS)]
    for i, c in enumerate(LETTERS):
        lines.append(c + "," + ",".join(str(int(v)) for v in m.counts[i]))
    return "\n".join(lines) + "\n"


def confusion_from_csv(text: str) -> ConfusionMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != len(LETTERS) + 1 or lines[0].split(",")[1:] != list(LETTERS):
        raise GlyphMotionError("format", "expected a blank+letters header and 26 rows")
    counts = np.zeros((len(LETTERS), len(LETTERS)), dtype=np.int64)
    for i, line in enumerate(lines[1:]):
        cells = line.split(",")
        if len(cells) != len(LETTERS) + 1 or cells[0] != LETTERS[i]:
            raise GlyphMotionError("format", f"row {i + 1}: expected letter {LETTERS[i]!r}")
        try:
            counts[i] = [int(v) for v in cells[1:]]
        except ValueError as e:
            raise GlyphMotionError("format", f"row {i + 1}: {e}") from e
    return ConfusionMatrix(counts)
