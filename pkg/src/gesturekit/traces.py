"""Data model, ingestion, and uniform-rate preprocessing of multitouch gesture recordings.

A recording is one continuous gesture: every finger stays down for the whole
trace, each finger contributing a timestamped 2D point stream.  Raw streams
arrive at an uneven device rate (~200 Hz tablets, ~60-120 Hz browsers) and are
resampled onto a common 60 Hz grid by cubic spline interpolation before any
analysis.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import permutations
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

DEFAULT_RATE_HZ = 60.0

# Trial indices are grouped 1-10 / 11-12 / 13-17; 17 is the corpus maximum.
MAX_TRIAL_INDEX = 17


class InvalidTrace(ValueError):
    """A trace document or trace content violates the trace schema."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FingerStream:
    """One finger's raw samples: parallel arrays of milliseconds and pixels."""

    t_ms: np.ndarray
    x_px: np.ndarray
    y_px: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t_ms", _readonly(self.t_ms))
        object.__setattr__(self, "x_px", _readonly(self.x_px))
        object.__setattr__(self, "y_px", _readonly(self.y_px))
        if not (self.t_ms.shape == self.x_px.shape == self.y_px.shape):
            raise InvalidTrace("finger stream arrays must have equal length")

    @property
    def n_samples(self) -> int:
        return int(self.t_ms.shape[0])


@dataclass(frozen=True, eq=False)
class GestureTrace:
    """A validated raw recording of one gesture repetition."""

    gesture_id: str
    subject_id: str
    session: int
    trial_index: int
    fingers: tuple[FingerStream, ...]
    screen_w: int
    screen_h: int
    nominal_rate_hz: float

    @property
    def finger_count(self) -> int:
        return len(self.fingers)


@dataclass(frozen=True, eq=False)
class ResampledTrace:
    """A trace on a uniform time grid; every finger is an (n, 2) array of x, y."""

    gesture_id: str
    subject_id: str
    session: int
    trial_index: int
    rate_hz: float
    fingers: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "fingers", tuple(_readonly(f) for f in self.fingers))
        if not self.fingers:
            raise InvalidTrace("resampled trace has zero fingers")
        n = self.fingers[0].shape[0]
        for f in self.fingers:
            if f.ndim != 2 or f.shape[1] != 2:
                raise InvalidTrace("resampled finger must be an (n, 2) array")
            if f.shape[0] != n:
                raise InvalidTrace("all fingers must have identical frame count")

    @property
    def finger_count(self) -> int:
        return len(self.fingers)

    @property
    def n_frames(self) -> int:
        return int(self.fingers[0].shape[0])

    @property
    def duration_s(self) -> float:
        return (self.n_frames - 1) / self.rate_hz

    def start_points(self) -> np.ndarray:
        """First sample of every finger, shape (finger_count, 2)."""
        return np.array([f[0] for f in self.fingers])

    def with_fingers(self, fingers: Sequence[np.ndarray]) -> "ResampledTrace":
        return ResampledTrace(
            gesture_id=self.gesture_id,
            subject_id=self.subject_id,
            session=self.session,
            trial_index=self.trial_index,
            rate_hz=self.rate_hz,
            fingers=tuple(fingers),
        )


def _dedup_consecutive(t: np.ndarray, x: np.ndarray, y: np.ndarray):
    """Drop samples whose timestamp equals the previous sample's (keep the first)."""
    if t.shape[0] == 0:
        return t, x, y
    keep = np.concatenate([[True], np.diff(t) != 0.0])
    return t[keep], x[keep], y[keep]


def parse_trace(doc) -> GestureTrace:
    """Parse and validate a trace document.

    Accepts JSON ``bytes``/``str`` or an already-decoded ``dict`` with fields
    ``{"gesture_id", "subject_id", "session", "trial", "screen": {"w", "h"},
    "rate_hz", "fingers": [[{"t", "x", "y"}, ...], ...]}``.

    Consecutive samples sharing a timestamp are collapsed to the first
    occurrence; any remaining non-monotonicity is an error.

    Raises
    ------
    InvalidTrace
        On malformed JSON, missing fields, zero fingers, out-of-bounds
        coordinates, or non-repairable timestamps.
    """
    if isinstance(doc, (bytes, bytearray, str)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise InvalidTrace(f"malformed trace document: {e}") from None
    if not isinstance(doc, dict):
        raise InvalidTrace("trace document must be a JSON object")

    required = ("gesture_id", "subject_id", "session", "trial", "screen", "rate_hz", "fingers")
    missing = [k for k in required if k not in doc]
    if missing:
        raise InvalidTrace(f"missing fields: {', '.join(missing)}")

    gesture_id = doc["gesture_id"]
    subject_id = doc["subject_id"]
    if not isinstance(gesture_id, str) or not gesture_id:
        raise InvalidTrace("gesture_id must be a non-empty string")
    if not isinstance(subject_id, str) or not subject_id:
        raise InvalidTrace("subject_id must be a non-empty string")

    session = doc["session"]
    if session not in (1, 2):
        raise InvalidTrace(f"session must be 1 or 2, got {session!r}")
    trial = doc["trial"]
    if not isinstance(trial, int) or not 1 <= trial <= MAX_TRIAL_INDEX:
        raise InvalidTrace(f"trial must be an integer in 1..{MAX_TRIAL_INDEX}, got {trial!r}")

    screen = doc["screen"]
    if not isinstance(screen, dict) or "w" not in screen or "h" not in screen:
        raise InvalidTrace("screen must be an object with 'w' and 'h'")
    w, h = screen["w"], screen["h"]
    if not (isinstance(w, int) and isinstance(h, int) and w > 0 and h > 0):
        raise InvalidTrace("screen dimensions must be positive integers")

    rate = doc["rate_hz"]
    if not isinstance(rate, (int, float)) or not math.isfinite(rate) or rate <= 0:
        raise InvalidTrace("rate_hz must be a positive number")

    raw_fingers = doc["fingers"]
    if not isinstance(raw_fingers, list) or len(raw_fingers) == 0:
        raise InvalidTrace("trace has zero fingers")

    fingers = []
    for fi, samples in enumerate(raw_fingers):
        if not isinstance(samples, list):
            raise InvalidTrace(f"finger {fi}: samples must be a list")
        if len(samples) < 3:
            raise InvalidTrace(f"finger {fi}: needs at least 3 samples, got {len(samples)}")
        try:
            t = np.array([s["t"] for s in samples], dtype=np.float64)
            x = np.array([s["x"] for s in samples], dtype=np.float64)
            y = np.array([s["y"] for s in samples], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidTrace(f"finger {fi}: malformed sample: {e}") from None
        if not (np.isfinite(t).all() and np.isfinite(x).all() and np.isfinite(y).all()):
            raise InvalidTrace(f"finger {fi}: non-finite sample values")
        t, x, y = _dedup_consecutive(t, x, y)
        if t.shape[0] < 2:
            raise InvalidTrace(f"finger {fi}: fewer than 2 distinct timestamps")
        if np.any(np.diff(t) <= 0):
            raise InvalidTrace(f"finger {fi}: non-monotonic timestamps not repairable by duplicate removal")
        if np.any(x < 0) or np.any(x > w) or np.any(y < 0) or np.any(y > h):
            raise InvalidTrace(f"finger {fi}: coordinates outside the {w}x{h} screen")
        fingers.append(FingerStream(t_ms=t, x_px=x, y_px=y))

    return GestureTrace(
        gesture_id=gesture_id,
        subject_id=subject_id,
        session=session,
        trial_index=trial,
        fingers=tuple(fingers),
        screen_w=w,
        screen_h=h,
        nominal_rate_hz=float(rate),
    )


def trace_to_dict(trace: GestureTrace) -> dict:
    """Encode a GestureTrace as the JSON trace schema (dict form)."""
    return {
        "gesture_id": trace.gesture_id,
        "subject_id": trace.subject_id,
        "session": trace.session,
        "trial": trace.trial_index,
        "screen": {"w": trace.screen_w, "h": trace.screen_h},
        "rate_hz": trace.nominal_rate_hz,
        "fingers": [
            [
                {"t": float(t), "x": float(x), "y": float(y)}
                for t, x, y in zip(f.t_ms, f.x_px, f.y_px)
            ]
            for f in trace.fingers
        ],
    }


def serialize_trace(trace: GestureTrace) -> bytes:
    """Serialize to canonical JSON bytes; ``parse_trace`` round-trips exactly."""
    return (json.dumps(trace_to_dict(trace), sort_keys=True) + "\n").encode()


def load_corpus(path) -> tuple[list[GestureTrace], list[str]]:
    """Load a corpus: a directory of trace JSON files or one file with a JSON array.

    Returns (traces, errors); unparseable documents are reported as error
    strings instead of aborting the load.
    """
    path = Path(path)
    traces: list[GestureTrace] = []
    errors: list[str] = []

    def _parse(doc, label: str):
        try:
            traces.append(parse_trace(doc))
        except InvalidTrace as e:
            errors.append(f"{label}: {e}")

    if path.is_dir():
        files = sorted(path.glob("*.json"))
        if not files:
            errors.append(f"{path}: no .json files found")
        for fp in files:
            try:
                doc = json.loads(fp.read_text())
            except (OSError, json.JSONDecodeError) as e:
                errors.append(f"{fp.name}: {e}")
                continue
            if isinstance(doc, list):
                for i, d in enumerate(doc):
                    _parse(d, f"{fp.name}[{i}]")
            else:
                _parse(doc, fp.name)
    else:
        try:
            doc = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise InvalidTrace(f"{path}: {e}") from None
        if isinstance(doc, list):
            for i, d in enumerate(doc):
                _parse(d, f"{path.name}[{i}]")
        else:
            _parse(doc, path.name)
    return traces, errors


def resample(trace: GestureTrace, target_hz: float = DEFAULT_RATE_HZ) -> ResampledTrace:
    """Resample every finger onto a shared uniform grid by cubic spline interpolation.

    The grid spans the intersection of the fingers' time ranges (latest start
    to earliest end) at ``target_hz``; splines use natural boundary conditions.
    Raw consecutive duplicate timestamps are dropped before fitting.

    Raises
    ------
    InvalidTrace
        If a finger has fewer than 3 distinct-timestamp samples or the common
        grid would hold fewer than 2 frames.
    """
    if target_hz <= 0:
        raise ValueError("target_hz must be positive")
    cleaned = []
    for fi, f in enumerate(trace.fingers):
        t, x, y = _dedup_consecutive(f.t_ms, f.x_px, f.y_px)
        if t.shape[0] < 3:
            raise InvalidTrace(f"finger {fi}: too short to interpolate (needs 3 distinct timestamps)")
        cleaned.append((t / 1000.0, x, y))

    start = max(t[0] for t, _, _ in cleaned)
    end = min(t[-1] for t, _, _ in cleaned)
    n_frames = int(np.floor((end - start) * target_hz)) + 1
    if n_frames < 2:
        raise InvalidTrace("degenerate grid: overlapping duration shorter than 2 frames")
    grid = start + np.arange(n_frames) / target_hz

    fingers = []
    for t, x, y in cleaned:
        sx = CubicSpline(t, x, bc_type="natural")
        sy = CubicSpline(t, y, bc_type="natural")
        fingers.append(np.column_stack([sx(grid), sy(grid)]))

    return ResampledTrace(
        gesture_id=trace.gesture_id,
        subject_id=trace.subject_id,
        session=trace.session,
        trial_index=trace.trial_index,
        rate_hz=float(target_hz),
        fingers=tuple(fingers),
    )


def best_start_permutation(reference_starts: np.ndarray, starts: np.ndarray) -> tuple[int, ...]:
    """Permutation ``p`` minimizing sum_k ||starts[p[k]] - reference_starts[k]||.

    Exact minimum over all permutations (finger counts are hand-scale); ties
    resolve to the lexicographically smallest permutation, i.e. lowest
    original index first.
    """
    k = len(reference_starts)
    if len(starts) != k:
        raise InvalidTrace("finger-count mismatch between traces")
    if k == 1:
        return (0,)
    dist = np.linalg.norm(starts[:, None, :] - reference_starts[None, :, :], axis=2)
    best, best_cost = None, np.inf
    for perm in permutations(range(k)):
        cost = sum(dist[perm[i], i] for i in range(k))
        if cost < best_cost:
            best, best_cost = perm, cost
    return best


def normalize_finger_order(traces: Sequence[ResampledTrace]) -> list[ResampledTrace]:
    """Reorder each trace's fingers so starts match the first trace's finger starts.

    Pure permutation per trace (no sample data modified); idempotent.  All
    traces must share a finger count.
    """
    traces = list(traces)
    if not traces:
        return []
    fc = traces[0].finger_count
    for tr in traces:
        if tr.finger_count != fc:
            raise InvalidTrace(
                f"finger-count mismatch across traces: {tr.finger_count} != {fc}"
            )
    if fc == 1:
        return traces
    ref = traces[0].start_points()
    out = [traces[0]]
    for tr in traces[1:]:
        perm = best_start_permutation(ref, tr.start_points())
        if perm == tuple(range(fc)):
            out.append(tr)
        else:
            out.append(tr.with_fingers([tr.fingers[p] for p in perm]))
    return out
