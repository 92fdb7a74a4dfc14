"""HTTP service: gesture enrollment, authentication, and pairwise analysis.

Demo-grade surface for the capture UI and scripted clients: no accounts, no
TLS, no rate limiting.  Template sets persist as one JSON file per gesture
under the configured data directory; writes are atomic, and a restart
reconstructs the store bit-exactly from disk.
"""

from __future__ import annotations

import json
import os
import threading
import urllib.parse
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .config import AppConfig
from .infocap import INCOMPARABLE, MiConfig, MIResult, group_mean_mi, mutual_information
from .recognizer import MAX_TEMPLATES, TemplateSet, authenticate, build_template_set
from .traces import (
    InvalidTrace,
    ResampledTrace,
    best_start_permutation,
    normalize_finger_order,
    parse_trace,
    resample,
)

#: Heuristic security bands over the enrollment-set mean information (bits).
WEAK_BELOW_BITS = 15.0
STRONG_ABOVE_BITS = 30.0

DEFAULT_REQUIRED_REPS = 10


def security_band(mean_bits: float) -> str:
    if mean_bits < WEAK_BELOW_BITS:
        return "weak"
    if mean_bits >= STRONG_ABOVE_BITS:
        return "strong"
    return "moderate"


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class StoredGesture:
    template_set: TemplateSet
    reference_starts: list[list[float]]
    enrollment: dict

    def to_dict(self) -> dict:
        return {
            "template_set": self.template_set.to_dict(),
            "reference_starts": self.reference_starts,
            "enrollment": self.enrollment,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "StoredGesture":
        return cls(
            template_set=TemplateSet.from_dict(doc["template_set"]),
            reference_starts=doc["reference_starts"],
            enrollment=doc["enrollment"],
        )


class TemplateStore:
    """Single-writer / multi-reader persistence of enrolled gestures."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._cache: dict[str, StoredGesture] = {}
        for fp in sorted(self.data_dir.glob("*.json")):
            record = StoredGesture.from_dict(json.loads(fp.read_text()))
            self._cache[record.template_set.gesture_id] = record

    def _path(self, gesture_id: str) -> Path:
        return self.data_dir / (urllib.parse.quote(gesture_id, safe="") + ".json")

    def exists(self, gesture_id: str) -> bool:
        with self._lock:
            return gesture_id in self._cache

    def get(self, gesture_id: str) -> Optional[StoredGesture]:
        with self._lock:
            return self._cache.get(gesture_id)

    def save(self, record: StoredGesture) -> None:
        gid = record.template_set.gesture_id
        payload = (json.dumps(record.to_dict(), sort_keys=True) + "\n").encode()
        with self._lock:
            tmp = self._path(gid).with_suffix(".tmp")
            tmp.write_bytes(payload)
            os.replace(tmp, self._path(gid))
            self._cache[gid] = record


@dataclass
class EnrollmentSession:
    session_id: str
    gesture_id: str
    required_reps: int
    collected: list[ResampledTrace] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return len(self.collected) >= self.required_reps


def _parse_and_resample(doc) -> ResampledTrace:
    try:
        return resample(parse_trace(doc))
    except InvalidTrace as e:
        raise ApiError(422, "invalid_trace", str(e)) from None


def create_app(config: Optional[AppConfig] = None) -> FastAPI:
    config = config or AppConfig()
    mi_config = MiConfig(mse_cutoff_fraction=config.mse_cutoff_fraction)
    store = TemplateStore(config.data_dir)
    sessions: dict[str, EnrollmentSession] = {}
    sessions_lock = threading.RLock()

    app = FastAPI(title="gesturekit service")

    @app.exception_handler(ApiError)
    async def _api_error(_: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"error": exc.code, "message": exc.message})

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.post("/enroll/start")
    async def enroll_start(body: dict, overwrite: bool = False):
        gesture_id = body.get("gesture_id")
        if not isinstance(gesture_id, str) or not gesture_id:
            raise ApiError(422, "invalid_request", "gesture_id must be a non-empty string")
        required = body.get("required_reps", DEFAULT_REQUIRED_REPS)
        if not isinstance(required, int) or not 1 <= required <= MAX_TEMPLATES:
            raise ApiError(422, "invalid_request", f"required_reps must be an integer in 1..{MAX_TEMPLATES}")
        if store.exists(gesture_id) and not overwrite:
            raise ApiError(409, "conflict", f"gesture {gesture_id!r} already enrolled (use ?overwrite=true)")
        session = EnrollmentSession(session_id=uuid.uuid4().hex, gesture_id=gesture_id, required_reps=required)
        with sessions_lock:
            sessions[session.session_id] = session
        return {"session_id": session.session_id, "required_reps": required}

    @app.post("/enroll/{session_id}/trace")
    async def enroll_trace(session_id: str, body: dict):
        with sessions_lock:
            session = sessions.get(session_id)
        if session is None:
            raise ApiError(404, "unknown_session", f"no enrollment session {session_id!r}")
        if session.complete:
            raise ApiError(409, "conflict", "enrollment session already complete")
        candidate = _parse_and_resample(body)
        warnings: list[str] = []
        if session.collected:
            first = session.collected[0]
            if candidate.finger_count != first.finger_count:
                raise ApiError(
                    422,
                    "finger_count_mismatch",
                    f"trace uses {candidate.finger_count} fingers but this enrollment "
                    f"uses {first.finger_count}; use the same fingers for every repetition",
                )
            if candidate.finger_count > 1:
                perm = best_start_permutation(first.start_points(), candidate.start_points())
                if perm != tuple(range(candidate.finger_count)):
                    warnings.append("finger order corrected to match earlier repetitions")
        session.collected.append(candidate)
        session.warnings.extend(warnings)
        remaining = session.required_reps - len(session.collected)
        response = {"accepted": True, "remaining": remaining, "warnings": warnings}
        if remaining > 0:
            return response

        ordered = normalize_finger_order(session.collected)
        template_set = build_template_set(ordered, gesture_id=session.gesture_id)
        enrollment: dict = {"n_traces": len(ordered), "mean_bits": None, "security_band": None}
        if len(ordered) >= 2:
            gm = group_mean_mi(ordered, mi_config)
            enrollment["mean_bits"] = gm.mean_bits
            enrollment["security_band"] = security_band(gm.mean_bits)
        else:
            response["warnings"] = warnings + ["single repetition: no security estimate, degraded accuracy"]
        store.save(
            StoredGesture(
                template_set=template_set,
                reference_starts=[[float(x), float(y)] for x, y in ordered[0].start_points()],
                enrollment=enrollment,
            )
        )
        with sessions_lock:
            sessions.pop(session_id, None)
        response.update(
            complete=True,
            mean_bits=enrollment["mean_bits"],
            security_band=enrollment["security_band"],
        )
        return response

    @app.post("/auth")
    async def auth(body: dict):
        gesture_id = body.get("gesture_id")
        if not isinstance(gesture_id, str) or not gesture_id:
            raise ApiError(422, "invalid_request", "gesture_id must be a non-empty string")
        record = store.get(gesture_id)
        if record is None:
            raise ApiError(404, "unknown_gesture", f"gesture {gesture_id!r} is not enrolled")
        if "trace" not in body:
            raise ApiError(422, "invalid_request", "missing trace")
        threshold = body.get("threshold", config.default_threshold)
        if not isinstance(threshold, (int, float)) or threshold <= 0:
            raise ApiError(422, "invalid_request", "threshold must be a positive number")
        candidate = _parse_and_resample(body["trace"])
        if candidate.finger_count == record.template_set.finger_count and candidate.finger_count > 1:
            ref = np.array(record.reference_starts)
            perm = best_start_permutation(ref, candidate.start_points())
            if perm != tuple(range(candidate.finger_count)):
                candidate = candidate.with_fingers([candidate.fingers[p] for p in perm])
        decision = authenticate(
            candidate,
            record.template_set,
            threshold=float(threshold),
            rotation_invariant=config.rotation_invariant,
        )
        return {"accepted": decision.accepted, "score": decision.score}

    @app.post("/analyze/mi")
    async def analyze_mi(body: dict):
        docs = body.get("traces")
        if not isinstance(docs, list) or len(docs) != 2:
            raise ApiError(422, "invalid_request", "body must contain exactly two traces")
        a = _parse_and_resample(docs[0])
        b = _parse_and_resample(docs[1])
        try:
            result = mutual_information((a, b), mi_config)
        except ValueError as e:
            raise ApiError(422, "invalid_trace", str(e)) from None
        if result is INCOMPARABLE or not isinstance(result, MIResult):
            raise ApiError(422, "incomparable", "traces have different finger counts")
        return result.to_dict()

    return app
