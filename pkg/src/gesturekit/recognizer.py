"""Template-based multitouch gesture matcher with a closed-form optimal rotation.

Each finger's path is resampled to a fixed number of equidistant points,
centred, and scaled to unit norm, making matching invariant to location and
scale by construction.  Similarity between two normalized strokes is the
inverse angular distance after the optimal rotation (or at zero rotation when
rotation invariance is off).  A candidate is scored finger-by-finger against
each enrolled template, per-finger scores are averaged per template, and the
best template wins.  A candidate with the wrong finger count scores 0
outright.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .traces import ResampledTrace, _readonly, normalize_finger_order

#: Resample points per stroke.
DEFAULT_N_POINTS = 16

#: Score cap where angular distance approaches 0 (identical strokes).
SCORE_CAP = 1e4

MAX_TEMPLATES = 10


@dataclass(frozen=True, eq=False)
class NormalizedStroke:
    """Fixed-length stroke: centroid at the origin, flattened unit norm."""

    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _readonly(self.points))

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])


def normalize_stroke(path, n_points: int = DEFAULT_N_POINTS) -> NormalizedStroke:
    """Resample a path to equidistant points by arc length, centre, and unit-scale.

    Raises
    ------
    ValueError
        If the path has fewer than 2 distinct points (zero path length).
    """
    pts = np.asarray(path, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("path must be an (n, 2) array")
    if pts.shape[0] >= 2:
        keep = np.concatenate([[True], np.any(np.diff(pts, axis=0) != 0.0, axis=1)])
        pts = pts[keep]
    if pts.shape[0] < 2:
        raise ValueError("zero path length: all points identical")
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, cum[-1], n_points)
    resampled = np.column_stack([
        np.interp(targets, cum, pts[:, 0]),
        np.interp(targets, cum, pts[:, 1]),
    ])
    resampled -= resampled.mean(axis=0)
    norm = np.linalg.norm(resampled)
    if norm == 0.0:
        raise ValueError("degenerate stroke: zero norm after centering")
    return NormalizedStroke(points=resampled / norm)


def stroke_similarity(a: NormalizedStroke, b: NormalizedStroke, rotation_invariant: bool = True) -> float:
    """Inverse angular distance between two normalized strokes.

    With rotation invariance the rotation maximizing cosine similarity has the
    closed form theta* = atan2(sum(xa*yb - ya*xb), sum(xa*xb + ya*yb)); the
    similarity is evaluated there.  With invariance off the strokes are
    compared at their raw orientation.  Scores are capped at SCORE_CAP as the
    angular distance approaches zero.
    """
    pa, pb = a.points, b.points
    if pa.shape != pb.shape:
        raise ValueError("strokes must have matching point counts")
    dot = float(np.sum(pa * pb))
    if rotation_invariant:
        cross = float(np.sum(pa[:, 0] * pb[:, 1] - pa[:, 1] * pb[:, 0]))
        s = math.hypot(dot, cross)
    else:
        s = dot
    s = min(1.0, max(-1.0, s))
    if s >= 1.0 - 1e-12:
        return SCORE_CAP
    return min(1.0 / math.acos(s), SCORE_CAP)


@dataclass(frozen=True, eq=False)
class TemplateSet:
    """Enrolled templates for one gesture: per repetition, one stroke per finger."""

    gesture_id: str
    finger_count: int
    templates: tuple[tuple[NormalizedStroke, ...], ...]

    def __post_init__(self):
        if not 1 <= len(self.templates) <= MAX_TEMPLATES:
            raise ValueError(f"template count must be 1..{MAX_TEMPLATES}, got {len(self.templates)}")
        for t in self.templates:
            if len(t) != self.finger_count:
                raise ValueError("every template must have one stroke per finger")

    @property
    def n_templates(self) -> int:
        return len(self.templates)

    def truncated(self, n_templates: int) -> "TemplateSet":
        """The subset using only the first ``n_templates`` repetitions."""
        return TemplateSet(
            gesture_id=self.gesture_id,
            finger_count=self.finger_count,
            templates=self.templates[:n_templates],
        )

    def to_dict(self) -> dict:
        return {
            "gesture_id": self.gesture_id,
            "finger_count": self.finger_count,
            "templates": [
                [[[float(x), float(y)] for x, y in stroke.points] for stroke in template]
                for template in self.templates
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TemplateSet":
        return cls(
            gesture_id=doc["gesture_id"],
            finger_count=doc["finger_count"],
            templates=tuple(
                tuple(NormalizedStroke(points=np.array(stroke)) for stroke in template)
                for template in doc["templates"]
            ),
        )


def build_template_set(
    traces: Sequence[ResampledTrace],
    gesture_id: Optional[str] = None,
    n_points: int = DEFAULT_N_POINTS,
) -> TemplateSet:
    """Build a TemplateSet from enrollment repetitions.

    Finger order is normalized across the repetitions first, so template
    finger k always means the same physical finger.
    """
    traces = list(traces)
    if not traces:
        raise ValueError("need at least one enrollment trace")
    ordered = normalize_finger_order(traces)
    return TemplateSet(
        gesture_id=gesture_id if gesture_id is not None else ordered[0].gesture_id,
        finger_count=ordered[0].finger_count,
        templates=tuple(
            tuple(normalize_stroke(f, n_points) for f in tr.fingers) for tr in ordered
        ),
    )


@dataclass(frozen=True)
class MatchResult:
    """Best-template score; gate_failed marks a finger-count rejection."""

    score: float
    best_template_index: Optional[int]
    per_finger_scores: tuple[float, ...]
    gate_failed: bool


def match(candidate: ResampledTrace, tset: TemplateSet, rotation_invariant: bool = True) -> MatchResult:
    """Score a candidate trace against a template set.

    A finger-count mismatch stops the computation and registers score 0.
    Otherwise fingers pair index-to-index (canonical order is established at
    enrollment), per-finger similarities are averaged per template, and the
    best template's mean is the score.
    """
    if not tset.templates:
        raise ValueError("empty template set")
    if candidate.finger_count != tset.finger_count:
        return MatchResult(score=0.0, best_template_index=None, per_finger_scores=(), gate_failed=True)
    n_points = tset.templates[0][0].n_points
    strokes = [normalize_stroke(f, n_points) for f in candidate.fingers]
    best_score = -1.0
    best_index = 0
    best_fingers: tuple[float, ...] = ()
    for ti, template in enumerate(tset.templates):
        finger_scores = tuple(
            stroke_similarity(s, t, rotation_invariant) for s, t in zip(strokes, template)
        )
        score = float(np.mean(finger_scores))
        if score > best_score:
            best_score, best_index, best_fingers = score, ti, finger_scores
    return MatchResult(
        score=best_score,
        best_template_index=best_index,
        per_finger_scores=best_fingers,
        gate_failed=False,
    )


def accept(score: float, threshold: float) -> bool:
    """Positive authentication iff the score is at or above the threshold."""
    return score >= threshold


@dataclass(frozen=True)
class AuthDecision:
    accepted: bool
    score: float


def authenticate(
    candidate: ResampledTrace,
    tset: TemplateSet,
    threshold: float,
    rotation_invariant: bool = True,
) -> AuthDecision:
    """Match the candidate and compare the score to the threshold."""
    if not threshold > 0.0:
        raise ValueError("threshold must be positive")
    result = match(candidate, tset, rotation_invariant)
    return AuthDecision(accepted=accept(result.score, threshold), score=result.score)
