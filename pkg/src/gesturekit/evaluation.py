"""Corpus-level analysis: repetition-group statistics, ROC/EER sweeps, attack scoring.

Trials 1-10 are the creation repetitions (Generate), 11-12 the same-session
recall (Recall1), and 13-17 the delayed recall (Recall2).  Authentication
performance is measured by sweeping the accept threshold over the observed
scores and reading off the equal error rate where the false positive rate
crosses the false negative rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .infocap import GroupMi, MiConfig, DEFAULT_CONFIG, MIResult, cross_group_mi, group_mean_mi
from .recognizer import TemplateSet, build_template_set, match
from .traces import ResampledTrace

#: Repetition groups by trial index (inclusive ranges).
REPETITION_GROUPS: dict[str, tuple[int, int]] = {
    "Generate": (1, 10),
    "Recall1": (11, 12),
    "Recall2": (13, 17),
}

#: Trials 6-10: the stable second half of the creation phase.
STABLE_GENERATE_RANGE = (6, 10)


def group_of(trial_index: int) -> str:
    for label, (lo, hi) in REPETITION_GROUPS.items():
        if lo <= trial_index <= hi:
            return label
    raise ValueError(f"trial index {trial_index} outside 1..17")


def split_groups(traces: Sequence[ResampledTrace]) -> dict[str, list[ResampledTrace]]:
    """Partition traces into repetition groups, each sorted by trial index."""
    groups: dict[str, list[ResampledTrace]] = {label: [] for label in REPETITION_GROUPS}
    for tr in traces:
        groups[group_of(tr.trial_index)].append(tr)
    for label in groups:
        groups[label].sort(key=lambda tr: tr.trial_index)
    return groups


@dataclass(frozen=True)
class TrialLabel:
    """One authentication attempt: the claimed identity vs the true one."""

    claimed_gesture_id: str
    true_gesture_id: str
    trace: ResampledTrace

    @property
    def genuine(self) -> bool:
        return self.claimed_gesture_id == self.true_gesture_id


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    tpr: float
    fpr: float


@dataclass(frozen=True)
class RocReport:
    """Threshold sweep over observed scores, with the interpolated equal error rate."""

    points: tuple[RocPoint, ...]
    eer: float
    eer_threshold: float
    n_genuine: int
    n_impostor: int
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "points": [{"threshold": p.threshold, "tpr": p.tpr, "fpr": p.fpr} for p in self.points],
            "eer": self.eer,
            "eer_threshold": self.eer_threshold,
            "n_genuine": self.n_genuine,
            "n_impostor": self.n_impostor,
            "degenerate": self.degenerate,
        }


def _interpolate_eer(points: Sequence[RocPoint]) -> tuple[float, float]:
    """EER where fpr crosses fnr = 1 - tpr, linear between adjacent sweep points."""
    diffs = [p.fpr - (1.0 - p.tpr) for p in points]
    for i, d in enumerate(diffs):
        if d == 0.0:
            return points[i].fpr, points[i].threshold
    for i in range(len(points) - 1):
        d0, d1 = diffs[i], diffs[i + 1]
        if d0 > 0.0 >= d1:
            u = d0 / (d0 - d1)
            fpr = points[i].fpr + u * (points[i + 1].fpr - points[i].fpr)
            thr = points[i].threshold + u * (points[i + 1].threshold - points[i].threshold)
            return fpr, thr
    # no crossing (single-point or degenerate sweep): closest point wins
    best = int(np.argmin(np.abs(diffs)))
    return (points[best].fpr + (1.0 - points[best].tpr)) / 2.0, points[best].threshold


def roc_sweep(
    corpus: Sequence[TrialLabel],
    template_sets: Mapping[str, TemplateSet],
    n_templates: Optional[int] = None,
    rotation_invariant: bool = True,
) -> RocReport:
    """Score every trial against its claimed gesture and sweep the threshold.

    Thresholds run over the sorted distinct observed scores plus accept-all
    (0) and reject-all boundaries, giving the exact step ROC.  A trial is
    accepted at threshold t iff score >= t.

    Parameters
    ----------
    corpus : sequence of TrialLabel
        Needs at least one genuine and one impostor trial.
    template_sets : mapping gesture_id -> TemplateSet
    n_templates : int, optional
        Use only the first n templates of every set.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("empty corpus")
    sets = dict(template_sets)
    if n_templates is not None:
        sets = {gid: ts.truncated(n_templates) for gid, ts in sets.items()}

    scores = np.empty(len(corpus))
    genuine = np.empty(len(corpus), dtype=bool)
    for i, trial in enumerate(corpus):
        if trial.claimed_gesture_id not in sets:
            raise ValueError(f"no template set for claimed gesture {trial.claimed_gesture_id!r}")
        scores[i] = match(trial.trace, sets[trial.claimed_gesture_id], rotation_invariant).score
        genuine[i] = trial.genuine
    return roc_from_scores(scores, genuine)


def roc_from_scores(scores, genuine) -> RocReport:
    """Exact step ROC and interpolated EER from per-trial scores and labels."""
    scores = np.asarray(scores, dtype=float)
    genuine = np.asarray(genuine, dtype=bool)
    n_genuine = int(genuine.sum())
    n_impostor = int((~genuine).sum())
    if n_genuine == 0 or n_impostor == 0:
        raise ValueError("corpus needs at least one genuine and one impostor trial")

    uniq = np.unique(scores)
    thresholds = np.unique(np.concatenate([[0.0], uniq, [uniq[-1] + 1.0]]))
    points = []
    for t in thresholds:
        accepted = scores >= t
        tp = int((accepted & genuine).sum())
        fp = int((accepted & ~genuine).sum())
        points.append(RocPoint(threshold=float(t), tpr=tp / n_genuine, fpr=fp / n_impostor))
    eer, eer_threshold = _interpolate_eer(points)
    return RocReport(
        points=tuple(points),
        eer=float(eer),
        eer_threshold=float(eer_threshold),
        n_genuine=n_genuine,
        n_impostor=n_impostor,
        degenerate=uniq.size < 2,
    )


def build_template_sets(
    traces_by_gesture: Mapping[str, Sequence[ResampledTrace]],
    n_templates: int = 10,
) -> dict[str, TemplateSet]:
    """Template sets from the first ``n_templates`` creation repetitions per gesture."""
    sets = {}
    for gid in sorted(traces_by_gesture):
        generate_group = split_groups(traces_by_gesture[gid])["Generate"]
        if len(generate_group) < n_templates:
            raise ValueError(
                f"gesture {gid!r}: needs {n_templates} creation repetitions, has {len(generate_group)}"
            )
        sets[gid] = build_template_set(generate_group[:n_templates], gesture_id=gid)
    return sets


def build_trial_corpus(
    traces_by_gesture: Mapping[str, Sequence[ResampledTrace]],
    group: str = "Recall2",
) -> list[TrialLabel]:
    """Authentication trials from one recall group.

    Every recall trace is claimed against its own gesture (genuine) and
    against every other gesture (impostor attempts).
    """
    gesture_ids = sorted(traces_by_gesture)
    trials = []
    for true_gid in gesture_ids:
        for tr in split_groups(traces_by_gesture[true_gid])[group]:
            for claimed_gid in gesture_ids:
                trials.append(TrialLabel(claimed_gesture_id=claimed_gid, true_gesture_id=true_gid, trace=tr))
    return trials


def template_count_study(
    traces_by_gesture: Mapping[str, Sequence[ResampledTrace]],
    counts: Sequence[int] = (2, 4, 6, 8, 10),
    group: str = "Recall2",
    rotation_invariant: bool = True,
) -> list[dict]:
    """Equal error rate as a function of enrolled template count.

    Returns one ``{"n_templates", "eer", "report"}`` entry per count.
    """
    counts = list(counts)
    sets = build_template_sets(traces_by_gesture, n_templates=max(counts))
    corpus = build_trial_corpus(traces_by_gesture, group=group)
    out = []
    for c in counts:
        report = roc_sweep(corpus, sets, n_templates=c, rotation_invariant=rotation_invariant)
        out.append({"n_templates": c, "eer": report.eer, "report": report})
    return out


@dataclass(frozen=True)
class GestureReport:
    """Descriptive statistics for all repetitions of one gesture."""

    gesture_id: str
    finger_count: int
    mean_mi_generate: Optional[float]
    mean_mi_generate_stable: Optional[float]
    mean_mi_recall1: Optional[float]
    mean_mi_recall2: Optional[float]
    cross_mi: Optional[float]
    memorability_ratio: Optional[float]
    mean_duration_s: dict[str, Optional[float]] = field(default_factory=dict)
    mi_by_trial: dict[int, Optional[float]] = field(default_factory=dict)
    duration_by_trial: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "gesture_id": self.gesture_id,
            "finger_count": self.finger_count,
            "mean_mi_generate": self.mean_mi_generate,
            "mean_mi_generate_stable": self.mean_mi_generate_stable,
            "mean_mi_recall1": self.mean_mi_recall1,
            "mean_mi_recall2": self.mean_mi_recall2,
            "cross_mi": self.cross_mi,
            "memorability_ratio": self.memorability_ratio,
            "mean_duration_s": self.mean_duration_s,
            "mi_by_trial": {str(k): v for k, v in sorted(self.mi_by_trial.items())},
            "duration_by_trial": {str(k): v for k, v in sorted(self.duration_by_trial.items())},
        }


def _group_mi(traces: list[ResampledTrace], config: MiConfig) -> tuple[Optional[GroupMi], Optional[float]]:
    if len(traces) < 2:
        return None, None
    gm = group_mean_mi(traces, config)
    return gm, gm.mean_bits


def _per_trial_means(traces: list[ResampledTrace], gm: Optional[GroupMi]) -> dict[int, Optional[float]]:
    """Mean bits of the within-group pairs touching each repetition."""
    out: dict[int, Optional[float]] = {tr.trial_index: None for tr in traces}
    if gm is None:
        return out
    sums = {i: [] for i in range(len(traces))}
    for p in gm.pair_results:
        if isinstance(p.result, MIResult):
            sums[p.index_a].append(p.result.total_bits)
            sums[p.index_b].append(p.result.total_bits)
    for i, tr in enumerate(traces):
        if sums[i]:
            out[tr.trial_index] = float(np.mean(sums[i]))
    return out


def analyze_gesture(
    traces: Sequence[ResampledTrace],
    config: MiConfig = DEFAULT_CONFIG,
) -> GestureReport:
    """Per-gesture report: group means, cross-group information, memorability.

    Requires at least 2 creation (Generate) repetitions; recall fields are
    None when the corresponding repetitions are absent.
    """
    traces = list(traces)
    if not traces:
        raise ValueError("no traces")
    groups = split_groups(traces)
    generate_group = groups["Generate"]
    if len(generate_group) < 2:
        raise ValueError("missing Generate group: need at least 2 creation repetitions")

    gm_generate, mi_generate = _group_mi(generate_group, config)
    lo, hi = STABLE_GENERATE_RANGE
    stable = [tr for tr in generate_group if lo <= tr.trial_index <= hi]
    _, mi_stable = _group_mi(stable, config)
    gm_recall1, mi_recall1 = _group_mi(groups["Recall1"], config)
    gm_recall2, mi_recall2 = _group_mi(groups["Recall2"], config)

    cross = None
    ratio = None
    if groups["Recall2"]:
        cross_gm = cross_group_mi(generate_group, groups["Recall2"], config)
        cross = cross_gm.mean_bits
        if mi_generate and mi_generate > 0:
            ratio = cross / mi_generate

    durations = {
        label: (float(np.mean([tr.duration_s for tr in grp])) if grp else None)
        for label, grp in groups.items()
    }
    mi_by_trial: dict[int, Optional[float]] = {}
    for grp, gm in ((generate_group, gm_generate), (groups["Recall1"], gm_recall1), (groups["Recall2"], gm_recall2)):
        mi_by_trial.update(_per_trial_means(grp, gm))

    return GestureReport(
        gesture_id=traces[0].gesture_id,
        finger_count=generate_group[0].finger_count,
        mean_mi_generate=mi_generate,
        mean_mi_generate_stable=mi_stable,
        mean_mi_recall1=mi_recall1,
        mean_mi_recall2=mi_recall2,
        cross_mi=cross,
        memorability_ratio=ratio,
        mean_duration_s=durations,
        mi_by_trial=mi_by_trial,
        duration_by_trial={tr.trial_index: tr.duration_s for tr in traces},
    )


@dataclass(frozen=True)
class AttackRow:
    participant: str
    best_score: float
    n_attempts: int


def attack_report(
    target_templates: TemplateSet,
    target_recalls: Sequence[ResampledTrace],
    attacker_trials: Mapping[str, Sequence[ResampledTrace]],
    rotation_invariant: bool = True,
) -> list[AttackRow]:
    """Best recognizer score per participant for a replication attack trial.

    The target's own recall attempts come first, then each attacker's best
    attempt.  Wrong-finger-count attempts score 0 via the recognizer gate.
    """
    def best(trials: Sequence[ResampledTrace]) -> float:
        if not trials:
            return 0.0
        return max(match(tr, target_templates, rotation_invariant).score for tr in trials)

    rows = [AttackRow(participant="target", best_score=best(target_recalls), n_attempts=len(target_recalls))]
    for name in sorted(attacker_trials):
        trials = attacker_trials[name]
        rows.append(AttackRow(participant=name, best_score=best(trials), n_attempts=len(trials)))
    return rows
