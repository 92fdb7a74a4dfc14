"""Shared builders: trace documents, cached synthetic families, recall corpora."""

import dataclasses
import functools
import json
import math

import numpy as np
import pytest

import gesturekit as gk
from gesturekit.traces import ResampledTrace


def flat_trace(frames, trial=1, fingers=1, gesture_id="g"):
    """ResampledTrace from a raw (n, 2*fingers) array at 60 Hz."""
    cols = np.asarray(frames, dtype=float)
    parts = tuple(cols[:, 2 * i : 2 * i + 2] for i in range(fingers))
    return ResampledTrace(gesture_id, "s", 1, trial, 60.0, parts)


def noisy_line_pair(rho, n, seed, sigma=1.0, span=3000.0):
    """Two straight-line traces whose frame noise is bivariate with corr rho.

    The steep, structured ramp keeps the warp on the diagonal, so the paired
    AR(2) residuals inherit exactly the constructed noise correlation.
    """
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, n)
    base = np.column_stack([span * 0.8 * t, span * 0.5 * t])
    na = rng.normal(0.0, sigma, (n, 2))
    nb = rho * na + math.sqrt(1.0 - rho * rho) * rng.normal(0.0, sigma, (n, 2))
    return flat_trace(base + na, trial=1), flat_trace(base + nb, trial=2)


def trace_doc(
    fingers,
    gesture_id="g1",
    subject_id="s1",
    session=1,
    trial=1,
    w=1000,
    h=800,
    rate_hz=200.0,
):
    """Trace document dict; fingers = list of [(t, x, y), ...]."""
    return {
        "gesture_id": gesture_id,
        "subject_id": subject_id,
        "session": session,
        "trial": trial,
        "screen": {"w": w, "h": h},
        "rate_hz": rate_hz,
        "fingers": [[{"t": t, "x": x, "y": y} for t, x, y in f] for f in fingers],
    }


def simple_doc(n=50, dt=5.0, **kw):
    """Valid single-finger document: a gentle diagonal sweep."""
    fingers = [[(i * dt, 100.0 + 5.0 * i, 100.0 + 3.0 * i) for i in range(n)]]
    return trace_doc(fingers, **kw)


@functools.lru_cache(maxsize=256)
def family_traces(
    kind,
    seed=0,
    reps=6,
    sigma=1.5,
    tempo=0.1,
    wobble=0.0,
    finger_count=1,
    finger_mode="rigid",
    scale=1200.0,
    duration=3.0,
    n_turns=8,
    path_seed=None,
    gesture_id=None,
):
    """Cached resampled repetitions of one synthetic family."""
    fam = gk.GestureFamily(
        kind=kind,
        finger_count=finger_count,
        finger_mode=finger_mode,
        n_turns=n_turns,
        scale_px=scale,
        duration_s=duration,
        path_seed=path_seed,
    )
    noise = gk.NoiseModel(
        positional_sigma_px=sigma,
        tempo_jitter_fraction=tempo,
        path_wobble_px=wobble,
        seed=seed,
    )
    raw = gk.generate(fam, noise, n_reps=reps, gesture_id=gesture_id)
    return tuple(gk.resample(t) for t in raw)


def renumber(trace, trial, session):
    """Copy of a resampled trace placed at another trial index."""
    return dataclasses.replace(trace, trial_index=trial, session=session)


def recall_corpus(
    n_gestures=10,
    n_two_finger=2,
    enroll_sigma=10.0,
    enroll_wobble=40.0,
    recall_sigma=12.5,
    recall_wobble=52.0,
    base_seed=100,
    n_recall=5,
):
    """Enrollment (trials 1-10) plus delayed-recall (13-17) corpus per gesture.

    Recall repetitions replay the same ideal path under a sloppier noise
    process, mimicking imperfect recall.
    """
    by_gesture = {}
    for g in range(n_gestures):
        fc = 2 if g < n_two_finger else 1
        fam = gk.GestureFamily(
            kind="signature", finger_count=fc, scale_px=1000.0, duration_s=2.5,
            path_seed=base_seed + g,
        )
        gid = f"sig{g:02d}"
        enroll = gk.generate(
            fam,
            gk.NoiseModel(enroll_sigma, 0.12, enroll_wobble, seed=base_seed + g),
            n_reps=10,
            gesture_id=gid,
        )
        recall = gk.generate(
            fam,
            gk.NoiseModel(recall_sigma, 0.15, recall_wobble, seed=base_seed + g + 5000),
            n_reps=n_recall,
            gesture_id=gid,
        )
        resampled = [gk.resample(t) for t in enroll]
        resampled += [renumber(gk.resample(t), 13 + i, 2) for i, t in enumerate(recall)]
        by_gesture[gid] = resampled
    return by_gesture


@pytest.fixture(scope="session", autouse=True)
def warm_numba():
    """Compile (or load the cached) warp kernels before any timed test."""
    a = np.column_stack([np.linspace(0, 1, 16), np.linspace(1, 0, 16)])
    gk.align(a, a + 0.01)


@pytest.fixture()
def tmp_corpus_dir(tmp_path):
    """Directory with a small valid synthetic corpus on disk."""
    fam = gk.GestureFamily(kind="zigzag", scale_px=900.0)
    traces = gk.generate(fam, gk.NoiseModel(2.0, 0.1, seed=5), n_reps=4, gesture_id="zz")
    d = tmp_path / "corpus"
    d.mkdir()
    for tr in traces:
        (d / f"zz_t{tr.trial_index:02d}.json").write_bytes(gk.serialize_trace(tr))
    return d
