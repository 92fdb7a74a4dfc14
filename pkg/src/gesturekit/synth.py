"""Deterministic synthetic gesture corpora for experiments and ground-truth tests.

Families model the qualitative gesture classes seen in practice: straight
swipes, circles, zigzags with hard direction reversals, and signature-like
random smooth curves.  Repetitions share a family's ideal path and differ by
per-repetition motor noise, smooth path wobble, and tempo jitter, sampled at
an uneven ~200 Hz to exercise the resampler.

All randomness flows from one PCG64 generator seeded by the noise model, so a
given (family, noise, n_reps) is reproducible cross-platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .traces import GestureTrace, FingerStream, MAX_TRIAL_INDEX

KINDS = ("line", "circle", "zigzag", "signature")
FINGER_MODES = ("rigid", "mirrored", "divergent")

RAW_RATE_HZ = 200.0
RAW_RATE_JITTER = 0.35


@dataclass(frozen=True)
class GestureFamily:
    """Ideal-path family plus how extra fingers relate to the first.

    finger_mode:
      * ``rigid``    -- fingers are offset copies moving as one constellation
                        (shared noise: the hand moves rigidly);
      * ``mirrored`` -- odd fingers mirror the first finger's motion about the
                        vertical axis;
      * ``divergent``-- every finger draws its own independent variant of the
                        family path, with independent noise.
    """

    kind: str
    finger_count: int = 1
    finger_mode: str = "rigid"
    n_turns: int = 8
    scale_px: float = 600.0
    duration_s: float = 3.0
    screen_w: int = 2560
    screen_h: int = 1600
    finger_offsets_px: Optional[tuple[tuple[float, float], ...]] = None
    #: Seed for the random ideal path (signature shapes); None reuses the
    #: noise seed.  Separate knob so one gesture identity can be replayed
    #: under different noise processes (enrollment vs recall vs attacker).
    path_seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}; expected one of {KINDS}")
        if self.finger_mode not in FINGER_MODES:
            raise ValueError(f"unknown finger mode {self.finger_mode!r}")
        if self.finger_count < 1:
            raise ValueError("finger_count must be >= 1")
        if self.n_turns < 1:
            raise ValueError("n_turns must be >= 1")
        if self.scale_px <= 0 or self.duration_s <= 0:
            raise ValueError("scale_px and duration_s must be positive")
        # path box (+/- scale/2) plus finger offsets must fit the screen
        half = self.scale_px / 2.0
        for dx, dy in self._offsets():
            if half + abs(dx) > self.screen_w / 2.0 or half + abs(dy) > self.screen_h / 2.0:
                raise ValueError("family path does not fit the screen")

    def _offsets(self) -> tuple[tuple[float, float], ...]:
        if self.finger_offsets_px is not None:
            if len(self.finger_offsets_px) != self.finger_count:
                raise ValueError("finger_offsets_px must have one entry per finger")
            return self.finger_offsets_px
        return tuple((80.0 * f, 40.0 * f) for f in range(self.finger_count))


@dataclass(frozen=True)
class NoiseModel:
    """Per-repetition variation: white motor noise, smooth wobble, tempo jitter."""

    positional_sigma_px: float = 3.0
    tempo_jitter_fraction: float = 0.0
    path_wobble_px: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.positional_sigma_px < 0:
            raise ValueError("positional_sigma_px must be >= 0")
        if not 0.0 <= self.tempo_jitter_fraction < 0.5:
            raise ValueError("tempo_jitter_fraction must be in [0, 0.5)")
        if self.path_wobble_px < 0:
            raise ValueError("path_wobble_px must be >= 0")


def _arclength_sampler(points: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Constant-speed path over a polyline: maps s in [0,1] to (x, y)."""
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    if cum[-1] <= 0:
        raise ValueError("degenerate family path: zero length")
    u = cum / cum[-1]

    def sample(s: np.ndarray) -> np.ndarray:
        return np.column_stack([np.interp(s, u, points[:, 0]), np.interp(s, u, points[:, 1])])

    return sample


def _line_points(variant: int) -> np.ndarray:
    angle = np.deg2rad(35.0 + 75.0 * variant)
    d = np.array([np.cos(angle), np.sin(angle)])
    return np.vstack([-0.5 * d, 0.5 * d])


def _circle_points(variant: int) -> np.ndarray:
    direction = 1.0 if variant % 2 == 0 else -1.0
    theta = direction * np.linspace(0.0, 2.0 * np.pi, 2048) - np.pi / 2 + variant * np.pi / 2
    return np.column_stack([0.45 * np.cos(theta), 0.45 * np.sin(theta)])


def _zigzag_points(n_turns: int, variant: int) -> np.ndarray:
    # divergent fingers get different turn counts and alternating orientation,
    # so their sawtooth structure decorrelates instead of duplicating
    turns = n_turns + 3 * variant
    xs = np.linspace(-0.5, 0.5, turns + 2)
    ys = np.where(np.arange(turns + 2) % 2 == 0, -0.4, 0.4)
    if variant % 2 == 1:
        xs, ys = ys, xs
    return np.column_stack([xs, ys])


def _signature_points(rng: np.random.Generator) -> np.ndarray:
    n_ctrl = int(rng.integers(9, 15))
    heading = rng.uniform(0.0, 2.0 * np.pi)
    pos = np.zeros(2)
    ctrl = [pos.copy()]
    turn_sign = 1.0
    for _ in range(n_ctrl - 1):
        heading += turn_sign * rng.uniform(0.9, 2.4)
        turn_sign = -turn_sign
        step = rng.uniform(0.08, 0.16)
        pos = pos + step * np.array([np.cos(heading), np.sin(heading)])
        ctrl.append(pos.copy())
    ctrl = np.array(ctrl)
    chord = np.linalg.norm(np.diff(ctrl, axis=0), axis=1)
    u = np.concatenate([[0.0], np.cumsum(chord)])
    spline_x = CubicSpline(u, ctrl[:, 0], bc_type="natural")
    spline_y = CubicSpline(u, ctrl[:, 1], bc_type="natural")
    dense_u = np.linspace(0.0, u[-1], 2048)
    pts = np.column_stack([spline_x(dense_u), spline_y(dense_u)])
    # normalize to the family's unit box
    pts -= (pts.min(axis=0) + pts.max(axis=0)) / 2.0
    extent = max(pts.max(axis=0).max(), -pts.min(axis=0).min())
    return pts * (0.45 / extent)


def _finger_paths(family: GestureFamily, rng: np.random.Generator):
    """One constant-speed sampler per finger (divergent fingers get variants)."""
    def base(variant: int):
        if family.kind == "line":
            return _arclength_sampler(_line_points(variant))
        if family.kind == "circle":
            return _arclength_sampler(_circle_points(variant))
        if family.kind == "zigzag":
            return _arclength_sampler(_zigzag_points(family.n_turns, variant))
        return _arclength_sampler(_signature_points(rng))

    if family.finger_mode == "divergent":
        return [base(f) for f in range(family.finger_count)]
    return [base(0)]


def _wobble(rng: np.random.Generator, s: np.ndarray, amplitude: float) -> np.ndarray:
    """Smooth low-frequency 2-D offset curve with RMS of roughly ``amplitude``."""
    out = np.zeros((s.shape[0], 2))
    if amplitude <= 0:
        # keep the RNG stream identical whether or not wobble is enabled
        rng.normal(size=6)
        rng.uniform(size=6)
        return out
    for c in range(2):
        coeff = rng.normal(size=3)
        phase = rng.uniform(0.0, 2.0 * np.pi, size=3)
        wave = sum(
            (coeff[k] / (k + 1)) * np.sin((k + 1) * np.pi * s + phase[k]) for k in range(3)
        )
        out[:, c] = amplitude * wave / 1.2
    return out


def generate(
    family: GestureFamily,
    noise: NoiseModel,
    n_reps: int,
    gesture_id: Optional[str] = None,
    subject_id: str = "synth",
) -> list[GestureTrace]:
    """Generate ``n_reps`` repetitions of one gesture.

    Parameters
    ----------
    family : GestureFamily
        Ideal path geometry and multifinger layout.
    noise : NoiseModel
        Per-repetition variation; the seed fixes everything, including the
        random signature shape.
    n_reps : int
        Repetition count; trial indices run 1..n_reps with session 2 starting
        at trial 13, matching the corpus grouping convention.

    Returns
    -------
    list of GestureTrace, all sharing the family's ideal path.
    """
    if not 1 <= n_reps <= MAX_TRIAL_INDEX:
        raise ValueError(f"n_reps must be in 1..{MAX_TRIAL_INDEX}")
    # separate substreams so a family's ideal path is identical across finger
    # modes and noise settings at the same seed
    path_seed = family.path_seed if family.path_seed is not None else noise.seed
    path_rng = np.random.default_rng([path_seed, 0])
    rng = np.random.default_rng([noise.seed, 1])
    paths = _finger_paths(family, path_rng)
    offsets = family._offsets()
    center = np.array([family.screen_w / 2.0, family.screen_h / 2.0])
    if gesture_id is None:
        gesture_id = f"{family.kind}-{family.finger_count}f-seed{noise.seed}"

    traces = []
    for rep in range(1, n_reps + 1):
        eps = noise.tempo_jitter_fraction
        duration = family.duration_s * (1.0 + eps * rng.uniform(-0.5, 0.5))
        # monotone random speed profile: v > 0 everywhere, random shape per rep
        amp = eps * rng.uniform(0.0, 1.0, size=3) / 3.0
        phase = rng.uniform(0.0, 2.0 * np.pi, size=3)

        def _warp(tau):
            s = tau.copy()
            norm = 1.0
            for k in range(3):
                w = 2.0 * np.pi * (k + 1)
                s = s + amp[k] * (np.sin(w * tau + phase[k]) - np.sin(phase[k])) / w
                norm = norm + amp[k] * (np.sin(w + phase[k]) - np.sin(phase[k])) / w
            return s / norm

        # uneven sampling clock around the nominal device rate
        mean_dt = 1.0 / RAW_RATE_HZ
        n_guess = int(np.ceil(duration / (mean_dt * (1.0 - RAW_RATE_JITTER)))) + 2
        dts = mean_dt * (1.0 + RAW_RATE_JITTER * rng.uniform(-1.0, 1.0, size=n_guess))
        t = np.concatenate([[0.0], np.cumsum(dts)])
        t = t[t <= duration]
        tau = t / duration
        s = _warp(tau)

        fingers = []
        shared_noise = None
        shared_wobble = None
        for f in range(family.finger_count):
            path = paths[f] if family.finger_mode == "divergent" else paths[0]
            pos = path(s) * family.scale_px

            if family.finger_mode == "divergent":
                wob = _wobble(rng, s, noise.path_wobble_px)
                pn = rng.normal(0.0, 1.0, size=pos.shape) * noise.positional_sigma_px
            else:
                if shared_noise is None:
                    shared_wobble = _wobble(rng, s, noise.path_wobble_px)
                    shared_noise = rng.normal(0.0, 1.0, size=pos.shape) * noise.positional_sigma_px
                wob, pn = shared_wobble, shared_noise

            motion = pos + wob + pn
            if family.finger_mode == "mirrored" and f % 2 == 1:
                motion = motion * np.array([-1.0, 1.0])
            xy = center + motion + np.array(offsets[f])
            xy[:, 0] = np.clip(xy[:, 0], 0.0, family.screen_w)
            xy[:, 1] = np.clip(xy[:, 1], 0.0, family.screen_h)
            fingers.append(FingerStream(t_ms=t * 1000.0, x_px=xy[:, 0], y_px=xy[:, 1]))

        traces.append(
            GestureTrace(
                gesture_id=gesture_id,
                subject_id=subject_id,
                session=1 if rep <= 12 else 2,
                trial_index=rep,
                fingers=tuple(fingers),
                screen_w=family.screen_w,
                screen_h=family.screen_h,
                nominal_rate_hz=RAW_RATE_HZ,
            )
        )
    return traces
