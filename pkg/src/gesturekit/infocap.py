"""Information content of repeated gestures: bias-corrected Gaussian mutual information.

Two repetitions of a gesture share whatever structure the user can reproduce;
everything else is motor noise.  The estimate isolates that shared structure:

1. per-trace standardization (centre columns, scale to unit RMS), so results
   are exactly invariant to translation and uniform scaling of either trace;
2. a joint PCA basis fit on both traces together, keeping the fewest
   components whose reprojection error is acceptably low -- redundant fingers
   collapse here;
3. dynamic-time-warping alignment of the projected trajectories, correcting
   tempo differences; warp steps that reuse a frame are masked out;
4. per component, second-order autoregressive residuals on each trace --
   the "surprise" beyond constant-velocity continuation;
5. residual pairs over the alignment feed a bivariate-Gaussian estimate,
   bits = -(n/2) * log2(1 - r^2) - log2(e)/2, the second term correcting the
   estimator's known positive bias.  Per-component bits are floored at zero
   and summed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from numba import njit
from scipy.ndimage import uniform_filter1d
from scipy.spatial.distance import cdist

from .traces import ResampledTrace, normalize_finger_order

MIN_FRAMES = 8
MIN_EFFECTIVE_PAIRS = 4

#: Half the base-2 log of e: the additive bias of the plug-in estimator.
BIAS_BITS = math.log2(math.e) / 2.0


@dataclass(frozen=True)
class MiConfig:
    """Tunables for the mutual-information pipeline.

    ``alignment_smooth_s`` is the moving-average window (seconds) applied to
    the projections before computing warp indices.  Tempo differences are a
    low-frequency phenomenon; warping against the smoothed trajectories stops
    the alignment from matching frame-level noise between the two traces,
    which would manufacture spurious residual correlation.  Residuals are
    always computed from the unsmoothed projections.
    """

    mse_cutoff_fraction: float = 0.05
    r2_clamp: float = 1.0 - 1e-6
    alignment_smooth_s: float = 0.25

    def __post_init__(self):
        if not 0.0 < self.mse_cutoff_fraction <= 1.0:
            raise ValueError("mse_cutoff_fraction must be in (0, 1]")
        if not 0.0 < self.r2_clamp < 1.0:
            raise ValueError("r2_clamp must be in (0, 1)")
        if self.alignment_smooth_s < 0.0:
            raise ValueError("alignment_smooth_s must be >= 0")


DEFAULT_CONFIG = MiConfig()


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Frame-major movement features: columns [f1.x, f1.y, f2.x, f2.y, ...]."""

    frames: np.ndarray
    frame_rate_hz: float

    def __post_init__(self):
        f = np.asarray(self.frames, dtype=np.float64)
        if f.ndim != 2:
            raise ValueError("frames must be 2-D")
        if f.shape[0] < MIN_FRAMES:
            raise ValueError(f"need at least {MIN_FRAMES} frames, got {f.shape[0]}")
        if not np.isfinite(f).all():
            raise ValueError("frames contain non-finite values")
        object.__setattr__(self, "frames", f)

    @property
    def n_frames(self) -> int:
        return int(self.frames.shape[0])

    @property
    def n_dims(self) -> int:
        return int(self.frames.shape[1])


def to_feature_matrix(trace: ResampledTrace) -> FeatureMatrix:
    """Stack a trace's fingers into an n x (2 * finger_count) feature matrix."""
    return FeatureMatrix(
        frames=np.hstack([np.asarray(f) for f in trace.fingers]),
        frame_rate_hz=trace.rate_hz,
    )


@dataclass(frozen=True, eq=False)
class ArFit:
    """Least-squares AR(2) fit: x_t ~ b0 + b1*x_{t-1} + b2*x_{t-2}."""

    beta0: float
    beta1: float
    beta2: float
    residuals: np.ndarray
    degenerate: bool


def fit_ar2(series: np.ndarray) -> ArFit:
    """Fit a second-order autoregressive model by least squares.

    Returns the fitted parameters and the length n-2 residual array
    (residuals[i] belongs to frame i+2).  Rank-deficient designs (constant or
    perfectly linear series) fall back to the pseudo-inverse solution and are
    flagged ``degenerate``; their residuals are (near-)zero.
    """
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("series must be 1-D")
    n = x.shape[0]
    if n < MIN_FRAMES:
        raise ValueError(f"need at least {MIN_FRAMES} samples, got {n}")
    design = np.column_stack([np.ones(n - 2), x[1:-1], x[:-2]])
    target = x[2:]
    beta, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    residuals = target - design @ beta
    return ArFit(
        beta0=float(beta[0]),
        beta1=float(beta[1]),
        beta2=float(beta[2]),
        residuals=residuals,
        degenerate=rank < 3,
    )


@dataclass(frozen=True, eq=False)
class PcaBasis:
    """Joint PCA basis: orthonormal component rows and the retained count."""

    mean_vector: np.ndarray
    components: np.ndarray
    retained_k: int
    reprojection_mse: float

    def project(self, frames: np.ndarray) -> np.ndarray:
        return (np.asarray(frames) - self.mean_vector) @ self.components.T


def fit_pca(pair: tuple[FeatureMatrix, FeatureMatrix], mse_cutoff_fraction: float) -> PcaBasis:
    """Fit one shared basis on the row-concatenation of both feature matrices.

    Keeps the smallest k >= 1 whose reprojection mean-square error is at most
    ``mse_cutoff_fraction`` of the total variance.  Component signs are fixed
    deterministically (largest-magnitude entry positive).
    """
    a, b = pair
    if a.n_dims != b.n_dims:
        raise ValueError("feature matrices must share dimensionality")
    if not 0.0 < mse_cutoff_fraction <= 1.0:
        raise ValueError("mse_cutoff_fraction must be in (0, 1]")
    z = np.vstack([a.frames, b.frames])
    mean = z.mean(axis=0)
    centered = z - mean
    cov = centered.T @ centered / z.shape[0]
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    eigvecs = eigvecs[:, order].T  # rows are components
    for row in eigvecs:
        pivot = int(np.argmax(np.abs(row)))
        if row[pivot] < 0:
            row *= -1.0
    total_var = float(eigvals.sum())
    if total_var <= 0.0:
        raise ValueError("zero total variance: both traces are motionless")
    tail = np.concatenate([np.cumsum(eigvals[::-1])[::-1][1:], [0.0]])
    k = int(np.argmax(tail <= mse_cutoff_fraction * total_var)) + 1
    return PcaBasis(
        mean_vector=mean,
        components=np.ascontiguousarray(eigvecs[:k]),
        retained_k=k,
        reprojection_mse=float(tail[k - 1]),
    )


@njit(cache=True)
def _dtw_accumulate(cost):
    n, m = cost.shape
    acc = np.empty((n, m))
    acc[0, 0] = cost[0, 0]
    for j in range(1, m):
        acc[0, j] = cost[0, j] + acc[0, j - 1]
    for i in range(1, n):
        acc[i, 0] = cost[i, 0] + acc[i - 1, 0]
        for j in range(1, m):
            best = acc[i - 1, j - 1]
            if acc[i - 1, j] < best:
                best = acc[i - 1, j]
            if acc[i, j - 1] < best:
                best = acc[i, j - 1]
            acc[i, j] = cost[i, j] + best
    return acc


@njit(cache=True)
def _dtw_traceback(acc):
    n, m = acc.shape
    path = np.empty((n + m - 1, 2), dtype=np.int64)
    i, j = n - 1, m - 1
    pos = path.shape[0]
    while True:
        pos -= 1
        path[pos, 0] = i
        path[pos, 1] = j
        if i == 0 and j == 0:
            break
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            # ties prefer the diagonal, then the shorter-x step
            diag = acc[i - 1, j - 1]
            up = acc[i - 1, j]
            left = acc[i, j - 1]
            if diag <= up and diag <= left:
                i -= 1
                j -= 1
            elif up <= left:
                i -= 1
            else:
                j -= 1
    return path[pos:]


@dataclass(frozen=True, eq=False)
class Alignment:
    """Monotone frame pairing from (0,0) to (n_x-1, n_y-1) with duplicate marks."""

    pairs: np.ndarray
    duplicate_mask: np.ndarray
    cost: float


def align(a: np.ndarray, b: np.ndarray) -> Alignment:
    """Dynamic-time-warping alignment minimizing summed Euclidean frame distance.

    Steps are {(1,0), (0,1), (1,1)} with both endpoints pinned.  The duplicate
    mask is true exactly where a pair reuses either index of the previous pair.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ValueError("inputs must be 2-D with matching component count")
    if a.shape[0] < MIN_FRAMES or b.shape[0] < MIN_FRAMES:
        raise ValueError(f"need at least {MIN_FRAMES} frames on each side")
    cost = cdist(a, b)
    acc = _dtw_accumulate(cost)
    pairs = _dtw_traceback(acc)
    dup = np.zeros(pairs.shape[0], dtype=bool)
    dup[1:] = (pairs[1:, 0] == pairs[:-1, 0]) | (pairs[1:, 1] == pairs[:-1, 1])
    dup.setflags(write=False)
    return Alignment(pairs=pairs, duplicate_mask=dup, cost=float(acc[-1, -1]))


class Incomparable:
    """Outcome for trace pairs with different finger counts: no defined estimate."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INCOMPARABLE"


INCOMPARABLE = Incomparable()


@dataclass(frozen=True)
class ComponentMi:
    component_index: int
    n_effective: int
    pearson_r: float
    bits: float


@dataclass(frozen=True)
class MIResult:
    """Estimated shared information between two repetitions, in bits."""

    total_bits: float
    retained_k: int
    components: tuple[ComponentMi, ...]

    def to_dict(self) -> dict:
        return {
            "total_bits": self.total_bits,
            "retained_k": self.retained_k,
            "components": [
                {"i": c.component_index, "n": c.n_effective, "r": c.pearson_r, "bits": c.bits}
                for c in self.components
            ],
        }


MiOutcome = Union[MIResult, Incomparable]


def _standardize(frames: np.ndarray) -> np.ndarray:
    """Centre columns and scale by the global RMS; removes translation and scale."""
    centered = frames - frames.mean(axis=0)
    rms = math.sqrt(float(np.mean(centered**2)))
    if rms <= 0.0:
        raise ValueError("zero total variance: motionless trace")
    return centered / rms


def _pearson(u: np.ndarray, v: np.ndarray) -> float:
    su, sv = u.std(), v.std()
    if su == 0.0 or sv == 0.0:
        return 0.0
    r = float(np.corrcoef(u, v)[0, 1])
    return min(1.0, max(-1.0, r))


def component_bits(r: float, n_effective: int, r2_clamp: float) -> float:
    """Bias-corrected Gaussian mutual information for one component, floored at 0."""
    r2 = min(r * r, r2_clamp)
    return max(0.0, -(n_effective / 2.0) * math.log2(1.0 - r2) - BIAS_BITS)


def mutual_information(
    pair: tuple[ResampledTrace, ResampledTrace],
    config: MiConfig = DEFAULT_CONFIG,
) -> MiOutcome:
    """Estimate the information shared by two repetitions of a gesture.

    Parameters
    ----------
    pair : (ResampledTrace, ResampledTrace)
        Two repetitions.  Finger order of the second trace is normalized to
        the first before analysis.
    config : MiConfig
        PCA reprojection cutoff and the r^2 clamp keeping estimates finite on
        (near-)identical pairs.

    Returns
    -------
    MIResult, or the INCOMPARABLE sentinel when finger counts differ (a
    distinct outcome, not zero bits).
    """
    a, b = pair
    if a.finger_count != b.finger_count:
        return INCOMPARABLE
    a, b = normalize_finger_order([a, b])
    fa = to_feature_matrix(a)
    fb = to_feature_matrix(b)
    sa = FeatureMatrix(_standardize(fa.frames), fa.frame_rate_hz)
    sb = FeatureMatrix(_standardize(fb.frames), fb.frame_rate_hz)
    basis = fit_pca((sa, sb), config.mse_cutoff_fraction)
    pa = basis.project(sa.frames)
    pb = basis.project(sb.frames)
    window = int(round(config.alignment_smooth_s * a.rate_hz))
    if window > 1:
        alignment = align(
            uniform_filter1d(pa, size=window, axis=0, mode="nearest"),
            uniform_filter1d(pb, size=window, axis=0, mode="nearest"),
        )
    else:
        alignment = align(pa, pb)

    pairs = alignment.pairs
    # drop duplicate warp steps and the AR(2) warm-up frames of either trace
    valid = ~alignment.duplicate_mask & (pairs[:, 0] >= 2) & (pairs[:, 1] >= 2)
    ia = pairs[valid, 0] - 2
    ib = pairs[valid, 1] - 2
    n_eff = int(valid.sum())
    if n_eff < MIN_EFFECTIVE_PAIRS:
        raise ValueError(f"too few effective aligned pairs ({n_eff})")

    components = []
    total = 0.0
    for c in range(basis.retained_k):
        ra = fit_ar2(pa[:, c]).residuals[ia]
        rb = fit_ar2(pb[:, c]).residuals[ib]
        r = _pearson(ra, rb)
        bits = component_bits(r, n_eff, config.r2_clamp)
        total += bits
        components.append(ComponentMi(component_index=c, n_effective=n_eff, pearson_r=r, bits=bits))
    return MIResult(total_bits=total, retained_k=basis.retained_k, components=tuple(components))


@dataclass(frozen=True)
class PairMi:
    index_a: int
    index_b: int
    result: MiOutcome


@dataclass(frozen=True)
class GroupMi:
    """Mean estimate over a set of repetition pairs."""

    mean_bits: float
    pair_results: tuple[PairMi, ...]
    n_incomparable: int

    @property
    def n_pairs(self) -> int:
        return len(self.pair_results)


def _aggregate(pair_results: list[PairMi]) -> GroupMi:
    totals = [p.result.total_bits for p in pair_results if isinstance(p.result, MIResult)]
    n_incomparable = len(pair_results) - len(totals)
    if not totals:
        raise ValueError("all pairs are incomparable")
    return GroupMi(
        mean_bits=float(np.mean(totals)),
        pair_results=tuple(pair_results),
        n_incomparable=n_incomparable,
    )


def _check_same_gesture(traces: Sequence[ResampledTrace]):
    ids = {t.gesture_id for t in traces}
    if len(ids) > 1:
        raise ValueError(f"traces span multiple gesture identities: {sorted(ids)}")


def group_mean_mi(traces: Sequence[ResampledTrace], config: MiConfig = DEFAULT_CONFIG) -> GroupMi:
    """Mean mutual information over all unordered pairs of repetitions.

    Incomparable pairs (finger-count mismatch) are excluded from the mean and
    counted; it is an error for every pair to be incomparable.
    """
    traces = list(traces)
    if len(traces) < 2:
        raise ValueError("need at least 2 traces")
    _check_same_gesture(traces)
    results = []
    for i in range(len(traces)):
        for j in range(i + 1, len(traces)):
            results.append(PairMi(i, j, mutual_information((traces[i], traces[j]), config)))
    return _aggregate(results)


def cross_group_mi(
    a: Sequence[ResampledTrace],
    b: Sequence[ResampledTrace],
    config: MiConfig = DEFAULT_CONFIG,
) -> GroupMi:
    """Mean mutual information over the Cartesian pairing of two repetition groups."""
    a, b = list(a), list(b)
    if not a or not b:
        raise ValueError("both groups must be non-empty")
    _check_same_gesture(a + b)
    results = []
    for i in range(len(a)):
        for j in range(len(b)):
            results.append(PairMi(i, j, mutual_information((a[i], b[j]), config)))
    return _aggregate(results)


def memorability_ratio(
    generate: Sequence[ResampledTrace],
    recall2: Sequence[ResampledTrace],
    config: MiConfig = DEFAULT_CONFIG,
) -> float:
    """Cross-group information between creation and delayed recall, relative to creation.

    Near 1 when delayed recall reproduces the gesture as consistently as the
    creation repetitions reproduced each other; near 0 when recall is noise.
    """
    base = group_mean_mi(generate, config)
    if not base.mean_bits > 0.0:
        raise ValueError("degenerate creation group: mean information is not positive")
    cross = cross_group_mi(generate, recall2, config)
    return cross.mean_bits / base.mean_bits
