"""gesturekit: security metrics and authentication for free-form multitouch gestures."""

from .traces import (
    DEFAULT_RATE_HZ,
    FingerStream,
    GestureTrace,
    InvalidTrace,
    ResampledTrace,
    load_corpus,
    normalize_finger_order,
    parse_trace,
    resample,
    serialize_trace,
)
from .infocap import (
    INCOMPARABLE,
    Alignment,
    ArFit,
    FeatureMatrix,
    GroupMi,
    MIResult,
    MiConfig,
    PcaBasis,
    align,
    cross_group_mi,
    fit_ar2,
    fit_pca,
    group_mean_mi,
    memorability_ratio,
    mutual_information,
    to_feature_matrix,
)
from .recognizer import (
    AuthDecision,
    MatchResult,
    NormalizedStroke,
    TemplateSet,
    authenticate,
    build_template_set,
    match,
    normalize_stroke,
    stroke_similarity,
)
from .evaluation import (
    GestureReport,
    RocReport,
    TrialLabel,
    analyze_gesture,
    attack_report,
    build_template_sets,
    build_trial_corpus,
    roc_from_scores,
    roc_sweep,
    split_groups,
    template_count_study,
)
from .synth import GestureFamily, NoiseModel, generate
from .config import AppConfig, load_config

__all__ = [
    "DEFAULT_RATE_HZ",
    "FingerStream",
    "GestureTrace",
    "InvalidTrace",
    "ResampledTrace",
    "load_corpus",
    "normalize_finger_order",
    "parse_trace",
    "resample",
    "serialize_trace",
    "INCOMPARABLE",
    "Alignment",
    "ArFit",
    "FeatureMatrix",
    "GroupMi",
    "MIResult",
    "MiConfig",
    "PcaBasis",
    "align",
    "cross_group_mi",
    "fit_ar2",
    "fit_pca",
    "group_mean_mi",
    "memorability_ratio",
    "mutual_information",
    "to_feature_matrix",
    "AuthDecision",
    "MatchResult",
    "NormalizedStroke",
    "TemplateSet",
    "authenticate",
    "build_template_set",
    "match",
    "normalize_stroke",
    "stroke_similarity",
    "GestureReport",
    "RocReport",
    "TrialLabel",
    "analyze_gesture",
    "attack_report",
    "build_template_sets",
    "build_trial_corpus",
    "roc_from_scores",
    "roc_sweep",
    "split_groups",
    "template_count_study",
    "GestureFamily",
    "NoiseModel",
    "generate",
    "AppConfig",
    "load_config",
]

__version__ = "0.1.0"
