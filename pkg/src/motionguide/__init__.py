"""Latent-space motion guidance for pitching mechanics.

A transformer variational autoencoder embeds time-normalized pitching
motions into a smooth latent space; guidance comes from interpolating
between athletes or shifting a pitcher's latents along an optimized
hypersphere direction that improves release-window biomechanics.
"""

from .evaluation import (
    DTWReport,
    RadiusReport,
    StatsReport,
    build_stats_report,
    cohens_d_paired,
    dtw_distance,
    holm_bonferroni,
    lower_third_athletes,
    paired_t_test,
    representative_latents,
    run_radius_sweep,
    s_motion,
    transfer_sweep,
)
from .features import (
    FEATURE_KEYS,
    DeltaNormalization,
    FeatureVector,
    extract_features,
    extract_features_batch,
    feature_delta,
)
from .guidance import (
    ESConfig,
    FitnessParams,
    OptimizationResult,
    es_maximize,
    es_optimize,
    hypersphere_shift,
    interpolate,
    interpolation_sweep,
    nash_fitness,
)
from .io import load_corpus, read_motion, read_sequence, write_manifest, write_motion
from .model import (
    MotionVAE,
    TrainReport,
    VAEConfig,
    decode_frames,
    encode_mean,
    load_checkpoint,
    reconstruction_rmse,
    save_checkpoint,
    train_model,
)
from .motion import (
    FRAME_DT_MS,
    NUM_FRAMES,
    NUM_JOINTS,
    RELEASE_FRAME,
    JointId,
    MotionSequence,
    RawCapture,
    Scaler,
    throwing_joints,
)
from .preprocess import (
    detect_release,
    fit_scaler,
    lowpass_filter,
    mirror_left_handed,
    segment_and_normalize,
    standardize,
)
from .synth import SynthCohort, SynthTrial, make_cohort, make_pose_fixture, make_raw_capture

__version__ = "0.1.0"

__all__ = [
    "DTWReport",
    "DeltaNormalization",
    "ESConfig",
    "FEATURE_KEYS",
    "FRAME_DT_MS",
    "FeatureVector",
    "FitnessParams",
    "JointId",
    "MotionSequence",
    "MotionVAE",
    "NUM_FRAMES",
    "NUM_JOINTS",
    "OptimizationResult",
    "RELEASE_FRAME",
    "RadiusReport",
    "RawCapture",
    "Scaler",
    "StatsReport",
    "SynthCohort",
    "SynthTrial",
    "TrainReport",
    "VAEConfig",
    "build_stats_report",
    "cohens_d_paired",
    "decode_frames",
    "detect_release",
    "dtw_distance",
    "encode_mean",
    "es_maximize",
    "es_optimize",
    "extract_features",
    "extract_features_batch",
    "feature_delta",
    "fit_scaler",
    "holm_bonferroni",
    "hypersphere_shift",
    "interpolate",
    "interpolation_sweep",
    "load_checkpoint",
    "load_corpus",
    "lower_third_athletes",
    "lowpass_filter",
    "make_cohort",
    "make_pose_fixture",
    "make_raw_capture",
    "mirror_left_handed",
    "nash_fitness",
    "paired_t_test",
    "read_motion",
    "read_sequence",
    "reconstruction_rmse",
    "representative_latents",
    "run_radius_sweep",
    "s_motion",
    "save_checkpoint",
    "segment_and_normalize",
    "standardize",
    "throwing_joints",
    "train_model",
    "transfer_sweep",
    "write_manifest",
    "write_motion",
]
