"""Self-supervised point-cloud pretraining with guided augmentation and
guided feature mapping."""

from ._core import (
    AppliedRecord,
    AugRanges,
    Augmentation,
    CropSpec,
    DataError,
    EncoderConfig,
    EncoderParams,
    JitterSpec,
    MemoryBank,
    NumericError,
    PointCloud,
    SpatialIndex,
    angular_distance,
    apply,
    aug_distance,
    batch_loss,
    cosine_similarity,
    coverage_metrics,
    default_config_json,
    encode_points,
    gather_features,
    init_params,
    invert_apply,
    linear_probe,
    load_xyz,
    loss_backward,
    novelty_kernel,
    pool_project,
    pretrain,
    random_subsample,
    sample_random,
    save_xyz,
    strip_crop,
    structural_map,
    synth_shape,
    voxel_downsample,
)

__all__ = [
    "AppliedRecord",
    "AugRanges",
    "Augmentation",
    "CropSpec",
    "DataError",
    "EncoderConfig",
    "EncoderParams",
    "JitterSpec",
    "MemoryBank",
    "NumericError",
    "PointCloud",
    "SpatialIndex",
    "angular_distance",
    "apply",
    "aug_distance",
    "batch_loss",
    "cosine_similarity",
    "coverage_metrics",
    "default_config_json",
    "encode_points",
    "gather_features",
    "init_params",
    "invert_apply",
    "linear_probe",
    "load_xyz",
    "loss_backward",
    "novelty_kernel",
    "pool_project",
    "pretrain",
    "random_subsample",
    "sample_random",
    "save_xyz",
    "strip_crop",
    "structural_map",
    "synth_shape",
    "voxel_downsample",
]
