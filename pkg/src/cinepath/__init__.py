"""cinepath: actor-driven virtual camera trajectories with immersion metrics."""

__version__ = "0.1.0"

from .aesthetics import (
    AestheticWeights,
    AlignmentCandidates,
    CameraOffset,
    OffsetBounds,
    adjust,
    adjustment_loss,
    aesthetic_loss,
    alignment_candidates,
    apply_offset,
    composition_loss,
    head_pelvis_diff,
    relative_angle,
    visualization_loss,
)
from .config import RunConfig, load_config
from .errors import (
    AdjustmentError,
    BlankShotError,
    CalibrationError,
    CinepathError,
    ConfigError,
    InvalidSequenceError,
    SceneParseError,
    TrajectoryMismatchError,
    UndefinedMetricError,
)
from .evaluation import (
    CorrelationTriple,
    ImmersionReport,
    SpatialSync,
    adj_dis,
    combined_trajectory_objective,
    emotion_correlation,
    hausdorff_distance,
    immersion_score,
    point_loss,
    rot_shift,
    spatial_sync,
    spatial_sync_distance,
    vis_acc,
)
from .fileio import (
    load_scene,
    read_trajectory,
    save_scene,
    scene_from_dict,
    scene_to_dict,
    write_trajectory,
)
from .projection import (
    ProjectedPose,
    ShotPoint,
    body_center,
    camera_basis,
    project_point,
    project_points,
    project_pose,
    visibility_vector,
)
from .scene import (
    ActorPose,
    ActorPoseSequence,
    CameraIntrinsics,
    CameraPlacement,
    CameraTrajectory,
    DEFAULT_LAYOUT,
    DofVector,
    EmotionFactor,
    REGIONS,
    Scene,
    SkeletonLayout,
    compute_delta,
    compute_velocity,
)
from .shakiness import (
    StationaryPoints,
    axis_shakiness,
    cosine_shakiness_distance,
    shakiness_distance,
    shakiness_vector,
    stationary_points,
    total_shakiness,
)
from .synthesis import (
    RegionSaliency,
    ShakeProfile,
    SynthesisConfig,
    base_shake_vector,
    inject_shake,
    region_saliency,
    synthesize,
    target_shakiness,
    tracking_trajectory,
)
