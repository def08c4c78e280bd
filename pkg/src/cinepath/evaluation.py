"""Immersion metrics: trajectory losses, spatial sync, correlations, framing.

The combined immersion score is a convex combination of three sub-scores:
spatial (Hausdorff distance between normalized velocity feature sets),
emotional (correlation between emotion values and measured total shakiness
across a sweep), and aesthetic (framing shift and visibility retention).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import cdist
from scipy.stats import kendalltau, pearsonr, spearmanr

from .aesthetics import composition_loss, visualization_loss
from .errors import ConfigError, TrajectoryMismatchError, UndefinedMetricError
from .projection import pose6
from .scene import (
    ActorPose,
    ActorPoseSequence,
    CameraIntrinsics,
    CameraTrajectory,
    SkeletonLayout,
    compute_velocity,
)
from .shakiness import shakiness_distance, shakiness_vector

DEFAULT_LAMBDA_MSE = 10.0
DEFAULT_LAMBDA_SK = 1.0
DEGENERATE_RANGE = 1e-12


def point_loss(ref: CameraTrajectory, gen: CameraTrajectory) -> float:
    """Squared L2 distance between trajectories plus total variation of gen.

    The total-variation term sums |gen[t+1] - gen[t]| + |gen[t] - gen[t-1]|
    over interior frames t = 1 .. T-2 and all axes.
    """
    if len(ref) != len(gen):
        raise TrajectoryMismatchError(
            f"point_loss: trajectory lengths differ ({len(ref)} vs {len(gen)})"
        )
    l2 = float(np.sum((ref.data - gen.data) ** 2))
    steps = np.abs(np.diff(gen.data, axis=0))
    tv = float(np.sum(steps[1:]) + np.sum(steps[:-1]))
    return l2 + tv


def combined_trajectory_objective(
    ref: CameraTrajectory,
    gen: CameraTrajectory,
    lambda_mse: float = DEFAULT_LAMBDA_MSE,
    lambda_sk: float = DEFAULT_LAMBDA_SK,
) -> float:
    """lambda_mse * point_loss + lambda_sk * shakiness-vector distance."""
    sk = shakiness_distance(shakiness_vector(ref), shakiness_vector(gen))
    return lambda_mse * point_loss(ref, gen) + lambda_sk * sk


def minmax_normalize(features: np.ndarray) -> tuple:
    """Min-max normalize each column to [0, 1]; zero-range columns become 0.

    Returns (normalized array, tuple of degenerate column indices).
    """
    f = np.asarray(features, dtype=float)
    lo = f.min(axis=0)
    rng = f.max(axis=0) - lo
    degenerate = tuple(int(i) for i in np.nonzero(rng < DEGENERATE_RANGE)[0])
    safe = np.where(rng < DEGENERATE_RANGE, 1.0, rng)
    out = (f - lo) / safe
    out[:, list(degenerate)] = 0.0
    return out, degenerate


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two point sets (rows)."""
    d = cdist(np.atleast_2d(a), np.atleast_2d(b))
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


class SpatialSync(NamedTuple):
    distance: float
    degenerate_actor_axes: tuple
    degenerate_camera_axes: tuple


def spatial_sync(
    sequence: ActorPoseSequence, trajectory: CameraTrajectory, axes=None
) -> SpatialSync:
    """Hausdorff distance between actor and camera velocity feature sets.

    Actor features: per-frame mean joint velocity (T-1 rows of 6).  Camera
    features: per-frame pose velocity.  Both sets are min-max normalized per
    axis before the distance; ``axes`` restricts which of the 6 axes are
    compared (default all).
    """
    if sequence.frame_count != len(trajectory):
        raise TrajectoryMismatchError(
            f"spatial sync: sequence has {sequence.frame_count} frames, "
            f"trajectory has {len(trajectory)}"
        )
    actor = compute_velocity(sequence)[1:].mean(axis=1)
    camera = np.diff(trajectory.data, axis=0) * trajectory.fps
    if axes is not None:
        axes = list(axes)
        actor = actor[:, axes]
        camera = camera[:, axes]
    actor_n, actor_deg = minmax_normalize(actor)
    camera_n, camera_deg = minmax_normalize(camera)
    return SpatialSync(hausdorff_distance(actor_n, camera_n), actor_deg, camera_deg)


def spatial_sync_distance(
    sequence: ActorPoseSequence, trajectory: CameraTrajectory, axes=None
) -> float:
    return spatial_sync(sequence, trajectory, axes).distance


class CorrelationTriple(NamedTuple):
    pcc: float
    srcc: float
    krcc: float


def emotion_correlation(emotions, shakiness_sums) -> CorrelationTriple:
    """Pearson, Spearman, and Kendall correlations of emotion vs shakiness."""
    e = np.asarray(emotions, dtype=float)
    s = np.asarray(shakiness_sums, dtype=float)
    if e.shape != s.shape or e.ndim != 1:
        raise TrajectoryMismatchError(
            f"correlation inputs must be equal-length vectors, got {e.shape} and {s.shape}"
        )
    if len(e) < 3:
        raise UndefinedMetricError(f"correlation needs at least 3 pairs, got {len(e)}")
    if np.ptp(e) == 0.0 or np.ptp(s) == 0.0:
        raise UndefinedMetricError("correlation undefined for a constant vector")
    return CorrelationTriple(
        float(pearsonr(e, s).statistic),
        float(spearmanr(e, s).statistic),
        float(kendalltau(e, s).statistic),
    )


def rot_shift(
    pose: ActorPose, camera, intrinsics: CameraIntrinsics, layout: SkeletonLayout
) -> float:
    """Framing shift: hard composition loss (px) at this camera."""
    return composition_loss(pose, camera, intrinsics, layout, smoothed=False)


def adj_dis(cam_before, cam_after) -> float:
    """Mean absolute error over the three position axes (metres)."""
    before = pose6(cam_before)
    after = pose6(cam_after)
    return float(np.mean(np.abs(after[:3] - before[:3])))


def vis_acc(
    pose: ActorPose, cam_before, cam_after, intrinsics: CameraIntrinsics
) -> float:
    """Percentage of joints whose visibility is unchanged by the adjustment."""
    joints = pose.joints.shape[0]
    flips = visualization_loss(pose, cam_before, cam_after, intrinsics, smoothed=False)
    return 100.0 * (joints - flips) / joints


@dataclass(frozen=True)
class ImmersionReport:
    i_s: float
    i_e: float
    i_a: float
    alpha: float
    beta: float
    score: float
    raw: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "i_s": self.i_s,
            "i_e": self.i_e,
            "i_a": self.i_a,
            "score": self.score,
            "raw": dict(self.raw),
        }


def immersion_score(
    hd: float,
    correlations,
    rot_shift_px: float,
    vis_acc_pct: float,
    alpha: float = 1.0 / 3.0,
    beta: float = 1.0 / 3.0,
    frame_diagonal: float = CameraIntrinsics().frame_diagonal,
) -> ImmersionReport:
    """Convex combination of spatial, emotional, and aesthetic sub-scores.

    I_s = 1/(1 + HD); I_e = max(0, PCC); I_a averages the framing-shift score
    (1 - rot_shift/diagonal, floored at 0) and vis_acc/100.
    """
    if not (alpha >= 0 and beta >= 0 and alpha + beta <= 1 + 1e-12):
        raise ConfigError(
            f"immersion weights must satisfy alpha, beta >= 0 and alpha + beta <= 1; "
            f"got alpha = {alpha}, beta = {beta}"
        )
    if hd < 0 or not math.isfinite(hd):
        raise UndefinedMetricError(f"Hausdorff distance must be finite and >= 0, got {hd}")
    if not 0 <= vis_acc_pct <= 100:
        raise UndefinedMetricError(f"vis_acc must be a percentage, got {vis_acc_pct}")
    if rot_shift_px < 0 or frame_diagonal <= 0:
        raise UndefinedMetricError("rot_shift and frame diagonal must be nonnegative/positive")
    pcc = correlations.pcc if isinstance(correlations, CorrelationTriple) else float(correlations)
    i_s = 1.0 / (1.0 + hd)
    i_e = max(0.0, pcc)
    i_a = 0.5 * (1.0 - min(rot_shift_px, frame_diagonal) / frame_diagonal) + 0.5 * (
        vis_acc_pct / 100.0
    )
    score = alpha * i_s + beta * i_e + (1.0 - alpha - beta) * i_a
    raw = {
        "hd": float(hd),
        "pcc": float(pcc),
        "rot_shift": float(rot_shift_px),
        "vis_acc": float(vis_acc_pct),
        "frame_diagonal": float(frame_diagonal),
    }
    return ImmersionReport(i_s, i_e, i_a, float(alpha), float(beta), float(score), raw)
