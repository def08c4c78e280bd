"""Rule-of-thirds framing: alignment candidates, aesthetic losses, adjustment.

The framing decision uses two scalars computed from the first pose: the
head-pelvis height difference (standing vs lying) and the horizontal angle
from the actor's forward direction to the camera (shot side).  The selected
alignment candidates are points on the one-third lines of the frame with the
free coordinate pinned to the projected body centre, so point distance equals
distance-to-line.

Losses:
  composition   pixel distance from the body centre to the nearest candidate
  adjustment    Euclidean norm of the camera offset (metres and radians mixed)
  visualization count of joints whose on-frame visibility flips

Each loss has a smoothed variant (soft-min / sigmoid margins) used by the
derivative-free optimizer; the hard variants are the reported metrics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import Bounds, minimize
from scipy.special import expit

from .errors import AdjustmentError, InvalidSequenceError
from .projection import (
    BODY_CENTER_SIGMA,
    frame_margins,
    gaussian_body_weights,
    pose6,
    project_points,
    weighted_center,
)
from .scene import (
    WORLD_UP,
    ActorPose,
    CameraIntrinsics,
    CameraTrajectory,
    DofVector,
    SkeletonLayout,
)

STAND_THRESHOLD_FRACTION = 0.4
TAU_COMPOSITION = 10.0
TAU_VISIBILITY = 20.0
DIRECTION_EPS = 1e-9


@dataclass(frozen=True)
class AestheticWeights:
    lambda_cmp: float = 1.0
    lambda_adj: float = 0.25
    lambda_vis: float = 0.01

    def __post_init__(self):
        for name in ("lambda_cmp", "lambda_adj", "lambda_vis"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v >= 0):
                raise InvalidSequenceError(f"{name} must be >= 0, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class OffsetBounds:
    """Box the adjustment may explore: +-position metres, +-rotation radians."""

    position: float = 2.0
    rotation: float = math.radians(30.0)

    def __post_init__(self):
        for name in ("position", "rotation"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise InvalidSequenceError(f"offset bound {name} must be positive")
            object.__setattr__(self, name, v)

    def halfwidths(self) -> np.ndarray:
        return np.array([self.position] * 3 + [self.rotation] * 3)

    def contains(self, offset6) -> bool:
        return bool(np.all(np.abs(np.asarray(offset6, dtype=float)) <= self.halfwidths() + 1e-12))


@dataclass(frozen=True)
class CameraOffset:
    """The one adjustment 6-vector applied uniformly to a whole trajectory."""

    delta: DofVector

    def as_array(self) -> np.ndarray:
        return self.delta.as_array()

    @classmethod
    def from_array(cls, a) -> "CameraOffset":
        return cls(DofVector.from_array(a))


@dataclass(frozen=True)
class AlignmentCandidates:
    """Two candidate points on the thirds lines; identical when one line wins."""

    first: np.ndarray
    second: np.ndarray
    orientation: str  # "vertical" or "horizontal": which thirds lines they pin

    def __post_init__(self):
        for name in ("first", "second"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (2,):
                raise InvalidSequenceError(f"candidate {name}: expected (u, v) pair")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.orientation not in ("vertical", "horizontal"):
            raise InvalidSequenceError(f"bad candidate orientation '{self.orientation}'")

    @property
    def single(self) -> bool:
        return bool(np.all(self.first == self.second))


class RelativeAngle(NamedTuple):
    degrees: float
    used_fallback: bool


def head_pelvis_diff(pose: ActorPose, layout: SkeletonLayout) -> float:
    """World-up component of head position minus pelvis position (metres)."""
    diff = pose.positions[layout.head_index] - pose.positions[layout.pelvis_index]
    return float(diff @ WORLD_UP)


def stand_threshold(layout: SkeletonLayout) -> float:
    return STAND_THRESHOLD_FRACTION * layout.actor_height


def actor_forward(pose: ActorPose, layout: SkeletonLayout) -> tuple:
    """Unit forward vector of the actor plus a flag when a fallback was used.

    Primary: world-up x (right_shoulder - left_shoulder), which points out of
    the actor's chest for an upright pose.  If the shoulder joints are absent
    or their axis is vertical, the horizontal component of pelvis->head
    stands in (useful for lying poses); failing that, world +x.
    """
    ls = layout.joint_index("left_shoulder")
    rs = layout.joint_index("right_shoulder")
    if ls is not None and rs is not None:
        across = pose.positions[rs] - pose.positions[ls]
        fwd = np.cross(WORLD_UP, across)
        norm = np.linalg.norm(fwd)
        if norm > DIRECTION_EPS:
            return fwd / norm, False
    axial = pose.positions[layout.head_index] - pose.positions[layout.pelvis_index]
    horizontal = axial - (axial @ WORLD_UP) * WORLD_UP
    norm = np.linalg.norm(horizontal)
    if norm > DIRECTION_EPS:
        return horizontal / norm, True
    return np.array([1.0, 0.0, 0.0]), True


def relative_angle(pose: ActorPose, camera, layout: SkeletonLayout) -> RelativeAngle:
    """Horizontal angle in [0, 360) from actor-forward to actor->camera.

    0 means the camera is directly in front; 90 directly to the actor's
    right.  A camera straight above the actor has no horizontal direction and
    reports 0 with the fallback flag set.
    """
    cam = pose6(camera)
    forward, used_fallback = actor_forward(pose, layout)
    to_cam = cam[:3] - pose.positions[layout.pelvis_index]
    to_cam = to_cam - (to_cam @ WORLD_UP) * WORLD_UP
    if np.linalg.norm(to_cam) <= DIRECTION_EPS:
        return RelativeAngle(0.0, True)
    right = np.cross(forward, WORLD_UP)
    angle = math.degrees(math.atan2(float(to_cam @ right), float(to_cam @ forward)))
    return RelativeAngle(angle % 360.0, used_fallback)


def alignment_candidates(
    hpd: float,
    ra_degrees: float,
    frame_width: int,
    frame_height: int,
    body_center_uv,
    threshold: float,
) -> AlignmentCandidates:
    """Rule-of-thirds decision tree.

    Standing (hpd >= threshold): right shot pins u = width/3, left shot
    u = 2*width/3, front/back both vertical thirds.  Lying: side shots pin
    both horizontal thirds, front/back both vertical thirds.  Side intervals
    are the closed [45, 135] (right) and [225, 315] (left).
    """
    u_m, v_m = (float(c) for c in body_center_uv)
    u1, u2 = frame_width / 3.0, 2.0 * frame_width / 3.0
    v1, v2 = frame_height / 3.0, 2.0 * frame_height / 3.0
    right = 45.0 <= ra_degrees <= 135.0
    left = 225.0 <= ra_degrees <= 315.0
    if hpd >= threshold:
        if right:
            return AlignmentCandidates((u1, v_m), (u1, v_m), "vertical")
        if left:
            return AlignmentCandidates((u2, v_m), (u2, v_m), "vertical")
        return AlignmentCandidates((u1, v_m), (u2, v_m), "vertical")
    if right or left:
        return AlignmentCandidates((u_m, v1), (u_m, v2), "horizontal")
    return AlignmentCandidates((u1, v_m), (u2, v_m), "vertical")


def _softmin(d1: float, d2: float, temperature: float) -> float:
    lo, hi = (d1, d2) if d1 <= d2 else (d2, d1)
    return lo + temperature * (math.log(2.0) - math.log1p(math.exp(-(hi - lo) / temperature)))


def composition_loss(
    pose: ActorPose,
    camera,
    intrinsics: CameraIntrinsics,
    layout: SkeletonLayout,
    smoothed: bool = False,
    temperature: float = TAU_COMPOSITION,
    sigma: float = BODY_CENTER_SIGMA,
) -> float:
    """Distance (px) from the body centre to the nearest alignment candidate.

    A blank shot returns the frame diagonal so the optimizer keeps a finite,
    recoverable objective.
    """
    uv, _, on = project_points(pose.positions, camera, intrinsics)
    if not np.any(on):
        return intrinsics.frame_diagonal
    center = weighted_center(uv, on, gaussian_body_weights(layout, sigma))
    cands = alignment_candidates(
        head_pelvis_diff(pose, layout),
        relative_angle(pose, camera, layout).degrees,
        intrinsics.frame_width,
        intrinsics.frame_height,
        center,
        stand_threshold(layout),
    )
    d1 = float(np.linalg.norm(center - cands.first))
    d2 = float(np.linalg.norm(center - cands.second))
    if not smoothed:
        return min(d1, d2)
    return _softmin(d1, d2, temperature)


def adjustment_loss(offset: CameraOffset, diagonal=None) -> float:
    """Euclidean norm of the offset 6-vector (optionally diagonally weighted)."""
    vec = offset.as_array() if isinstance(offset, CameraOffset) else np.asarray(offset, dtype=float)
    if diagonal is not None:
        vec = vec * np.asarray(diagonal, dtype=float)
    return float(np.linalg.norm(vec))


def _soft_bits(pose: ActorPose, camera, intrinsics: CameraIntrinsics, temperature: float) -> np.ndarray:
    uv, depth, _ = project_points(pose.positions, camera, intrinsics)
    margins = frame_margins(uv, depth, intrinsics)
    return expit(margins / temperature)


def visualization_loss(
    pose: ActorPose,
    cam_before,
    cam_after,
    intrinsics: CameraIntrinsics,
    smoothed: bool = False,
    temperature: float = TAU_VISIBILITY,
) -> float:
    """How many joints changed visibility between the two cameras (0..J)."""
    if not smoothed:
        _, _, on_before = project_points(pose.positions, cam_before, intrinsics)
        _, _, on_after = project_points(pose.positions, cam_after, intrinsics)
        return float(np.count_nonzero(on_before != on_after))
    before = _soft_bits(pose, cam_before, intrinsics, temperature)
    after = _soft_bits(pose, cam_after, intrinsics, temperature)
    return float(np.sum(before * (1.0 - after) + (1.0 - before) * after))


def aesthetic_loss(
    pose: ActorPose,
    cam_before,
    offset,
    intrinsics: CameraIntrinsics,
    layout: SkeletonLayout,
    weights: AestheticWeights = AestheticWeights(),
    smoothed: bool = False,
) -> float:
    """Weighted sum of composition, adjustment, and visualization losses."""
    cam0 = pose6(cam_before)
    delta = offset.as_array() if isinstance(offset, CameraOffset) else np.asarray(offset, dtype=float)
    cam1 = cam0 + delta
    return (
        weights.lambda_cmp * composition_loss(pose, cam1, intrinsics, layout, smoothed)
        + weights.lambda_adj * adjustment_loss(delta)
        + weights.lambda_vis * visualization_loss(pose, cam0, cam1, intrinsics, smoothed)
    )


class _AdjustProblem:
    """Precomputed state for fast smoothed-loss evaluations on one frame."""

    def __init__(self, pose, cam0, intrinsics, layout, weights):
        self.joints = pose.positions
        self.cam0 = pose6(cam0)
        self.intr = intrinsics
        self.layout = layout
        self.weights = weights
        self.body_weights = gaussian_body_weights(layout)
        self.hpd = head_pelvis_diff(pose, layout)
        self.threshold = stand_threshold(layout)
        self.forward, _ = actor_forward(pose, layout)
        self.right_axis = np.cross(self.forward, WORLD_UP)
        self.pelvis = self.joints[layout.pelvis_index]
        self.diag = intrinsics.frame_diagonal
        self.width = intrinsics.frame_width
        self.height = intrinsics.frame_height
        uv0, depth0, _ = project_points(self.joints, self.cam0, intrinsics)
        self.soft_before = expit(frame_margins(uv0, depth0, intrinsics) / TAU_VISIBILITY)

    def _relative_angle(self, cam) -> float:
        to_cam = cam[:3] - self.pelvis
        x = float(to_cam[0] * self.forward[0] + to_cam[1] * self.forward[1])
        y = float(to_cam[0] * self.right_axis[0] + to_cam[1] * self.right_axis[1])
        if x * x + y * y <= DIRECTION_EPS * DIRECTION_EPS:
            return 0.0
        return math.degrees(math.atan2(y, x)) % 360.0

    def smoothed_loss(self, offset: np.ndarray) -> float:
        cam = self.cam0 + offset
        uv, depth, on = project_points(self.joints, cam, self.intr)
        margins = frame_margins(uv, depth, self.intr)
        soft_after = expit(margins / TAU_VISIBILITY)
        vis = float(
            np.sum(
                self.soft_before * (1.0 - soft_after)
                + (1.0 - self.soft_before) * soft_after
            )
        )
        if np.any(on):
            center = weighted_center(uv, on, self.body_weights)
            cands = alignment_candidates(
                self.hpd, self._relative_angle(cam), self.width, self.height,
                center, self.threshold,
            )
            d1 = float(np.linalg.norm(center - cands.first))
            d2 = float(np.linalg.norm(center - cands.second))
            cmp_loss = _softmin(d1, d2, TAU_COMPOSITION)
        else:
            cmp_loss = self.diag
        return (
            self.weights.lambda_cmp * cmp_loss
            + self.weights.lambda_adj * float(np.linalg.norm(offset))
            + self.weights.lambda_vis * vis
        )

    def visible(self, offset: np.ndarray) -> bool:
        _, _, on = project_points(self.joints, self.cam0 + offset, self.intr)
        return bool(np.any(on))


def adjust(
    pose: ActorPose,
    camera,
    intrinsics: CameraIntrinsics,
    layout: SkeletonLayout,
    weights: AestheticWeights = AestheticWeights(),
    bounds: OffsetBounds = OffsetBounds(),
    seed: int = 0,
    starts: int = 8,
    max_evaluations: int = 500,
    xatol: float = 1e-4,
) -> CameraOffset:
    """Find the camera offset minimizing the smoothed aesthetic loss.

    Multi-start bounded Nelder-Mead: a zero start (so the result never beats
    the input backwards) plus seeded random starts inside half the box.  Each
    start stops when the simplex diameter drops under ``xatol`` or after
    ``max_evaluations`` evaluations.
    """
    if starts < 1:
        raise InvalidSequenceError("adjust needs at least one start")
    problem = _AdjustProblem(pose, camera, intrinsics, layout, weights)
    half = bounds.halfwidths()
    rng = np.random.default_rng(seed)
    origins = [np.zeros(6)]
    origins += [rng.uniform(-0.5, 0.5, 6) * half for _ in range(starts - 1)]

    box = Bounds(-half, half)
    options = dict(xatol=xatol, fatol=float("inf"), maxfev=max_evaluations)
    best_x, best_f = np.zeros(6), problem.smoothed_loss(np.zeros(6))
    for x0 in origins:
        result = minimize(
            problem.smoothed_loss, x0, method="Nelder-Mead", bounds=box, options=options
        )
        if result.fun < best_f:
            best_x, best_f = np.clip(result.x, -half, half), result.fun

    if not problem.visible(best_x):
        raise AdjustmentError(
            "every optimizer start ended in a blank shot",
            best_loss=float(best_f),
            starts=starts,
            camera=[float(v) for v in pose6(camera)],
        )
    return CameraOffset.from_array(best_x)


def apply_offset(trajectory: CameraTrajectory, offset: CameraOffset) -> CameraTrajectory:
    """Add the offset to every frame; shake and tracking dynamics untouched."""
    delta = offset.as_array() if isinstance(offset, CameraOffset) else np.asarray(offset, dtype=float)
    return CameraTrajectory(trajectory.data + delta, trajectory.fps)
