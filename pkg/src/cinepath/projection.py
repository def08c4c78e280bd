"""Pinhole projection of actor joints into the camera frame.

Camera poses here are world-frame 6-vectors (anchored poses must be shifted
by the scene anchor first).  The camera basis is built from yaw/pitch/roll:

    right0   = (sin yaw, -cos yaw, 0)          horizontal right, roll = 0
    forward  = (cos pitch * cos yaw, cos pitch * sin yaw, sin pitch)
    down0    = forward x right0
    right    = cos roll * right0 + sin roll * down0
    down     = cos roll * down0  - sin roll * right0

A world point q = p - c maps to camera coordinates (q.right, q.down,
q.forward); the third component is depth.  Points at depth <= 0 get
u = v = nan and are never on frame.  Pixel coordinates:

    u = W/2 + focal * (X/Z) * (W / sensor_width)
    v = H/2 + focal * (Y/Z) * (H / sensor_height)

u grows to the image right, v grows downward.  A joint is on frame iff
depth > 0 and 0 <= u < W and 0 <= v < H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BlankShotError
from .scene import ActorPose, CameraIntrinsics, CameraPlacement, DofVector, SkeletonLayout

BODY_CENTER_SIGMA = 2.0


def pose6(camera) -> np.ndarray:
    """Normalize a camera argument (DofVector, CameraPlacement, 6 floats) to (6,)."""
    if isinstance(camera, CameraPlacement):
        return camera.pose.as_array()
    if isinstance(camera, DofVector):
        return camera.as_array()
    arr = np.asarray(camera, dtype=float)
    if arr.shape != (6,):
        raise ValueError(f"camera pose: expected 6 values, got shape {arr.shape}")
    return arr


def camera_basis(angles) -> tuple:
    """(right, down, forward) unit vectors for (yaw, pitch, roll)."""
    yaw, pitch, roll = (float(a) for a in angles)
    sy, cy = math.sin(yaw), math.cos(yaw)
    sp, cp = math.sin(pitch), math.cos(pitch)
    sr, cr = math.sin(roll), math.cos(roll)
    right0 = np.array([sy, -cy, 0.0])
    forward = np.array([cp * cy, cp * sy, sp])
    down0 = np.cross(forward, right0)
    right = cr * right0 + sr * down0
    down = cr * down0 - sr * right0
    return right, down, forward


def project_points(points, camera, intrinsics: CameraIntrinsics):
    """Vectorized projection core.

    Returns (uv, depth, on) with shapes (N, 2), (N,), (N,).  uv rows are nan
    for points at depth <= 0.
    """
    cam = pose6(camera)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    right, down, forward = camera_basis(cam[3:])
    q = pts - cam[:3]
    x = q @ right
    y = q @ down
    depth = q @ forward
    uv = np.full((len(pts), 2), np.nan)
    front = depth > 0
    if np.any(front):
        zi = depth[front]
        uv[front, 0] = (
            intrinsics.frame_width / 2.0
            + intrinsics.focal_length * (x[front] / zi) * intrinsics.pixels_per_mm_u
        )
        uv[front, 1] = (
            intrinsics.frame_height / 2.0
            + intrinsics.focal_length * (y[front] / zi) * intrinsics.pixels_per_mm_v
        )
    on = (
        front
        & (uv[:, 0] >= 0)
        & (uv[:, 0] < intrinsics.frame_width)
        & (uv[:, 1] >= 0)
        & (uv[:, 1] < intrinsics.frame_height)
    )
    return uv, depth, on


@dataclass(frozen=True)
class ShotPoint:
    """One projected joint.  u, v are nan when the joint is behind the camera."""

    u: float
    v: float
    depth: float
    on_frame: bool


@dataclass(frozen=True)
class ProjectedPose:
    """All joints of one pose projected into the frame.

    ``encoded`` is the (J, 2) array with off-frame joints zeroed, matching the
    convention that a joint is visible iff its encoded coordinates sum above
    zero (exact only while no on-frame joint sits at pixel (0, 0)).
    """

    points: tuple
    uv: np.ndarray
    depth: np.ndarray
    on: np.ndarray

    @property
    def encoded(self) -> np.ndarray:
        out = np.where(self.on[:, None], np.nan_to_num(self.uv, nan=0.0), 0.0)
        return out

    @property
    def on_frame_count(self) -> int:
        return int(np.count_nonzero(self.on))


def project_point(point, camera, intrinsics: CameraIntrinsics) -> ShotPoint:
    uv, depth, on = project_points(np.asarray(point, dtype=float)[None, :], camera, intrinsics)
    return ShotPoint(float(uv[0, 0]), float(uv[0, 1]), float(depth[0]), bool(on[0]))


def project_pose(pose: ActorPose, camera, intrinsics: CameraIntrinsics) -> ProjectedPose:
    uv, depth, on = project_points(pose.positions, camera, intrinsics)
    points = tuple(
        ShotPoint(float(u), float(v), float(z), bool(o))
        for (u, v), z, o in zip(uv, depth, on)
    )
    for arr in (uv, depth, on):
        arr.flags.writeable = False
    return ProjectedPose(points, uv, depth, on)


def gaussian_body_weights(layout: SkeletonLayout, sigma: float = BODY_CENTER_SIGMA) -> np.ndarray:
    """Per-joint weights exp(-hops^2 / (2 sigma^2)) from the torso centre joint."""
    hops = layout.hop_distances(layout.torso_center_index).astype(float)
    w = np.exp(-(hops**2) / (2.0 * sigma * sigma))
    w.flags.writeable = False
    return w


def weighted_center(uv, on, weights) -> np.ndarray:
    """Weighted mean of on-frame pixel coordinates; BlankShotError if none on."""
    on = np.asarray(on, dtype=bool)
    if not np.any(on):
        raise BlankShotError("no joint projects onto the frame")
    w = np.asarray(weights, dtype=float)[on]
    return np.asarray(uv, dtype=float)[on].T @ w / np.sum(w)


def body_center(
    pose: ActorPose,
    camera,
    intrinsics: CameraIntrinsics,
    layout: SkeletonLayout,
    sigma: float = BODY_CENTER_SIGMA,
) -> np.ndarray:
    """Gaussian-weighted centre (u, v) of the on-frame joints."""
    uv, _, on = project_points(pose.positions, camera, intrinsics)
    return weighted_center(uv, on, gaussian_body_weights(layout, sigma))


def visibility_vector(pose: ActorPose, camera, intrinsics: CameraIntrinsics) -> np.ndarray:
    """Boolean (J,) vector: joint j is inside the frustum and the frame."""
    _, _, on = project_points(pose.positions, camera, intrinsics)
    on.flags.writeable = False
    return on


def frame_margins(uv, depth, intrinsics: CameraIntrinsics) -> np.ndarray:
    """Signed distance (px) from each projected joint to the nearest frame edge.

    Positive inside the frame, negative outside; joints behind the camera get
    -frame_diagonal so they count as firmly off frame.
    """
    uv = np.asarray(uv, dtype=float)
    depth = np.asarray(depth, dtype=float)
    u, v = uv[:, 0], uv[:, 1]
    w, h = intrinsics.frame_width, intrinsics.frame_height
    margins = np.minimum.reduce([u, w - u, v, h - v])
    return np.where(depth > 0, margins, -intrinsics.frame_diagonal)
