"""Core scene types: actor pose sequences, emotion factor, camera placement.

World frame is right-handed with z up; positions are metres, angles radians.
A camera pose is a 6-vector (x, y, z, yaw, pitch, roll).  Yaw is measured
about +z from the +x axis, pitch tilts the optical axis out of the horizontal
plane (positive up), roll spins about the optical axis.  Angles are stored as
given: no modular reduction is applied silently.

Camera placements and trajectory rows are actor-anchored: their positions are
relative to the world position of the actor's pelvis in frame 0.  Joint
coordinates in pose sequences stay in the world frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidSequenceError

REGIONS = ("head", "arms", "torso", "legs")

AXES = ("x", "y", "z", "yaw", "pitch", "roll")

WORLD_UP = np.array([0.0, 0.0, 1.0])


def _frozen_array(obj, name: str, value, shape=None, dtype=float) -> np.ndarray:
    arr = np.array(value, dtype=dtype)
    if shape is not None and arr.shape != shape:
        raise InvalidSequenceError(
            f"{name}: expected shape {shape}, got {arr.shape}", field=name
        )
    if not np.all(np.isfinite(arr)):
        raise InvalidSequenceError(f"{name}: non-finite values", field=name)
    arr.flags.writeable = False
    object.__setattr__(obj, name, arr)
    return arr


@dataclass(frozen=True)
class DofVector:
    """One 6-DOF camera pose: translation (m) and yaw/pitch/roll (rad)."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    yaw: float = 0.0
    pitch: float = 0.0
    roll: float = 0.0

    def __post_init__(self):
        for name in AXES:
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidSequenceError(f"DofVector.{name}: non-finite", field=name)
            object.__setattr__(self, name, float(v))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.yaw, self.pitch, self.roll])

    @classmethod
    def from_array(cls, a) -> "DofVector":
        a = np.asarray(a, dtype=float)
        if a.shape != (6,):
            raise InvalidSequenceError(f"DofVector: expected 6 values, got shape {a.shape}")
        return cls(*(float(v) for v in a))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def angles(self) -> np.ndarray:
        return np.array([self.yaw, self.pitch, self.roll])


@dataclass(frozen=True)
class SkeletonLayout:
    """Kinematic tree plus region labels for a humanoid skeleton.

    ``joint_regions[j]`` is one of REGIONS.  ``parents[j]`` is the parent
    joint index, or None for the single root.  ``torso_center_index`` anchors
    the Gaussian falloff used for the on-frame body centre; ``head_index``
    and ``pelvis_index`` feed the stand/lie test and the actor-relative
    camera angle.  Joints named ``left_shoulder``/``right_shoulder``, when
    present, define the actor's facing direction.
    """

    joint_names: tuple
    joint_regions: tuple
    parents: tuple
    torso_center_index: int
    head_index: int
    pelvis_index: int
    actor_height: float = 1.8

    def __post_init__(self):
        names, regions, parents = self.joint_names, self.joint_regions, self.parents
        j = len(names)
        if j < 2:
            raise InvalidSequenceError("skeleton: need at least 2 joints", joints=j)
        if len(set(names)) != j:
            raise InvalidSequenceError("skeleton: duplicate joint names")
        if len(regions) != j or len(parents) != j:
            raise InvalidSequenceError("skeleton: regions/parents length mismatch")
        for name, region in zip(names, regions):
            if region not in REGIONS:
                raise InvalidSequenceError(
                    f"skeleton.regions: joint '{name}' has invalid region '{region}'"
                )
        roots = [i for i, p in enumerate(parents) if p is None]
        if len(roots) != 1:
            raise InvalidSequenceError("skeleton: expected exactly one root joint")
        # Walking parent links from every joint must reach the root without
        # revisiting a joint, otherwise the tree has a cycle or a bad index.
        for i in range(j):
            seen, cur = set(), i
            while parents[cur] is not None:
                if cur in seen:
                    raise InvalidSequenceError("skeleton: parent links contain a cycle")
                seen.add(cur)
                cur = parents[cur]
                if not 0 <= cur < j:
                    raise InvalidSequenceError("skeleton: parent index out of range")
        for label, idx in (
            ("torso_center_index", self.torso_center_index),
            ("head_index", self.head_index),
            ("pelvis_index", self.pelvis_index),
        ):
            if not 0 <= idx < j:
                raise InvalidSequenceError(f"skeleton.{label}: out of range", index=idx)
        if regions[self.head_index] != "head":
            raise InvalidSequenceError("skeleton.head_index: joint is not in the head region")
        if not (math.isfinite(self.actor_height) and self.actor_height > 0):
            raise InvalidSequenceError("skeleton.actor_height: must be positive")

    @property
    def joint_count(self) -> int:
        return len(self.joint_names)

    @property
    def region_of(self) -> dict:
        return dict(zip(self.joint_names, self.joint_regions))

    def region_indices(self, region: str) -> np.ndarray:
        return np.array(
            [i for i, r in enumerate(self.joint_regions) if r == region], dtype=int
        )

    def joint_index(self, name: str):
        try:
            return self.joint_names.index(name)
        except ValueError:
            return None

    @lru_cache(maxsize=None)
    def hop_distances(self, from_index: int) -> np.ndarray:
        """Edge-count distance from ``from_index`` to every joint (BFS)."""
        j = self.joint_count
        neighbours = [[] for _ in range(j)]
        for i, p in enumerate(self.parents):
            if p is not None:
                neighbours[i].append(p)
                neighbours[p].append(i)
        dist = np.full(j, -1, dtype=int)
        dist[from_index] = 0
        queue = [from_index]
        while queue:
            cur = queue.pop(0)
            for n in neighbours[cur]:
                if dist[n] < 0:
                    dist[n] = dist[cur] + 1
                    queue.append(n)
        dist.flags.writeable = False
        return dist


# Default 17-joint humanoid.  Limb joints follow COCO naming; the five face
# keypoints are replaced by a trunk chain (pelvis/spine/chest/neck/head) so
# the layout carries the torso centre, head, and pelvis joints the framing
# rules need.
DEFAULT_LAYOUT = SkeletonLayout(
    joint_names=(
        "pelvis", "spine", "chest", "neck", "head",
        "left_shoulder", "left_elbow", "left_wrist",
        "right_shoulder", "right_elbow", "right_wrist",
        "left_hip", "left_knee", "left_ankle",
        "right_hip", "right_knee", "right_ankle",
    ),
    joint_regions=(
        "torso", "torso", "torso", "head", "head",
        "torso", "arms", "arms",
        "torso", "arms", "arms",
        "legs", "legs", "legs",
        "legs", "legs", "legs",
    ),
    parents=(None, 0, 1, 2, 3, 2, 5, 6, 2, 8, 9, 0, 11, 12, 0, 14, 15),
    torso_center_index=1,
    head_index=4,
    pelvis_index=0,
    actor_height=1.8,
)


@dataclass(frozen=True)
class ActorPose:
    """One pose frame: per-joint 6-vectors (x, y, z world metres + 3 joint angles)."""

    joints: np.ndarray

    def __post_init__(self):
        arr = np.array(self.joints, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 6:
            raise InvalidSequenceError(
                f"pose: expected (J, 6) joint array, got {arr.shape}"
            )
        _frozen_array(self, "joints", arr)

    @property
    def positions(self) -> np.ndarray:
        return self.joints[:, :3]


@dataclass(frozen=True)
class ActorPoseSequence:
    """T pose frames at a fixed frame rate.  T >= 2 is required."""

    data: np.ndarray
    fps: float = 30.0

    def __post_init__(self):
        arr = np.array(self.data, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 6:
            raise InvalidSequenceError(
                f"pose sequence: expected (T, J, 6) array, got {arr.shape}"
            )
        if arr.shape[0] < 2:
            raise InvalidSequenceError(
                f"pose sequence: T >= 2 required, got T = {arr.shape[0]}"
            )
        _frozen_array(self, "data", arr)
        if not (math.isfinite(self.fps) and self.fps > 0):
            raise InvalidSequenceError(f"fps: must be finite and positive, got {self.fps}")
        object.__setattr__(self, "fps", float(self.fps))

    @property
    def frame_count(self) -> int:
        return self.data.shape[0]

    @property
    def joint_count(self) -> int:
        return self.data.shape[1]

    def frame(self, t: int) -> ActorPose:
        return ActorPose(self.data[t])

    @property
    def positions(self) -> np.ndarray:
        return self.data[:, :, :3]


def compute_delta(sequence: ActorPoseSequence) -> np.ndarray:
    """Per-frame absolute pose change, shape (T, J, 6); row 0 is zeros."""
    data = sequence.data
    delta = np.zeros_like(data)
    delta[1:] = np.abs(np.diff(data, axis=0))
    return delta


def compute_velocity(sequence: ActorPoseSequence) -> np.ndarray:
    """Per-frame signed pose velocity in units/second, shape (T, J, 6); row 0 zeros."""
    data = sequence.data
    vel = np.zeros_like(data)
    vel[1:] = np.diff(data, axis=0) * sequence.fps
    return vel


@dataclass(frozen=True)
class EmotionFactor:
    """Scalar emotion intensity E; E < 1 reads relaxed, E > 1 tense."""

    value: float
    e_max: float = 4.0

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value > 0):
            raise InvalidSequenceError("emotion must be positive", value=self.value)
        if not (math.isfinite(self.e_max) and self.e_max >= 1):
            raise InvalidSequenceError("emotion e_max must be >= 1", e_max=self.e_max)
        if self.value > self.e_max:
            raise InvalidSequenceError(
                f"emotion must be <= e_max ({self.e_max})", value=self.value
            )
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "e_max", float(self.e_max))

    @property
    def is_relaxed(self) -> bool:
        return self.value < 1.0

    @property
    def is_tense(self) -> bool:
        return self.value > 1.0


@dataclass(frozen=True)
class CameraPlacement:
    """Initial camera pose, actor-anchored (see module docstring)."""

    pose: DofVector

    def as_array(self) -> np.ndarray:
        return self.pose.as_array()

    @classmethod
    def from_array(cls, a) -> "CameraPlacement":
        return cls(DofVector.from_array(a))


@dataclass(frozen=True)
class CameraTrajectory:
    """T camera poses (rows of 6, actor-anchored) at a fixed frame rate."""

    data: np.ndarray
    fps: float = 30.0

    def __post_init__(self):
        arr = np.array(self.data, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 6:
            raise InvalidSequenceError(
                f"trajectory: expected (T, 6) array, got {arr.shape}"
            )
        if arr.shape[0] < 1:
            raise InvalidSequenceError("trajectory: needs at least one row")
        _frozen_array(self, "data", arr)
        if not (math.isfinite(self.fps) and self.fps > 0):
            raise InvalidSequenceError(f"fps: must be finite and positive, got {self.fps}")
        object.__setattr__(self, "fps", float(self.fps))

    def __len__(self) -> int:
        return self.data.shape[0]

    def axis(self, q: int) -> np.ndarray:
        return self.data[:, q]

    def row(self, t: int) -> DofVector:
        return DofVector.from_array(self.data[t])

    @property
    def positions(self) -> np.ndarray:
        return self.data[:, :3]

    @property
    def angles(self) -> np.ndarray:
        return self.data[:, 3:]


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole camera: focal length and sensor size in mm, frame size in px."""

    focal_length: float = 35.0
    sensor_width: float = 36.0
    sensor_height: float = 20.25
    frame_width: int = 1920
    frame_height: int = 1080

    def __post_init__(self):
        for name in ("focal_length", "sensor_width", "sensor_height"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidSequenceError(f"intrinsics.{name}: must be positive", value=v)
            object.__setattr__(self, name, float(v))
        for name in ("frame_width", "frame_height"):
            v = getattr(self, name)
            if int(v) != v or v <= 0:
                raise InvalidSequenceError(f"intrinsics.{name}: must be a positive integer")
            object.__setattr__(self, name, int(v))
        sensor_aspect = self.sensor_width / self.sensor_height
        frame_aspect = self.frame_width / self.frame_height
        if not math.isclose(sensor_aspect, frame_aspect, rel_tol=1e-6):
            raise InvalidSequenceError(
                "intrinsics: sensor and frame aspect ratios differ",
                sensor_aspect=sensor_aspect,
                frame_aspect=frame_aspect,
            )

    @property
    def frame_diagonal(self) -> float:
        return math.hypot(self.frame_width, self.frame_height)

    @property
    def pixels_per_mm_u(self) -> float:
        return self.frame_width / self.sensor_width

    @property
    def pixels_per_mm_v(self) -> float:
        return self.frame_height / self.sensor_height


@dataclass(frozen=True)
class Scene:
    """A complete input: pose sequence, emotion, initial camera, intrinsics."""

    poses: ActorPoseSequence
    emotion: EmotionFactor
    camera: CameraPlacement
    layout: SkeletonLayout = DEFAULT_LAYOUT
    intrinsics: CameraIntrinsics = CameraIntrinsics()
    name: str = "scene"

    def __post_init__(self):
        if self.poses.joint_count != self.layout.joint_count:
            raise InvalidSequenceError(
                f"scene: sequence has {self.poses.joint_count} joints, "
                f"skeleton has {self.layout.joint_count}"
            )

    @property
    def anchor(self) -> np.ndarray:
        """World position of the pelvis in frame 0: origin for camera poses."""
        return self.poses.data[0, self.layout.pelvis_index, :3]

    def camera_to_world(self, pose6) -> np.ndarray:
        """Actor-anchored camera 6-vector -> world-frame 6-vector."""
        out = np.array(pose6, dtype=float)
        out[:3] += self.anchor
        return out

    def camera_from_world(self, pose6) -> np.ndarray:
        out = np.array(pose6, dtype=float)
        out[:3] -= self.anchor
        return out
