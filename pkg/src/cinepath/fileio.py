"""Scene JSON and trajectory CSV reading/writing.

Scene files are JSON.  Required keys: ``frames`` (T lists of J joint
6-vectors), ``emotion`` (positive scalar), ``camera`` (object with ``pose``,
a 6-vector, and ``angle_unit``, "radians" or "degrees").  Optional keys:
``fps`` (default 30), ``name``, ``intrinsics``, ``skeleton``, and
``emotion_max``.  Camera poses are actor-anchored; joint positions are world
metres; joint angles are always radians regardless of ``angle_unit``, which
covers only the camera pose.

Trajectories are CSV with header ``t,x,y,z,yaw,pitch,roll`` plus a JSON
sidecar (same path, ``.json`` suffix) carrying fps and provenance.  Values
are written with 9 significant digits.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .errors import SceneParseError
from .scene import (
    ActorPoseSequence,
    CameraIntrinsics,
    CameraPlacement,
    CameraTrajectory,
    DEFAULT_LAYOUT,
    DofVector,
    EmotionFactor,
    Scene,
    SkeletonLayout,
)

TRAJECTORY_COLUMNS = ("t", "x", "y", "z", "yaw", "pitch", "roll")


def quantize(value: float) -> float:
    """Round a float to 9 significant digits (the CLI output precision)."""
    return float(f"{float(value):.9g}")


def json_ready(obj):
    """Recursively quantize floats so JSON output is stable and diffable."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return quantize(obj)
    if isinstance(obj, dict):
        return {k: json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_ready(v) for v in obj]
    if hasattr(obj, "tolist"):
        return json_ready(obj.tolist())
    return obj


def dump_json(data: dict, path) -> None:
    Path(path).write_text(json.dumps(json_ready(data), indent=2) + "\n")


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise SceneParseError(f"{where}: missing required key '{key}'", field=key)
    return mapping[key]


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneParseError(f"{where}: expected a number, got {value!r}", field=where)
    if not math.isfinite(float(value)):
        raise SceneParseError(f"{where}: non-finite value", field=where)
    return float(value)


def _parse_skeleton(raw: dict) -> SkeletonLayout:
    if not isinstance(raw, dict):
        raise SceneParseError("skeleton: expected an object", field="skeleton")
    names = _require(raw, "joints", "skeleton")
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise SceneParseError("skeleton.joints: expected a list of names", field="skeleton.joints")
    regions_map = _require(raw, "regions", "skeleton")
    regions = []
    for name in names:
        if name not in regions_map:
            raise SceneParseError(
                f"skeleton.regions: joint '{name}' has no region", field="skeleton.regions"
            )
        regions.append(regions_map[name])
    parents_raw = _require(raw, "parents", "skeleton")
    if not isinstance(parents_raw, list) or len(parents_raw) != len(names):
        raise SceneParseError(
            "skeleton.parents: expected one entry per joint", field="skeleton.parents"
        )
    parents = tuple(None if p is None else int(p) for p in parents_raw)

    def named_index(key: str, default: str) -> int:
        name = raw.get(key, default)
        if name not in names:
            raise SceneParseError(
                f"skeleton.{key}: no joint named '{name}'", field=f"skeleton.{key}"
            )
        return names.index(name)

    try:
        return SkeletonLayout(
            joint_names=tuple(names),
            joint_regions=tuple(regions),
            parents=parents,
            torso_center_index=named_index("torso_center", "spine"),
            head_index=named_index("head", "head"),
            pelvis_index=named_index("pelvis", "pelvis"),
            actor_height=_number(raw.get("actor_height", 1.8), "skeleton.actor_height"),
        )
    except SceneParseError:
        raise
    except Exception as exc:
        raise SceneParseError(f"skeleton: {exc}", field="skeleton") from exc


def _parse_intrinsics(raw: dict) -> CameraIntrinsics:
    if not isinstance(raw, dict):
        raise SceneParseError("intrinsics: expected an object", field="intrinsics")
    defaults = CameraIntrinsics()
    try:
        return CameraIntrinsics(
            focal_length=_number(raw.get("focal_length", defaults.focal_length), "intrinsics.focal_length"),
            sensor_width=_number(raw.get("sensor_width", defaults.sensor_width), "intrinsics.sensor_width"),
            sensor_height=_number(raw.get("sensor_height", defaults.sensor_height), "intrinsics.sensor_height"),
            frame_width=int(raw.get("frame_width", defaults.frame_width)),
            frame_height=int(raw.get("frame_height", defaults.frame_height)),
        )
    except SceneParseError:
        raise
    except Exception as exc:
        raise SceneParseError(f"intrinsics: {exc}", field="intrinsics") from exc


def _parse_camera(raw) -> CameraPlacement:
    if not isinstance(raw, dict):
        raise SceneParseError("camera: expected an object", field="camera")
    pose = _require(raw, "pose", "camera")
    if not isinstance(pose, list) or len(pose) != 6:
        raise SceneParseError("camera.pose: expected 6 numbers", field="camera.pose")
    values = [_number(v, f"camera.pose[{i}]") for i, v in enumerate(pose)]
    unit = raw.get("angle_unit", "radians")
    if unit not in ("radians", "degrees"):
        raise SceneParseError(
            f"camera.angle_unit: expected 'radians' or 'degrees', got {unit!r}",
            field="camera.angle_unit",
        )
    if unit == "degrees":
        values[3:] = [math.radians(v) for v in values[3:]]
    return CameraPlacement(DofVector(*values))


def _parse_frames(raw, layout: SkeletonLayout) -> list:
    if not isinstance(raw, list):
        raise SceneParseError("frames: expected a list of frames", field="frames")
    if len(raw) < 2:
        raise SceneParseError(
            f"frames: T >= 2 required, got T = {len(raw)}", field="frames"
        )
    joint_count = layout.joint_count
    frames = []
    for t, frame in enumerate(raw):
        if not isinstance(frame, list) or len(frame) != joint_count:
            got = len(frame) if isinstance(frame, list) else type(frame).__name__
            raise SceneParseError(
                f"frames[{t}]: expected {joint_count} joints, got {got}", field="frames"
            )
        rows = []
        for j, joint in enumerate(frame):
            name = layout.joint_names[j]
            if not isinstance(joint, list) or len(joint) != 6:
                raise SceneParseError(
                    f"frames[{t}], joint {j} ('{name}'): expected 6 numbers",
                    field="frames",
                )
            rows.append([_number(v, f"frames[{t}], joint {j} ('{name}')") for v in joint])
        frames.append(rows)
    return frames


def scene_from_dict(raw: dict, name: str = "scene") -> Scene:
    if not isinstance(raw, dict):
        raise SceneParseError("scene: top level must be an object", field="")
    layout = _parse_skeleton(raw["skeleton"]) if "skeleton" in raw else DEFAULT_LAYOUT
    frames = _parse_frames(_require(raw, "frames", "scene"), layout)
    fps = _number(raw.get("fps", 30.0), "fps")
    if fps <= 0:
        raise SceneParseError(f"fps: must be positive, got {fps}", field="fps")
    emotion_value = _number(_require(raw, "emotion", "scene"), "emotion")
    if emotion_value <= 0:
        raise SceneParseError("emotion must be positive", field="emotion")
    e_max = _number(raw.get("emotion_max", 4.0), "emotion_max")
    if emotion_value > e_max:
        raise SceneParseError(
            f"emotion must be <= emotion_max ({e_max}), got {emotion_value}", field="emotion"
        )
    camera = _parse_camera(_require(raw, "camera", "scene"))
    intrinsics = _parse_intrinsics(raw["intrinsics"]) if "intrinsics" in raw else CameraIntrinsics()
    try:
        poses = ActorPoseSequence(frames, fps)
        return Scene(
            poses=poses,
            emotion=EmotionFactor(emotion_value, e_max),
            camera=camera,
            layout=layout,
            intrinsics=intrinsics,
            name=str(raw.get("name", name)),
        )
    except SceneParseError:
        raise
    except Exception as exc:
        raise SceneParseError(f"scene: {exc}", field="") from exc


def load_scene(path) -> Scene:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise SceneParseError(f"scene file not found: {path}", path=str(path)) from None
    except json.JSONDecodeError as exc:
        raise SceneParseError(f"scene file is not valid JSON: {exc}", path=str(path)) from exc
    return scene_from_dict(raw, name=path.stem)


def scene_to_dict(scene: Scene) -> dict:
    layout = scene.layout
    return {
        "name": scene.name,
        "fps": scene.poses.fps,
        "emotion": scene.emotion.value,
        "emotion_max": scene.emotion.e_max,
        "camera": {
            "pose": list(scene.camera.as_array()),
            "angle_unit": "radians",
        },
        "intrinsics": {
            "focal_length": scene.intrinsics.focal_length,
            "sensor_width": scene.intrinsics.sensor_width,
            "sensor_height": scene.intrinsics.sensor_height,
            "frame_width": scene.intrinsics.frame_width,
            "frame_height": scene.intrinsics.frame_height,
        },
        "skeleton": {
            "joints": list(layout.joint_names),
            "regions": dict(zip(layout.joint_names, layout.joint_regions)),
            "parents": [None if p is None else int(p) for p in layout.parents],
            "torso_center": layout.joint_names[layout.torso_center_index],
            "head": layout.joint_names[layout.head_index],
            "pelvis": layout.joint_names[layout.pelvis_index],
            "actor_height": layout.actor_height,
        },
        "frames": scene.poses.data.tolist(),
    }


def save_scene(scene: Scene, path) -> None:
    # Full float repr (not quantized) so load(save(scene)) is bit-exact.
    Path(path).write_text(json.dumps(scene_to_dict(scene), indent=1) + "\n")


def write_trajectory(path, trajectory: CameraTrajectory, provenance: dict = None) -> Path:
    """Write rows as CSV and a JSON sidecar with fps + provenance."""
    path = Path(path)
    lines = [",".join(TRAJECTORY_COLUMNS)]
    for t, row in enumerate(trajectory.data):
        lines.append(",".join([str(t)] + [f"{v:.9g}" for v in row]))
    path.write_text("\n".join(lines) + "\n")
    sidecar = {
        "kind": "camera-trajectory",
        "columns": list(TRAJECTORY_COLUMNS),
        "frames": len(trajectory),
        "fps": trajectory.fps,
    }
    sidecar.update(provenance or {})
    dump_json(sidecar, path.with_suffix(".json"))
    return path


def read_trajectory(path, fps: float = None) -> CameraTrajectory:
    """Read a trajectory CSV; fps comes from the sidecar unless given."""
    path = Path(path)
    if fps is None:
        sidecar = path.with_suffix(".json")
        if not sidecar.exists():
            raise SceneParseError(
                f"trajectory sidecar not found ({sidecar.name}); pass fps explicitly",
                path=str(path),
            )
        meta = json.loads(sidecar.read_text())
        fps = _number(meta.get("fps"), "sidecar.fps") if meta.get("fps") is not None else None
        if fps is None:
            raise SceneParseError("trajectory sidecar has no fps", path=str(sidecar))
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise SceneParseError(f"trajectory file not found: {path}", path=str(path)) from None
    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise SceneParseError("trajectory file is empty", path=str(path)) from None
    if tuple(header) != TRAJECTORY_COLUMNS:
        raise SceneParseError(
            f"trajectory header must be {','.join(TRAJECTORY_COLUMNS)}", path=str(path)
        )
    rows = []
    for line_no, row in enumerate(reader):
        if not row:
            continue
        if len(row) != 7:
            raise SceneParseError(
                f"trajectory row {line_no}: expected 7 columns, got {len(row)}",
                path=str(path),
            )
        try:
            index = int(row[0])
            values = [float(v) for v in row[1:]]
        except ValueError as exc:
            raise SceneParseError(
                f"trajectory row {line_no}: {exc}", path=str(path)
            ) from None
        if index != len(rows):
            raise SceneParseError(
                f"trajectory row {line_no}: frame index out of order", path=str(path)
            )
        rows.append([_number(v, f"trajectory row {line_no}") for v in values])
    if not rows:
        raise SceneParseError("trajectory has no rows", path=str(path))
    return CameraTrajectory(rows, fps)
