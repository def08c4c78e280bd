"""Deterministic SVG previews of one shot: thirds grid, skeleton, candidates.

SVGs are built as plain strings (no rendering library) so repeated runs are
byte-identical.  Pixel coordinates follow the projection convention: origin
top-left, u right, v down, which matches SVG's own coordinate system.
"""

from __future__ import annotations

from .aesthetics import (
    alignment_candidates,
    head_pelvis_diff,
    relative_angle,
    stand_threshold,
)
from .projection import gaussian_body_weights, project_points, weighted_center
from .scene import ActorPose, CameraIntrinsics, SkeletonLayout


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def _line(x1, y1, x2, y2, cls: str) -> str:
    return (
        f'<line class="{cls}" x1="{_fmt(x1)}" y1="{_fmt(y1)}" '
        f'x2="{_fmt(x2)}" y2="{_fmt(y2)}"/>'
    )


STYLE = (
    ".backdrop{fill:#101418;}"
    ".thirds{stroke:#3b4752;stroke-width:2;}"
    ".candidate{stroke:#d8a032;stroke-width:3;stroke-dasharray:14 10;}"
    ".bone{stroke:#7fd4a8;stroke-width:3;stroke-linecap:round;}"
    ".joint{fill:#c8e8ff;}"
    ".body-center{fill:none;stroke:#ff6b6b;stroke-width:3;}"
    ".annotation{fill:#e0e6ec;font:28px monospace;}"
)


def render_shot_svg(
    pose: ActorPose,
    camera_world,
    intrinsics: CameraIntrinsics,
    layout: SkeletonLayout,
) -> str:
    """SVG of the frame seen from ``camera_world`` (a world-frame 6-vector)."""
    width, height = intrinsics.frame_width, intrinsics.frame_height
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<style>{STYLE}</style>",
        f'<rect class="backdrop" x="0" y="0" width="{width}" height="{height}"/>',
    ]
    # Exactly four one-third grid lines.
    for k in (1, 2):
        parts.append(_line(k * width / 3.0, 0, k * width / 3.0, height, "thirds"))
        parts.append(_line(0, k * height / 3.0, width, k * height / 3.0, "thirds"))

    uv, _, on = project_points(pose.positions, camera_world, intrinsics)
    if not on.any():
        parts.append(
            f'<text class="annotation" x="24" y="{height - 24}">actor off-frame</text>'
        )
        parts.append("</svg>")
        return "\n".join(parts)

    center = weighted_center(uv, on, gaussian_body_weights(layout))
    cands = alignment_candidates(
        head_pelvis_diff(pose, layout),
        relative_angle(pose, camera_world, layout).degrees,
        width,
        height,
        center,
        stand_threshold(layout),
    )
    candidate_points = [cands.first] if cands.single else [cands.first, cands.second]
    for point in candidate_points:
        if cands.orientation == "vertical":
            parts.append(_line(point[0], 0, point[0], height, "candidate"))
        else:
            parts.append(_line(0, point[1], width, point[1], "candidate"))

    for j, parent in enumerate(layout.parents):
        if parent is None or not (on[j] and on[parent]):
            continue
        parts.append(_line(uv[j, 0], uv[j, 1], uv[parent, 0], uv[parent, 1], "bone"))
    for j in range(layout.joint_count):
        if on[j]:
            parts.append(
                f'<circle class="joint" cx="{_fmt(uv[j, 0])}" cy="{_fmt(uv[j, 1])}" r="4"/>'
            )
    parts.append(
        f'<circle class="body-center" cx="{_fmt(center[0])}" cy="{_fmt(center[1])}" r="8"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts)
