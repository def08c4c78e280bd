"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written from the definitions with plain
loops or an alternative library route so the tests never reuse package code
paths for their own expected values.
"""

import math

import numpy as np
from scipy.spatial.transform import Rotation


def brute_force_axis_shakiness(values, eps=1e-9):
    """Literal loop evaluation of the per-axis shakiness statistic."""
    c = [float(v) for v in values]
    frame_count = len(c)
    stationary = []
    for t in range(1, frame_count - 1):
        d_prev = c[t] - c[t - 1]
        d_next = c[t + 1] - c[t]
        s_prev = 0 if abs(d_prev) < eps else (1 if d_prev > 0 else -1)
        s_next = 0 if abs(d_next) < eps else (1 if d_next > 0 else -1)
        if s_prev * s_next == -1 or (s_prev != 0 and s_next == 0):
            stationary.append(t)
    if len(stationary) < 2:
        return 0.0
    total = 0.0
    for i in range(1, len(stationary)):
        a, b = stationary[i - 1], stationary[i]
        total += abs(c[b] - c[a]) / (b - a)
    return total


def brute_force_hausdorff(set_a, set_b):
    """O(n*m) double-loop symmetric Hausdorff distance."""
    a = [tuple(float(v) for v in row) for row in np.atleast_2d(set_a)]
    b = [tuple(float(v) for v in row) for row in np.atleast_2d(set_b)]

    def directed(xs, ys):
        worst = 0.0
        for x in xs:
            best = min(math.dist(x, y) for y in ys)
            worst = max(worst, best)
        return worst

    return max(directed(a, b), directed(b, a))


# Canonical camera basis at yaw = pitch = roll = 0, columns (right, down,
# forward) in world coordinates: right = -y, down = -z, forward = +x.
_CANONICAL_BASIS = np.array(
    [
        [0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
    ]
)


def oracle_camera_basis(yaw, pitch, roll):
    """Camera basis via step-by-step axis-angle rotations (scipy Rotation).

    Yaw rotates about world +z; pitch about the yawed camera-right axis;
    roll about the resulting forward axis.  Returns the 3x3 matrix whose
    columns are (right, down, forward).
    """
    r_yaw = Rotation.from_rotvec([0.0, 0.0, yaw])
    right_after_yaw = r_yaw.apply(_CANONICAL_BASIS[:, 0])
    r_pitch = Rotation.from_rotvec(pitch * right_after_yaw)
    forward_after_pitch = (r_pitch * r_yaw).apply(_CANONICAL_BASIS[:, 2])
    r_roll = Rotation.from_rotvec(roll * forward_after_pitch)
    return (r_roll * r_pitch * r_yaw).as_matrix() @ _CANONICAL_BASIS


def oracle_project(points, camera6, focal_length, sensor_width, sensor_height,
                   frame_width, frame_height):
    """Project points through the oracle basis; returns (uv, depth, on)."""
    camera6 = np.asarray(camera6, dtype=float)
    basis = oracle_camera_basis(*camera6[3:])
    rel = np.atleast_2d(np.asarray(points, dtype=float)) - camera6[:3]
    cam_coords = rel @ basis  # columns: right, down, forward components
    depth = cam_coords[:, 2]
    uv = np.full((len(rel), 2), np.nan)
    front = depth > 0
    uv[front, 0] = frame_width / 2.0 + focal_length * (
        cam_coords[front, 0] / depth[front]
    ) * (frame_width / sensor_width)
    uv[front, 1] = frame_height / 2.0 + focal_length * (
        cam_coords[front, 1] / depth[front]
    ) * (frame_height / sensor_height)
    on = (
        front
        & (uv[:, 0] >= 0)
        & (uv[:, 0] < frame_width)
        & (uv[:, 1] >= 0)
        & (uv[:, 1] < frame_height)
    )
    return uv, depth, on


def brute_force_point_loss(ref, gen):
    """Loop evaluation of squared L2 plus interior total variation."""
    ref = np.asarray(ref, dtype=float)
    gen = np.asarray(gen, dtype=float)
    total = 0.0
    for t in range(ref.shape[0]):
        for q in range(ref.shape[1]):
            total += (ref[t, q] - gen[t, q]) ** 2
    for t in range(1, ref.shape[0] - 1):
        for q in range(ref.shape[1]):
            total += abs(gen[t + 1, q] - gen[t, q]) + abs(gen[t, q] - gen[t - 1, q])
    return total


def triangle_wave(amplitude, half_period, half_periods):
    """Sampled triangle wave starting at -amplitude; one value per frame."""
    values = []
    level = -amplitude
    values.append(level)
    for k in range(half_periods):
        target = amplitude if k % 2 == 0 else -amplitude
        step = (target - level) / half_period
        for i in range(1, half_period + 1):
            values.append(level + step * i)
        level = target
    return np.array(values)
