"""Rule-of-thirds framing: branches, losses, first-frame adjustment."""

import math

import numpy as np
import pytest

from cinepath import (
    CameraIntrinsics,
    CameraTrajectory,
    adjust,
    apply_offset,
)
from cinepath.aesthetics import (
    STAND_THRESHOLD_FRACTION,
    TAU_COMPOSITION,
    AestheticWeights,
    CameraOffset,
    OffsetBounds,
    actor_forward,
    aesthetic_loss,
    adjustment_loss,
    alignment_candidates,
    composition_loss,
    head_pelvis_diff,
    relative_angle,
    stand_threshold,
    visualization_loss,
)
from cinepath.errors import AdjustmentError, InvalidSequenceError
from cinepath.projection import body_center, visibility_vector
from cinepath.scene import DEFAULT_LAYOUT, ActorPose
from scenegen import (
    aimed_placement,
    crouch_positions,
    lying_positions,
    standing_pose,
    template_positions,
)

INTR = CameraIntrinsics()


def _pose_from_positions(positions):
    joints = np.zeros((17, 6))
    joints[:, :3] = positions
    return ActorPose(joints)


def _world_camera(position, target):
    placement = aimed_placement(position, target, anchor=np.zeros(3))
    return placement.as_array()


def test_head_pelvis_diff_and_threshold():
    assert stand_threshold(DEFAULT_LAYOUT) == pytest.approx(
        STAND_THRESHOLD_FRACTION * 1.8
    )
    standing = standing_pose()
    assert head_pelvis_diff(standing, DEFAULT_LAYOUT) == pytest.approx(0.75)
    assert head_pelvis_diff(standing, DEFAULT_LAYOUT) > stand_threshold(DEFAULT_LAYOUT)
    lying = _pose_from_positions(lying_positions())
    assert head_pelvis_diff(lying, DEFAULT_LAYOUT) == pytest.approx(0.0, abs=1e-12)
    crouch = _pose_from_positions(crouch_positions())
    assert head_pelvis_diff(crouch, DEFAULT_LAYOUT) < stand_threshold(DEFAULT_LAYOUT)


def test_actor_forward_from_shoulders():
    forward, fallback = actor_forward(standing_pose(), DEFAULT_LAYOUT)
    assert not fallback
    assert np.allclose(forward, [1.0, 0.0, 0.0], atol=1e-12)
    turned, fallback = actor_forward(standing_pose(math.pi / 2), DEFAULT_LAYOUT)
    assert not fallback
    assert np.allclose(turned, [0.0, 1.0, 0.0], atol=1e-12)


def test_actor_forward_fallbacks():
    # collapsed shoulders: fall back to the horizontal pelvis-to-head direction
    positions = template_positions()
    positions[5] = positions[8]
    positions[4, 0] += 0.3  # lean the head forward
    forward, fallback = actor_forward(_pose_from_positions(positions), DEFAULT_LAYOUT)
    assert fallback
    assert np.allclose(forward, [1.0, 0.0, 0.0], atol=1e-12)

    # head exactly above pelvis as well: defaults to +x
    positions = template_positions()
    positions[5] = positions[8]
    forward, fallback = actor_forward(_pose_from_positions(positions), DEFAULT_LAYOUT)
    assert fallback
    assert np.allclose(forward, [1.0, 0.0, 0.0])


def test_relative_angle_quadrants():
    pose = standing_pose()  # facing +x, right side toward -y
    pelvis = pose.positions[DEFAULT_LAYOUT.pelvis_index]
    cases = [
        ((3.0, 0.0, 0.0), 0.0),
        ((0.0, -3.0, 0.0), 90.0),
        ((-3.0, 0.0, 0.0), 180.0),
        ((0.0, 3.0, 0.0), 270.0),
        ((3.0, -3.0, 0.0), 45.0),
    ]
    for offset, expected in cases:
        camera = _world_camera(pelvis + offset, pelvis)
        ra = relative_angle(pose, camera, DEFAULT_LAYOUT)
        assert not ra.used_fallback
        assert ra.degrees == pytest.approx(expected, abs=1e-9)


def test_relative_angle_overhead_fallback():
    pose = standing_pose()
    pelvis = pose.positions[DEFAULT_LAYOUT.pelvis_index]
    camera = _world_camera(pelvis + [0.0, 0.0, 3.0], pelvis)
    ra = relative_angle(pose, camera, DEFAULT_LAYOUT)
    assert ra.used_fallback
    assert ra.degrees == 0.0


def test_alignment_candidates_truth_table():
    w, h, uc, vc = 1920, 1080, 777.0, 444.0
    stand, lie = 0.75, 0.1
    threshold = 0.72
    u1, u2, v1, v2 = 640.0, 1280.0, 360.0, 720.0

    def pair(c):
        return tuple(c.first), tuple(c.second)

    front = alignment_candidates(stand, 0.0, w, h, (uc, vc), threshold)
    assert front.orientation == "vertical" and not front.single
    assert pair(front) == ((u1, vc), (u2, vc))

    right = alignment_candidates(stand, 90.0, w, h, (uc, vc), threshold)
    assert right.single and pair(right) == ((u1, vc), (u1, vc))

    left = alignment_candidates(stand, 270.0, w, h, (uc, vc), threshold)
    assert left.single and tuple(left.first) == (u2, vc)

    back = alignment_candidates(stand, 180.0, w, h, (uc, vc), threshold)
    assert pair(back) == ((u1, vc), (u2, vc))

    lie_front = alignment_candidates(lie, 0.0, w, h, (uc, vc), threshold)
    assert lie_front.orientation == "vertical"
    assert pair(lie_front) == ((u1, vc), (u2, vc))

    lie_right = alignment_candidates(lie, 90.0, w, h, (uc, vc), threshold)
    assert lie_right.orientation == "horizontal"
    assert pair(lie_right) == ((uc, v1), (uc, v2))

    lie_left = alignment_candidates(lie, 270.0, w, h, (uc, vc), threshold)
    assert lie_left.orientation == "horizontal"
    assert pair(lie_left) == ((uc, v1), (uc, v2))

    lie_back = alignment_candidates(lie, 180.0, w, h, (uc, vc), threshold)
    assert lie_back.orientation == "vertical"
    assert pair(lie_back) == ((u1, vc), (u2, vc))


def test_alignment_side_intervals_are_closed():
    w, h, uc, vc = 1920, 1080, 500.0, 500.0
    for angle in (45.0, 135.0):
        assert alignment_candidates(0.75, angle, w, h, (uc, vc), 0.72).single
    for angle in (225.0, 315.0):
        assert alignment_candidates(0.75, angle, w, h, (uc, vc), 0.72).single
    for angle in (44.999, 135.001, 224.999, 315.001):
        assert not alignment_candidates(0.75, angle, w, h, (uc, vc), 0.72).single


def test_composition_loss_matches_candidate_distance():
    pose = standing_pose()
    pelvis = pose.positions[DEFAULT_LAYOUT.pelvis_index]
    camera = _world_camera(pelvis + [-3.5, 0.4, 0.4], pelvis + [0.0, 0.0, 0.3])
    loss = composition_loss(pose, camera, INTR, DEFAULT_LAYOUT)
    center = body_center(pose, camera, INTR, DEFAULT_LAYOUT)
    cands = alignment_candidates(
        head_pelvis_diff(pose, DEFAULT_LAYOUT),
        relative_angle(pose, camera, DEFAULT_LAYOUT).degrees,
        INTR.frame_width,
        INTR.frame_height,
        center,
        stand_threshold(DEFAULT_LAYOUT),
    )
    d1 = float(np.linalg.norm(center - cands.first))
    d2 = float(np.linalg.norm(center - cands.second))
    assert loss == pytest.approx(min(d1, d2), abs=1e-9)


def test_composition_loss_blank_is_diagonal():
    pose = standing_pose()
    camera = np.array([-4.0, 0.0, 1.0, math.pi, 0.0, 0.0])  # looking away
    assert composition_loss(pose, camera, INTR, DEFAULT_LAYOUT) == INTR.frame_diagonal


def test_soft_composition_bounds_hard():
    rng = np.random.default_rng(51)
    pose = standing_pose()
    pelvis = pose.positions[DEFAULT_LAYOUT.pelvis_index]
    checked = 0
    while checked < 25:
        offset = rng.uniform([-5, -5, 0.2], [5, 5, 2.5])
        camera = _world_camera(pelvis + offset, pelvis + rng.uniform(-0.3, 0.3, 3))
        if not visibility_vector(pose, camera, INTR).any():
            continue
        hard = composition_loss(pose, camera, INTR, DEFAULT_LAYOUT, smoothed=False)
        soft = composition_loss(pose, camera, INTR, DEFAULT_LAYOUT, smoothed=True)
        assert hard <= soft + 1e-12
        assert soft <= hard + TAU_COMPOSITION * math.log(2.0) + 1e-12
        checked += 1


def test_adjustment_loss():
    offset = CameraOffset.from_array([3.0, 0.0, 4.0, 0.0, 0.0, 0.0])
    assert adjustment_loss(offset) == pytest.approx(5.0)
    assert adjustment_loss(np.zeros(6)) == 0.0
    weighted = adjustment_loss(offset, diagonal=[1.0, 1.0, 0.5, 1.0, 1.0, 1.0])
    assert weighted == pytest.approx(math.hypot(3.0, 2.0))


def test_visualization_loss_hard():
    pose = standing_pose()
    camera = _world_camera([-4.0, 0.3, 1.2], pose.positions[1])
    assert visualization_loss(pose, camera, camera, INTR) == 0.0
    flipped = camera.copy()
    flipped[3] += math.pi
    before = visibility_vector(pose, camera, INTR)
    after = visibility_vector(pose, flipped, INTR)
    expect = float(np.count_nonzero(before != after))
    assert visualization_loss(pose, camera, flipped, INTR) == expect
    assert expect == 17.0  # everything leaves the frame


def test_visualization_loss_smoothed_symmetric():
    pose = standing_pose()
    cam_a = _world_camera([-4.0, 0.3, 1.2], pose.positions[1])
    cam_b = cam_a + np.array([0.3, -0.2, 0.1, 0.05, -0.02, 0.0])
    ab = visualization_loss(pose, cam_a, cam_b, INTR, smoothed=True)
    ba = visualization_loss(pose, cam_b, cam_a, INTR, smoothed=True)
    assert ab == pytest.approx(ba, rel=1e-12)
    assert ab > 0.0


def test_aesthetic_loss_is_weighted_sum():
    pose = standing_pose()
    camera = _world_camera([-3.8, 0.5, 1.1], pose.positions[1])
    offset = np.array([0.2, -0.1, 0.05, 0.01, -0.02, 0.0])
    weights = AestheticWeights(1.0, 0.25, 0.01)
    total = aesthetic_loss(pose, camera, offset, INTR, DEFAULT_LAYOUT, weights)
    manual = (
        1.0 * composition_loss(pose, camera + offset, INTR, DEFAULT_LAYOUT)
        + 0.25 * adjustment_loss(offset)
        + 0.01 * visualization_loss(pose, camera, camera + offset, INTR)
    )
    assert total == pytest.approx(manual, rel=1e-12)


def test_weights_and_bounds_validation():
    with pytest.raises(InvalidSequenceError):
        AestheticWeights(-1.0, 0.25, 0.01)
    with pytest.raises(InvalidSequenceError):
        OffsetBounds(-1.0, 0.5)
    bounds = OffsetBounds(2.0, math.radians(30))
    assert np.allclose(bounds.halfwidths(), [2.0, 2.0, 2.0] + [math.radians(30)] * 3)
    assert bounds.contains(np.zeros(6))
    assert not bounds.contains([2.1, 0, 0, 0, 0, 0])


def test_adjust_improves_and_stays_bounded():
    pose = standing_pose()
    # aimed high and to the side so the framing starts visibly off
    camera = _world_camera([-3.5, 1.2, 1.6], pose.positions[1] + [0.0, 0.6, 0.5])
    weights = AestheticWeights()
    bounds = OffsetBounds()
    offset = adjust(pose, camera, INTR, DEFAULT_LAYOUT, weights, bounds, seed=0)
    assert bounds.contains(offset.as_array())
    before = aesthetic_loss(pose, camera, np.zeros(6), INTR, DEFAULT_LAYOUT, weights, smoothed=True)
    after = aesthetic_loss(pose, camera, offset.as_array(), INTR, DEFAULT_LAYOUT, weights, smoothed=True)
    assert after <= before + 1e-9
    # and the framing itself actually improved in the hard metric
    assert composition_loss(pose, camera + offset.as_array(), INTR, DEFAULT_LAYOUT) < (
        composition_loss(pose, camera, INTR, DEFAULT_LAYOUT)
    )


def test_adjust_deterministic():
    pose = standing_pose()
    camera = _world_camera([-3.0, -1.0, 1.4], pose.positions[1] + [0.0, -0.4, 0.3])
    a = adjust(pose, camera, INTR, DEFAULT_LAYOUT, seed=7)
    b = adjust(pose, camera, INTR, DEFAULT_LAYOUT, seed=7)
    assert np.array_equal(a.as_array(), b.as_array())


def test_adjust_blank_everywhere_raises():
    pose = standing_pose()
    camera = np.array([-4.0, 0.0, 1.0, math.pi, 0.0, 0.0])  # facing away
    tight = OffsetBounds(0.05, math.radians(2))
    with pytest.raises(AdjustmentError) as err:
        adjust(pose, camera, INTR, DEFAULT_LAYOUT, bounds=tight, seed=1)
    assert err.value.to_dict()["code"] == "adjustment-failed"


def test_apply_offset_shifts_every_row():
    rng = np.random.default_rng(53)
    rows = rng.normal(size=(25, 6))
    traj = CameraTrajectory(rows, fps=24.0)
    offset = CameraOffset.from_array([0.5, -0.25, 0.125, 0.0625, -0.03125, 0.015625])
    shifted = apply_offset(traj, offset)
    assert shifted.fps == traj.fps
    assert np.array_equal(shifted.data, rows + offset.as_array())
