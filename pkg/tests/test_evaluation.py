"""Immersion metrics: point loss, sync distance, correlations, score."""

import math

import numpy as np
import pytest

from cinepath import CameraIntrinsics, CameraTrajectory, immersion_score, spatial_sync
from cinepath.errors import ConfigError, TrajectoryMismatchError, UndefinedMetricError
from cinepath.evaluation import (
    CorrelationTriple,
    adj_dis,
    combined_trajectory_objective,
    emotion_correlation,
    hausdorff_distance,
    minmax_normalize,
    point_loss,
    rot_shift,
    spatial_sync_distance,
    vis_acc,
)
from cinepath.projection import visibility_vector
from cinepath.scene import DEFAULT_LAYOUT
from cinepath.shakiness import shakiness_distance, shakiness_vector
from oracles import brute_force_hausdorff, brute_force_point_loss
from scenegen import aimed_placement, make_sequence, standing_pose

INTR = CameraIntrinsics()


def _traj(rows, fps=30.0):
    return CameraTrajectory(np.asarray(rows, dtype=float), fps)


def test_point_loss_identical_is_total_variation():
    rows = np.array([[0.0] * 6, [1.0] * 6, [3.0] * 6])
    traj = _traj(rows)
    # zero l2; interior TV counts both neighbor steps once per axis
    assert point_loss(traj, traj) == pytest.approx(6 * (2.0 + 1.0))


def test_point_loss_matches_brute_force():
    rng = np.random.default_rng(61)
    for _ in range(50):
        t = int(rng.integers(2, 40))
        ref = rng.normal(size=(t, 6))
        gen = rng.normal(size=(t, 6))
        assert point_loss(_traj(ref), _traj(gen)) == pytest.approx(
            brute_force_point_loss(ref, gen), rel=1e-12
        )


def test_point_loss_length_mismatch():
    with pytest.raises(TrajectoryMismatchError):
        point_loss(_traj(np.zeros((3, 6))), _traj(np.zeros((4, 6))))


def test_combined_objective_hand_weights():
    rng = np.random.default_rng(62)
    ref = rng.normal(size=(20, 6)).cumsum(axis=0)
    gen = ref + rng.normal(scale=0.1, size=(20, 6))
    tr, tg = _traj(ref), _traj(gen)
    expect = 10.0 * point_loss(tr, tg) + 1.0 * shakiness_distance(
        shakiness_vector(tr), shakiness_vector(tg)
    )
    assert combined_trajectory_objective(tr, tg) == pytest.approx(expect, rel=1e-12)
    assert combined_trajectory_objective(tr, tg, 2.0, 0.5) == pytest.approx(
        2.0 * point_loss(tr, tg)
        + 0.5 * shakiness_distance(shakiness_vector(tr), shakiness_vector(tg)),
        rel=1e-12,
    )


def test_minmax_normalize():
    f = np.array([[0.0, 5.0], [1.0, 5.0], [4.0, 5.0]])
    out, degenerate = minmax_normalize(f)
    assert np.allclose(out[:, 0], [0.0, 0.25, 1.0])
    assert np.array_equal(out[:, 1], np.zeros(3))
    assert degenerate == (1,)


def test_hausdorff_matches_brute_force():
    rng = np.random.default_rng(63)
    for _ in range(60):
        a = rng.normal(size=(int(rng.integers(1, 40)), 4))
        b = rng.normal(size=(int(rng.integers(1, 40)), 4))
        got = hausdorff_distance(a, b)
        assert got == pytest.approx(brute_force_hausdorff(a, b), abs=1e-12)
        assert got == pytest.approx(hausdorff_distance(b, a), abs=1e-12)
    pts = rng.normal(size=(10, 3))
    assert hausdorff_distance(pts, pts.copy()) == 0.0


def test_spatial_sync_mismatch_and_flags():
    seq = make_sequence("sway", frame_count=20, seed=3)
    with pytest.raises(TrajectoryMismatchError):
        spatial_sync(seq, _traj(np.zeros((19, 6))))
    static = _traj(np.tile([1.0, 2, 3, 0.1, 0.2, 0.3], (20, 1)))
    sync = spatial_sync(seq, static)
    assert sync.degenerate_camera_axes == (0, 1, 2, 3, 4, 5)
    # scripted motion has no joint-angle channels
    assert set(sync.degenerate_actor_axes) == {3, 4, 5}
    assert sync.distance > 0


def test_spatial_sync_axis_subset():
    seq = make_sequence("drift", frame_count=25, seed=5)
    rows = np.zeros((25, 6))
    rows[:, 0] = np.linspace(0, 2, 25) ** 2
    traj = _traj(rows)
    full = spatial_sync(seq, traj)
    sub = spatial_sync(seq, traj, axes=(0, 1, 2))
    assert sub.distance <= full.distance + 1e-12
    assert len(sub.degenerate_camera_axes) == 2  # y and z within the subset


def test_emotion_correlation_perfect_orders():
    e = [0.5, 0.75, 1.0, 1.5, 2.0]
    up = [v**1.5 for v in e]
    corr = emotion_correlation(e, up)
    assert corr.srcc == pytest.approx(1.0)
    assert corr.krcc == pytest.approx(1.0)
    assert 0.97 < corr.pcc <= 1.0
    down = emotion_correlation(e, up[::-1])
    assert down.srcc == pytest.approx(-1.0)


def test_emotion_correlation_guards():
    with pytest.raises(UndefinedMetricError):
        emotion_correlation([1.0, 2.0], [0.1, 0.2])
    with pytest.raises(UndefinedMetricError):
        emotion_correlation([1.0, 1.0, 1.0], [0.1, 0.2, 0.3])
    with pytest.raises(UndefinedMetricError):
        emotion_correlation([1.0, 2.0, 3.0], [0.5, 0.5, 0.5])


def test_rot_shift_adj_dis_vis_acc():
    pose = standing_pose()
    pelvis = pose.positions[DEFAULT_LAYOUT.pelvis_index]
    camera = aimed_placement(pelvis + [-3.5, 0.3, 0.5], pose.positions[1], np.zeros(3)).as_array()
    assert rot_shift(pose, camera, INTR, DEFAULT_LAYOUT) >= 0.0

    after = camera + np.array([0.5, -0.25, 0.1, 0.0, 0.0, 0.0])
    assert adj_dis(camera, after) == pytest.approx((0.5 + 0.25 + 0.1) / 3.0)
    assert adj_dis(camera, camera) == 0.0

    assert vis_acc(pose, camera, camera, INTR) == 100.0
    flipped = camera.copy()
    flipped[3] += math.pi
    before_vis = visibility_vector(pose, camera, INTR)
    after_vis = visibility_vector(pose, flipped, INTR)
    flips = int(np.count_nonzero(before_vis != after_vis))
    assert vis_acc(pose, camera, flipped, INTR) == pytest.approx(100.0 * (17 - flips) / 17)


def test_immersion_score_components():
    report = immersion_score(
        hd=1.0, correlations=0.8, rot_shift_px=0.0, vis_acc_pct=100.0
    )
    assert report.i_s == pytest.approx(0.5)
    assert report.i_e == pytest.approx(0.8)
    assert report.i_a == pytest.approx(1.0)
    assert report.score == pytest.approx((0.5 + 0.8 + 1.0) / 3.0)
    d = report.to_dict()
    assert set(d) >= {"i_s", "i_e", "i_a", "alpha", "beta", "score"}


def test_immersion_score_floors_and_caps():
    # negative correlation floors the emotional term at zero
    report = immersion_score(0.0, -0.9, 0.0, 100.0)
    assert report.i_e == 0.0
    # a framing miss past one diagonal cannot push the aesthetic term negative
    report = immersion_score(0.0, 1.0, 10.0 * INTR.frame_diagonal, 0.0)
    assert report.i_a == 0.0
    assert report.score >= 0.0


def test_immersion_score_accepts_correlation_triple():
    triple = CorrelationTriple(0.9, 0.95, 0.85)
    report = immersion_score(0.5, triple, 100.0, 90.0)
    assert report.i_e == pytest.approx(0.9)
    assert report.raw["pcc"] == pytest.approx(0.9)


def test_immersion_score_corner_weights():
    report = immersion_score(0.25, 0.6, 200.0, 80.0, alpha=1.0, beta=0.0)
    assert report.score == report.i_s
    report = immersion_score(0.25, 0.6, 200.0, 80.0, alpha=0.0, beta=1.0)
    assert report.score == report.i_e
    report = immersion_score(0.25, 0.6, 200.0, 80.0, alpha=0.0, beta=0.0)
    assert report.score == report.i_a


def test_immersion_score_validation():
    with pytest.raises(ConfigError):
        immersion_score(0.5, 0.5, 10.0, 50.0, alpha=0.7, beta=0.7)
    with pytest.raises(ConfigError):
        immersion_score(0.5, 0.5, 10.0, 50.0, alpha=-0.1, beta=0.5)
    with pytest.raises(UndefinedMetricError):
        immersion_score(-1.0, 0.5, 10.0, 50.0)
    with pytest.raises(UndefinedMetricError):
        immersion_score(float("nan"), 0.5, 10.0, 50.0)
    with pytest.raises(UndefinedMetricError):
        immersion_score(0.5, 0.5, 10.0, 150.0)
    with pytest.raises(UndefinedMetricError):
        immersion_score(0.5, 0.5, -10.0, 50.0)


def test_sync_distance_tracks_better_than_static():
    # one deterministic spot check; the full-suite sweep lives in acceptance
    from cinepath.scene import compute_delta
    from cinepath.synthesis import region_saliency, tracking_trajectory
    from scenegen import make_scene

    scene = make_scene("sway", frame_count=90, seed=101)
    sal = region_saliency(compute_delta(scene.poses), scene.layout)
    track = tracking_trajectory(scene.poses, scene.camera, sal, scene.layout)
    static = _traj(np.tile(scene.camera.as_array(), (90, 1)), scene.poses.fps)
    assert spatial_sync_distance(scene.poses, track) < spatial_sync_distance(
        scene.poses, static
    )
