"""Trajectory synthesis: saliency-weighted tracking plus calibrated shake.

The camera follows a per-frame target point (a saliency-weighted mean of the
body-region centroids), keeping the position offset it had at frame 0 and
looking at the target.  Emotion then sets a per-axis shakiness target
(base * E^kappa); a seeded sum of three incommensurate sinusoids is added per
axis with its amplitude bisected until the measured shakiness of the result
lands within tolerance of the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CalibrationError, InvalidSequenceError
from .scene import (
    REGIONS,
    ActorPoseSequence,
    CameraPlacement,
    CameraTrajectory,
    EmotionFactor,
    SkeletonLayout,
)
from .shakiness import axis_shakiness, shakiness_vector

DEFAULT_KAPPA = 1.5
DEFAULT_BASE_SHAKE = 0.1
DEFAULT_SHAKE_FREQUENCY = 4.0
DEFAULT_SMOOTH_WINDOW = 9
DEFAULT_SALIENCY_TEMPERATURE = 1.0
CALIBRATION_TOLERANCE = 0.05
CALIBRATION_MAX_ITER = 50

# Three incommensurate frequency ratios around the dominant frequency and
# their relative amplitudes.  Irrational-ish ratios keep the components from
# phase-locking into a periodic pattern.
SHAKE_FREQ_RATIOS = (0.7310, 1.0, 1.3170)
SHAKE_REL_AMPS = (0.55, 1.0, 0.40)


@dataclass(frozen=True)
class RegionSaliency:
    """Softmax weights over body regions; aligned with REGIONS order."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.shape != (len(REGIONS),):
            raise InvalidSequenceError(
                f"saliency: expected {len(REGIONS)} weights, got shape {w.shape}"
            )
        if np.any(w < 0) or np.any(w > 1) or not math.isclose(float(w.sum()), 1.0, abs_tol=1e-9):
            raise InvalidSequenceError("saliency: weights must lie in [0,1] and sum to 1")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def by_region(self) -> dict:
        return dict(zip(REGIONS, (float(w) for w in self.weights)))


def region_saliency(
    deltas: np.ndarray,
    layout: SkeletonLayout,
    temperature: float = DEFAULT_SALIENCY_TEMPERATURE,
) -> RegionSaliency:
    """Softmax over each region's mean absolute positional delta.

    Row 0 of compute_delta is zero padding and is excluded from the means.
    Regions with no joints in the layout get weight 0.
    """
    if temperature <= 0:
        raise InvalidSequenceError("saliency temperature must be positive")
    d = np.asarray(deltas, dtype=float)
    if d.ndim != 3 or d.shape[0] < 2:
        raise InvalidSequenceError(f"deltas: expected (T, J, 6) with T >= 2, got {d.shape}")
    energies = np.full(len(REGIONS), np.nan)
    for k, region in enumerate(REGIONS):
        idx = layout.region_indices(region)
        if len(idx):
            energies[k] = float(np.mean(d[1:, idx, :3]))
    present = np.isfinite(energies)
    scaled = energies[present] / temperature
    exp = np.exp(scaled - scaled.max())
    weights = np.zeros(len(REGIONS))
    weights[present] = exp / exp.sum()
    return RegionSaliency(weights)


def centered_moving_average(values, window: int) -> np.ndarray:
    """Moving average with a symmetric window that shrinks near the edges.

    Symmetric shrinking keeps the filter exact on linear inputs: the mean of
    a linear ramp over a window centered at t is the ramp's value at t.
    """
    if window < 1 or window % 2 == 0:
        raise InvalidSequenceError(f"smooth window must be odd and >= 1, got {window}")
    v = np.asarray(values, dtype=float)
    t_count = v.shape[0]
    half = window // 2
    out = np.empty_like(v)
    for t in range(t_count):
        r = min(half, t, t_count - 1 - t)
        out[t] = v[t - r : t + r + 1].mean(axis=0)
    return out


def saliency_targets(
    sequence: ActorPoseSequence, saliency: RegionSaliency, layout: SkeletonLayout
) -> np.ndarray:
    """Per-frame target point: saliency-weighted mean of region centroids, (T, 3)."""
    targets = np.zeros((sequence.frame_count, 3))
    for weight, region in zip(saliency.weights, REGIONS):
        if weight == 0.0:
            continue
        idx = layout.region_indices(region)
        targets += weight * sequence.positions[:, idx, :].mean(axis=1)
    return targets


def tracking_trajectory(
    sequence: ActorPoseSequence,
    camera: CameraPlacement,
    saliency: RegionSaliency,
    layout: SkeletonLayout,
    smooth_window: int = DEFAULT_SMOOTH_WINDOW,
) -> CameraTrajectory:
    """Follow the saliency target, preserving the frame-0 camera offset.

    The camera position is the smoothed target path shifted by the offset the
    initial placement had from the frame-0 target; yaw/pitch look at the
    (unsmoothed) target, roll is carried from the placement.  Output rows are
    actor-anchored like the input placement.
    """
    targets = saliency_targets(sequence, saliency, layout)
    anchor = sequence.data[0, layout.pelvis_index, :3]
    c0 = camera.as_array()
    offset = (c0[:3] + anchor) - targets[0]
    positions = centered_moving_average(targets + offset, smooth_window)

    look = targets - positions
    horiz = np.hypot(look[:, 0], look[:, 1])
    yaw = np.arctan2(look[:, 1], look[:, 0])
    pitch = np.arctan2(look[:, 2], horiz)
    # A zero look vector leaves the angle undefined: hold the previous
    # frame's aim (or the placement's for frame 0).
    degenerate = np.linalg.norm(look, axis=1) < 1e-12
    for t in range(sequence.frame_count):
        if degenerate[t]:
            yaw[t] = yaw[t - 1] if t else c0[3]
            pitch[t] = pitch[t - 1] if t else c0[4]
    yaw = np.unwrap(yaw)

    rows = np.empty((sequence.frame_count, 6))
    rows[:, :3] = positions - anchor
    rows[:, 3] = yaw
    rows[:, 4] = pitch
    rows[:, 5] = c0[5]
    return CameraTrajectory(rows, sequence.fps)


def target_shakiness(emotion: EmotionFactor, base, kappa: float = DEFAULT_KAPPA) -> np.ndarray:
    """Per-axis shakiness target: base * E^kappa (per-frame units)."""
    base = np.asarray(base, dtype=float)
    if base.shape != (6,) or np.any(base < 0) or not np.all(np.isfinite(base)):
        raise InvalidSequenceError("base shakiness must be 6 finite values >= 0")
    if not (math.isfinite(kappa) and kappa > 0):
        raise InvalidSequenceError(f"kappa must be positive, got {kappa}")
    return base * emotion.value**kappa


@dataclass(frozen=True)
class ShakeProfile:
    """Per-axis shakiness targets plus the dominant frequency and seed."""

    targets: np.ndarray
    frequency: float = DEFAULT_SHAKE_FREQUENCY
    seed: int = 0

    def __post_init__(self):
        t = np.array(self.targets, dtype=float)
        if t.shape != (6,) or np.any(t < 0) or not np.all(np.isfinite(t)):
            raise InvalidSequenceError("shake targets must be 6 finite values >= 0")
        t.flags.writeable = False
        object.__setattr__(self, "targets", t)
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            raise InvalidSequenceError(f"shake frequency must be positive, got {self.frequency}")
        object.__setattr__(self, "seed", int(self.seed))


def shake_waveforms(profile: ShakeProfile, frame_count: int, fps: float) -> np.ndarray:
    """Unit shake waveform per axis, shape (6, T), deterministic in the seed."""
    rng = np.random.default_rng(profile.seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(6, len(SHAKE_FREQ_RATIOS)))
    t = np.arange(frame_count) / fps
    waves = np.zeros((6, frame_count))
    for m, (ratio, rel) in enumerate(zip(SHAKE_FREQ_RATIOS, SHAKE_REL_AMPS)):
        waves += rel * np.sin(
            2.0 * np.pi * profile.frequency * ratio * t[None, :] + phases[:, m : m + 1]
        )
    return waves


def inject_shake(
    trajectory: CameraTrajectory,
    profile: ShakeProfile,
    tolerance: float = CALIBRATION_TOLERANCE,
    max_iterations: int = CALIBRATION_MAX_ITER,
) -> CameraTrajectory:
    """Add calibrated shake so measured per-axis shakiness meets the targets.

    Axes with a zero target are returned bit-identical.  Calibration bisects
    the waveform amplitude until the measured shakiness of (axis + amplitude
    * waveform) is within ``tolerance`` relative error of the target.
    """
    frame_count = len(trajectory)
    if frame_count < 3 and np.any(profile.targets > 0):
        raise InvalidSequenceError("shake injection needs at least 3 frames")
    waves = shake_waveforms(profile, frame_count, trajectory.fps)
    out = np.array(trajectory.data)
    achieved = shakiness_vector(trajectory)

    for q in range(6):
        target = float(profile.targets[q])
        if target == 0.0:
            continue
        base = trajectory.data[:, q]
        wave = waves[q]
        baseline = achieved[q]
        if abs(baseline - target) <= tolerance * target:
            continue  # already within tolerance without any injection
        if baseline > target:
            raise CalibrationError(
                f"axis {q}: trajectory shakiness {baseline:.6g} already exceeds "
                f"target {target:.6g}; no amplitude can reduce it",
                achieved=achieved,
                axis=q,
                target=target,
            )
        wave_shakiness = axis_shakiness(wave)
        if wave_shakiness <= 0.0:
            raise CalibrationError(
                f"axis {q}: shake waveform has no direction changes over "
                f"{frame_count} frames; cannot calibrate",
                achieved=achieved,
                axis=q,
                target=target,
            )

        def measured(amp: float) -> float:
            return axis_shakiness(base + amp * wave)

        iterations = 0
        lo, hi = 0.0, target / wave_shakiness
        value = measured(hi)
        while value < target and iterations < max_iterations:
            lo, hi = hi, hi * 2.0
            value = measured(hi)
            iterations += 1
        best_amp, best_value = hi, value
        while abs(best_value - target) > tolerance * target:
            if iterations >= max_iterations:
                achieved[q] = best_value
                raise CalibrationError(
                    f"axis {q}: calibration did not reach {target:.6g} "
                    f"within {max_iterations} iterations (achieved {best_value:.6g})",
                    achieved=achieved,
                    axis=q,
                    target=target,
                )
            mid = 0.5 * (lo + hi)
            value = measured(mid)
            if abs(value - target) < abs(best_value - target):
                best_amp, best_value = mid, value
            if value < target:
                lo = mid
            else:
                hi = mid
            iterations += 1
        out[:, q] = base + best_amp * wave
        achieved[q] = best_value

    return CameraTrajectory(out, trajectory.fps)


def base_shake_vector(total: float, position_fraction: float = 0.0) -> np.ndarray:
    """Split a total shakiness budget across axes.

    The rotational share is split 35:35:20 between yaw, pitch, and roll;
    ``position_fraction`` of the total goes to x/y/z equally.  The default of
    0 keeps position axes clean because the tracking path's own positional
    shakiness usually exceeds any small position target, which would make
    calibration infeasible.
    """
    if not 0.0 <= position_fraction < 1.0:
        raise InvalidSequenceError("position_fraction must be in [0, 1)")
    if total < 0:
        raise InvalidSequenceError("base shake total must be >= 0")
    rot = np.array([0.35, 0.35, 0.20]) / 0.90 * (1.0 - position_fraction)
    pos = np.full(3, position_fraction / 3.0)
    return np.concatenate([pos, rot]) * total


@dataclass(frozen=True)
class SynthesisConfig:
    base_shake: float = DEFAULT_BASE_SHAKE
    position_shake_fraction: float = 0.0
    kappa: float = DEFAULT_KAPPA
    shake_frequency: float = DEFAULT_SHAKE_FREQUENCY
    smooth_window: int = DEFAULT_SMOOTH_WINDOW
    saliency_temperature: float = DEFAULT_SALIENCY_TEMPERATURE
    calibration_tolerance: float = CALIBRATION_TOLERANCE
    seed: int = 0

    def base_vector(self) -> np.ndarray:
        return base_shake_vector(self.base_shake, self.position_shake_fraction)


def synthesize(
    sequence: ActorPoseSequence,
    emotion: EmotionFactor,
    camera: CameraPlacement,
    layout: SkeletonLayout,
    config: SynthesisConfig = SynthesisConfig(),
) -> CameraTrajectory:
    """Full synthesis: tracking trajectory plus emotion-calibrated shake."""
    from .scene import compute_delta

    saliency = region_saliency(compute_delta(sequence), layout, config.saliency_temperature)
    track = tracking_trajectory(sequence, camera, saliency, layout, config.smooth_window)
    targets = target_shakiness(emotion, config.base_vector(), config.kappa)
    if not np.any(targets > 0):
        return track
    profile = ShakeProfile(targets, config.shake_frequency, config.seed)
    return inject_shake(track, profile, config.calibration_tolerance)
