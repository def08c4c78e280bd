"""Run configuration: seeds, loss weights, synthesis knobs, optimizer bounds.

Sources merge in priority order: CLI flags > config file > CINEPATH_SEED
environment variable > built-in defaults.  Config files are plain text,
one ``key = value`` per line, ``#`` comments allowed.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .aesthetics import AestheticWeights, OffsetBounds
from .errors import ConfigError
from .scene import CameraIntrinsics
from .synthesis import SynthesisConfig

SEED_ENV_VAR = "CINEPATH_SEED"


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    # aesthetic loss weights
    lambda_cmp: float = 1.0
    lambda_adj: float = 0.25
    lambda_vis: float = 0.01
    # trajectory objective weights
    lambda_mse: float = 10.0
    lambda_sk: float = 1.0
    # immersion weights
    alpha: float = 1.0 / 3.0
    beta: float = 1.0 / 3.0
    # synthesis
    kappa: float = 1.5
    base_shake: float = 0.1
    position_shake_fraction: float = 0.0
    shake_frequency: float = 4.0
    smooth_window: int = 9
    saliency_temperature: float = 1.0
    calibration_tolerance: float = 0.05
    # optimizer
    bound_position: float = 2.0
    bound_rotation_degrees: float = 30.0
    optimizer_starts: int = 8
    optimizer_max_evaluations: int = 500
    optimizer_xatol: float = 1e-4
    # intrinsics overrides (None keeps the scene's values)
    focal_length: float = None
    sensor_width: float = None
    sensor_height: float = None
    frame_width: int = None
    frame_height: int = None

    def __post_init__(self):
        nonneg = (
            "lambda_cmp", "lambda_adj", "lambda_vis", "lambda_mse", "lambda_sk",
            "alpha", "beta", "base_shake",
        )
        for name in nonneg:
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigError(f"config {name} must be >= 0, got {v}")
        if self.alpha + self.beta > 1 + 1e-12:
            raise ConfigError(
                f"alpha + beta must be <= 1, got {self.alpha} + {self.beta}"
            )
        positive = (
            "kappa", "shake_frequency", "saliency_temperature", "calibration_tolerance",
            "bound_position", "bound_rotation_degrees", "optimizer_xatol",
        )
        for name in positive:
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"config {name} must be positive, got {v}")
        if not 0 <= self.position_shake_fraction < 1:
            raise ConfigError("config position_shake_fraction must be in [0, 1)")
        if self.smooth_window < 1 or self.smooth_window % 2 == 0:
            raise ConfigError(
                f"config smooth_window must be odd and >= 1, got {self.smooth_window}"
            )
        if self.optimizer_starts < 1 or self.optimizer_max_evaluations < 1:
            raise ConfigError("optimizer_starts and optimizer_max_evaluations must be >= 1")

    def aesthetic_weights(self) -> AestheticWeights:
        return AestheticWeights(self.lambda_cmp, self.lambda_adj, self.lambda_vis)

    def offset_bounds(self) -> OffsetBounds:
        return OffsetBounds(self.bound_position, math.radians(self.bound_rotation_degrees))

    def synthesis_config(self) -> SynthesisConfig:
        return SynthesisConfig(
            base_shake=self.base_shake,
            position_shake_fraction=self.position_shake_fraction,
            kappa=self.kappa,
            shake_frequency=self.shake_frequency,
            smooth_window=self.smooth_window,
            saliency_temperature=self.saliency_temperature,
            calibration_tolerance=self.calibration_tolerance,
            seed=self.seed,
        )

    def intrinsics(self, base: CameraIntrinsics = None) -> CameraIntrinsics:
        base = base or CameraIntrinsics()
        overrides = {
            name: getattr(self, name)
            for name in ("focal_length", "sensor_width", "sensor_height",
                         "frame_width", "frame_height")
            if getattr(self, name) is not None
        }
        if not overrides:
            return base
        values = {
            "focal_length": base.focal_length,
            "sensor_width": base.sensor_width,
            "sensor_height": base.sensor_height,
            "frame_width": base.frame_width,
            "frame_height": base.frame_height,
        }
        values.update(overrides)
        return CameraIntrinsics(**values)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_INT_FIELDS = {
    "seed", "smooth_window", "optimizer_starts", "optimizer_max_evaluations",
    "frame_width", "frame_height",
}


def _coerce(key: str, value: str):
    text = str(value).strip()
    try:
        if key in _INT_FIELDS:
            return int(text)
        return float(text)
    except ValueError:
        raise ConfigError(f"config {key}: expected a number, got {text!r}") from None


def parse_config_file(path) -> dict:
    """Parse ``key = value`` lines into a typed dict of RunConfig fields."""
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    values = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"config line {line_no}: unknown key '{key}'")
        values[key] = _coerce(key, value)
    return values


def load_config(path=None, overrides: dict = None) -> RunConfig:
    """Build a RunConfig from (env seed, optional file, optional overrides)."""
    values = {}
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            values["seed"] = int(env_seed)
        except ValueError:
            raise ConfigError(
                f"{SEED_ENV_VAR} must be an integer, got {env_seed!r}"
            ) from None
    if path is not None:
        values.update(parse_config_file(path))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key '{key}'")
        values[key] = value
    return RunConfig(**values)
