"""Per-axis camera shakiness: oscillation measured at direction changes.

For one axis c_0..c_{T-1}, the stationary points are the interior frames
where the motion direction flips or a plateau begins.  With d_t = c_{t+1} -
c_t and sign(d) zeroed when |d| < eps:

    t+1 is stationary iff  sign(d_t) * sign(d_{t+1}) == -1
                       or  sign(d_t) != 0 and sign(d_{t+1}) == 0

The second rule records the first index of each plateau.  Endpoints are never
stationary.  Shakiness sums |c_{pv_i} - c_{pv_{i-1}}| / (pv_i - pv_{i-1})
over consecutive stationary points, and is 0 when fewer than two exist.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UndefinedMetricError
from .scene import CameraTrajectory

EPS_VELOCITY = 1e-9


@dataclass(frozen=True)
class StationaryPoints:
    """Frame indices of direction changes along one axis, strictly increasing."""

    indices: tuple

    def __len__(self) -> int:
        return len(self.indices)


def stationary_points(axis_values, eps: float = EPS_VELOCITY) -> StationaryPoints:
    c = np.asarray(axis_values, dtype=float)
    if c.ndim != 1:
        raise ValueError(f"axis trajectory must be 1-D, got shape {c.shape}")
    if len(c) < 3:
        return StationaryPoints(())
    d = np.diff(c)
    s = np.where(np.abs(d) < eps, 0, np.sign(d)).astype(int)
    a, b = s[:-1], s[1:]
    mask = (a * b == -1) | ((a != 0) & (b == 0))
    return StationaryPoints(tuple(int(i) + 1 for i in np.nonzero(mask)[0]))


def axis_shakiness(axis_values, eps: float = EPS_VELOCITY) -> float:
    c = np.asarray(axis_values, dtype=float)
    pv = np.array(stationary_points(c, eps).indices, dtype=int)
    if len(pv) < 2:
        return 0.0
    return float(np.sum(np.abs(np.diff(c[pv])) / np.diff(pv)))


def shakiness_vector(trajectory, eps: float = EPS_VELOCITY) -> np.ndarray:
    """Shakiness of each of the 6 axes of a trajectory, shape (6,)."""
    data = trajectory.data if isinstance(trajectory, CameraTrajectory) else np.asarray(trajectory, dtype=float)
    if data.ndim != 2 or data.shape[1] != 6:
        raise ValueError(f"trajectory must be (T, 6), got shape {data.shape}")
    return np.array([axis_shakiness(data[:, q], eps) for q in range(6)])


def total_shakiness(trajectory, eps: float = EPS_VELOCITY) -> float:
    return float(np.sum(shakiness_vector(trajectory, eps)))


def shakiness_per_second(vector, fps: float) -> np.ndarray:
    """Rescale a per-frame shakiness vector to per-second units."""
    return np.asarray(vector, dtype=float) * float(fps)


def shakiness_distance(a, b) -> float:
    """Euclidean distance between two 6-axis shakiness vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shakiness vectors differ in shape: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def cosine_shakiness_distance(a, b) -> float:
    """1 - cosine similarity; undefined (error) when either vector is zero."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise UndefinedMetricError(
            "cosine distance undefined for a zero shakiness vector",
            norms=[float(na), float(nb)],
        )
    return float(1.0 - float(a @ b) / (na * nb))
