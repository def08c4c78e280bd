"""Exception hierarchy for cinepath.

Every error carries a short machine-readable ``code`` (used by the CLI when
serializing failures to stderr) and an optional ``context`` dict with the
offending values.
"""

from __future__ import annotations

from typing import Any


class CinepathError(Exception):
    """Base class for all cinepath errors."""

    code = "error"

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "context": self.context}


class SceneParseError(CinepathError):
    """A scene file is malformed; the message names the offending field."""

    code = "scene-parse"


class InvalidSequenceError(CinepathError):
    """A pose sequence or trajectory violates a shape/length requirement."""

    code = "invalid-sequence"


class TrajectoryMismatchError(CinepathError):
    """Two sequences that must share length or fps do not."""

    code = "trajectory-mismatch"


class BlankShotError(CinepathError):
    """No joint of the actor projects onto the frame."""

    code = "blank-shot"


class UndefinedMetricError(CinepathError):
    """A metric is undefined for the given input (zero vector, constant series...)."""

    code = "undefined-metric"


class CalibrationError(CinepathError):
    """Shake amplitude calibration did not reach the target within budget.

    ``achieved`` holds the best per-axis shakiness vector reached so far.
    """

    code = "shake-calibration"

    def __init__(self, message: str, achieved=None, **context: Any):
        super().__init__(message, **context)
        self.achieved = achieved
        if achieved is not None:
            self.context["achieved"] = [float(a) for a in achieved]


class AdjustmentError(CinepathError):
    """Framing adjustment could not produce a usable camera offset."""

    code = "adjustment-failed"


class ConfigError(CinepathError):
    """A configuration file or value is invalid."""

    code = "config"
