"""
Domain types shared by all packages.

All values are immutable after construction; array payloads are stored as
read-only numpy arrays.
"""

import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from src.core.au_catalog import AU_COUNT
from src.utils.errors import (
    DimensionMismatch,
    InvariantViolation,
    OutOfRangeIntensity,
    ScoreOutOfRange,
)

SCORE_MIN = 1.0
SCORE_MAX = 9.0


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype).ravel()
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SaliencyMap:
    """Per-frame grid of intensities in [0, 1], stored row-major."""
    width: int
    height: int
    intensities: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "intensities", _frozen_array(self.intensities, np.float64))
        validate_saliency_map(self)

    @classmethod
    def from_grid(cls, grid) -> "SaliencyMap":
        grid = np.asarray(grid, dtype=np.float64)
        if grid.ndim != 2:
            raise DimensionMismatch(f"expected a 2-D grid, got shape {grid.shape}")
        height, width = grid.shape
        return cls(width=width, height=height, intensities=grid)

    @property
    def grid(self) -> np.ndarray:
        """Intensities as a (height, width) view."""
        return self.intensities.reshape(self.height, self.width)


def validate_saliency_map(saliency_map: SaliencyMap) -> None:
    """
    Check the SaliencyMap invariants.

    Raises:
        DimensionMismatch: non-positive dimensions or wrong intensity count
        OutOfRangeIntensity: any intensity outside [0, 1] (NaN included)
    """
    width, height = saliency_map.width, saliency_map.height
    if width < 1 or height < 1:
        raise DimensionMismatch(f"dimensions must be positive, got {width}x{height}")
    count = saliency_map.intensities.size
    if count != width * height:
        raise DimensionMismatch(
            f"{width}x{height} map needs {width * height} intensities, got {count}"
        )
    values = saliency_map.intensities
    bad = ~((values >= 0.0) & (values <= 1.0))
    if bad.any():
        position = int(np.flatnonzero(bad)[0])
        raise OutOfRangeIntensity(
            f"intensity {values[position]!r} at pixel {position} is outside [0, 1]"
        )


@dataclass(frozen=True)
class BinaryMask:
    width: int
    height: int
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "bits", _frozen_array(self.bits, bool))
        if self.bits.size != self.width * self.height:
            raise DimensionMismatch(
                f"{self.width}x{self.height} mask needs {self.width * self.height} bits, "
                f"got {self.bits.size}"
            )

    @classmethod
    def from_grid(cls, grid) -> "BinaryMask":
        grid = np.asarray(grid, dtype=bool)
        height, width = grid.shape
        return cls(width=width, height=height, bits=grid)

    @property
    def grid(self) -> np.ndarray:
        return self.bits.reshape(self.height, self.width)


@dataclass(frozen=True)
class FrameFeatures:
    frame_index: int
    timestamp: float
    saliency_area: float
    region_count: int

    def __post_init__(self):
        if self.frame_index < 0:
            raise InvariantViolation(f"frame_index must be non-negative, got {self.frame_index}")
        if not self.timestamp >= 0:
            raise InvariantViolation(f"timestamp must be non-negative, got {self.timestamp}")
        if not 0.0 <= self.saliency_area <= 1.0:
            raise InvariantViolation(f"saliency_area {self.saliency_area} outside [0, 1]")
        if self.region_count < 0:
            raise InvariantViolation(f"region_count must be non-negative, got {self.region_count}")
        if (self.region_count == 0) != (self.saliency_area == 0.0):
            raise InvariantViolation(
                f"region_count {self.region_count} inconsistent with "
                f"saliency_area {self.saliency_area}"
            )


@dataclass(frozen=True)
class TrialFeatures:
    trial_id: str
    frames: Tuple[FrameFeatures, ...]
    mean_saliency_area: float
    mean_region_count: float

    def __post_init__(self):
        if not self.frames:
            raise InvariantViolation(f"trial {self.trial_id!r} has no frames")
        for previous, current in zip(self.frames, self.frames[1:]):
            if current.frame_index <= previous.frame_index:
                raise InvariantViolation(
                    f"trial {self.trial_id!r}: frame_index {current.frame_index} follows {previous.frame_index}"
                )
        count = len(self.frames)
        expected = (
            ("mean_saliency_area", sum(frame.saliency_area for frame in self.frames) / count),
            ("mean_region_count", sum(frame.region_count for frame in self.frames) / count),
        )
        for name, value in expected:
            if not math.isclose(getattr(self, name), value, rel_tol=1e-12, abs_tol=1e-15):
                raise InvariantViolation(f"trial {self.trial_id!r}: {name} is not the mean over its frames")


@dataclass(frozen=True)
class AUFrame:
    """Presence flags of the catalog's action units for one facial-video frame."""
    frame_index: int
    timestamp: float
    presence: Tuple[int, ...]

    def __post_init__(self):
        presence = tuple(int(flag) for flag in self.presence)
        if len(presence) != AU_COUNT:
            raise InvariantViolation(f"expected {AU_COUNT} presence flags, got {len(presence)}")
        if any(flag not in (0, 1) for flag in presence):
            raise InvariantViolation(f"presence flags must be 0 or 1, got {presence}")
        object.__setattr__(self, "presence", presence)


def au_presence_matrix(frames: Sequence[AUFrame]) -> np.ndarray:
    """Stack presence vectors into a (frames, AU_COUNT) float matrix."""
    if not frames:
        return np.zeros((0, AU_COUNT))
    return np.array([frame.presence for frame in frames], dtype=np.float64)


@dataclass(frozen=True)
class EmotionLabel:
    trial_id: str
    valence: float
    arousal: float

    def __post_init__(self):
        for name in ("valence", "arousal"):
            score = float(getattr(self, name))
            if math.isnan(score) or not SCORE_MIN <= score <= SCORE_MAX:
                raise ScoreOutOfRange(
                    f"{name} {score} for trial {self.trial_id!r} outside "
                    f"[{SCORE_MIN:g}, {SCORE_MAX:g}]"
                )
            object.__setattr__(self, name, score)
