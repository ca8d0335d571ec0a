"""
Frame-level saliency features and their per-trial aggregates.
"""

from typing import Literal, Sequence

from pydantic import BaseModel, ConfigDict, Field

from src.core.types import FrameFeatures, SaliencyMap, TrialFeatures
from src.features.regions import binarize, filter_small_regions, label_regions, saliency_area
from src.ingest.loader import SaliencyStream
from src.utils.errors import EmptyTrial


class FeatureConfig(BaseModel):
    """Binarization and region counting parameters."""
    model_config = ConfigDict(frozen=True)

    threshold: float = Field(0.5, ge=0.0, le=1.0, description="Binarization threshold")
    connectivity: Literal[4, 8] = Field(8, description="Pixel adjacency for regions")
    min_region_fraction: float = Field(
        0.001, ge=0.0, lt=1.0, description="Regions smaller than this share of the frame are dropped"
    )


def extract_frame_features(
    saliency_map: SaliencyMap,
    config: FeatureConfig,
    frame_index: int,
    timestamp: float,
) -> FrameFeatures:
    """Binarize, label, drop speckle, then measure area and region count."""
    mask = binarize(saliency_map, config.threshold)
    labeling = label_regions(mask, config.connectivity)
    labeling = filter_small_regions(labeling, config.min_region_fraction)
    return FrameFeatures(
        frame_index=frame_index,
        timestamp=timestamp,
        saliency_area=saliency_area(labeling),
        region_count=labeling.region_count,
    )


def aggregate_trial(trial_id: str, frames: Sequence[FrameFeatures]) -> TrialFeatures:
    """
    Reduce frame features to trial level by arithmetic mean.

    Raises:
        EmptyTrial: no frames
        InvariantViolation: frame indices not strictly increasing
    """
    frames = tuple(frames)
    if not frames:
        raise EmptyTrial(trial_id, "no frame features to aggregate")

    count = len(frames)
    return TrialFeatures(
        trial_id=trial_id,
        frames=frames,
        mean_saliency_area=sum(frame.saliency_area for frame in frames) / count,
        mean_region_count=sum(frame.region_count for frame in frames) / count,
    )


def extract_stream_features(stream: SaliencyStream, config: FeatureConfig) -> TrialFeatures:
    """Features of every sampled map in a trial's saliency stream."""
    frames = [
        extract_frame_features(saliency_map, config, frame_index, timestamp)
        for saliency_map, frame_index, timestamp in zip(stream.maps, stream.frame_indices, stream.timestamps)
    ]
    return aggregate_trial(stream.trial_id, frames)
