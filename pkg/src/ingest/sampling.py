"""
Frame selection at a fixed target rate.
"""

import math
from typing import List

from src.utils.errors import TargetRateExceedsNative

DEFAULT_TARGET_FPS = 2.0


def sample_frames(native_fps: float, target_fps: float, frame_count: int) -> List[int]:
    """
    Select frame indices at ``target_fps`` from a stream recorded at ``native_fps``.

    The k-th sample is frame floor(k * native_fps / target_fps), i.e. the frame
    at or immediately before time k / target_fps.

    Args:
        native_fps: Recording rate of the stream
        target_fps: Desired sampling rate, not above native_fps
        frame_count: Number of frames in the stream

    Returns:
        Strictly increasing frame indices, all below frame_count
    """
    if native_fps <= 0 or target_fps <= 0:
        raise ValueError(f"frame rates must be positive, got {native_fps} and {target_fps}")
    if frame_count < 0:
        raise ValueError(f"frame_count must be non-negative, got {frame_count}")
    if target_fps > native_fps:
        raise TargetRateExceedsNative(
            f"target rate {target_fps} fps exceeds native rate {native_fps} fps"
        )

    indices: List[int] = []
    k = 0
    while True:
        index = math.floor(k * native_fps / target_fps)
        if index >= frame_count:
            break
        if not indices or index > indices[-1]:
            indices.append(index)
        k += 1
    return indices
