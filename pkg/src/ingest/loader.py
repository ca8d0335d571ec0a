"""
Per-trial loading of the saliency and facial AU streams at the target rate.
"""

from dataclasses import dataclass
from typing import List, Tuple

from src.core.types import AUFrame, SaliencyMap
from src.ingest.au_csv import read_au_csv
from src.ingest.images import list_frame_files, read_bytes, read_saliency_frame
from src.ingest.manifest import TrialManifestEntry
from src.ingest.sampling import sample_frames
from src.utils.errors import EmptyTrial, InputUnavailable
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True)
class SaliencyStream:
    trial_id: str
    maps: Tuple[SaliencyMap, ...]
    frame_indices: Tuple[int, ...]
    timestamps: Tuple[float, ...]


@dataclass(frozen=True)
class TrialStreams:
    """Sampled saliency maps and AU frames of one trial, paired by sample ordinal."""
    trial_id: str
    saliency: SaliencyStream
    au_frames: Tuple[AUFrame, ...]

    @property
    def saliency_maps(self) -> Tuple[SaliencyMap, ...]:
        return self.saliency.maps


def load_saliency_stream(entry: TrialManifestEntry, target_fps: float) -> SaliencyStream:
    """
    Read the sampled saliency maps of a trial.

    Raises:
        EmptyTrial: directory missing, empty, or nothing left after sampling
    """
    try:
        files = list_frame_files(entry.saliency_dir)
    except InputUnavailable as e:
        raise EmptyTrial(entry.trial_id, str(e)) from e
    if not files:
        raise EmptyTrial(entry.trial_id, f"no saliency frames in {entry.saliency_dir}")

    indices = sample_frames(entry.saliency_fps, target_fps, len(files))
    if not indices:
        raise EmptyTrial(entry.trial_id, "no saliency frames after sampling")

    maps = tuple(read_saliency_frame(read_bytes(files[i])) for i in indices)
    timestamps = tuple(i / entry.saliency_fps for i in indices)
    logger.debug(f"Trial {entry.trial_id}: {len(maps)} of {len(files)} saliency frames sampled")
    return SaliencyStream(
        trial_id=entry.trial_id,
        maps=maps,
        frame_indices=tuple(indices),
        timestamps=timestamps,
    )


def load_au_stream(entry: TrialManifestEntry, target_fps: float) -> Tuple[AUFrame, ...]:
    """
    Read the AU CSV of a trial and sample its rows at ``target_fps``.

    Raises:
        InputUnavailable: CSV missing or unreadable
        EmptyTrial: CSV has no rows
    """
    try:
        with open(entry.au_csv, "r", encoding="utf-8", newline="") as handle:
            frames: List[AUFrame] = read_au_csv(handle)
    except OSError as e:
        raise InputUnavailable(f"cannot read AU table {entry.au_csv}: {e}") from e
    if not frames:
        raise EmptyTrial(entry.trial_id, f"no rows in {entry.au_csv}")

    indices = sample_frames(entry.au_fps, target_fps, len(frames))
    return tuple(frames[i] for i in indices)


def load_trial(entry: TrialManifestEntry, target_fps: float) -> TrialStreams:
    """Load both streams of a trial; each is sampled against its own native rate."""
    saliency = load_saliency_stream(entry, target_fps)
    au_frames = load_au_stream(entry, target_fps)
    return TrialStreams(trial_id=entry.trial_id, saliency=saliency, au_frames=au_frames)
