"""
Feature CSV output: one frame-level and one trial-level table.
"""

from pathlib import Path
from typing import Iterable, Tuple

import pandas as pd

from src.core.types import TrialFeatures

FRAME_COLUMNS = ["trial_id", "frame_index", "timestamp", "saliency_area", "region_count"]
TRIAL_COLUMNS = ["trial_id", "mean_saliency_area", "mean_region_count"]
FRAME_FEATURES_CSV = "frame_features.csv"
TRIAL_FEATURES_CSV = "trial_features.csv"


def feature_tables(trials: Iterable[TrialFeatures]) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """Build the frame and trial tables, ordered by trial id then frame index."""
    trials = sorted(trials, key=lambda trial: trial.trial_id)
    frame_rows = [
        {
            "trial_id": trial.trial_id,
            "frame_index": frame.frame_index,
            "timestamp": frame.timestamp,
            "saliency_area": frame.saliency_area,
            "region_count": frame.region_count,
        }
        for trial in trials
        for frame in trial.frames
    ]
    trial_rows = [
        {
            "trial_id": trial.trial_id,
            "mean_saliency_area": trial.mean_saliency_area,
            "mean_region_count": trial.mean_region_count,
        }
        for trial in trials
    ]
    return (
        pd.DataFrame(frame_rows, columns=FRAME_COLUMNS),
        pd.DataFrame(trial_rows, columns=TRIAL_COLUMNS),
    )


def write_feature_csvs(trials: Iterable[TrialFeatures], out_dir: Path) -> Tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    frames, trial_table = feature_tables(trials)
    frame_path = out_dir / FRAME_FEATURES_CSV
    trial_path = out_dir / TRIAL_FEATURES_CSV
    frames.to_csv(frame_path, index=False, lineterminator="\n")
    trial_table.to_csv(trial_path, index=False, lineterminator="\n")
    return frame_path, trial_path
