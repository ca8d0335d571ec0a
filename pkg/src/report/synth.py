"""
Synthetic corpora with planted saliency/emotion effects.

Each trial draws a latent regime. Multi-region trials show two or three
salient rectangles per frame, single-region trials one. Labels are affine
in the trial's mean features plus Gaussian noise; AU presence rates follow
the same regime. The output uses the on-disk layout the ingest readers expect.
"""

from pathlib import Path
from typing import List, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from tqdm import tqdm

from src.core.au_catalog import AU_CATALOG
from src.core.types import SCORE_MAX, SCORE_MIN, AUFrame, SaliencyMap
from src.ingest.images import frame_file_name, write_saliency_frame
from src.ingest.manifest import TrialManifestEntry, write_manifest
from src.report.emit import emit_au_csv
from src.utils.errors import InputUnavailable
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

MANIFEST_JSON = "manifest.json"
LABELS_CSV = "labels.csv"
REFERENCE_REGIONS = 2.0
REFERENCE_AREA = 0.1
BAND_MARGIN = 2
BACKGROUND_MAX = 0.25
FOREGROUND_MIN = 0.75

# Presence probabilities per regime; other AUs stay at the base rate.
BASE_AU_RATE = 0.1
MULTI_REGION_AUS = {"AU06": 0.45, "AU12": 0.55, "AU25": 0.4}
SINGLE_REGION_AUS = {"AU04": 0.45, "AU15": 0.4, "AU26": 0.45}


class SynthConfig(BaseModel):
    """Parameters of a synthetic corpus."""
    model_config = ConfigDict(frozen=True)

    seed: int = Field(0, description="RNG seed")
    trial_count: int = Field(100, ge=10, description="Number of trials")
    frames_per_trial: int = Field(60, ge=2, description="Frames per trial")
    width: int = Field(64, ge=32, description="Frame width in pixels")
    height: int = Field(64, ge=32, description="Frame height in pixels")
    fps: float = Field(2.0, gt=0, description="Native rate of both streams")
    multi_region_share: float = Field(0.5, ge=0.0, le=1.0, description="Share of multi-region trials")
    region_valence_slope: float = Field(1.0, description="Valence change per extra region")
    region_arousal_slope: float = Field(-1.0, description="Arousal change per extra region")
    area_valence_slope: float = Field(0.0, description="Valence change per unit of area fraction")
    area_arousal_slope: float = Field(0.0, description="Arousal change per unit of area fraction")
    noise_sd: float = Field(0.5, ge=0.0, description="Label noise standard deviation")


def _trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial_index])


def render_frame(
    rng: np.random.Generator, width: int, height: int, regions: int
) -> Tuple[np.ndarray, int]:
    """
    Draw ``regions`` separated rectangles on a dim noisy background.

    The frame is split into three vertical bands; each rectangle stays at
    least BAND_MARGIN pixels inside its band, so rectangles never touch.

    Returns:
        (height, width) intensity grid and the number of rectangle pixels
    """
    grid = rng.uniform(0.0, BACKGROUND_MAX, size=(height, width))
    band = width // 3
    bands = sorted(rng.choice(3, size=regions, replace=False).tolist())
    covered = 0
    for b in bands:
        left_limit = b * band + BAND_MARGIN
        right_limit = (b + 1) * band - BAND_MARGIN
        rect_width = int(rng.integers(max(2, band // 4), right_limit - left_limit + 1))
        rect_height = int(rng.integers(max(2, height // 8), height // 2 + 1))
        left = int(rng.integers(left_limit, right_limit - rect_width + 1))
        top = int(rng.integers(BAND_MARGIN, height - BAND_MARGIN - rect_height + 1))
        grid[top:top + rect_height, left:left + rect_width] = rng.uniform(
            FOREGROUND_MIN, 1.0, size=(rect_height, rect_width)
        )
        covered += rect_width * rect_height
    return grid, covered


def _au_frames(rng: np.random.Generator, multi: bool, count: int, fps: float) -> List[AUFrame]:
    elevated = MULTI_REGION_AUS if multi else SINGLE_REGION_AUS
    rates = np.array([elevated.get(code, BASE_AU_RATE) for code in AU_CATALOG.codes])
    presence = rng.random((count, len(rates))) < rates
    return [
        AUFrame(frame_index=i + 1, timestamp=i / fps, presence=tuple(int(flag) for flag in presence[i]))
        for i in range(count)
    ]


def _label(config: SynthConfig, rng: np.random.Generator, mean_regions: float, mean_area: float) -> Tuple[float, float]:
    valence = (
        5.0
        + config.region_valence_slope * (mean_regions - REFERENCE_REGIONS)
        + config.area_valence_slope * (mean_area - REFERENCE_AREA)
    )
    arousal = (
        5.0
        + config.region_arousal_slope * (mean_regions - REFERENCE_REGIONS)
        + config.area_arousal_slope * (mean_area - REFERENCE_AREA)
    )
    if config.noise_sd > 0:
        valence += rng.normal(0.0, config.noise_sd)
        arousal += rng.normal(0.0, config.noise_sd)
    clamp = lambda score: float(min(SCORE_MAX, max(SCORE_MIN, score)))  # noqa: E731
    return clamp(valence), clamp(arousal)


def synth_corpus(config: SynthConfig, out_dir: Path, show_progress: bool = False) -> Path:
    """
    Materialize a corpus: manifest.json, labels.csv, per-trial frames and AU CSVs.

    Returns:
        Path of the manifest
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InputUnavailable(f"cannot create {out_dir}: {e}") from e

    entries: List[TrialManifestEntry] = []
    label_rows = []
    frame_area = config.width * config.height

    for index in tqdm(range(config.trial_count), desc="synth trials", disable=not show_progress):
        trial_id = f"trial_{index:04d}"
        rng = _trial_rng(config.seed, index)
        multi = bool(rng.random() < config.multi_region_share)

        frames_dir = Path("trials") / trial_id / "saliency"
        (out_dir / frames_dir).mkdir(parents=True, exist_ok=True)
        region_total = 0
        area_total = 0.0
        for frame in range(config.frames_per_trial):
            regions = int(rng.integers(2, 4)) if multi else 1
            grid, covered = render_frame(rng, config.width, config.height, regions)
            # Quantize exactly as the written 8-bit image will be read back.
            grid = np.rint(grid * 255.0) / 255.0
            write_saliency_frame(SaliencyMap.from_grid(grid), out_dir / frames_dir / frame_file_name(frame))
            region_total += regions
            area_total += covered / frame_area

        au_path = Path("trials") / trial_id / "au.csv"
        au_frames = _au_frames(rng, multi, config.frames_per_trial, config.fps)
        (out_dir / au_path).write_text(emit_au_csv(au_frames), encoding="utf-8")

        valence, arousal = _label(
            config,
            rng,
            region_total / config.frames_per_trial,
            area_total / config.frames_per_trial,
        )
        label_rows.append({"trial_id": trial_id, "valence": valence, "arousal": arousal})
        entries.append(TrialManifestEntry(
            trial_id=trial_id,
            saliency_dir=frames_dir,
            saliency_fps=config.fps,
            au_csv=au_path,
            au_fps=config.fps,
        ))

    manifest_path = out_dir / MANIFEST_JSON
    write_manifest(entries, manifest_path)
    pd.DataFrame(label_rows, columns=["trial_id", "valence", "arousal"]).to_csv(
        out_dir / LABELS_CSV, index=False, lineterminator="\n"
    )
    logger.info(f"Synthetic corpus of {config.trial_count} trials written to {out_dir}")
    return manifest_path
