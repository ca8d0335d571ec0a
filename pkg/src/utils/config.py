"""
Run configuration: defaults, optional YAML overrides, CLI flags on top.
"""

from pathlib import Path
from typing import Any, Dict, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field

from src.features.extract import FeatureConfig
from src.ingest.sampling import DEFAULT_TARGET_FPS
from src.stats.cca import DEFAULT_RIDGE
from src.utils.errors import DataFormatError, InputUnavailable


class RunConfig(BaseModel):
    """Every tunable of an extract/report run."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    threshold: float = Field(0.5, ge=0.0, le=1.0, description="Binarization threshold")
    connectivity: Literal[4, 8] = Field(8, description="Pixel adjacency for regions")
    min_region_fraction: float = Field(0.001, ge=0.0, lt=1.0, description="Speckle cutoff, share of frame")
    target_fps: float = Field(DEFAULT_TARGET_FPS, gt=0, description="Frame sampling rate")
    ridge: float = Field(DEFAULT_RIDGE, ge=0.0, description="CCA covariance ridge")
    workers: Optional[int] = Field(None, ge=1, description="Worker threads (default: min(8, CPUs))")
    out_dir: Optional[Path] = None
    manifest: Optional[Path] = None
    seed: Optional[int] = None

    def feature_config(self) -> FeatureConfig:
        return FeatureConfig(
            threshold=self.threshold,
            connectivity=self.connectivity,
            min_region_fraction=self.min_region_fraction,
        )

    def provenance(self) -> Dict[str, Any]:
        """Parameters that determine analysis results (paths excluded)."""
        return {
            "threshold": self.threshold,
            "connectivity": self.connectivity,
            "min_region_fraction": self.min_region_fraction,
            "target_fps": self.target_fps,
            "ridge": self.ridge,
        }


def load_yaml_overrides(path: Path) -> Dict[str, Any]:
    """
    Read a YAML mapping of RunConfig fields.

    Raises:
        InputUnavailable: file missing
        DataFormatError: not a mapping or not valid YAML
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputUnavailable(f"cannot read config {path}: {e}") from e
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise DataFormatError(f"config {path} is not valid YAML: {e}") from e
    if document is None:
        return {}
    if not isinstance(document, dict):
        raise DataFormatError(f"config {path} must be a mapping of settings")
    return {str(key).replace("-", "_"): value for key, value in document.items()}


def build_run_config(config_file: Optional[Path] = None, **flags: Any) -> RunConfig:
    """
    Merge defaults < YAML file < explicit flags (None means not given).

    Raises:
        pydantic.ValidationError: a merged value violates its bounds
    """
    values: Dict[str, Any] = {}
    if config_file is not None:
        values.update(load_yaml_overrides(config_file))
    values.update({key: value for key, value in flags.items() if value is not None})
    return RunConfig(**values)


