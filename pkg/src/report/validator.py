"""
Validation of command outputs before a run is reported as successful.
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import pandas as pd

from src.features.writer import FRAME_COLUMNS, FRAME_FEATURES_CSV, TRIAL_COLUMNS, TRIAL_FEATURES_CSV
from src.ingest.images import list_frame_files, read_bytes, read_saliency_frame
from src.report.emit import PLOT_COLUMNS, REPORT_JSON
from src.report.models import AnalysisReport
from src.utils.errors import OutputValidationError, SalienceAffectError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


def _read_table(path: Path, columns: List[str]) -> pd.DataFrame:
    if not path.is_file():
        raise OutputValidationError(f"missing output {path}")
    try:
        table = pd.read_csv(path, dtype={"trial_id": str})
    except (pd.errors.ParserError, pd.errors.EmptyDataError, OSError) as e:
        raise OutputValidationError(f"unreadable output {path}: {e}") from e
    if list(table.columns) != list(columns):
        raise OutputValidationError(f"{path} has columns {list(table.columns)}, expected {columns}")
    return table


def validate_feature_outputs(out_dir: Path, expected_trials: Optional[Iterable[str]] = None) -> Dict[str, Any]:
    """
    Check the frame- and trial-level feature CSVs.

    Returns:
        Dict of output metrics
    """
    out_dir = Path(out_dir)
    frames = _read_table(out_dir / FRAME_FEATURES_CSV, FRAME_COLUMNS)
    trials = _read_table(out_dir / TRIAL_FEATURES_CSV, TRIAL_COLUMNS)

    metrics: Dict[str, Any] = {
        'frame_rows': len(frames),
        'trial_rows': len(trials),
    }

    if expected_trials is not None:
        expected = sorted(expected_trials)
        if sorted(trials['trial_id'].tolist()) != expected:
            raise OutputValidationError(f"trial table does not list exactly the {len(expected)} extracted trials")

    if not frames['saliency_area'].between(0.0, 1.0).all():
        raise OutputValidationError("frame saliency_area outside [0, 1]")
    if (frames['region_count'] < 0).any():
        raise OutputValidationError("negative region_count")
    if not trials['mean_saliency_area'].between(0.0, 1.0).all():
        raise OutputValidationError("trial mean_saliency_area outside [0, 1]")
    missing = set(trials['trial_id']) - set(frames['trial_id'])
    if missing:
        raise OutputValidationError(f"trials without frame rows: {sorted(missing)}")

    metrics['mean_saliency_area'] = float(trials['mean_saliency_area'].mean()) if len(trials) else None
    metrics['mean_region_count'] = float(trials['mean_region_count'].mean()) if len(trials) else None
    logger.info(
        f"Feature outputs valid: {metrics['trial_rows']} trials, {metrics['frame_rows']} frames"
    )
    return metrics


def validate_report_outputs(out_dir: Path, plot_files: Iterable[str]) -> Dict[str, Any]:
    """Re-read report.json against the schema and check every plot CSV."""
    out_dir = Path(out_dir)
    report_path = out_dir / REPORT_JSON
    if not report_path.is_file():
        raise OutputValidationError(f"missing output {report_path}")
    try:
        report = AnalysisReport.model_validate(json.loads(report_path.read_text(encoding="utf-8")))
    except (ValueError, OSError) as e:
        raise OutputValidationError(f"invalid report {report_path}: {e}") from e

    if len(report.pcc_table) != 4:
        raise OutputValidationError(f"pcc_table has {len(report.pcc_table)} cells, expected 4")
    for section in (report.cca_saliency_vs_au, report.cca_au_vs_emotion):
        for top in section.top_contributors.values():
            for ranking in (top.all, top.positive, top.negative):
                if ranking is not None and len(ranking) > 5:
                    raise OutputValidationError(f"top list for {top.target} exceeds 5 entries")

    labeled = sum(report.quadrant_census.values())
    plot_rows = {}
    for name in plot_files:
        table = _read_table(out_dir / name, list(PLOT_COLUMNS))
        plot_rows[name] = len(table)

    metrics = {
        'pcc_cells': len(report.pcc_table),
        'pcc_errors': sum(1 for cell in report.pcc_table if cell.error),
        'labeled_trials': labeled,
        'plot_tables': plot_rows,
    }
    logger.info(f"Report outputs valid: {len(plot_rows)} plot tables, {labeled} labeled trials")
    return metrics


def validate_saliency_outputs(out_dir: Path, expected_count: int) -> Dict[str, Any]:
    """Every written map must decode as a valid saliency map."""
    files = list_frame_files(out_dir)
    if len(files) < expected_count:
        raise OutputValidationError(f"expected {expected_count} saliency maps in {out_dir}, found {len(files)}")
    for path in files:
        try:
            read_saliency_frame(read_bytes(path))
        except SalienceAffectError as e:
            raise OutputValidationError(f"invalid saliency map {path}: {e}") from e
    return {'maps': len(files)}
