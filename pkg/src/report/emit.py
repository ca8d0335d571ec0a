"""
Byte-stable report output: canonical JSON, plot-data CSVs and AU tables.
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

import pandas as pd

from src.core.au_catalog import AU_CATALOG
from src.core.types import AUFrame
from src.report.models import AnalysisReport, Contributor
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

REPORT_JSON = "report.json"
PCC_CSV = "pcc_bars.csv"
CCA_SALIENCY_CSV = "cca_saliency_au.csv"
CCA_EMOTION_CSV = "cca_au_emotion.csv"
PLOT_COLUMNS = ("name", "value", "sign")
INDENT = "  "


def format_float(value: float) -> str:
    """17 significant digits, the one float spelling used in every output."""
    if not math.isfinite(value):
        raise ValueError(f"cannot serialize non-finite value {value!r}")
    return format(value, ".17g")


def _encode(value: Any, depth: int) -> str:
    pad = INDENT * (depth + 1)
    closing = INDENT * depth
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(key), ensure_ascii=False)}: {_encode(value[key], depth + 1)}"
            for key in sorted(value, key=str)
        ]
        return "{\n" + ",\n".join(items) + "\n" + closing + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{pad}{_encode(item, depth + 1)}" for item in value]
        return "[\n" + ",\n".join(items) + "\n" + closing + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def canonical_json(document: Any) -> bytes:
    """Sorted keys, fixed float spelling, UTF-8, trailing newline."""
    return (_encode(document, 0) + "\n").encode("utf-8")


def emit_json(report: AnalysisReport) -> bytes:
    return canonical_json(report.model_dump(mode="python"))


def _sign(value: float) -> str:
    if value > 0:
        return "+"
    if value < 0:
        return "-"
    return "0"


def _plot_rows(pairs: Sequence[Tuple[str, Any]]) -> List[Tuple[str, str, str]]:
    rows = []
    for name, value in pairs:
        if value is None:
            rows.append((name, "null", "null"))
        else:
            rows.append((name, format_float(float(value)), _sign(value)))
    return rows


def _write_plot_csv(path: Path, rows: List[Tuple[str, str, str]]) -> Path:
    table = pd.DataFrame(rows, columns=list(PLOT_COLUMNS), dtype=str)
    table.to_csv(path, index=False, lineterminator="\n")
    return path


def _contributor_pairs(contributors: Sequence[Contributor]) -> List[Tuple[str, float]]:
    return [(item.name, item.share) for item in contributors or []]


def plot_tables(report: AnalysisReport) -> Dict[str, List[Tuple[str, str, str]]]:
    """Rows of every plot CSV keyed by file name."""
    tables: Dict[str, List[Tuple[str, str, str]]] = {
        PCC_CSV: _plot_rows([(f"{cell.feature}_vs_{cell.emotion}", cell.r) for cell in report.pcc_table]),
        CCA_SALIENCY_CSV: _plot_rows(list((report.cca_saliency_vs_au.y_shares or {}).items())),
        CCA_EMOTION_CSV: _plot_rows(list((report.cca_au_vs_emotion.x_shares or {}).items())),
    }
    for section in (report.cca_saliency_vs_au, report.cca_au_vs_emotion):
        for target, top in sorted(section.top_contributors.items()):
            tables[f"top5_{target}.csv"] = _plot_rows(_contributor_pairs(top.all))
            tables[f"top5_{target}_positive.csv"] = _plot_rows(_contributor_pairs(top.positive))
            tables[f"top5_{target}_negative.csv"] = _plot_rows(_contributor_pairs(top.negative))
    return tables


def emit_plot_data(report: AnalysisReport, out_dir: Path) -> List[Path]:
    """Write one name,value,sign CSV per figure-equivalent."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return [_write_plot_csv(out_dir / name, rows) for name, rows in sorted(plot_tables(report).items())]


def write_report(report: AnalysisReport, out_dir: Path) -> List[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / REPORT_JSON
    report_path.write_bytes(emit_json(report))
    written = [report_path] + emit_plot_data(report, out_dir)
    logger.info(f"Report written to {report_path} with {len(written) - 1} plot tables")
    return written


def emit_au_csv(frames: Sequence[AUFrame]) -> str:
    """Serialize AU frames with the columns read_au_csv expects."""
    columns = ["frame", "timestamp"] + AU_CATALOG.presence_columns
    rows = [[frame.frame_index, repr(float(frame.timestamp))] + list(frame.presence) for frame in frames]
    return pd.DataFrame(rows, columns=columns).to_csv(index=False, lineterminator="\n")
