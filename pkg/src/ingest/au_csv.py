"""
Reader for per-frame facial action unit presence tables (OpenFace-style CSV).
"""

import io
import re
from typing import List, TextIO, Union

import numpy as np
import pandas as pd

from src.core.au_catalog import AU_CATALOG, AUCatalog
from src.core.types import AUFrame
from src.utils.errors import MalformedRow, MissingColumn, NonBinaryPresence
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

PRESENCE_COLUMN = re.compile(r"^au\d+_c$")
BINARY_TOLERANCE = 1e-6
HEADER_LINES = 1


def _parser_error_line(error: Exception) -> int:
    match = re.search(r"line (\d+)", str(error))
    return int(match.group(1)) if match else HEADER_LINES + 1


def read_au_csv(stream: Union[str, TextIO], catalog: AUCatalog = AU_CATALOG) -> List[AUFrame]:
    """
    Parse an AU CSV into AUFrames, one per data row, in file order.

    Header names are matched case-insensitively after trimming; extra columns
    are ignored. Presence values within 1e-6 of 0 or 1 are rounded.

    Args:
        stream: CSV text or an open text stream
        catalog: Action units to extract, in output order

    Returns:
        List of AUFrame

    Raises:
        MissingColumn: a required column is absent
        MalformedRow: a row cannot be parsed (1-based file line)
        NonBinaryPresence: a presence value is not 0/1
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)

    try:
        table = pd.read_csv(stream, dtype=str, skipinitialspace=True, keep_default_na=False)
    except pd.errors.EmptyDataError as e:
        raise MalformedRow(HEADER_LINES, "no header row") from e
    except pd.errors.ParserError as e:
        raise MalformedRow(_parser_error_line(e), str(e).strip()) from e

    by_lower = {str(column).strip().lower(): column for column in table.columns}
    presence_columns = catalog.presence_columns
    for name in ["frame", "timestamp"] + presence_columns:
        if name.lower() not in by_lower:
            raise MissingColumn(name)

    known = {name.lower() for name in presence_columns}
    unknown = sorted(name for name in by_lower if PRESENCE_COLUMN.match(name) and name not in known)
    if unknown:
        logger.warning(f"AU columns outside the catalog are ignored: {', '.join(unknown)}")

    if table.empty:
        return []

    def numeric(name: str) -> np.ndarray:
        raw = table[by_lower[name.lower()]]
        text = raw.astype(str).str.strip()
        try:
            # exact decimal parsing; pd.to_numeric rounds some 17-digit values
            values = text.to_numpy(dtype=object).astype(np.float64)
        except ValueError:
            values = pd.to_numeric(text, errors="coerce").to_numpy(dtype=np.float64)
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            row = int(bad[0])
            raise MalformedRow(row + HEADER_LINES + 1, f"{name}={raw.iloc[row]!r} is not a number")
        return values

    frame_values = numeric("frame")
    timestamps = numeric("timestamp")

    bad_frame = np.flatnonzero((frame_values != np.floor(frame_values)) | (frame_values < 0))
    if bad_frame.size:
        row = int(bad_frame[0])
        raise MalformedRow(row + HEADER_LINES + 1, f"frame={frame_values[row]!r} is not an ordinal")
    bad_time = np.flatnonzero(timestamps < 0)
    if bad_time.size:
        row = int(bad_time[0])
        raise MalformedRow(row + HEADER_LINES + 1, f"timestamp={timestamps[row]!r} is negative")

    presence = np.empty((len(table), len(presence_columns)), dtype=np.int64)
    for j, name in enumerate(presence_columns):
        values = numeric(name)
        rounded = np.rint(values)
        bad = np.flatnonzero(
            (np.abs(values - rounded) > BINARY_TOLERANCE) | ((rounded != 0) & (rounded != 1))
        )
        if bad.size:
            row = int(bad[0])
            raise NonBinaryPresence(row + HEADER_LINES + 1, name, values[row])
        presence[:, j] = rounded.astype(np.int64)

    return [
        AUFrame(
            frame_index=int(frame_values[i]),
            timestamp=float(timestamps[i]),
            presence=tuple(int(flag) for flag in presence[i]),
        )
        for i in range(len(table))
    ]
