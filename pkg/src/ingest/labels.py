"""
Reader for per-trial self-reported valence/arousal tables.
"""

import io
import math
from typing import List, TextIO, Union

import pandas as pd

from src.core.types import EmotionLabel
from src.utils.errors import MalformedRow, MissingColumn

LABEL_COLUMNS = ("trial_id", "valence", "arousal")


def read_labels_csv(stream: Union[str, TextIO]) -> List[EmotionLabel]:
    """
    Parse a ``trial_id,valence,arousal`` table.

    Scores may be reals; each is range-checked against [1, 9].

    Raises:
        MissingColumn: header lacks one of the three columns
        MalformedRow: unparsable score, empty trial id or duplicate trial id
        ScoreOutOfRange: a score outside [1, 9]
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)

    try:
        table = pd.read_csv(stream, dtype=str, skipinitialspace=True, keep_default_na=False)
    except pd.errors.EmptyDataError as e:
        raise MalformedRow(1, "no header row") from e
    except pd.errors.ParserError as e:
        raise MalformedRow(1, str(e).strip()) from e

    by_lower = {str(column).strip().lower(): column for column in table.columns}
    for name in LABEL_COLUMNS:
        if name not in by_lower:
            raise MissingColumn(name)

    labels: List[EmotionLabel] = []
    seen = set()
    for position, values in enumerate(table.to_dict("records")):
        line = position + 2
        trial_id = str(values[by_lower["trial_id"]]).strip()
        if not trial_id or trial_id == "nan":
            raise MalformedRow(line, "empty trial_id")
        if trial_id in seen:
            raise MalformedRow(line, f"duplicate trial_id {trial_id!r}")
        seen.add(trial_id)

        scores = {}
        for name in ("valence", "arousal"):
            raw = str(values[by_lower[name]]).strip()
            try:
                score = float(raw)
            except ValueError:
                raise MalformedRow(line, f"{name}={raw!r} is not a number") from None
            if math.isnan(score):
                raise MalformedRow(line, f"{name} is missing")
            scores[name] = score

        labels.append(EmotionLabel(trial_id=trial_id, **scores))

    return labels
