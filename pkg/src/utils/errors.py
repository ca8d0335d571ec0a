"""
Exception hierarchy shared by every package.

Each class carries the process exit code the CLI reports for it:
0 ok, 1 usage, 2 I/O, 3 format, 4 empty trial, 5 too few trials.
"""

from typing import Optional


class SalienceAffectError(Exception):
    """Base class for all toolkit errors."""
    exit_code = 1


class InputUnavailable(SalienceAffectError):
    """A file or directory could not be found or read."""
    exit_code = 2


class OutputValidationError(SalienceAffectError):
    """A command's declared output is missing or fails its checks."""
    exit_code = 2


class DataFormatError(SalienceAffectError):
    """Input content does not follow the expected format."""
    exit_code = 3


class OutOfRangeIntensity(DataFormatError):
    pass


class DimensionMismatch(DataFormatError):
    pass


class ScoreOutOfRange(DataFormatError):
    pass


class UnsupportedFormat(DataFormatError):
    pass


class CorruptImage(DataFormatError):
    pass


class ImageTooSmall(DataFormatError):
    pass


class ManifestError(DataFormatError):
    pass


class MissingColumn(DataFormatError):
    def __init__(self, column: str):
        super().__init__(f"missing column {column!r}")
        self.column = column


class MalformedRow(DataFormatError):
    def __init__(self, line: int, detail: str = ""):
        message = f"malformed row at line {line}"
        if detail:
            message += f": {detail}"
        super().__init__(message)
        self.line = line


class NonBinaryPresence(DataFormatError):
    def __init__(self, line: int, column: str, value: object):
        super().__init__(f"non-binary presence {value!r} in column {column!r} at line {line}")
        self.line = line
        self.column = column


class EmptyTrial(SalienceAffectError):
    """A trial has no frames left to analyze."""
    exit_code = 4

    def __init__(self, trial_id: Optional[str], detail: str = ""):
        message = f"empty trial {trial_id!r}" if trial_id is not None else "empty trial"
        if detail:
            message += f": {detail}"
        super().__init__(message)
        self.trial_id = trial_id


class TooFewTrials(SalienceAffectError):
    exit_code = 5


class TargetRateExceedsNative(SalienceAffectError):
    pass


class InvariantViolation(SalienceAffectError):
    """A domain value was constructed outside its invariants."""
    pass


class StatsError(SalienceAffectError):
    """Base class for statistical preconditions that do not hold."""
    pass


class LengthMismatch(StatsError):
    pass


class DegenerateInput(StatsError):
    pass


class TooFewSamples(StatsError):
    pass


class RankDeficient(StatsError):
    pass


class TooFewObservations(StatsError):
    pass


class AllZeroWeights(StatsError):
    pass


class KTooLarge(StatsError):
    pass


class AllColumnsConstant(StatsError):
    pass


def error_marker(error: Exception) -> str:
    """Render an error as the marker stored inside reports."""
    return f"{type(error).__name__}: {error}"
