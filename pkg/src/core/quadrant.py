"""
Valence/arousal circumplex quadrants split at the scale midpoint.
"""

from enum import Enum

from src.core.types import EmotionLabel

MIDPOINT = 5.0


class Quadrant(Enum):
    HIGH_VALENCE_LOW_AROUSAL = "high_valence_low_arousal"
    HIGH_VALENCE_HIGH_AROUSAL = "high_valence_high_arousal"
    LOW_VALENCE_LOW_AROUSAL = "low_valence_low_arousal"
    LOW_VALENCE_HIGH_AROUSAL = "low_valence_high_arousal"
    BOUNDARY = "boundary"


def classify_quadrant(label: EmotionLabel) -> Quadrant:
    """Place a label in its quadrant; any score exactly at the midpoint is Boundary."""
    if label.valence == MIDPOINT or label.arousal == MIDPOINT:
        return Quadrant.BOUNDARY

    high_valence = label.valence > MIDPOINT
    high_arousal = label.arousal > MIDPOINT
    if high_valence:
        return Quadrant.HIGH_VALENCE_HIGH_AROUSAL if high_arousal else Quadrant.HIGH_VALENCE_LOW_AROUSAL
    return Quadrant.LOW_VALENCE_HIGH_AROUSAL if high_arousal else Quadrant.LOW_VALENCE_LOW_AROUSAL
