"""
Coefficient shares and contributor rankings.
"""

from typing import List, Mapping, Sequence, Tuple, Union

import numpy as np

from src.utils.errors import AllZeroWeights, KTooLarge

Contributor = Tuple[str, float]
NamedShares = Union[Mapping[str, float], Sequence[Contributor]]


def normalize_l1(weights: Sequence[float]) -> np.ndarray:
    """
    Scale weights so their absolute values sum to one, keeping signs.

    Raises:
        AllZeroWeights: every weight is zero
    """
    weights = np.asarray(weights, dtype=np.float64)
    total = float(np.abs(weights).sum())
    if total == 0.0:
        raise AllZeroWeights("cannot normalize an all-zero weight vector")
    return weights / total


def _as_pairs(shares: NamedShares) -> List[Contributor]:
    items = shares.items() if isinstance(shares, Mapping) else shares
    return [(str(name), float(value)) for name, value in items]


def top_k_contributors(shares: NamedShares, k: int) -> List[Contributor]:
    """
    Rank variables by |share|, largest first.

    Ties keep the given variable order (the fixed AU order for AU blocks).

    Raises:
        KTooLarge: k exceeds the number of variables
    """
    pairs = _as_pairs(shares)
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if k > len(pairs):
        raise KTooLarge(f"k={k} exceeds the {len(pairs)} available variables")
    ranked = sorted(enumerate(pairs), key=lambda item: (-abs(item[1][1]), item[0]))
    return [pair for _, pair in ranked[:k]]


def top_k_by_sign(shares: NamedShares, k: int) -> Tuple[List[Contributor], List[Contributor]]:
    """
    Strongest positive and strongest negative contributors, at most k of each.

    Zero shares belong to neither side.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    pairs = _as_pairs(shares)
    ranked = [pair for _, pair in sorted(enumerate(pairs), key=lambda item: (-abs(item[1][1]), item[0]))]
    positive = [pair for pair in ranked if pair[1] > 0][:k]
    negative = [pair for pair in ranked if pair[1] < 0][:k]
    return positive, negative
