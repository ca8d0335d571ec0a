"""
Binarization and connected-region labeling of saliency maps.
"""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy import ndimage

from src.core.types import BinaryMask, SaliencyMap

_STRUCTURES = {
    4: ndimage.generate_binary_structure(2, 1),
    8: ndimage.generate_binary_structure(2, 2),
}


@dataclass(frozen=True)
class RegionLabeling:
    """Region ids per pixel (0 = background, 1..R = regions) and region sizes."""
    width: int
    height: int
    labels: np.ndarray = field(repr=False)
    region_sizes: Tuple[int, ...]

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64).reshape(self.height, self.width)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "region_sizes", tuple(int(size) for size in self.region_sizes))

    @property
    def region_count(self) -> int:
        return len(self.region_sizes)

    @property
    def foreground_pixels(self) -> int:
        return sum(self.region_sizes)


def binarize(saliency_map: SaliencyMap, threshold: float) -> BinaryMask:
    """Pixels with intensity >= threshold become foreground."""
    return BinaryMask(
        width=saliency_map.width,
        height=saliency_map.height,
        bits=saliency_map.intensities >= threshold,
    )


def _raster_order(labels: np.ndarray, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Renumber 1..count so ids follow first appearance in raster-scan order."""
    flat = labels.ravel()
    ids, first_seen = np.unique(flat, return_index=True)
    keep = ids > 0
    ids, first_seen = ids[keep], first_seen[keep]
    order = ids[np.argsort(first_seen, kind="stable")]

    mapping = np.zeros(count + 1, dtype=np.int64)
    mapping[order] = np.arange(1, len(order) + 1)
    relabeled = mapping[labels]
    sizes = np.bincount(relabeled.ravel(), minlength=len(order) + 1)[1:]
    return relabeled, sizes


def label_regions(mask: BinaryMask, connectivity: int = 8) -> RegionLabeling:
    """
    Label connected foreground regions.

    Args:
        mask: Binary mask
        connectivity: 4 (edge neighbours) or 8 (edge and corner neighbours)

    Returns:
        RegionLabeling with ids in raster-scan first-encounter order
    """
    if connectivity not in _STRUCTURES:
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")

    labels, count = ndimage.label(mask.grid, structure=_STRUCTURES[connectivity])
    labels, sizes = _raster_order(labels, count)
    return RegionLabeling(width=mask.width, height=mask.height, labels=labels, region_sizes=tuple(sizes))


def filter_small_regions(labeling: RegionLabeling, min_region_fraction: float) -> RegionLabeling:
    """
    Drop regions smaller than ``min_region_fraction`` of the frame.

    Survivors are renumbered densely, keeping their relative order.
    """
    if not 0.0 <= min_region_fraction < 1.0:
        raise ValueError(f"min_region_fraction must be in [0, 1), got {min_region_fraction}")

    cutoff = min_region_fraction * labeling.width * labeling.height
    sizes = np.asarray(labeling.region_sizes, dtype=np.int64)
    survives = sizes >= cutoff
    if survives.all():
        return labeling

    mapping = np.zeros(len(sizes) + 1, dtype=np.int64)
    mapping[1:][survives] = np.arange(1, int(survives.sum()) + 1)
    return RegionLabeling(
        width=labeling.width,
        height=labeling.height,
        labels=mapping[labeling.labels],
        region_sizes=tuple(sizes[survives]),
    )


def saliency_area(labeling: RegionLabeling) -> float:
    """Fraction of the frame covered by labeled regions."""
    return labeling.foreground_pixels / (labeling.width * labeling.height)
