"""
Smoothing filters used by the saliency backend.
"""

import math

import numpy as np
from scipy import ndimage


def gaussian_radius(sigma: float) -> int:
    return max(1, math.ceil(3.0 * sigma))


def gaussian_blur(grid: np.ndarray, sigma: float) -> np.ndarray:
    """
    Separable Gaussian blur with a kernel truncated at ceil(3 sigma).

    Borders replicate the edge pixel; the kernel has unit mass.

    Args:
        grid: 2-D array
        sigma: Standard deviation in pixels, > 0

    Returns:
        Blurred array of the same shape
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    grid = np.asarray(grid, dtype=np.float64)
    radius = gaussian_radius(sigma)
    blurred = ndimage.gaussian_filter1d(grid, sigma, axis=0, mode="nearest", radius=radius)
    return ndimage.gaussian_filter1d(blurred, sigma, axis=1, mode="nearest", radius=radius)


def box_filter(grid: np.ndarray, size: int = 3, mode: str = "wrap") -> np.ndarray:
    """Mean over a size x size window."""
    return ndimage.uniform_filter(np.asarray(grid, dtype=np.float64), size=size, mode=mode)
