"""
Spectral residual saliency: the built-in classical backend.

The non-smooth part of the log-amplitude spectrum, recombined with the
original phase, highlights regions that stand out from their surroundings.
"""

from dataclasses import dataclass, field

import numpy as np

from src.core.types import SaliencyMap
from src.saliency.filters import box_filter, gaussian_blur
from src.utils.errors import DimensionMismatch, ImageTooSmall, InvariantViolation
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

MIN_SIDE = 8
DEFAULT_SIGMA = 3.0
# Coefficients this far below the peak amplitude are FFT round-off.
SPECTRUM_FLOOR = 1e-10
ZERO_RANGE = 1e-12


@dataclass(frozen=True)
class GrayImage:
    width: int
    height: int
    luminance: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.luminance, dtype=np.float64).ravel()
        values.setflags(write=False)
        object.__setattr__(self, "luminance", values)
        if values.size != self.width * self.height:
            raise DimensionMismatch(
                f"{self.width}x{self.height} image needs {self.width * self.height} values, "
                f"got {values.size}"
            )
        if not ((values >= 0.0) & (values <= 1.0)).all():
            raise InvariantViolation("luminance must lie in [0, 1]")

    @classmethod
    def from_grid(cls, grid) -> "GrayImage":
        grid = np.asarray(grid, dtype=np.float64)
        height, width = grid.shape
        return cls(width=width, height=height, luminance=grid)

    @property
    def grid(self) -> np.ndarray:
        return self.luminance.reshape(self.height, self.width)


def spectral_residual_saliency(image: GrayImage, smoothing_sigma: float = DEFAULT_SIGMA) -> SaliencyMap:
    """
    Compute a spectral residual saliency map.

    Args:
        image: Grayscale frame, at least 8x8
        smoothing_sigma: Gaussian smoothing of the squared reconstruction, pixels

    Returns:
        SaliencyMap with the input's dimensions, min-max normalized to [0, 1];
        all zeros when the raw map is flat
    """
    if image.width < MIN_SIDE or image.height < MIN_SIDE:
        raise ImageTooSmall(
            f"spectral residual needs at least {MIN_SIDE}x{MIN_SIDE}, got {image.width}x{image.height}"
        )
    if smoothing_sigma <= 0:
        raise ValueError(f"smoothing_sigma must be positive, got {smoothing_sigma}")

    spectrum = np.fft.fft2(image.grid)
    amplitude = np.abs(spectrum)
    peak = amplitude.max()
    support = amplitude > SPECTRUM_FLOOR * peak if peak > 0 else np.zeros_like(amplitude, dtype=bool)

    log_amplitude = np.log(np.where(support, amplitude, SPECTRUM_FLOOR * max(peak, 1.0)))
    residual = log_amplitude - box_filter(log_amplitude, size=3, mode="wrap")

    unit_phase = np.zeros_like(spectrum)
    unit_phase[support] = spectrum[support] / amplitude[support]
    reconstruction = np.fft.ifft2(np.exp(residual) * unit_phase)

    raw = gaussian_blur(np.abs(reconstruction) ** 2, smoothing_sigma)
    low, high = raw.min(), raw.max()
    if high - low < ZERO_RANGE:
        logger.debug("Flat saliency response, returning all-zero map")
        normalized = np.zeros_like(raw)
    else:
        normalized = np.clip((raw - low) / (high - low), 0.0, 1.0)

    return SaliencyMap.from_grid(normalized)
