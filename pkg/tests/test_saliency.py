import numpy as np
import pytest

from src.saliency.filters import box_filter, gaussian_blur, gaussian_radius
from src.saliency.spectral_residual import GrayImage, spectral_residual_saliency
from src.utils.errors import ImageTooSmall


def _delta(size=41):
    grid = np.zeros((size, size))
    grid[size // 2, size // 2] = 1.0
    return grid


class TestGaussianBlur:
    def test_constant_image_unchanged(self):
        grid = np.full((20, 30), 0.37)
        assert np.abs(gaussian_blur(grid, 2.5) - grid).max() < 1e-12

    def test_interior_delta(self):
        sigma = 2.0
        radius = gaussian_radius(sigma)
        offsets = np.arange(-radius, radius + 1)
        kernel = np.exp(-0.5 * (offsets / sigma) ** 2)
        kernel /= kernel.sum()

        blurred = gaussian_blur(_delta(), sigma)
        assert blurred.sum() == pytest.approx(1.0, abs=1e-9)
        assert blurred[20, 20] == pytest.approx(kernel[radius] ** 2, rel=1e-9)

    def test_larger_sigma_lowers_peak(self):
        assert gaussian_blur(_delta(), 3.0).max() < gaussian_blur(_delta(), 0.5).max()

    def test_radius(self):
        assert gaussian_radius(0.1) == 1
        assert gaussian_radius(3.0) == 9

    def test_rejects_non_positive_sigma(self):
        with pytest.raises(ValueError):
            gaussian_blur(_delta(), 0.0)


def test_box_filter_wraps():
    grid = np.zeros((5, 5))
    grid[0, 0] = 9.0
    filtered = box_filter(grid, size=3)
    assert filtered[4, 4] == pytest.approx(1.0)
    assert filtered.sum() == pytest.approx(9.0)


class TestSpectralResidual:
    def test_constant_image_gives_zero_map(self):
        image = GrayImage.from_grid(np.full((32, 32), 0.5))
        saliency_map = spectral_residual_saliency(image)
        assert saliency_map.intensities.max() < 1e-6

    def test_single_block_is_most_salient(self):
        grid = np.full((64, 64), 0.2)
        grid[30:33, 40:43] = 1.0
        saliency_map = spectral_residual_saliency(GrayImage.from_grid(grid))
        row, col = np.unravel_index(np.argmax(saliency_map.grid), saliency_map.grid.shape)
        assert abs(row - 31) <= 2
        assert abs(col - 41) <= 2

    def test_output_is_normalized(self):
        rng = np.random.default_rng(0)
        saliency_map = spectral_residual_saliency(GrayImage.from_grid(rng.random((24, 40))))
        assert (saliency_map.width, saliency_map.height) == (40, 24)
        assert saliency_map.intensities.min() == pytest.approx(0.0, abs=1e-12)
        assert saliency_map.intensities.max() == pytest.approx(1.0, abs=1e-12)

    def test_deterministic(self):
        rng = np.random.default_rng(1)
        image = GrayImage.from_grid(rng.random((16, 16)))
        first = spectral_residual_saliency(image, 1.5)
        second = spectral_residual_saliency(image, 1.5)
        assert np.array_equal(first.intensities, second.intensities)

    @pytest.mark.parametrize("shape", [(7, 8), (8, 7)])
    def test_too_small(self, shape):
        with pytest.raises(ImageTooSmall):
            spectral_residual_saliency(GrayImage.from_grid(np.zeros(shape)))
