"""Multi-scale SSIM on grayscale glyph renderings.

Standard 5-scale construction: Gaussian window 11 (sigma 1.5) applied in
'valid' mode, contrast-structure means collected at every scale, luminance
folded in at the coarsest, 2x2 average-pool downsampling between scales.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.ndimage import convolve1d

from .errors import TooSmall
from .validation import as_gray_image, check_same_shape

SCALE_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
WINDOW_SIZE = 11
WINDOW_SIGMA = 1.5


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    offsets = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(offsets ** 2) / (2.0 * sigma ** 2))
    return g / g.sum()


def _filter_valid(img: np.ndarray, window: np.ndarray) -> np.ndarray:
    r = window.size // 2
    out = convolve1d(img, window, axis=0, mode="constant")
    out = convolve1d(out, window, axis=1, mode="constant")
    return out[r:-r, r:-r]


def _downsample(img: np.ndarray) -> np.ndarray:
    h, w = img.shape
    img = img[:h - h % 2, :w - w % 2]
    return (img[0::2, 0::2] + img[1::2, 0::2] + img[0::2, 1::2] + img[1::2, 1::2]) / 4.0


def ms_ssim(a, b, data_range: float = 255.0,
            weights: Sequence[float] = SCALE_WEIGHTS,
            win_size: int = WINDOW_SIZE, sigma: float = WINDOW_SIGMA) -> float:
    """Multi-scale structural similarity of two equal-size grayscale images.

    Raises TooSmall when the image cannot support the requested number of
    dyadic scales (min side must be >= win_size * 2**(levels-1), i.e. 176
    for the 5-scale default).
    """
    a = as_gray_image(a, "a")
    b = as_gray_image(b, "b")
    check_same_shape(a, b)
    levels = len(weights)
    min_side = min(a.shape)
    needed = win_size * 2 ** (levels - 1)
    if min_side < needed:
        raise TooSmall(
            f"{levels}-scale MS-SSIM with window {win_size} needs images >= "
            f"{needed} px per side, got {a.shape}")

    window = _gaussian_window(win_size, sigma)
    c1 = (0.01 * data_range) ** 2
    c2 = (0.03 * data_range) ** 2

    values = []
    for level in range(levels):
        mu_a = _filter_valid(a, window)
        mu_b = _filter_valid(b, window)
        var_a = _filter_valid(a * a, window) - mu_a * mu_a
        var_b = _filter_valid(b * b, window) - mu_b * mu_b
        cov = _filter_valid(a * b, window) - mu_a * mu_b
        cs_map = (2.0 * cov + c2) / (var_a + var_b + c2)
        if level < levels - 1:
            values.append(float(cs_map.mean()))
            a = _downsample(a)
            b = _downsample(b)
        else:
            l_map = (2.0 * mu_a * mu_b + c1) / (mu_a * mu_a + mu_b * mu_b + c1)
            values.append(float((l_map * cs_map).mean()))

    result = 1.0
    for value, weight in zip(values, weights):
        result *= max(value, 0.0) ** weight
    return float(result)
