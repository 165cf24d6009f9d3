"""Histogram-of-Oriented-Gradients descriptors for glyph boundary comparison.

Canonical unsigned configuration: 9 orientation bins over [0, 180), 8x8-pixel
cells, 2x2-cell blocks normalized with L2 (eps 1e-6), computed on the mask
resized to 128x128. Output length is fixed: 15 * 15 * 4 * 9 = 8100.
"""

from __future__ import annotations

import numpy as np
from PIL import Image

from .validation import as_bool_mask, cosine_similarity

HOG_IMAGE_SIZE = 128
ORIENTATIONS = 9
CELL_SIZE = 8
BLOCK_CELLS = 2
BLOCK_NORM_EPS = 1e-6


def descriptor_length(size: int = HOG_IMAGE_SIZE) -> int:
    cells = size // CELL_SIZE
    blocks = cells - BLOCK_CELLS + 1
    return blocks * blocks * BLOCK_CELLS * BLOCK_CELLS * ORIENTATIONS


def _to_float_image(mask, size: int) -> np.ndarray:
    img = as_bool_mask(mask).astype(np.float32)
    if img.shape != (size, size):
        pil = Image.fromarray(img, mode="F").resize((size, size), Image.BILINEAR)
        img = np.asarray(pil)
    return img.astype(np.float64)


def hog_descriptor(mask, size: int = HOG_IMAGE_SIZE) -> np.ndarray:
    """HOG feature vector of a binary glyph mask (resized internally).

    Gradients are central differences with zero borders; each pixel votes
    its magnitude into the single 20-degree bin containing its unsigned
    orientation.
    """
    if size % CELL_SIZE != 0:
        raise ValueError(f"size must be a multiple of {CELL_SIZE}")
    img = _to_float_image(mask, size)

    gy = np.zeros_like(img)
    gx = np.zeros_like(img)
    gy[1:-1, :] = img[2:, :] - img[:-2, :]
    gx[:, 1:-1] = img[:, 2:] - img[:, :-2]
    magnitude = np.hypot(gy, gx)
    orientation = np.degrees(np.arctan2(gy, gx)) % 180.0
    bins = np.minimum((orientation / (180.0 / ORIENTATIONS)).astype(np.intp),
                      ORIENTATIONS - 1)

    n_cells = size // CELL_SIZE
    hist = np.zeros((n_cells, n_cells, ORIENTATIONS), dtype=np.float64)
    for b in range(ORIENTATIONS):
        votes = np.where(bins == b, magnitude, 0.0)
        hist[:, :, b] = votes.reshape(n_cells, CELL_SIZE, n_cells, CELL_SIZE).sum(axis=(1, 3))

    view = np.lib.stride_tricks.sliding_window_view(
        hist, (BLOCK_CELLS, BLOCK_CELLS, ORIENTATIONS))[:, :, 0]
    norms = np.sqrt((view ** 2).sum(axis=(2, 3, 4)) + BLOCK_NORM_EPS ** 2)
    normalized = view / norms[:, :, None, None, None]
    return normalized.ravel()


def hog_similarity(a, b) -> float:
    """Cosine similarity of two HOG descriptors; 0.0 if either is all-zero."""
    return cosine_similarity(np.asarray(a, dtype=np.float64),
                             np.asarray(b, dtype=np.float64))
