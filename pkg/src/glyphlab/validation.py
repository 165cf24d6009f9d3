"""Input validation and coercion helpers shared across modules."""

from __future__ import annotations

import hashlib
import math
import random

import numpy as np

from .errors import DimensionMismatch, EmptyMask


def as_bool_mask(arr, name: str = "mask") -> np.ndarray:
    """Coerce input to a 2-D boolean array without copying when possible."""
    a = np.asarray(arr)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if a.dtype == bool:
        return a
    return a != 0


def require_nonempty(mask: np.ndarray, name: str = "mask") -> np.ndarray:
    mask = as_bool_mask(mask, name)
    if not mask.any():
        raise EmptyMask(f"{name} has no true pixels")
    return mask


def as_gray_image(arr, name: str = "image") -> np.ndarray:
    """Coerce input to a 2-D float64 grayscale image."""
    a = np.asarray(arr)
    if a.ndim != 2:
        raise ValueError(f"{name} must be a 2-D grayscale image, got shape {a.shape}")
    return a.astype(np.float64, copy=False)


def check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch: {a.shape} vs {b.shape}")


def round_half_up(x: float) -> int:
    """Round to nearest integer, halves away from zero-free: floor(x + 0.5).

    Used everywhere a continuous size or coordinate lands on the pixel grid,
    so the implementation and its test oracles agree bit-for-bit.
    """
    return int(math.floor(x + 0.5))


def stable_rng(seed: int, *tokens) -> random.Random:
    """RNG whose stream depends only on (seed, tokens), not on process state.

    str hashes are salted per interpreter run, so per-font streams derive
    their seed from a SHA-256 digest instead.
    """
    key = ":".join([str(seed)] + [str(t) for t in tokens])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two vectors; 0.0 if either has zero norm.

    Computed as sign(d) * sqrt(d^2 / (aa * bb)) so that identical or
    positively-scaled inputs yield exactly 1.0.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise DimensionMismatch(f"vector length mismatch: {a.size} vs {b.size}")
    d = float(np.dot(a, b))
    aa = float(np.dot(a, a))
    bb = float(np.dot(b, b))
    if aa == 0.0 or bb == 0.0:
        return 0.0
    c = math.copysign(math.sqrt((d * d) / (aa * bb)), d)
    return max(-1.0, min(1.0, c))
