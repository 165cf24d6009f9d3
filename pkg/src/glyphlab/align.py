"""Glyph alignment by IoU maximization over translation and uniform scale.

Search semantics, shared by the production search and any re-computation:

* The generated mask is cropped to its tight box and scaled by a factor s.
  Scaling is nearest-neighbor on pixel centers: destination size is
  max(1, floor(d * s + 0.5)) per axis and source index floor((i + 0.5) *
  src / dst).
* The scaled crop's top-left is placed at (floor(s * x0 + 0.5) + tx,
  floor(s * y0 + 0.5) + ty) where (x0, y0) is the crop origin, i.e. scale
  about the origin then translate by integer (tx, ty).
* IoU is counted on the unbounded plane: |A & B| / (|A| + |B| - |A & B|),
  so nothing is clipped at frame borders.

The search sweeps a geometric scale grid and every integer placement whose
scaled box overlaps the ground-truth box, coarsely strided then refined.
Ties break toward the smallest |log scale|, then the smallest |tx| + |ty|.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
from scipy.signal import fftconvolve

from .errors import DimensionMismatch, EmptyMask
from .render import load_mask, tight_bbox
from .validation import as_bool_mask, require_nonempty, round_half_up


@dataclass(frozen=True)
class SegmentedGlyph:
    """A binary glyph mask plus provenance (synthetic or external model)."""

    mask: np.ndarray
    source_size: Tuple[int, int]
    origin: str = "synthetic_gt"  # or "external_soft_mask"

    @classmethod
    def from_mask(cls, mask, origin: str = "synthetic_gt") -> "SegmentedGlyph":
        mask = require_nonempty(mask)
        return cls(mask=mask, source_size=mask.shape, origin=origin)

    @classmethod
    def from_file(cls, path, origin: str = "external_soft_mask") -> "SegmentedGlyph":
        return cls.from_mask(load_mask(path), origin=origin)


@dataclass(frozen=True)
class AlignSearchConfig:
    scale_min: float = 0.5
    scale_max: float = 2.0
    scale_steps: int = 21
    coarse_stride: int = 4
    refine_radius: int = 4

    def __post_init__(self):
        if not 0 < self.scale_min <= self.scale_max:
            raise ValueError("need 0 < scale_min <= scale_max")
        if self.scale_steps < 1 or self.coarse_stride < 1 or self.refine_radius < 0:
            raise ValueError("scale_steps/coarse_stride must be >= 1, refine_radius >= 0")

    def scales(self) -> np.ndarray:
        """Geometric grid; hits 1.0 exactly for the default [0.5, 2] range."""
        if self.scale_steps == 1:
            return np.array([self.scale_min])
        return np.exp2(np.linspace(math.log2(self.scale_min),
                                   math.log2(self.scale_max), self.scale_steps))

    @classmethod
    def from_json(cls, path) -> "AlignSearchConfig":
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class AlignmentResult:
    scale: float
    tx: int
    ty: int
    iou: float


def _as_mask(glyph) -> np.ndarray:
    if isinstance(glyph, SegmentedGlyph):
        return glyph.mask
    return as_bool_mask(glyph)


def iou(a, b) -> float:
    """Plain Intersection-over-Union of two equal-shaped masks; 0 when both empty."""
    a = as_bool_mask(a, "a")
    b = as_bool_mask(b, "b")
    if a.shape != b.shape:
        raise DimensionMismatch(f"iou needs equal shapes, got {a.shape} vs {b.shape}")
    inter = int(np.count_nonzero(a & b))
    union = int(np.count_nonzero(a)) + int(np.count_nonzero(b)) - inter
    return inter / union if union else 0.0


def scale_mask(mask: np.ndarray, s: float) -> np.ndarray:
    """Nearest-neighbor uniform rescale of a binary mask (see module docstring)."""
    mask = as_bool_mask(mask)
    h, w = mask.shape
    hs = max(1, round_half_up(h * s))
    ws = max(1, round_half_up(w * s))
    if (hs, ws) == (h, w):
        return mask
    rows = np.minimum((np.arange(hs) + 0.5) * h / hs, h - 1).astype(np.intp)
    cols = np.minimum((np.arange(ws) + 0.5) * w / ws, w - 1).astype(np.intp)
    return mask[np.ix_(rows, cols)]


def _scaled_crop(gen: np.ndarray, s: float):
    """Scaled tight crop of gen plus its placement origin at offset (0, 0)."""
    x0, y0, w, h = tight_bbox(gen)
    crop = scale_mask(gen[y0:y0 + h, x0:x0 + w], s)
    return crop, round_half_up(s * x0), round_half_up(s * y0)


def alignment_iou(gen, gt, scale: float, tx: int, ty: int) -> float:
    """Recompute the IoU of gt against gen transformed by (scale, tx, ty)."""
    gen = require_nonempty(_as_mask(gen), "gen")
    gt = require_nonempty(_as_mask(gt), "gt")
    crop, ox, oy = _scaled_crop(gen, scale)
    px, py = ox + tx, oy + ty
    hs, ws = crop.shape
    gth, gtw = gt.shape
    y0, y1 = max(py, 0), min(py + hs, gth)
    x0, x1 = max(px, 0), min(px + ws, gtw)
    inter = 0
    if y1 > y0 and x1 > x0:
        inter = int(np.count_nonzero(crop[y0 - py:y1 - py, x0 - px:x1 - px]
                                     & gt[y0:y1, x0:x1]))
    union = int(np.count_nonzero(crop)) + int(np.count_nonzero(gt)) - inter
    return inter / union if union else 0.0


def _intersection_table(gt_f: np.ndarray, crop: np.ndarray) -> np.ndarray:
    """Integer intersection counts for every placement of crop over gt.

    Entry [py + hs - 1, px + ws - 1] counts overlap for top-left placement
    (px, py). FFT correlation of 0/1 arrays, rounded back to exact counts.
    """
    corr = fftconvolve(gt_f, crop[::-1, ::-1].astype(np.float64), mode="full")
    return np.rint(corr).astype(np.int64).clip(min=0)


def _best_in_window(inter, n_crop, n_gt, pys, pxs, ox, oy):
    """Best (iou, |tx|+|ty|, ty, tx) over the given placement grid.

    inter row py + hs - 1 / col px + ws - 1 holds the overlap count for the
    top-left placement (px, py).
    """
    hs, ws, crop_count = n_crop
    table = inter[np.ix_(pys + hs - 1, pxs + ws - 1)]
    union = crop_count + n_gt - table
    ious = np.where(union > 0, table / np.maximum(union, 1), 0.0)
    best = float(ious.max())
    ty_grid = pys[:, None] - oy
    tx_grid = pxs[None, :] - ox
    tsum = np.abs(ty_grid) + np.abs(tx_grid)
    cand = np.argwhere(ious == best)
    order = np.argsort(tsum[cand[:, 0], cand[:, 1]], kind="stable")
    iy, ix = cand[order[0]]
    return best, int(tsum[iy, ix]), int(ty_grid[iy, 0]), int(tx_grid[0, ix])


def align_max_iou(gen, gt, cfg: Optional[AlignSearchConfig] = None) -> AlignmentResult:
    """Coarse-to-fine exhaustive search for the IoU-maximizing (scale, tx, ty).

    With coarse_stride=1 this is a full stride-1 sweep over every placement
    whose scaled gen box overlaps the gt box, at every grid scale.
    """
    cfg = cfg or AlignSearchConfig()
    gen = require_nonempty(_as_mask(gen), "gen")
    gt = require_nonempty(_as_mask(gt), "gt")
    gx0, gy0, gw, gh = tight_bbox(gt)
    gt_f = gt.astype(np.float64)
    n_gt = int(np.count_nonzero(gt))

    best = None
    for s in cfg.scales():
        crop, ox, oy = _scaled_crop(gen, s)
        hs, ws = crop.shape
        inter = _intersection_table(gt_f, crop)
        pys = np.arange(gy0 - hs + 1, gy0 + gh, cfg.coarse_stride)
        pxs = np.arange(gx0 - ws + 1, gx0 + gw, cfg.coarse_stride)
        n_crop = (hs, ws, int(np.count_nonzero(crop)))
        val, tsum, ty, tx = _best_in_window(inter, n_crop, n_gt, pys, pxs, ox, oy)
        key = (val, -abs(math.log(s)), -tsum)
        if best is None or key > best[0]:
            best = (key, float(s), tx, ty)

    # refine translations at stride 1 around the coarse optimum's scale
    _, s_star, tx_c, ty_c = best
    crop, ox, oy = _scaled_crop(gen, s_star)
    hs, ws = crop.shape
    inter = _intersection_table(gt_f, crop)
    n_crop = (hs, ws, int(np.count_nonzero(crop)))
    py_c, px_c = oy + ty_c, ox + tx_c
    pys = np.arange(max(gy0 - hs + 1, py_c - cfg.refine_radius),
                    min(gy0 + gh - 1, py_c + cfg.refine_radius) + 1)
    pxs = np.arange(max(gx0 - ws + 1, px_c - cfg.refine_radius),
                    min(gx0 + gw - 1, px_c + cfg.refine_radius) + 1)
    val, tsum, ty, tx = _best_in_window(inter, n_crop, n_gt, pys, pxs, ox, oy)
    key = (val, -abs(math.log(s_star)), -tsum)
    if key > best[0]:
        best = (key, s_star, tx, ty)

    (val, _, _), s_star, tx, ty = best
    return AlignmentResult(scale=s_star, tx=tx, ty=ty, iou=val)


def transformed_mask_extent(gen, scale: float, tx: int, ty: int) -> Tuple[int, int, int, int]:
    """Box (x, y, w, h) occupied by the transformed gen mask in gt coordinates."""
    gen = require_nonempty(_as_mask(gen), "gen")
    crop, ox, oy = _scaled_crop(gen, scale)
    return (ox + tx, oy + ty, crop.shape[1], crop.shape[0])


def transform_mask(gen, scale: float, tx: int, ty: int, out_shape: Tuple[int, int]) -> np.ndarray:
    """Render the transformed gen mask into a frame of out_shape (clipping)."""
    gen = require_nonempty(_as_mask(gen), "gen")
    crop, ox, oy = _scaled_crop(gen, scale)
    px, py = ox + tx, oy + ty
    hs, ws = crop.shape
    out = np.zeros(out_shape, dtype=bool)
    y0, y1 = max(py, 0), min(py + hs, out_shape[0])
    x0, x1 = max(px, 0), min(px + ws, out_shape[1])
    if y1 > y0 and x1 > x0:
        out[y0:y1, x0:x1] = crop[y0 - py:y1 - py, x0 - px:x1 - px]
    return out
