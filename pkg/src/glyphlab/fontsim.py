"""Font similarity: align two glyph masks, then score Max-IoU / HOG / MS-SSIM.

After the IoU-maximizing alignment, both masks are rendered into a common
256x256 frame (glyph = 0 on a 255 background) so the HOG descriptor lengths
and MS-SSIM scales are well defined regardless of the input resolutions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from PIL import Image

from .align import (AlignmentResult, AlignSearchConfig, _as_mask, _scaled_crop,
                    align_max_iou)
from .hog import hog_descriptor, hog_similarity
from .msssim import ms_ssim
from .render import tight_bbox
from .validation import require_nonempty, round_half_up

RENDER_SIZE = 256
RENDER_PAD = 16

MAX_IOU_KEEP_MIN = 0.59
HOG_SIM_KEEP_MIN = 0.80


@dataclass(frozen=True)
class FontSimilarityReport:
    """Per-sample font similarity bundle; lpips is an external pass-through."""

    max_iou: float
    hog_sim: float
    ms_ssim: float
    lpips: Optional[float] = None


def _fit_into(canvas_size: int, pad: int, plane: np.ndarray) -> np.ndarray:
    """Uniformly scale a float coverage plane into a padded square canvas."""
    ph, pw = plane.shape
    scale = (canvas_size - 2 * pad) / max(ph, pw)
    th = max(1, round_half_up(ph * scale))
    tw = max(1, round_half_up(pw * scale))
    resized = np.asarray(
        Image.fromarray(plane.astype(np.float32), mode="F").resize((tw, th), Image.BILINEAR))
    out = np.zeros((canvas_size, canvas_size), dtype=np.float64)
    y0 = (canvas_size - th) // 2
    x0 = (canvas_size - tw) // 2
    out[y0:y0 + th, x0:x0 + tw] = np.clip(resized, 0.0, 1.0)
    return out


def render_aligned_pair(gen, gt, alignment: AlignmentResult,
                        canvas_size: int = RENDER_SIZE,
                        pad: int = RENDER_PAD) -> Tuple[np.ndarray, ...]:
    """Render the aligned masks into one frame.

    Returns (gen_gray, gt_gray, gen_mask, gt_mask): grays are float images
    with ink 0 on background 255, masks binarize coverage at 0.5.
    """
    gen = require_nonempty(_as_mask(gen), "gen")
    gt = require_nonempty(_as_mask(gt), "gt")
    crop, ox, oy = _scaled_crop(gen, alignment.scale)
    px, py = ox + alignment.tx, oy + alignment.ty
    gx0, gy0, gw, gh = tight_bbox(gt)

    x_lo, y_lo = min(px, gx0), min(py, gy0)
    x_hi = max(px + crop.shape[1], gx0 + gw)
    y_hi = max(py + crop.shape[0], gy0 + gh)
    shape = (y_hi - y_lo, x_hi - x_lo)

    gen_plane = np.zeros(shape, dtype=np.float64)
    gen_plane[py - y_lo:py - y_lo + crop.shape[0],
              px - x_lo:px - x_lo + crop.shape[1]] = crop
    gt_plane = np.zeros(shape, dtype=np.float64)
    gt_plane[gy0 - y_lo:gy0 - y_lo + gh, gx0 - x_lo:gx0 - x_lo + gw] = \
        gt[gy0:gy0 + gh, gx0:gx0 + gw]

    gen_cov = _fit_into(canvas_size, pad, gen_plane)
    gt_cov = _fit_into(canvas_size, pad, gt_plane)
    return (255.0 * (1.0 - gen_cov), 255.0 * (1.0 - gt_cov),
            gen_cov >= 0.5, gt_cov >= 0.5)


def font_similarity(gen, gt, cfg: Optional[AlignSearchConfig] = None,
                    canvas_size: int = RENDER_SIZE) -> FontSimilarityReport:
    """Align gen to gt, then compute Max-IoU, HOG similarity and MS-SSIM."""
    alignment = align_max_iou(gen, gt, cfg)
    gen_gray, gt_gray, gen_mask, gt_mask = render_aligned_pair(
        gen, gt, alignment, canvas_size=canvas_size)
    hog = hog_similarity(hog_descriptor(gen_mask), hog_descriptor(gt_mask))
    structural = ms_ssim(gen_gray, gt_gray)
    return FontSimilarityReport(max_iou=alignment.iou, hog_sim=hog,
                                ms_ssim=structural)


def quality_filter(report: FontSimilarityReport,
                   max_iou_min: float = MAX_IOU_KEEP_MIN,
                   hog_sim_min: float = HOG_SIM_KEEP_MIN) -> bool:
    """Keep rule for refined scene-text samples; both inequalities strict."""
    return report.max_iou > max_iou_min and report.hog_sim > hog_sim_min
