"""Independent reference implementations used only to check the library.

These deliberately avoid the library's code paths: the alignment enumerator
walks every placement through sliding windows and einsum counting, the edit
distance fills the full DP matrix.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def oracle_scale(mask: np.ndarray, s: float) -> np.ndarray:
    """Nearest-neighbor rescale per the documented center-sampling formula."""
    h, w = mask.shape
    hs = max(1, math.floor(h * s + 0.5))
    ws = max(1, math.floor(w * s + 0.5))
    rows = np.array([min(int((i + 0.5) * h / hs), h - 1) for i in range(hs)])
    cols = np.array([min(int((j + 0.5) * w / ws), w - 1) for j in range(ws)])
    return mask[rows[:, None], cols[None, :]]


def brute_force_align(gen: np.ndarray, gt: np.ndarray, scales) -> tuple:
    """Exhaustive stride-1 sweep over every box-overlapping placement.

    Returns (iou, scale, tx, ty) with ties broken toward the smallest
    |log scale| then smallest |tx| + |ty|.
    """
    ys, xs = np.nonzero(gen)
    x0, y0 = int(xs.min()), int(ys.min())
    crop0 = gen[y0:int(ys.max()) + 1, x0:int(xs.max()) + 1]
    gys, gxs = np.nonzero(gt)
    gx0, gx1 = int(gxs.min()), int(gxs.max())
    gy0, gy1 = int(gys.min()), int(gys.max())
    n_gt = int(len(gys))
    gt_h, gt_w = gt.shape

    best = None
    for s in scales:
        crop = oracle_scale(crop0, float(s)).astype(np.float64)
        hs, ws = crop.shape
        n_crop = int(crop.sum())
        ox = math.floor(float(s) * x0 + 0.5)
        oy = math.floor(float(s) * y0 + 0.5)

        padded = np.zeros((gt_h + 2 * (hs - 1), gt_w + 2 * (ws - 1)))
        padded[hs - 1:hs - 1 + gt_h, ws - 1:ws - 1 + gt_w] = gt
        windows = sliding_window_view(padded, (hs, ws))

        pys = np.arange(gy0 - hs + 1, gy1 + 1)
        pxs = np.arange(gx0 - ws + 1, gx1 + 1)
        sub = windows[np.ix_(pys + hs - 1, pxs + ws - 1)]
        inter = np.einsum("pqij,ij->pq", sub, crop)
        union = n_crop + n_gt - inter
        ious = np.where(union > 0, inter / np.maximum(union, 1), 0.0)

        for iy, ix in np.argwhere(ious == ious.max()):
            ty = int(pys[iy] - oy)
            tx = int(pxs[ix] - ox)
            key = (float(ious[iy, ix]), -abs(math.log(float(s))), -(abs(tx) + abs(ty)))
            if best is None or key > best[0]:
                best = (key, float(s), tx, ty)
    (iou, _, _), s_best, tx, ty = best
    return iou, s_best, tx, ty


def dp_levenshtein(a: str, b: str) -> int:
    """Full-matrix Wagner-Fischer edit distance."""
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        table[i][0] = i
    for j in range(m + 1):
        table[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            table[i][j] = min(table[i - 1][j] + 1,
                              table[i][j - 1] + 1,
                              table[i - 1][j - 1] + cost)
    return table[n][m]
