"""Rasterize words as black glyphs centered on white canvases.

The renderer supersamples with FreeType at a large point size, measures the
actual ink, and downsamples so the tight glyph box hits the requested fill
exactly. Canvases keep the anti-aliased coverage; masks binarize it at 0.5.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from .errors import EmptyMask, MissingGlyph, WordTooLong
from .fonts import FontAsset
from .validation import round_half_up

Box = Tuple[int, int, int, int]  # (x, y, w, h)

MIN_GLYPH_HEIGHT = 4
_PROBE_SIZE = 128
_SUPERSAMPLE = 2.5
_MAX_POINT_SIZE = 4096


def tight_bbox(mask) -> Box:
    """Minimal axis-aligned box (x, y, w, h) enclosing all true pixels."""
    mask = np.asarray(mask, dtype=bool)
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        raise EmptyMask("cannot take the bounding box of an all-false mask")
    x0, x1 = int(xs.min()), int(xs.max())
    y0, y1 = int(ys.min()), int(ys.max())
    return (x0, y0, x1 - x0 + 1, y1 - y0 + 1)


@dataclass(frozen=True, eq=False)
class GlyphRender:
    """A rasterized word: anti-aliased canvas, exact binary mask, tight box.

    canvas: uint8 H x W, 0 = full ink, 255 = background.
    mask:   bool H x W, true where ink coverage >= 0.5.
    bbox:   tight (x, y, w, h) of the mask.
    """

    word: str
    font_id: str
    canvas: np.ndarray
    mask: np.ndarray
    bbox: Box

    @property
    def canvas_size(self) -> int:
        return self.canvas.shape[0]


@functools.lru_cache(maxsize=256)
def _truetype(path: str, size: int) -> ImageFont.FreeTypeFont:
    return ImageFont.truetype(path, size=size)


def _render_ink(font: FontAsset, word: str, point_size: int):
    """Render at `point_size` and return the ink crop around coverage >= 0.5."""
    ft = _truetype(str(font.source_path), point_size)
    left, top, right, bottom = ft.getbbox(word)
    pad = max(8, point_size // 4)
    width = max(1, right - left) + 2 * pad
    height = max(1, bottom - top) + 2 * pad
    img = Image.new("L", (width, height), 255)
    ImageDraw.Draw(img).text((pad - left, pad - top), word, font=ft, fill=0)
    ink = 255 - np.asarray(img, dtype=np.uint8)
    solid = ink >= 128
    if not solid.any():
        return None
    x, y, w, h = tight_bbox(solid)
    return ink[y:y + h, x:x + w].astype(np.float32)


def _fit_to_target(crop: np.ndarray, target: int):
    """Resize the ink crop so the tight >=0.5 box's larger side equals target.

    Downsampling shaves sub-0.5 coverage off boundary rows, so the resize
    size is nudged until the measured box matches.
    """
    src_h, src_w = crop.shape
    if src_w >= src_h:
        fw, fh = target, max(1, round_half_up(src_h * target / src_w))
    else:
        fh, fw = target, max(1, round_half_up(src_w * target / src_h))
    src = Image.fromarray(crop, mode="F")
    for _ in range(4):
        resized = np.asarray(src.resize((fw, fh), Image.BILINEAR))
        solid = resized >= 127.5
        if not solid.any():
            raise WordTooLong("glyph vanishes at the requested scale")
        box = tight_bbox(solid)
        max_dim = max(box[2], box[3])
        if max_dim == target:
            return resized, box
        if src_w >= src_h:
            fw = max(1, fw + target - max_dim)
            fh = max(1, round_half_up(src_h * fw / src_w))
        else:
            fh = max(1, fh + target - max_dim)
            fw = max(1, round_half_up(src_w * fh / src_h))
    return resized, box


def render_word(word: str, font: FontAsset, canvas_size: int = 512,
                fill_ratio: float = 0.8) -> GlyphRender:
    """Render `word` centered on a white canvas at the requested fill.

    The glyph is scaled so its tight box's larger dimension equals
    round(fill_ratio * canvas_size), then centered within 1 px per axis.
    """
    if not word:
        raise ValueError("word must be nonempty")
    if not 0 < fill_ratio <= 1:
        raise ValueError(f"fill_ratio must be in (0, 1], got {fill_ratio}")
    if canvas_size < MIN_GLYPH_HEIGHT:
        raise ValueError(f"canvas_size too small: {canvas_size}")
    missing = font.missing_codepoints(word)
    if missing:
        raise MissingGlyph(f"font {font.font_id!r} lacks glyphs for {missing!r}")

    target = round_half_up(fill_ratio * canvas_size)
    probe = _render_ink(font, word, _PROBE_SIZE)
    if probe is None:
        raise WordTooLong(f"{word!r} renders no ink in font {font.font_id!r}")
    probe_max = max(probe.shape)
    point_size = int(min(_MAX_POINT_SIZE,
                         max(16, _PROBE_SIZE * _SUPERSAMPLE * target / probe_max)))
    crop = _render_ink(font, word, point_size)
    if crop is None:
        raise WordTooLong(f"{word!r} renders no ink in font {font.font_id!r}")

    est_height = crop.shape[0] * target / max(crop.shape)
    if est_height < MIN_GLYPH_HEIGHT:
        raise WordTooLong(
            f"{word!r} scaled to height {est_height:.1f} px (< {MIN_GLYPH_HEIGHT})")

    ink, (bx, by, bw, bh) = _fit_to_target(crop, target)
    fh, fw = ink.shape

    canvas_ink = np.zeros((canvas_size, canvas_size), dtype=np.float32)
    px = round_half_up((canvas_size - bw) / 2) - bx
    py = round_half_up((canvas_size - bh) / 2) - by
    dst_x0, dst_y0 = max(0, px), max(0, py)
    dst_x1, dst_y1 = min(canvas_size, px + fw), min(canvas_size, py + fh)
    canvas_ink[dst_y0:dst_y1, dst_x0:dst_x1] = ink[dst_y0 - py:dst_y1 - py,
                                                   dst_x0 - px:dst_x1 - px]

    canvas = (255 - np.rint(np.clip(canvas_ink, 0, 255))).astype(np.uint8)
    mask = canvas <= 127
    bbox = tight_bbox(mask)
    if bbox[3] < MIN_GLYPH_HEIGHT:
        raise WordTooLong(f"{word!r} rendered {bbox[3]} px tall (< {MIN_GLYPH_HEIGHT})")
    return GlyphRender(word=word, font_id=font.font_id, canvas=canvas,
                       mask=mask, bbox=bbox)


# ---- disk round-trip (canvas PNG + mask PNG + JSON sidecar) ----

def mask_to_image(mask: np.ndarray) -> Image.Image:
    """Binary mask as an 8-bit PNG-ready image with 255 = glyph."""
    return Image.fromarray(np.where(np.asarray(mask, bool), 255, 0).astype(np.uint8))


def image_to_mask(img: Image.Image) -> np.ndarray:
    """Inverse of mask_to_image; soft masks binarize at 0.5 (>= 128)."""
    return np.asarray(img.convert("L")) >= 128


def save_glyph_render(render: GlyphRender, out_dir, stem: str) -> dict:
    """Write canvas/mask PNGs and a JSON sidecar; returns the sidecar dict."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    canvas_path = out_dir / f"{stem}.png"
    mask_path = out_dir / f"{stem}.mask.png"
    meta_path = out_dir / f"{stem}.json"
    Image.fromarray(render.canvas).save(canvas_path)
    mask_to_image(render.mask).save(mask_path)
    meta = {
        "word": render.word,
        "font": render.font_id,
        "bbox": list(render.bbox),
        "canvas": canvas_path.name,
        "mask": mask_path.name,
    }
    meta_path.write_text(json.dumps(meta, sort_keys=True) + "\n", encoding="utf-8")
    return meta


def load_mask(path) -> np.ndarray:
    with Image.open(path) as img:
        return image_to_mask(img)
