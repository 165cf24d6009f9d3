"""Composite rendered glyphs into labeled quad regions of background images.

The glyph's tight box is placed in the quad's rectified unit frame (centered,
uniformly scaled down by the margin) and warped into the image with the
homography that maps the unit square onto the quad corners. Aspect ratio is
therefore preserved exactly in the rectified frame, which is where the
contract is defined; the on-image shape follows the quad's perspective.
"""

from __future__ import annotations

import colorsys
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from PIL import Image

from .errors import DegenerateQuad, SchemaViolation, TransformOutOfBounds
from .render import GlyphRender
from .prompts import augment_prompt

Color = Tuple[int, int, int]
Box = Tuple[float, float, float, float]

_MIN_QUAD_AREA = 1.0  # px^2


@dataclass(frozen=True)
class QuadLabel:
    """Four corners (TL, TR, BR, BL order) marking a text-placement region."""

    background_id: str
    corners: np.ndarray = field(repr=False)

    def __post_init__(self):
        corners = np.asarray(self.corners, dtype=np.float64)
        if corners.shape != (4, 2):
            raise SchemaViolation(f"corners must be 4 x 2, got {corners.shape}")
        object.__setattr__(self, "corners", corners)
        validate_quad(corners)

    def in_bounds(self, width: int, height: int) -> bool:
        xs, ys = self.corners[:, 0], self.corners[:, 1]
        return bool((xs >= 0).all() and (ys >= 0).all()
                    and (xs <= width - 1).all() and (ys <= height - 1).all())


@dataclass(frozen=True)
class SceneSpec:
    """Everything needed to composite one scene-text image."""

    background_path: Path
    quad: QuadLabel
    word: str
    font_id: str
    color: Color
    margin: float = 0.05
    prompt_template: str = ""

    def __post_init__(self):
        if not 0 <= self.margin < 0.5:
            raise ValueError(f"margin must be in [0, 0.5), got {self.margin}")
        if any(not 0 <= c <= 255 for c in self.color):
            raise ValueError(f"color channels must be in [0, 255], got {self.color}")


@dataclass(frozen=True, eq=False)
class SceneRender:
    """A composited scene: RGB image, warped glyph mask, placement metadata."""

    image: np.ndarray
    gt_mask: np.ndarray
    placed_bbox_local: Box
    prompt: str = ""


def quad_area(corners: np.ndarray) -> float:
    x, y = corners[:, 0], corners[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def validate_quad(corners: np.ndarray) -> None:
    """Raise DegenerateQuad unless corners form a strictly convex quad."""
    corners = np.asarray(corners, dtype=np.float64)
    if quad_area(corners) < _MIN_QUAD_AREA:
        raise DegenerateQuad("quad area is (near-)zero")
    edges = np.roll(corners, -1, axis=0) - corners
    nxt = np.roll(edges, -1, axis=0)
    cross = edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0]
    if np.any(cross == 0) or not (np.all(cross > 0) or np.all(cross < 0)):
        raise DegenerateQuad("corners are not strictly convex in order")


def unit_square_to_quad(corners: np.ndarray) -> np.ndarray:
    """Homography mapping (0,0),(1,0),(1,1),(0,1) to TL,TR,BR,BL."""
    src = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    dst = np.asarray(corners, dtype=np.float64)
    rows = []
    rhs = []
    for (u, v), (x, y) in zip(src, dst):
        rows.append([u, v, 1, 0, 0, 0, -u * x, -v * x])
        rhs.append(x)
        rows.append([0, 0, 0, u, v, 1, -u * y, -v * y])
        rhs.append(y)
    try:
        h = np.linalg.solve(np.asarray(rows), np.asarray(rhs))
    except np.linalg.LinAlgError as exc:
        raise DegenerateQuad(f"no homography onto quad: {exc}") from exc
    return np.append(h, 1.0).reshape(3, 3)


def placed_rect_local(glyph_bbox, margin: float) -> Box:
    """Glyph placement rectangle inside the unit square, (u, v, w, h)."""
    _, _, w, h = glyph_bbox
    longest = max(w, h)
    aw, ah = w / longest, h / longest
    s = (1.0 - 2.0 * margin) * min(1.0 / aw, 1.0 / ah)
    return (0.5 - aw * s / 2.0, 0.5 - ah * s / 2.0, aw * s, ah * s)


def fit_quad_transform(glyph_bbox, quad: QuadLabel, margin: float = 0.05) -> np.ndarray:
    """3x3 transform taking glyph-canvas pixel coords into the background.

    The glyph box lands centered in the quad's rectified unit frame, shrunk
    by the margin, with its aspect ratio preserved exactly in that frame.
    """
    if not 0 <= margin < 0.5:
        raise ValueError(f"margin must be in [0, 0.5), got {margin}")
    x0, y0, w, h = glyph_bbox
    if w < 1 or h < 1:
        raise ValueError(f"glyph bbox must be nonempty, got {glyph_bbox}")
    u0, v0, uw, vh = placed_rect_local(glyph_bbox, margin)
    su, sv = uw / w, vh / h
    placement = np.array([[su, 0.0, u0 - su * x0],
                          [0.0, sv, v0 - sv * y0],
                          [0.0, 0.0, 1.0]])
    return unit_square_to_quad(quad.corners) @ placement


def apply_transform(transform: np.ndarray, points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    homog = np.column_stack([pts, np.ones(len(pts))]) @ transform.T
    return homog[:, :2] / homog[:, 2:3]


def _bilinear_sample(padded: np.ndarray, qx: np.ndarray, qy: np.ndarray) -> np.ndarray:
    """Sample a zero-padded field at continuous coords (integer-center grid)."""
    qx = qx + 1.0
    qy = qy + 1.0
    h, w = padded.shape
    x0 = np.clip(np.floor(qx).astype(np.intp), 0, w - 2)
    y0 = np.clip(np.floor(qy).astype(np.intp), 0, h - 2)
    fx = np.clip(qx - x0, 0.0, 1.0)
    fy = np.clip(qy - y0, 0.0, 1.0)
    v00 = padded[y0, x0]
    v01 = padded[y0, x0 + 1]
    v10 = padded[y0 + 1, x0]
    v11 = padded[y0 + 1, x0 + 1]
    return (v00 * (1 - fx) * (1 - fy) + v01 * fx * (1 - fy)
            + v10 * (1 - fx) * fy + v11 * fx * fy)


def warp_composite(background: np.ndarray, glyph: GlyphRender,
                   transform: np.ndarray, color: Color,
                   placed_bbox_local: Optional[Box] = None,
                   prompt: str = "") -> SceneRender:
    """Inverse-warp the glyph's coverage into the background and colorize.

    out = coverage * color + (1 - coverage) * background per channel; pixels
    the warped glyph does not touch are bit-identical to the background.
    """
    bg = np.asarray(background)
    if bg.ndim != 3 or bg.shape[2] != 3:
        raise ValueError(f"background must be H x W x 3, got {bg.shape}")
    height, width = bg.shape[:2]
    try:
        inverse = np.linalg.inv(np.asarray(transform, dtype=np.float64))
    except np.linalg.LinAlgError as exc:
        raise DegenerateQuad(f"transform not invertible: {exc}") from exc

    x0, y0, w, h = glyph.bbox
    box_corners = np.array([[x0, y0], [x0 + w - 1, y0], [x0 + w - 1, y0 + h - 1],
                            [x0, y0 + h - 1]], dtype=np.float64)
    warped = apply_transform(transform, box_corners)
    if (warped[:, 0].min() < 0 or warped[:, 1].min() < 0
            or warped[:, 0].max() > width - 1 or warped[:, 1].max() > height - 1):
        raise TransformOutOfBounds(
            f"warped glyph box {warped.round(1).tolist()} exits {width}x{height} image")

    # one-pixel apron around the warped box catches the anti-aliased fringe
    rx0 = max(0, int(math.floor(warped[:, 0].min())) - 1)
    ry0 = max(0, int(math.floor(warped[:, 1].min())) - 1)
    rx1 = min(width, int(math.ceil(warped[:, 0].max())) + 2)
    ry1 = min(height, int(math.ceil(warped[:, 1].max())) + 2)

    ys, xs = np.mgrid[ry0:ry1, rx0:rx1]
    homog = inverse @ np.stack([xs.ravel(), ys.ravel(), np.ones(xs.size)])
    with np.errstate(divide="ignore", invalid="ignore"):
        qx = homog[0] / homog[2]
        qy = homog[1] / homog[2]
    bad = ~np.isfinite(qx) | ~np.isfinite(qy)
    qx[bad] = -10.0
    qy[bad] = -10.0

    coverage_src = (255.0 - glyph.canvas.astype(np.float64)) / 255.0
    padded = np.zeros((coverage_src.shape[0] + 2, coverage_src.shape[1] + 2))
    padded[1:-1, 1:-1] = coverage_src
    cov = _bilinear_sample(padded, qx, qy).reshape(ys.shape)

    image = bg.copy()
    region = bg[ry0:ry1, rx0:rx1].astype(np.float64)
    tint = np.asarray(color, dtype=np.float64)
    blended = region + cov[:, :, None] * (tint[None, None, :] - region)
    image[ry0:ry1, rx0:rx1] = np.rint(blended).astype(np.uint8)

    gt_mask = np.zeros((height, width), dtype=bool)
    gt_mask[ry0:ry1, rx0:rx1] = cov >= 0.5
    return SceneRender(image=image, gt_mask=gt_mask,
                       placed_bbox_local=placed_bbox_local or (0.0, 0.0, 1.0, 1.0),
                       prompt=prompt)


def sample_color(rng_seed: int) -> Color:
    """Deterministic glyph color: HSV with hue ~ U[0,360), sat ~ U[0.4,1.0],
    value ~ U[0.2,0.9], converted to RGB."""
    rng = np.random.default_rng(rng_seed)
    hue = rng.uniform(0.0, 360.0)
    sat = rng.uniform(0.4, 1.0)
    val = rng.uniform(0.2, 0.9)
    r, g, b = colorsys.hsv_to_rgb(hue / 360.0, sat, val)
    return (int(r * 255), int(g * 255), int(b * 255))


def compose_scene(background: np.ndarray, glyph: GlyphRender, quad: QuadLabel,
                  margin: float = 0.05, color: Optional[Color] = None,
                  color_seed: int = 0, original_prompt: str = "",
                  phrase_seed: int = 0) -> SceneRender:
    """Full composition step: fit, colorize, warp, and augment the prompt."""
    bg = np.asarray(background)
    if not quad.in_bounds(bg.shape[1], bg.shape[0]):
        raise TransformOutOfBounds(
            f"quad {quad.background_id!r} has corners outside the background")
    if color is None:
        color = sample_color(color_seed)
    transform = fit_quad_transform(glyph.bbox, quad, margin)
    prompt = ""
    if original_prompt:
        prompt = augment_prompt(original_prompt, glyph.word, phrase_seed)
    return warp_composite(bg, glyph, transform, color,
                          placed_bbox_local=placed_rect_local(glyph.bbox, margin),
                          prompt=prompt)


# ---- QuadLabel JSON IO ----

def load_quad_labels(path) -> Dict[str, QuadLabel]:
    """Read quad labels: a JSON array (or single object) of
    {"background_id": str, "corners": [[x, y] * 4]} in TL,TR,BR,BL order."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"{path}: not valid JSON: {exc}") from exc
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise SchemaViolation(f"{path}: expected a JSON array of quad labels")
    labels: Dict[str, QuadLabel] = {}
    for i, entry in enumerate(data):
        try:
            label = QuadLabel(background_id=str(entry["background_id"]),
                              corners=entry["corners"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaViolation(f"{path}[{i}]: bad quad label: {exc}") from exc
        labels[label.background_id] = label
    return labels


def write_quad_labels(labels: Sequence[QuadLabel], path) -> None:
    payload = [{"background_id": q.background_id,
                "corners": [[float(x), float(y)] for x, y in q.corners]}
               for q in labels]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def scene_metadata(spec: SceneSpec, render: SceneRender) -> dict:
    """Sidecar JSON for a composited scene."""
    return {
        "word": spec.word,
        "font_id": spec.font_id,
        "color": list(spec.color),
        "prompt": render.prompt,
        "corners": [[float(x), float(y)] for x, y in spec.quad.corners],
    }


def save_scene(render: SceneRender, spec: SceneSpec, out_dir, stem: str) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    Image.fromarray(render.image).save(out_dir / f"{stem}.png")
    Image.fromarray(np.where(render.gt_mask, 255, 0).astype(np.uint8)).save(
        out_dir / f"{stem}.mask.png")
    meta = scene_metadata(spec, render)
    (out_dir / f"{stem}.json").write_text(
        json.dumps(meta, sort_keys=True) + "\n", encoding="utf-8")
    return meta
