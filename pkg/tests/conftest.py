"""Shared fixtures: system fonts, cached renders, random mask generators."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from glyphlab.fonts import FontAsset, find_font_files, load_font

DEJAVU_DIR = Path("/usr/share/fonts/truetype/dejavu")

LATIN_SAMPLE = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _candidate_font_dirs():
    dirs = [DEJAVU_DIR, Path("/usr/share/fonts")]
    try:
        import matplotlib
        dirs.append(Path(matplotlib.get_data_path()) / "fonts" / "ttf")
    except ImportError:
        pass
    return [d for d in dirs if d.is_dir()]


@pytest.fixture(scope="session")
def latin_fonts() -> list:
    """Distinct FontAssets that cover the full basic Latin alphabet."""
    assets = []
    seen = set()
    for d in _candidate_font_dirs():
        for path in find_font_files(d):
            if path.stem in seen:
                continue
            try:
                asset = load_font(path)
            except Exception:
                continue
            if asset.covers(LATIN_SAMPLE):
                seen.add(path.stem)
                assets.append(asset)
    if len(assets) < 2:
        pytest.skip("need at least two Latin-covering fonts on this system")
    return assets


@pytest.fixture(scope="session")
def dejavu(latin_fonts) -> FontAsset:
    for asset in latin_fonts:
        if asset.font_id == "DejaVuSans":
            return asset
    return latin_fonts[0]


@pytest.fixture(scope="session")
def serif(latin_fonts) -> FontAsset:
    for asset in latin_fonts:
        if asset.font_id == "DejaVuSerif":
            return asset
    return latin_fonts[-1]


@pytest.fixture(scope="session")
def render_cache(dejavu):
    """Memoized glyph renders so expensive rasterization happens once."""
    from glyphlab.render import render_word

    cache = {}

    def get(word: str, font: FontAsset = None, canvas: int = 256, fill: float = 0.8):
        font = font or dejavu
        key = (word, font.font_id, canvas, fill)
        if key not in cache:
            cache[key] = render_word(word, font, canvas, fill)
        return cache[key]

    return get


def random_blob_mask(rng: np.random.Generator, frame: int = 64,
                     max_extent: int = 20) -> np.ndarray:
    """A nonempty random mask of rectangles and discs with a bounded box."""
    mask = np.zeros((frame, frame), dtype=bool)
    cx = rng.integers(max_extent, frame - max_extent)
    cy = rng.integers(max_extent, frame - max_extent)
    for _ in range(rng.integers(2, 6)):
        if rng.random() < 0.5:
            w = int(rng.integers(2, max_extent // 2 + 1))
            h = int(rng.integers(2, max_extent // 2 + 1))
            x = int(np.clip(cx + rng.integers(-max_extent // 2, max_extent // 2), 0, frame - w))
            y = int(np.clip(cy + rng.integers(-max_extent // 2, max_extent // 2), 0, frame - h))
            mask[y:y + h, x:x + w] = True
        else:
            r = int(rng.integers(2, max_extent // 3 + 2))
            x = int(np.clip(cx + rng.integers(-max_extent // 2, max_extent // 2), r, frame - r - 1))
            y = int(np.clip(cy + rng.integers(-max_extent // 2, max_extent // 2), r, frame - r - 1))
            ys, xs = np.ogrid[:frame, :frame]
            mask |= (xs - x) ** 2 + (ys - y) ** 2 <= r * r
    return mask
