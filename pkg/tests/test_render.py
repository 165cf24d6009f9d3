"""Glyph rendering contracts: determinism, centering, scale, mask consistency."""

import json

import numpy as np
import pytest

from glyphlab.errors import EmptyMask, MissingGlyph, WordTooLong
from glyphlab.render import (load_mask, render_word, save_glyph_render,
                             tight_bbox)
from glyphlab.validation import round_half_up


class TestTightBbox:
    def test_single_pixel(self):
        mask = np.zeros((30, 30), bool)
        mask[20, 10] = True
        assert tight_bbox(mask) == (10, 20, 1, 1)

    def test_all_true(self):
        assert tight_bbox(np.ones((8, 8), bool)) == (0, 0, 8, 8)

    def test_extremal_points(self):
        mask = np.zeros((10, 10), bool)
        mask[0, 0] = True
        mask[3, 7] = True
        assert tight_bbox(mask) == (0, 0, 8, 4)

    def test_empty_raises(self):
        with pytest.raises(EmptyMask):
            tight_bbox(np.zeros((5, 5), bool))


class TestRenderWord:
    def test_scale_contract_quake_512(self, dejavu):
        render = render_word("quake", dejavu, 512, 0.8)
        x, y, w, h = render.bbox
        assert abs(max(w, h) - 410) <= 1

    def test_scale_contract_general(self, render_cache, dejavu):
        for word, canvas, fill in [("halt", 256, 0.8), ("iv", 300, 0.5),
                                   ("mmmmmm", 200, 0.9)]:
            render = render_word(word, dejavu, canvas, fill)
            target = round_half_up(fill * canvas)
            assert abs(max(render.bbox[2], render.bbox[3]) - target) <= 1

    def test_deterministic_bit_identical(self, dejavu):
        a = render_word(".", dejavu, 128, 0.8)
        b = render_word(".", dejavu, 128, 0.8)
        assert (a.canvas == b.canvas).all()
        assert (a.mask == b.mask).all()
        assert a.bbox == b.bbox

    def test_missing_glyph(self, dejavu):
        with pytest.raises(MissingGlyph):
            render_word("日本", dejavu, 512, 0.8)

    def test_centering_within_one_px(self, render_cache):
        for word in ["quake", "legacy", "io"]:
            render = render_cache(word)
            x, y, w, h = render.bbox
            center = render.canvas_size / 2
            assert abs(x + w / 2 - center) <= 1.0
            assert abs(y + h / 2 - center) <= 1.0

    def test_mask_canvas_consistency(self, render_cache):
        render = render_cache("quake")
        assert (render.canvas[render.mask] < 128).all()
        # borders never touched by an 0.8-fill glyph
        assert (render.canvas[0, :] == 255).all()
        assert (render.canvas[:, 0] == 255).all()

    def test_bbox_is_tight(self, render_cache):
        render = render_cache("halt")
        assert render.bbox == tight_bbox(render.mask)
        x, y, w, h = render.bbox
        assert render.mask[y, :].any() and render.mask[y + h - 1, :].any()
        assert render.mask[:, x].any() and render.mask[:, x + w - 1].any()

    def test_word_too_long(self, dejavu):
        # fitting 60 glyphs into 64 px forces sub-4-px glyph height
        with pytest.raises(WordTooLong):
            render_word("m" * 60, dejavu, 64, 0.8)

    def test_rejects_bad_args(self, dejavu):
        with pytest.raises(ValueError):
            render_word("", dejavu, 512, 0.8)
        with pytest.raises(ValueError):
            render_word("ok", dejavu, 512, 0.0)
        with pytest.raises(ValueError):
            render_word("ok", dejavu, 512, 1.5)


class TestDiskRoundTrip:
    def test_save_then_load_mask(self, tmp_path, render_cache):
        render = render_cache("halt")
        meta = save_glyph_render(render, tmp_path, "halt")
        loaded = load_mask(tmp_path / meta["mask"])
        assert (loaded == render.mask).all()
        sidecar = json.loads((tmp_path / "halt.json").read_text())
        assert sidecar["bbox"] == list(render.bbox)
        assert sidecar["word"] == "halt"

    def test_mask_png_values_are_binary(self, tmp_path, render_cache):
        from PIL import Image
        save_glyph_render(render_cache("halt"), tmp_path, "halt")
        arr = np.asarray(Image.open(tmp_path / "halt.mask.png"))
        assert set(np.unique(arr)) <= {0, 255}
