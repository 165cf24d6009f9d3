"""Alignment search: exact cases, invariances, and brute-force equivalence."""

import math

import numpy as np
import pytest
from scipy.ndimage import binary_erosion

from glyphlab.align import (AlignmentResult, AlignSearchConfig, SegmentedGlyph,
                            align_max_iou, alignment_iou, iou, scale_mask)
from glyphlab.errors import DimensionMismatch, EmptyMask

from .conftest import random_blob_mask
from .oracles import brute_force_align, oracle_scale

FULL_SEARCH = AlignSearchConfig(coarse_stride=1, refine_radius=0)


class TestIoU:
    def test_identical(self):
        m = np.zeros((10, 10), bool)
        m[2:5, 3:9] = True
        assert iou(m, m) == 1.0

    def test_disjoint(self):
        a = np.zeros((10, 10), bool)
        b = np.zeros((10, 10), bool)
        a[0, 0] = True
        b[5, 5] = True
        assert iou(a, b) == 0.0

    def test_half_overlap(self):
        a = np.zeros((10, 10), bool)
        a[:, :5] = True
        b = np.ones((10, 10), bool)
        assert iou(a, b) == 0.5

    def test_both_empty_defined_zero(self):
        z = np.zeros((4, 4), bool)
        assert iou(z, z) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            iou(np.ones((3, 3), bool), np.ones((4, 4), bool))

    def test_symmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = rng.random((16, 16)) > 0.6
            b = rng.random((16, 16)) > 0.6
            assert iou(a, b) == iou(b, a)


class TestScaleMask:
    def test_identity_at_one(self):
        m = random_blob_mask(np.random.default_rng(0))
        assert (scale_mask(m, 1.0) == m).all()

    def test_matches_oracle_formula(self):
        rng = np.random.default_rng(1)
        for s in [0.5, 0.77, 1.3, 2.0]:
            m = random_blob_mask(rng)[10:40, 12:44]
            assert (scale_mask(m, s) == oracle_scale(m, s)).all()

    def test_solid_block_doubles(self):
        m = np.ones((10, 10), bool)
        out = scale_mask(m, 2.0)
        assert out.shape == (20, 20) and out.all()


class TestAlignMaxIoU:
    def test_identity(self, render_cache):
        mask = render_cache("halt").mask
        result = align_max_iou(mask, mask)
        assert result == AlignmentResult(scale=1.0, tx=0, ty=0, iou=1.0)

    def test_translation_recovered(self, render_cache):
        mask = render_cache("halt").mask
        shifted = np.roll(np.roll(mask, 7, axis=1), -3, axis=0)
        result = align_max_iou(shifted, mask)
        assert result.iou == 1.0
        assert (result.tx, result.ty) == (-7, 3)
        assert result.scale == 1.0

    def test_exact_scale_in_grid(self):
        gen = np.zeros((80, 80), bool)
        gen[10:60, 10:60] = True
        gt = np.zeros((140, 140), bool)
        gt[20:120, 20:120] = True
        result = align_max_iou(gen, gt)
        assert result.iou == 1.0 and result.scale == 2.0

    def test_empty_mask_raises(self):
        with pytest.raises(EmptyMask):
            align_max_iou(np.zeros((8, 8), bool), np.ones((8, 8), bool))
        with pytest.raises(EmptyMask):
            align_max_iou(np.ones((8, 8), bool), np.zeros((8, 8), bool))

    def test_result_recomputable(self, render_cache):
        gt = render_cache("halt").mask
        gen = render_cache("haze").mask
        result = align_max_iou(gen, gt)
        assert alignment_iou(gen, gt, result.scale, result.tx, result.ty) == result.iou

    def test_accepts_segmented_glyphs(self, render_cache):
        mask = render_cache("halt").mask
        glyph = SegmentedGlyph.from_mask(mask)
        assert align_max_iou(glyph, glyph).iou == 1.0

    def test_matches_brute_force_small(self):
        rng = np.random.default_rng(42)
        scales = FULL_SEARCH.scales()
        for _ in range(25):
            gen = random_blob_mask(rng, frame=56, max_extent=16)
            gt = random_blob_mask(rng, frame=56, max_extent=16)
            ours = align_max_iou(gen, gt, FULL_SEARCH)
            ref_iou, _, _, _ = brute_force_align(gen, gt, scales)
            assert abs(ours.iou - ref_iou) <= 1e-9

    def test_translation_invariance(self, render_cache):
        mask = render_cache("halt", canvas=128).mask
        base = align_max_iou(mask, np.roll(mask, 2, axis=0)).iou
        for dx, dy in [(5, 0), (0, -6), (9, 9)]:
            shifted = np.roll(np.roll(mask, dx, axis=1), dy, axis=0)
            moved = align_max_iou(shifted, np.roll(mask, 2, axis=0)).iou
            assert abs(moved - base) <= 0.01

    def test_scale_invariance_at_grid_points(self, render_cache):
        mask = render_cache("halt", canvas=128).mask
        gt = render_cache("haze", canvas=128).mask
        base = align_max_iou(mask, gt).iou
        for s in [0.5, 2.0]:
            rescaled = scale_mask(mask, s)
            assert abs(align_max_iou(rescaled, gt).iou - base) <= 0.02

    def test_monotone_under_erosion(self, render_cache):
        gt = render_cache("blob", canvas=128, fill=0.7).mask
        gen = gt.copy()
        previous = align_max_iou(gen, gt).iou
        for _ in range(5):
            gen = binary_erosion(gen)
            if not gen.any():
                break
            current = align_max_iou(gen, gt).iou
            assert current <= previous + 0.005
            previous = current

    def test_tie_breaks_prefer_identity(self):
        # a 3x-repeating pattern admits several perfect alignments
        gen = np.zeros((60, 60), bool)
        gen[20:40, 15:18] = True
        gen[20:40, 30:33] = True
        gen[20:40, 45:48] = True
        result = align_max_iou(gen, gen)
        assert (result.scale, result.tx, result.ty) == (1.0, 0, 0)


class TestSearchConfig:
    def test_default_grid_hits_unity(self):
        scales = AlignSearchConfig().scales()
        assert len(scales) == 21
        assert scales[0] == 0.5 and scales[-1] == 2.0
        assert scales[10] == 1.0

    def test_json_round_trip(self, tmp_path):
        cfg = AlignSearchConfig(scale_min=0.25, scale_max=4.0, scale_steps=9,
                                coarse_stride=2, refine_radius=3)
        path = tmp_path / "search.json"
        path.write_text('{"scale_min": 0.25, "scale_max": 4.0, "scale_steps": 9, '
                        '"coarse_stride": 2, "refine_radius": 3}')
        assert AlignSearchConfig.from_json(path) == cfg

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            AlignSearchConfig(scale_min=0)
        with pytest.raises(ValueError):
            AlignSearchConfig(coarse_stride=0)
