"""Font loading and coverage parsing."""

from pathlib import Path

import pytest

from glyphlab.errors import EmptyFont, MissingGlyph, UnreadableFont
from glyphlab.fonts import find_font_files, load_font, load_fonts
from glyphlab.render import render_word

from .conftest import DEJAVU_DIR, LATIN_SAMPLE


def test_load_font_populates_fields(dejavu):
    assert dejavu.units_per_em > 0
    assert len(dejavu.glyph_coverage) > 100
    assert dejavu.covers(LATIN_SAMPLE)
    assert dejavu.covers("quake.")


def test_font_id_defaults_to_stem():
    asset = load_font(DEJAVU_DIR / "DejaVuSans.ttf")
    assert asset.font_id == "DejaVuSans"


def test_truncated_file_is_unreadable(tmp_path):
    victim = tmp_path / "broken.ttf"
    victim.write_bytes((DEJAVU_DIR / "DejaVuSans.ttf").read_bytes()[:64])
    with pytest.raises(UnreadableFont):
        load_font(victim)


def test_garbage_file_is_unreadable(tmp_path):
    victim = tmp_path / "noise.ttf"
    victim.write_bytes(b"this is not a font at all" * 10)
    with pytest.raises(UnreadableFont):
        load_font(victim)


def test_missing_file_is_unreadable(tmp_path):
    with pytest.raises(UnreadableFont):
        load_font(tmp_path / "nope.ttf")


def test_cmap_with_no_mappings_is_empty(tmp_path, monkeypatch):
    import glyphlab.fonts as fonts_mod
    monkeypatch.setattr(fonts_mod, "_parse_coverage", lambda data, off: set())
    with pytest.raises(EmptyFont):
        load_font(DEJAVU_DIR / "DejaVuSans.ttf")


def test_load_succeeds_but_rendering_uncovered_text_fails(dejavu):
    # deferred validation: loading never checks specific words
    assert not dejavu.covers("日本")
    with pytest.raises(MissingGlyph):
        render_word("日本", dejavu, 128, 0.8)


def test_find_font_files_sorted_unique():
    files = find_font_files(DEJAVU_DIR)
    assert files == sorted(set(files))
    assert all(f.suffix == ".ttf" for f in files)


def test_load_fonts_disambiguates_duplicate_stems(tmp_path):
    src = (DEJAVU_DIR / "DejaVuSans.ttf").read_bytes()
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    (tmp_path / "a" / "same.ttf").write_bytes(src)
    (tmp_path / "b" / "same.ttf").write_bytes(src)
    assets = load_fonts(find_font_files(tmp_path))
    ids = {a.font_id for a in assets}
    assert len(ids) == 2


def test_fonts_are_value_objects(dejavu):
    assert dejavu.missing_codepoints("ab日") == ["日"]
    with pytest.raises(Exception):
        dejavu.font_id = "other"  # frozen
