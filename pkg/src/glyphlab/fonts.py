"""Font loading: parse scalable font files into shareable FontAsset records.

Rasterization itself is delegated to Pillow's FreeType bindings (see
render.py); this module reads the sfnt 'head' and 'cmap' tables directly so
that glyph coverage can be checked before any rendering happens.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional

from .errors import EmptyFont, UnreadableFont

FONT_SUFFIXES = (".ttf", ".otf", ".ttc", ".otc")

_SFNT_VERSIONS = (0x00010000, 0x4F54544F, 0x74727565)  # TrueType, 'OTTO', 'true'


@dataclass(frozen=True)
class FontAsset:
    """A parsed scalable font, immutable and shareable across threads."""

    font_id: str
    source_path: Path
    units_per_em: int
    glyph_coverage: frozenset = field(repr=False)

    def covers(self, text: str) -> bool:
        return all(ord(ch) in self.glyph_coverage for ch in text)

    def missing_codepoints(self, text: str) -> List[str]:
        return sorted({ch for ch in text if ord(ch) not in self.glyph_coverage})


def _u16(data: bytes, off: int) -> int:
    return struct.unpack_from(">H", data, off)[0]


def _u32(data: bytes, off: int) -> int:
    return struct.unpack_from(">I", data, off)[0]


def _parse_cmap_format0(data: bytes, off: int) -> set:
    ids = struct.unpack_from(">256B", data, off + 6)
    return {code for code, gid in enumerate(ids) if gid != 0}


def _parse_cmap_format4(data: bytes, off: int) -> set:
    seg_count = _u16(data, off + 6) // 2
    end_off = off + 14
    start_off = end_off + seg_count * 2 + 2  # +2 skips reservedPad
    delta_off = start_off + seg_count * 2
    range_off = delta_off + seg_count * 2
    covered = set()
    for i in range(seg_count):
        end = _u16(data, end_off + 2 * i)
        start = _u16(data, start_off + 2 * i)
        delta = struct.unpack_from(">h", data, delta_off + 2 * i)[0]
        id_range = _u16(data, range_off + 2 * i)
        if start == 0xFFFF:
            continue
        for code in range(start, min(end, 0xFFFE) + 1):
            if id_range == 0:
                gid = (code + delta) & 0xFFFF
            else:
                addr = range_off + 2 * i + id_range + 2 * (code - start)
                gid = _u16(data, addr)
                if gid != 0:
                    gid = (gid + delta) & 0xFFFF
            if gid != 0:
                covered.add(code)
    return covered


def _parse_cmap_format6(data: bytes, off: int) -> set:
    first = _u16(data, off + 6)
    count = _u16(data, off + 8)
    ids = struct.unpack_from(f">{count}H", data, off + 10)
    return {first + i for i, gid in enumerate(ids) if gid != 0}


def _parse_cmap_format12(data: bytes, off: int) -> set:
    n_groups = _u32(data, off + 12)
    covered = set()
    pos = off + 16
    for _ in range(n_groups):
        start, end, start_gid = struct.unpack_from(">III", data, pos)
        pos += 12
        for code in range(start, end + 1):
            if start_gid + (code - start) != 0:
                covered.add(code)
    return covered


_CMAP_PARSERS = {0: _parse_cmap_format0, 4: _parse_cmap_format4,
                 6: _parse_cmap_format6, 12: _parse_cmap_format12}


def _subtable_preference(platform: int, encoding: int, fmt: int) -> int:
    """Lower is better; prefers full-Unicode tables over BMP over legacy."""
    if fmt == 12 and (platform, encoding) in ((3, 10), (0, 4), (0, 6)):
        return 0
    if fmt == 4 and (platform, encoding) == (3, 1):
        return 1
    if platform == 0:
        return 2
    return 3


def _parse_coverage(data: bytes, cmap_off: int) -> set:
    n_tables = _u16(data, cmap_off + 2)
    candidates = []
    for i in range(n_tables):
        rec = cmap_off + 4 + 8 * i
        platform = _u16(data, rec)
        encoding = _u16(data, rec + 2)
        sub_off = cmap_off + _u32(data, rec + 4)
        fmt = _u16(data, sub_off)
        if fmt in _CMAP_PARSERS:
            candidates.append((_subtable_preference(platform, encoding, fmt), i, fmt, sub_off))
    for _, _, fmt, sub_off in sorted(candidates):
        coverage = _CMAP_PARSERS[fmt](data, sub_off)
        if coverage:
            return coverage
    return set()


def _table_directory(data: bytes, offset: int) -> dict:
    num_tables = _u16(data, offset + 4)
    tables = {}
    for i in range(num_tables):
        rec = offset + 12 + 16 * i
        tag = data[rec:rec + 4].decode("latin-1")
        tables[tag] = (_u32(data, rec + 8), _u32(data, rec + 12))
    return tables


def load_font(path, font_id: Optional[str] = None) -> FontAsset:
    """Parse a font file into a FontAsset with populated glyph coverage.

    Raises UnreadableFont for corrupt/unsupported files and EmptyFont when
    the font maps no code points. Missing glyphs for a particular word are
    reported later, at render time.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise UnreadableFont(f"cannot read font file {path}: {exc}") from exc

    try:
        if len(data) < 12:
            raise UnreadableFont(f"{path}: file too short to be a font")
        version = _u32(data, 0)
        offset = 0
        if data[:4] == b"ttcf":
            if _u32(data, 8) < 1:
                raise UnreadableFont(f"{path}: empty font collection")
            offset = _u32(data, 12)
            version = _u32(data, offset)
        if version not in _SFNT_VERSIONS:
            raise UnreadableFont(f"{path}: not a scalable sfnt font (0x{version:08x})")
        tables = _table_directory(data, offset)
        if "head" not in tables or "cmap" not in tables:
            raise UnreadableFont(f"{path}: missing required head/cmap tables")
        head_off = tables["head"][0]
        units_per_em = _u16(data, head_off + 18)
        if units_per_em <= 0:
            raise UnreadableFont(f"{path}: invalid unitsPerEm {units_per_em}")
        coverage = _parse_coverage(data, tables["cmap"][0])
    except UnreadableFont:
        raise
    except (struct.error, IndexError, UnicodeDecodeError) as exc:
        raise UnreadableFont(f"{path}: truncated or malformed font: {exc}") from exc

    if not coverage:
        raise EmptyFont(f"{path}: font maps no code points")
    return FontAsset(
        font_id=font_id or path.stem,
        source_path=path,
        units_per_em=units_per_em,
        glyph_coverage=frozenset(coverage),
    )


def find_font_files(root) -> List[Path]:
    """All font files under `root`, sorted for reproducible ordering."""
    root = Path(root)
    files: List[Path] = []
    for suffix in FONT_SUFFIXES:
        files.extend(root.rglob(f"*{suffix}"))
    return sorted(set(files))


def load_fonts(paths: Iterable) -> List[FontAsset]:
    """Load several fonts, disambiguating duplicate stems by numeric suffix."""
    assets: List[FontAsset] = []
    seen = {}
    for path in paths:
        path = Path(path)
        stem = path.stem
        if stem in seen:
            seen[stem] += 1
            font_id = f"{stem}-{seen[stem]}"
        else:
            seen[stem] = 0
            font_id = stem
        assets.append(load_font(path, font_id=font_id))
    return assets
