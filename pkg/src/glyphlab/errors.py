"""Exception hierarchy for glyphlab.

Every error raised by the library derives from GlyphLabError so callers can
catch toolkit failures without swallowing programming errors.
"""


class GlyphLabError(Exception):
    """Base class for all glyphlab errors."""


# ---- font loading / rendering ----

class UnreadableFont(GlyphLabError):
    """Font file is corrupt, truncated, or not a scalable font."""


class EmptyFont(GlyphLabError):
    """Font parsed but maps no code points to glyphs."""


class MissingGlyph(GlyphLabError):
    """A requested code point is not covered by the font."""


class WordTooLong(GlyphLabError):
    """Scaled glyph would be unusably small (height < 4 px)."""


class EmptyMask(GlyphLabError):
    """A binary mask with no true pixels where at least one is required."""


# ---- scene composition ----

class DegenerateQuad(GlyphLabError):
    """Quadrilateral is non-convex or has (near-)zero area."""


class TransformOutOfBounds(GlyphLabError):
    """Warped glyph box leaves the background image."""


# ---- dataset building ----

class DictionaryTooSmall(GlyphLabError):
    """More distinct words requested than the dictionary holds."""


class InvalidDictionary(GlyphLabError):
    """Word dictionary violates its length/charset/uniqueness contract."""


class InsufficientWordsForFont(GlyphLabError):
    """A font has no candidate reference render under the pairing mode."""


class MalformedTemplate(GlyphLabError):
    """Prompt template does not contain exactly one '<*>' placeholder."""


class SchemaViolation(GlyphLabError):
    """A manifest or label file does not match its documented schema."""


# ---- metrics ----

class DimensionMismatch(GlyphLabError):
    """Two arrays that must share a shape or length do not."""


class TooSmall(GlyphLabError):
    """Input too small for the requested number of dyadic scales."""


class ZeroVector(GlyphLabError):
    """An embedding vector with zero norm where a direction is required."""


class EmptyBatch(GlyphLabError):
    """An aggregate metric was asked for over zero samples."""


# ---- evaluation harness ----

class ManifestError(GlyphLabError):
    """Evaluation manifest is unreadable or structurally invalid."""


class MissingMask(GlyphLabError):
    """A sample's generated-mask file is absent."""
