"""glyphlab: synthetic visual-text datasets and font-similarity evaluation.

The package covers the full desk-side loop around a visual-text generator:
render reference glyphs (black on white), composite colorized glyphs into
labeled scene regions, assemble same-font paired datasets, and score
generated outputs for font similarity (Max-IoU / HOG / MS-SSIM), text
accuracy (WordAcc / NED), and prompt alignment (CLIP / SigLIP over supplied
embeddings).
"""

from .align import (AlignmentResult, AlignSearchConfig, SegmentedGlyph,
                    align_max_iou, alignment_iou, iou, scale_mask)
from .compose import (QuadLabel, SceneRender, SceneSpec, compose_scene,
                      fit_quad_transform, load_quad_labels, sample_color,
                      warp_composite)
from .config import RunConfig
from .dataset import (DatasetPair, RenderRef, WordDictionary, build_pairs,
                      ensure_disjoint, read_manifest, sample_words,
                      write_manifest)
from .embeds import EmbeddingPair, clip_score, read_embeddings, siglip_score
from .errors import *  # noqa: F401,F403 - the exception vocabulary is the API
from .fonts import FontAsset, find_font_files, load_font, load_fonts
from .fontsim import (FontSimilarityReport, font_similarity, quality_filter,
                      render_aligned_pair)
from .harness import (EvalSample, evaluate_run, filter_samples,
                      read_eval_manifest, write_eval_manifest)
from .hog import hog_descriptor, hog_similarity
from .msssim import ms_ssim
from .prompts import (ExpandedPrompt, PromptTemplate, augment_prompt,
                      expand_prompts, read_templates, write_templates)
from .records import (EvalRecord, EvalSummary, read_records, render_report,
                      summarize, write_records)
from .render import GlyphRender, load_mask, render_word, save_glyph_render, tight_bbox
from .textacc import TranscriptPair, levenshtein, ned, read_transcripts, word_acc

__version__ = "0.1.0"
