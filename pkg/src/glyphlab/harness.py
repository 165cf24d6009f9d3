"""Batch evaluation: run the metric pipeline over a manifest of samples.

Per-sample failures (a missing mask file) flag the sample and continue;
structural manifest problems abort. Output record files are ordered by
sample id so identical inputs reproduce byte-identical outputs.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .config import RunConfig
from .embeds import EmbeddingPair, clip_score, siglip_score
from .errors import GlyphLabError, ManifestError
from .fontsim import font_similarity, quality_filter
from .fonts import FontAsset
from .records import EvalRecord, EvalSummary, summarize, write_records
from .render import load_mask, render_word
from .textacc import TranscriptPair, exact_match, ned

RECORDS_FILENAME = "records.jsonl"
SUMMARY_FILENAME = "summary.json"


@dataclass(frozen=True)
class EvalSample:
    sample_id: str
    font_id: str
    word: str
    prompt: str
    gen_mask: str
    complexity: Optional[str] = None


def read_eval_manifest(path) -> List[EvalSample]:
    """Eval manifest JSONL: {"sample_id", "font", "word", "prompt", "gen_mask"}."""
    samples: List[EvalSample] = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            row = json.loads(line)
            samples.append(EvalSample(
                sample_id=str(row["sample_id"]), font_id=str(row["font"]),
                word=str(row["word"]), prompt=str(row.get("prompt", "")),
                gen_mask=str(row["gen_mask"]), complexity=row.get("complexity")))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ManifestError(f"{path}:{lineno}: bad manifest row: {exc}") from exc
    ids = [s.sample_id for s in samples]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ManifestError(f"duplicate sample ids in {path}: {dupes[:5]}")
    return samples


def write_eval_manifest(samples: Sequence[EvalSample], path) -> int:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            row = {"sample_id": s.sample_id, "font": s.font_id, "word": s.word,
                   "prompt": s.prompt, "gen_mask": s.gen_mask}
            if s.complexity:
                row["complexity"] = s.complexity
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    return len(samples)


class _GroundTruthCache:
    """Render-on-demand cache of ground-truth glyph masks per (font, word)."""

    def __init__(self, fonts: Mapping[str, FontAsset], cfg: RunConfig):
        self._fonts = fonts
        self._cfg = cfg
        self._cache: Dict[Tuple[str, str], object] = {}

    def mask(self, font_id: str, word: str):
        key = (font_id, word)
        if key not in self._cache:
            font = self._fonts.get(font_id)
            if font is None:
                raise ManifestError(f"manifest references unknown font {font_id!r}")
            self._cache[key] = render_word(word, font, self._cfg.canvas_size,
                                           self._cfg.fill_ratio).mask
        return self._cache[key]


def _evaluate_one(sample: EvalSample, masks_dir: Path, gt: _GroundTruthCache,
                  transcripts, clip_vecs, siglip_vecs, cfg: RunConfig) -> EvalRecord:
    mask_path = Path(sample.gen_mask)
    if not mask_path.is_absolute():
        mask_path = masks_dir / mask_path
    gen_mask = load_mask(mask_path)
    report = font_similarity(gen_mask, gt.mask(sample.font_id, sample.word),
                             cfg.align, canvas_size=cfg.metric_canvas)

    match = ned_value = None
    if transcripts is not None and sample.sample_id in transcripts:
        pair = TranscriptPair(predicted=transcripts[sample.sample_id],
                              ground_truth=sample.word)
        match, ned_value = exact_match(pair), ned(pair)

    clip = siglip = None
    if clip_vecs is not None and sample.sample_id in clip_vecs:
        img, txt = clip_vecs[sample.sample_id]
        clip = clip_score(EmbeddingPair(img, txt, family="clip"))
    if siglip_vecs is not None and sample.sample_id in siglip_vecs:
        img, txt = siglip_vecs[sample.sample_id]
        siglip = siglip_score(EmbeddingPair(img, txt, family="siglip"),
                              cfg.siglip_logit_scale, cfg.siglip_logit_bias)

    return EvalRecord(sample_id=sample.sample_id, font_id=sample.font_id,
                      word=sample.word, prompt=sample.prompt, font_sim=report,
                      exact_match=match, ned=ned_value, clip=clip, siglip=siglip,
                      complexity=sample.complexity)


def evaluate_run(samples: Sequence[EvalSample], masks_dir,
                 fonts: Mapping[str, FontAsset], out_dir,
                 transcripts: Optional[Mapping[str, str]] = None,
                 clip_embeddings=None, siglip_embeddings=None,
                 cfg: Optional[RunConfig] = None,
                 jobs: int = 1) -> Tuple[EvalSummary, List[EvalRecord]]:
    """Evaluate every sample; write records.jsonl + summary.json under out_dir.

    Samples whose mask file is absent are flagged (skipped, listed in the
    summary) rather than failing the run.
    """
    cfg = cfg or RunConfig()
    masks_dir = Path(masks_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    gt = _GroundTruthCache(fonts, cfg)
    ordered = sorted(samples, key=lambda s: s.sample_id)

    # pre-render ground truths serially: the cache is shared across workers
    for s in ordered:
        gt.mask(s.font_id, s.word)

    flagged: List[str] = []
    records: List[EvalRecord] = []

    def run(sample: EvalSample):
        return _evaluate_one(sample, masks_dir, gt, transcripts,
                             clip_embeddings, siglip_embeddings, cfg)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda s: _safe(run, s), ordered))
    else:
        results = [_safe(run, s) for s in ordered]

    for sample, result in zip(ordered, results):
        if isinstance(result, EvalRecord):
            records.append(result)
        else:
            flagged.append(sample.sample_id)

    summary = summarize(records, flagged=flagged)
    write_records(records, out_dir / RECORDS_FILENAME)
    (out_dir / SUMMARY_FILENAME).write_text(
        json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    return summary, records


def _safe(fn, sample):
    try:
        return fn(sample)
    except (FileNotFoundError, OSError):
        return None
    except GlyphLabError as exc:
        if isinstance(exc, ManifestError):
            raise
        return None


def filter_samples(records: Sequence[EvalRecord],
                   max_iou_min: float = None,
                   hog_sim_min: float = None) -> Tuple[List[EvalRecord], List[EvalRecord]]:
    """Partition records by the font-similarity keep rule."""
    kwargs = {}
    if max_iou_min is not None:
        kwargs["max_iou_min"] = max_iou_min
    if hog_sim_min is not None:
        kwargs["hog_sim_min"] = hog_sim_min
    kept, rejected = [], []
    for rec in records:
        (kept if quality_filter(rec.font_sim, **kwargs) else rejected).append(rec)
    return kept, rejected
