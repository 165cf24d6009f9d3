"""Command line interface: dataset synthesis and evaluation subcommands."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np
from PIL import Image

from . import compose as compose_mod
from . import dataset as dataset_mod
from . import prompts as prompts_mod
from .config import RunConfig
from .errors import GlyphLabError, ManifestError
from .fonts import find_font_files, load_fonts
from .harness import evaluate_run, filter_samples, read_eval_manifest
from .records import EvalSummary, read_records, render_report, write_records
from .render import render_word, save_glyph_render
from .validation import stable_rng


def _load_config(path) -> RunConfig:
    return RunConfig.from_file(path) if path else RunConfig()


def _fonts_from_dir(fonts_dir) -> dict:
    files = find_font_files(fonts_dir)
    if not files:
        raise click.ClickException(f"no font files under {fonts_dir}")
    return {f.font_id: f for f in load_fonts(files)}


def _read_jsonl(path):
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            rows.append(json.loads(line))
    return rows


@click.group()
@click.option("--seed", default=0, show_default=True, help="Global RNG seed.")
@click.option("--jobs", default=1, show_default=True, help="Parallel workers.")
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="JSON (or TOML) run configuration.")
@click.pass_context
def main(ctx, seed, jobs, config_path):
    """Synthesize glyph datasets and evaluate generated visual text."""
    ctx.obj = {"seed": seed, "jobs": jobs, "cfg": _load_config(config_path)}


@main.command()
@click.option("--fonts-dir", required=True, type=click.Path(exists=True))
@click.option("--words", "words_path", required=True, type=click.Path(exists=True),
              help="Word dictionary, one word per line.")
@click.option("--per-font", default=10, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.pass_context
def render(ctx, fonts_dir, words_path, per_font, out_dir):
    """Render per-font word samples as text-only images."""
    cfg: RunConfig = ctx.obj["cfg"]
    seed = ctx.obj["seed"]
    dictionary = dataset_mod.WordDictionary.from_file(words_path)
    fonts = _fonts_from_dir(fonts_dir)
    out_dir = Path(out_dir)
    rows = []
    for font_id in sorted(fonts):
        words = dataset_mod.sample_words(dictionary, font_id, per_font, seed)
        for word in words:
            glyph = render_word(word, fonts[font_id], cfg.canvas_size, cfg.fill_ratio)
            save_glyph_render(glyph, out_dir / font_id, word)
            rows.append({"font": font_id, "word": word,
                         "canvas": f"{font_id}/{word}.png",
                         "mask": f"{font_id}/{word}.mask.png",
                         "bbox": list(glyph.bbox)})
    manifest = out_dir / "renders.jsonl"
    with open(manifest, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    click.echo(f"rendered {len(rows)} text-only images -> {manifest}")


@main.command()
@click.option("--renders", "renders_path", required=True, type=click.Path(exists=True))
@click.option("--backgrounds", "bg_dir", required=True, type=click.Path(exists=True))
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True))
@click.option("--bg-prompts", "bg_prompts_path", type=click.Path(exists=True),
              default=None, help="JSONL {background_id, prompt} original prompts.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.pass_context
def compose(ctx, renders_path, bg_dir, labels_path, bg_prompts_path, out_dir):
    """Composite rendered glyphs into labeled background regions."""
    cfg: RunConfig = ctx.obj["cfg"]
    seed = ctx.obj["seed"]
    labels = compose_mod.load_quad_labels(labels_path)
    if not labels:
        raise click.ClickException(f"no quad labels in {labels_path}")
    bg_prompts = {}
    if bg_prompts_path:
        for row in _read_jsonl(bg_prompts_path):
            bg_prompts[row["background_id"]] = row["prompt"]
    renders_dir = Path(renders_path).parent
    out_dir = Path(out_dir)
    label_ids = sorted(labels)
    rows = []
    for idx, row in enumerate(_read_jsonl(renders_path)):
        rng = stable_rng(seed, "compose", row["font"], row["word"])
        background_id = label_ids[rng.randrange(len(label_ids))]
        quad = labels[background_id]
        bg_path = _find_background(Path(bg_dir), background_id)
        with Image.open(bg_path) as img:
            background = np.asarray(img.convert("RGB"))
        with Image.open(renders_dir / row["canvas"]) as img:
            canvas = np.asarray(img.convert("L"))
        glyph = _glyph_from_canvas(row, canvas)
        scene = compose_mod.compose_scene(
            background, glyph, quad, margin=cfg.margin,
            color=compose_mod.sample_color(rng.randrange(2 ** 31)),
            original_prompt=bg_prompts.get(background_id, ""),
            phrase_seed=rng.randrange(2 ** 31))
        spec = compose_mod.SceneSpec(
            background_path=bg_path, quad=quad, word=row["word"],
            font_id=row["font"], color=(0, 0, 0), margin=cfg.margin)
        stem = f"{row['font']}__{row['word']}__{idx:05d}"
        compose_mod.save_scene(scene, spec, out_dir, stem)
        rows.append({"font": row["font"], "word": row["word"],
                     "path": f"{stem}.png", "mask": f"{stem}.mask.png",
                     "background_id": background_id, "prompt": scene.prompt})
    manifest = out_dir / "scenes.jsonl"
    with open(manifest, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    click.echo(f"composited {len(rows)} scene-text images -> {manifest}")


def _find_background(bg_dir: Path, background_id: str) -> Path:
    for suffix in (".png", ".jpg", ".jpeg"):
        candidate = bg_dir / f"{background_id}{suffix}"
        if candidate.exists():
            return candidate
    raise click.ClickException(f"background {background_id!r} not found in {bg_dir}")


def _glyph_from_canvas(row, canvas):
    from .render import GlyphRender, tight_bbox
    mask = canvas <= 127
    return GlyphRender(word=row["word"], font_id=row["font"], canvas=canvas,
                       mask=mask, bbox=tight_bbox(mask))


@main.command("build-dataset")
@click.option("--renders", "renders_path", required=True, type=click.Path(exists=True),
              help="Text-only renders manifest (reference pool).")
@click.option("--scene-renders", "scenes_path", type=click.Path(exists=True),
              default=None, help="Scene renders manifest (targets for scene_text).")
@click.option("--stage", type=click.Choice(dataset_mod.STAGES), default="text_only",
              show_default=True)
@click.option("--pairing", type=click.Choice(dataset_mod.PAIRING_MODES),
              default="different", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def build_dataset(ctx, renders_path, scenes_path, stage, pairing, out_path):
    """Assemble same-font reference/target pairs into a manifest."""
    refs = dataset_mod.renders_by_font(_read_jsonl(renders_path))
    targets = None
    if scenes_path:
        targets = dataset_mod.renders_by_font(_read_jsonl(scenes_path))
    pairs = dataset_mod.build_pairs(refs, stage=stage, pairing_mode=pairing,
                                    seed=ctx.obj["seed"], targets=targets)
    count = dataset_mod.write_manifest(pairs, out_path)
    click.echo(f"wrote {count} pairs -> {out_path}")


@main.command("expand-prompts")
@click.option("--templates", "templates_path", required=True, type=click.Path(exists=True))
@click.option("--fonts-dir", type=click.Path(exists=True), default=None)
@click.option("--font-list", "font_list", type=click.Path(exists=True), default=None,
              help="Text file of font ids, one per line.")
@click.option("--words", "words_path", required=True, type=click.Path(exists=True))
@click.option("--per-font", default=10, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def expand_prompts(ctx, templates_path, fonts_dir, font_list, words_path,
                   per_font, out_path):
    """Expand '<*>' prompt templates into per-font evaluation prompts."""
    if not fonts_dir and not font_list:
        raise click.ClickException("need --fonts-dir or --font-list")
    if font_list:
        font_ids = [ln.strip() for ln in Path(font_list).read_text().splitlines()
                    if ln.strip()]
    else:
        font_ids = sorted(f.stem for f in find_font_files(fonts_dir))
    templates = prompts_mod.read_templates(templates_path)
    dictionary = dataset_mod.WordDictionary.from_file(words_path)
    expanded = prompts_mod.expand_prompts(templates, font_ids, dictionary.words,
                                          per_font, ctx.obj["seed"])
    with open(out_path, "w", encoding="utf-8") as fh:
        for item in expanded:
            fh.write(json.dumps({"font": item.font_id, "prompt": item.prompt,
                                 "word": item.word,
                                 "complexity": item.complexity},
                                sort_keys=True) + "\n")
    click.echo(f"expanded {len(expanded)} prompts -> {out_path}")


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--masks-dir", required=True, type=click.Path(exists=True))
@click.option("--fonts-dir", required=True, type=click.Path(exists=True))
@click.option("--transcripts", "transcripts_path", type=click.Path(exists=True),
              default=None)
@click.option("--clip-embeddings", type=click.Path(exists=True), default=None)
@click.option("--siglip-embeddings", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.pass_context
def evaluate(ctx, manifest_path, masks_dir, fonts_dir, transcripts_path,
             clip_embeddings, siglip_embeddings, out_dir):
    """Evaluate generated glyph masks against rendered ground truth.

    Exit codes: 0 clean, 1 manifest error, 2 finished with flagged samples.
    """
    from .embeds import read_embeddings
    from .textacc import read_transcripts
    try:
        samples = read_eval_manifest(manifest_path)
        fonts = _fonts_from_dir(fonts_dir)
        transcripts = read_transcripts(transcripts_path) if transcripts_path else None
        clip_vecs = read_embeddings(clip_embeddings) if clip_embeddings else None
        siglip_vecs = read_embeddings(siglip_embeddings) if siglip_embeddings else None
        summary, _ = evaluate_run(samples, masks_dir, fonts, out_dir,
                                  transcripts=transcripts,
                                  clip_embeddings=clip_vecs,
                                  siglip_embeddings=siglip_vecs,
                                  cfg=ctx.obj["cfg"], jobs=ctx.obj["jobs"])
    except ManifestError as exc:
        click.echo(f"manifest error: {exc}", err=True)
        sys.exit(1)
    click.echo(render_report(summary, "markdown"), nl=False)
    if summary.flagged:
        click.echo(f"flagged {len(summary.flagged)} samples: "
                   f"{', '.join(summary.flagged[:5])}", err=True)
        sys.exit(2)


@main.command("filter")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--kept", "kept_path", required=True, type=click.Path())
@click.option("--rejected", "rejected_path", required=True, type=click.Path())
@click.pass_context
def filter_cmd(ctx, records_path, kept_path, rejected_path):
    """Partition evaluation records with the font-similarity keep rule."""
    cfg: RunConfig = ctx.obj["cfg"]
    records = read_records(records_path)
    kept, rejected = filter_samples(records, max_iou_min=cfg.filter_max_iou,
                                    hog_sim_min=cfg.filter_hog_sim)
    write_records(kept, kept_path)
    write_records(rejected, rejected_path)
    click.echo(f"kept {len(kept)} / rejected {len(rejected)} "
               f"(Max-IoU > {cfg.filter_max_iou}, HOG-sim. > {cfg.filter_hog_sim})")


@main.command()
@click.option("--summary", "summary_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "markdown"]),
              default="markdown", show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
def report(summary_path, fmt, out_path):
    """Render an evaluation summary as a metric table."""
    summary = EvalSummary.from_dict(
        json.loads(Path(summary_path).read_text(encoding="utf-8")))
    text = render_report(summary, fmt)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    main()
