"""Per-sample evaluation records and table-style summary reports."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .errors import SchemaViolation
from .fontsim import FontSimilarityReport

ABSENT = "—"  # em dash cell for metrics that were not supplied

# Report column order: font similarity, text accuracy, prompt alignment.
REPORT_COLUMNS = (
    ("Max-IoU", "mean_max_iou"),
    ("HOG-sim.", "mean_hog"),
    ("MS-SSIM", "mean_ms_ssim"),
    ("LPIPS", "mean_lpips"),
    ("WordAcc", "word_acc"),
    ("NED", "mean_ned"),
    ("CLIP score", "mean_clip"),
    ("SigLIP score", "mean_siglip"),
)


@dataclass(frozen=True)
class EvalRecord:
    """One evaluated sample; optional metric families stay None when their
    inputs (transcripts, embeddings) were not provided."""

    sample_id: str
    font_id: str
    word: str
    prompt: str
    font_sim: FontSimilarityReport
    exact_match: Optional[bool] = None
    ned: Optional[float] = None
    clip: Optional[float] = None
    siglip: Optional[float] = None
    complexity: Optional[str] = None

    def to_dict(self) -> dict:
        row = {
            "sample_id": self.sample_id,
            "font": self.font_id,
            "word": self.word,
            "prompt": self.prompt,
            "font_sim": {
                "max_iou": self.font_sim.max_iou,
                "hog_sim": self.font_sim.hog_sim,
                "ms_ssim": self.font_sim.ms_ssim,
            },
        }
        if self.font_sim.lpips is not None:
            row["font_sim"]["lpips"] = self.font_sim.lpips
        if self.exact_match is not None:
            row["text_acc"] = {"exact_match": self.exact_match, "ned": self.ned}
        align = {}
        if self.clip is not None:
            align["clip"] = self.clip
        if self.siglip is not None:
            align["siglip"] = self.siglip
        if align:
            row["prompt_align"] = align
        if self.complexity is not None:
            row["complexity"] = self.complexity
        return row

    @classmethod
    def from_dict(cls, row: dict) -> "EvalRecord":
        try:
            fs = row["font_sim"]
            report = FontSimilarityReport(max_iou=fs["max_iou"], hog_sim=fs["hog_sim"],
                                          ms_ssim=fs["ms_ssim"], lpips=fs.get("lpips"))
            text = row.get("text_acc") or {}
            align = row.get("prompt_align") or {}
            return cls(sample_id=row["sample_id"], font_id=row["font"],
                       word=row["word"], prompt=row.get("prompt", ""),
                       font_sim=report,
                       exact_match=text.get("exact_match"), ned=text.get("ned"),
                       clip=align.get("clip"), siglip=align.get("siglip"),
                       complexity=row.get("complexity"))
        except (KeyError, TypeError) as exc:
            raise SchemaViolation(f"bad eval record: {exc}") from exc


@dataclass(frozen=True)
class EvalSummary:
    n: int
    mean_max_iou: Optional[float] = None
    mean_hog: Optional[float] = None
    mean_ms_ssim: Optional[float] = None
    mean_lpips: Optional[float] = None
    word_acc: Optional[float] = None
    mean_ned: Optional[float] = None
    mean_clip: Optional[float] = None
    mean_siglip: Optional[float] = None
    flagged: Tuple[str, ...] = ()

    def to_dict(self) -> dict:
        out = {"n": self.n, "flagged": list(self.flagged)}
        for _, attr in REPORT_COLUMNS:
            out[attr] = getattr(self, attr)
        return out

    @classmethod
    def from_dict(cls, row: dict) -> "EvalSummary":
        kwargs = {attr: row.get(attr) for _, attr in REPORT_COLUMNS}
        return cls(n=int(row["n"]), flagged=tuple(row.get("flagged", ())), **kwargs)


def _mean(values: List[float]) -> Optional[float]:
    return sum(values) / len(values) if values else None


def summarize(records: Sequence[EvalRecord], flagged: Sequence[str] = ()) -> EvalSummary:
    """Arithmetic means over present per-record values; absent stays None."""
    return EvalSummary(
        n=len(records),
        mean_max_iou=_mean([r.font_sim.max_iou for r in records]),
        mean_hog=_mean([r.font_sim.hog_sim for r in records]),
        mean_ms_ssim=_mean([r.font_sim.ms_ssim for r in records]),
        mean_lpips=_mean([r.font_sim.lpips for r in records
                          if r.font_sim.lpips is not None]),
        word_acc=_mean([float(r.exact_match) for r in records
                        if r.exact_match is not None]),
        mean_ned=_mean([r.ned for r in records if r.ned is not None]),
        mean_clip=_mean([r.clip for r in records if r.clip is not None]),
        mean_siglip=_mean([r.siglip for r in records if r.siglip is not None]),
        flagged=tuple(flagged),
    )


# ---- record file IO ----

def write_records(records: Sequence[EvalRecord], path) -> None:
    """Records as JSONL sorted by sample_id, so reruns are byte-identical."""
    ordered = sorted(records, key=lambda r: r.sample_id)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in ordered:
            fh.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")


def read_records(path) -> List[EvalRecord]:
    records = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            records.append(EvalRecord.from_dict(json.loads(line)))
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"{path}:{lineno}: invalid JSON: {exc}") from exc
    return records


# ---- report rendering ----

def _cell(value: Optional[float]) -> str:
    return ABSENT if value is None else f"{value:.4f}"


def render_report(summary: EvalSummary, fmt: str = "markdown") -> str:
    """Render the summary with the standard eight metric columns."""
    headers = [name for name, _ in REPORT_COLUMNS]
    cells = [_cell(getattr(summary, attr)) for _, attr in REPORT_COLUMNS]
    if fmt == "json":
        return json.dumps(summary.to_dict(), indent=2, sort_keys=True)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n"] + headers)
        writer.writerow([summary.n] + cells)
        return buf.getvalue()
    if fmt == "markdown":
        lines = [
            "| n | " + " | ".join(headers) + " |",
            "|" + "---|" * (len(headers) + 1),
            f"| {summary.n} | " + " | ".join(cells) + " |",
        ]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")
