"""Prompt-alignment scores computed over externally supplied embeddings.

Encoder inference is out of scope; callers provide per-sample image/text
vectors (JSONL or NPZ) and, for the sigmoid score, the checkpoint's logit
scale and bias.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Tuple

import numpy as np

from .errors import DimensionMismatch, SchemaViolation, ZeroVector
from .validation import cosine_similarity


@dataclass(frozen=True)
class EmbeddingPair:
    image_vec: np.ndarray
    text_vec: np.ndarray
    family: str  # "clip" or "siglip"

    def __post_init__(self):
        object.__setattr__(self, "image_vec", np.asarray(self.image_vec, dtype=np.float64))
        object.__setattr__(self, "text_vec", np.asarray(self.text_vec, dtype=np.float64))
        if self.family not in ("clip", "siglip"):
            raise ValueError(f"unknown embedding family {self.family!r}")


def _checked_cosine(pair: EmbeddingPair) -> float:
    img, txt = pair.image_vec, pair.text_vec
    if img.shape != txt.shape:
        raise DimensionMismatch(
            f"embedding dims differ: {img.shape} vs {txt.shape}")
    if not np.any(img):
        raise ZeroVector("image embedding has zero norm")
    if not np.any(txt):
        raise ZeroVector("text embedding has zero norm")
    return cosine_similarity(img, txt)


def clip_score(pair: EmbeddingPair) -> float:
    """100 x max(0, cosine) between image and text embeddings."""
    if pair.family != "clip":
        raise ValueError(f"clip_score needs family 'clip', got {pair.family!r}")
    return 100.0 * max(0.0, _checked_cosine(pair))


def siglip_score(pair: EmbeddingPair, logit_scale: float, logit_bias: float) -> float:
    """sigmoid(logit_scale * cosine + logit_bias), in (0, 1)."""
    if pair.family != "siglip":
        raise ValueError(f"siglip_score needs family 'siglip', got {pair.family!r}")
    z = logit_scale * _checked_cosine(pair) + logit_bias
    return 1.0 / (1.0 + math.exp(-z))


# ---- embedding file IO ----
#
# Two on-disk layouts are accepted:
#   *.jsonl  one object per line: {"sample_id", "image_vec", "text_vec"}
#   *.npz    arrays "sample_ids" (str), "image" (N x D f32), "text" (N x D f32)

def read_embeddings(path) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
    path = Path(path)
    if path.suffix == ".npz":
        data = np.load(path, allow_pickle=False)
        try:
            ids = [str(s) for s in data["sample_ids"]]
            image = np.asarray(data["image"], dtype=np.float32)
            text = np.asarray(data["text"], dtype=np.float32)
        except KeyError as exc:
            raise SchemaViolation(f"{path}: missing npz array {exc}") from exc
        if not (len(ids) == image.shape[0] == text.shape[0]):
            raise SchemaViolation(f"{path}: id/image/text row counts differ")
        return {sid: (image[i], text[i]) for i, sid in enumerate(ids)}

    out: Dict[str, Tuple[np.ndarray, np.ndarray]] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            row = json.loads(line)
            out[str(row["sample_id"])] = (
                np.asarray(row["image_vec"], dtype=np.float32),
                np.asarray(row["text_vec"], dtype=np.float32),
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise SchemaViolation(f"{path}:{lineno}: bad embedding row: {exc}") from exc
    return out


def write_embeddings_npz(path, ids, image: np.ndarray, text: np.ndarray) -> None:
    np.savez(path, sample_ids=np.asarray(list(ids)),
             image=np.asarray(image, dtype=np.float32),
             text=np.asarray(text, dtype=np.float32))
