"""Text accuracy metrics: Levenshtein distance, NED, and word accuracy.

Comparisons are case-agnostic via plain ASCII folding (evaluation words are
English); predictions are stripped of surrounding whitespace before scoring,
interior whitespace counts as characters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Sequence

from .errors import EmptyBatch, SchemaViolation

_FOLD = str.maketrans("ABCDEFGHIJKLMNOPQRSTUVWXYZ", "abcdefghijklmnopqrstuvwxyz")


@dataclass(frozen=True)
class TranscriptPair:
    predicted: str
    ground_truth: str

    def __post_init__(self):
        if not self.ground_truth:
            raise ValueError("ground_truth must be nonempty")


def ascii_fold(s: str) -> str:
    return s.translate(_FOLD)


def levenshtein(a: str, b: str) -> int:
    """Minimal number of unit-cost insertions/deletions/substitutions."""
    if a == b:
        return 0
    if len(a) > len(b):
        a, b = b, a
    previous = list(range(len(a) + 1))
    for j, cb in enumerate(b, start=1):
        current = [j]
        for i, ca in enumerate(a, start=1):
            if ca == cb:
                current.append(previous[i - 1])
            else:
                current.append(1 + min(previous[i - 1], previous[i], current[-1]))
        previous = current
    return previous[-1]


def ned(pair: TranscriptPair) -> float:
    """Normalized edit distance similarity in [0, 1]; 1 iff folded equality."""
    pred = ascii_fold(pair.predicted.strip())
    truth = ascii_fold(pair.ground_truth.strip())
    longest = max(len(pred), len(truth))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(pred, truth) / longest


def exact_match(pair: TranscriptPair) -> bool:
    return ascii_fold(pair.predicted.strip()) == ascii_fold(pair.ground_truth.strip())


def word_acc(pairs: Sequence[TranscriptPair]) -> float:
    """Fraction of pairs whose folded prediction equals the ground truth."""
    if not pairs:
        raise EmptyBatch("word accuracy over zero pairs is undefined")
    return sum(exact_match(p) for p in pairs) / len(pairs)


def read_transcripts(path) -> Dict[str, str]:
    """Load a transcripts JSONL file: {"sample_id": ..., "predicted": ...}."""
    out: Dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            row = json.loads(line)
            out[str(row["sample_id"])] = str(row["predicted"])
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise SchemaViolation(f"{path}:{lineno}: bad transcript row: {exc}") from exc
    return out
