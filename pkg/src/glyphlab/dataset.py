"""Paired-dataset assembly: word dictionaries, same-font pairing, manifests.

Pairs are emitted per target image, each matched with a reference of the
same font whose word relation follows the pairing mode ("different", "same",
or "mixed_1_to_3" at roughly one same-word pair per three different-word
pairs). Manifests are JSON lines, one pair per line, with a leading comment
header.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, NamedTuple, Sequence

from .errors import (DictionaryTooSmall, InsufficientWordsForFont,
                     InvalidDictionary, SchemaViolation)
from .validation import stable_rng

STAGES = ("text_only", "scene_text")
PAIRING_MODES = ("different", "same", "mixed_1_to_3")
MANIFEST_HEADER = "# glyphlab pair manifest v1"


@dataclass(frozen=True)
class WordDictionary:
    """A deduplicated list of ASCII words with bounded lengths."""

    words: tuple
    min_len: int = 4
    max_len: int = 7

    def __post_init__(self):
        words = tuple(self.words)
        seen = set()
        for w in words:
            if not (self.min_len <= len(w) <= self.max_len):
                raise InvalidDictionary(
                    f"word {w!r} outside length [{self.min_len}, {self.max_len}]")
            if not (w.isascii() and w.isalpha()):
                raise InvalidDictionary(f"word {w!r} is not ASCII letters only")
            if w in seen:
                raise InvalidDictionary(f"duplicate word {w!r}")
            seen.add(w)
        object.__setattr__(self, "words", words)

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def from_file(cls, path, min_len: int = 4, max_len: int = 7) -> "WordDictionary":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        words = [ln.strip() for ln in lines if ln.strip() and not ln.startswith("#")]
        return cls(words=tuple(words), min_len=min_len, max_len=max_len)

    def to_file(self, path) -> None:
        Path(path).write_text("\n".join(self.words) + "\n", encoding="utf-8")


class RenderRef(NamedTuple):
    """One rendered image of a word, addressed by path."""

    word: str
    path: str


@dataclass(frozen=True)
class DatasetPair:
    reference_path: str
    target_path: str
    font_id: str
    ref_word: str
    target_word: str
    stage: str

    def __post_init__(self):
        if self.stage not in STAGES:
            raise SchemaViolation(f"unknown stage {self.stage!r}")


def sample_words(dictionary: WordDictionary, font_id: str, k: int,
                 seed: int) -> List[str]:
    """k distinct words for one font; the stream depends only on (font_id, seed)."""
    if k > len(dictionary):
        raise DictionaryTooSmall(
            f"asked for {k} words from a {len(dictionary)}-word dictionary")
    rng = stable_rng(seed, "words", font_id)
    return rng.sample(list(dictionary.words), k)


def _candidates(refs: Sequence[RenderRef], word: str, same: bool) -> List[RenderRef]:
    if same:
        return [r for r in refs if r.word == word]
    return [r for r in refs if r.word != word]


def build_pairs(renders: Mapping[str, Sequence[RenderRef]],
                stage: str = "text_only",
                pairing_mode: str = "different",
                seed: int = 0,
                targets: Mapping[str, Sequence[RenderRef]] = None) -> List[DatasetPair]:
    """Pair every target image with a same-font reference render.

    `renders` is the reference pool (text-only images) keyed by font id;
    `targets` defaults to the same pool, which yields the text-only stage's
    self-pairing. Deterministic per seed.
    """
    if stage not in STAGES:
        raise ValueError(f"stage must be one of {STAGES}, got {stage!r}")
    if pairing_mode not in PAIRING_MODES:
        raise ValueError(f"pairing_mode must be one of {PAIRING_MODES}, got {pairing_mode!r}")
    if targets is None:
        targets = renders

    pairs: List[DatasetPair] = []
    for font_id in sorted(targets):
        refs = list(renders.get(font_id, ()))
        if not refs:
            raise InsufficientWordsForFont(f"font {font_id!r} has no reference renders")
        rng = stable_rng(seed, "pairs", font_id)
        for target in targets[font_id]:
            if pairing_mode == "mixed_1_to_3":
                want_same = rng.random() < 0.25
                cands = _candidates(refs, target.word, want_same) \
                    or _candidates(refs, target.word, not want_same)
            else:
                cands = _candidates(refs, target.word, pairing_mode == "same")
            if not cands:
                raise InsufficientWordsForFont(
                    f"font {font_id!r} has no {pairing_mode!r} reference for "
                    f"word {target.word!r}")
            ref = rng.choice(cands)
            pairs.append(DatasetPair(reference_path=ref.path,
                                     target_path=target.path,
                                     font_id=font_id,
                                     ref_word=ref.word,
                                     target_word=target.word,
                                     stage=stage))
    return pairs


# ---- manifest IO (JSON lines) ----

_PAIR_KEYS = ("ref", "tgt", "font", "ref_word", "tgt_word", "stage")


def write_manifest(pairs: Sequence[DatasetPair], path) -> int:
    """Write pairs as JSONL under a comment header; returns the count."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(MANIFEST_HEADER + "\n")
        for p in pairs:
            fh.write(json.dumps({
                "ref": p.reference_path, "tgt": p.target_path, "font": p.font_id,
                "ref_word": p.ref_word, "tgt_word": p.target_word, "stage": p.stage,
            }, sort_keys=True) + "\n")
    return len(pairs)


def read_manifest(path) -> List[DatasetPair]:
    pairs: List[DatasetPair] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        missing = [k for k in _PAIR_KEYS if k not in row]
        if missing:
            raise SchemaViolation(f"{path}:{lineno}: missing fields {missing}")
        pairs.append(DatasetPair(reference_path=row["ref"], target_path=row["tgt"],
                                 font_id=row["font"], ref_word=row["ref_word"],
                                 target_word=row["tgt_word"], stage=row["stage"]))
    return pairs


def ensure_disjoint(train_ids: Sequence[str], eval_ids: Sequence[str],
                    kind: str = "fonts") -> None:
    """Guard against train/eval leakage when both sets are supplied."""
    overlap = sorted(set(train_ids) & set(eval_ids))
    if overlap:
        raise ValueError(f"train/eval {kind} overlap: {overlap[:10]}"
                         f"{'...' if len(overlap) > 10 else ''}")


def renders_by_font(entries: Sequence[dict]) -> Dict[str, List[RenderRef]]:
    """Group render-manifest rows ({"font", "word", "canvas"/"path"}) by font."""
    grouped: Dict[str, List[RenderRef]] = {}
    for row in entries:
        try:
            path = row.get("path") or row["canvas"]
            grouped.setdefault(row["font"], []).append(RenderRef(row["word"], path))
        except KeyError as exc:
            raise SchemaViolation(f"render row missing {exc}: {row}") from exc
    return grouped
