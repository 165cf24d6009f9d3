"""Prompt handling: training-prompt augmentation and evaluation templates."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import List, NamedTuple, Sequence

from .errors import MalformedTemplate, SchemaViolation
from .validation import stable_rng

# Verbs observed in adjusted background prompts; '<w>' is the word slot.
PHRASE_POOL = (
    ", featuring the word '<w>' written on it",
    ", bearing the word '<w>' written on it",
    ", showing the word '<w>' written on it",
    ", displaying the word '<w>' written on it",
)

PLACEHOLDER = "<*>"
COMPLEXITY_LEVELS = ("simple", "moderate", "complex")

_VOWELS = "aeiou"


def _fix_article(article: str, following: str) -> str:
    wanted = "an" if following[:1].lower() in _VOWELS else "a"
    if article[:1].isupper():
        return wanted.capitalize()
    return wanted


def augment_prompt(original_prompt: str, word: str, phrase_seed: int) -> str:
    """Drop the first standalone 'empty' and append a visual-text phrase.

    The a/an article preceding the removed token is re-agreed with the word
    that now follows it, the sentence is re-capitalized, and one phrase from
    PHRASE_POOL (selected by phrase_seed modulo pool size) is appended with
    '<w>' replaced by `word`.
    """
    if not original_prompt:
        raise ValueError("original_prompt must be nonempty")
    tokens = original_prompt.split()
    for i, token in enumerate(tokens):
        if token.lower() == "empty":
            del tokens[i]
            if 0 < i <= len(tokens) - 1 and tokens[i - 1].lower() in ("a", "an"):
                tokens[i - 1] = _fix_article(tokens[i - 1], tokens[i])
            break
    base = " ".join(tokens)
    base = base[:1].upper() + base[1:]
    phrase = PHRASE_POOL[phrase_seed % len(PHRASE_POOL)].replace("<w>", word)
    return base + phrase


@dataclass(frozen=True)
class PromptTemplate:
    """An evaluation prompt with exactly one '<*>' word placeholder."""

    text: str
    complexity: str = "simple"

    def __post_init__(self):
        if self.text.count(PLACEHOLDER) != 1:
            raise MalformedTemplate(
                f"template needs exactly one {PLACEHOLDER!r}: {self.text!r}")
        if self.complexity not in COMPLEXITY_LEVELS:
            raise ValueError(f"unknown complexity {self.complexity!r}")

    def fill(self, word: str) -> str:
        return self.text.replace(PLACEHOLDER, word)


class ExpandedPrompt(NamedTuple):
    font_id: str
    prompt: str
    word: str
    complexity: str


def expand_prompts(templates: Sequence[PromptTemplate], fonts: Sequence[str],
                   words: Sequence[str], words_per_font: int,
                   seed: int) -> List[ExpandedPrompt]:
    """Sample `words_per_font` distinct (template, random word) picks per font.

    Deterministic per seed; 300 fonts x 10 picks reproduces a 9,000-prompt
    evaluation set.
    """
    templates = list(templates)
    for t in templates:
        if not isinstance(t, PromptTemplate):
            raise MalformedTemplate(f"not a PromptTemplate: {t!r}")
    if words_per_font > len(templates):
        raise ValueError(
            f"asked for {words_per_font} prompts per font from {len(templates)} templates")
    if not words:
        raise ValueError("word list must be nonempty")
    expanded: List[ExpandedPrompt] = []
    for font_id in fonts:
        rng = stable_rng(seed, "prompts", font_id)
        for template in rng.sample(templates, words_per_font):
            word = rng.choice(list(words))
            expanded.append(ExpandedPrompt(font_id=font_id,
                                           prompt=template.fill(word),
                                           word=word,
                                           complexity=template.complexity))
    return expanded


def read_templates(path) -> List[PromptTemplate]:
    """Load template JSONL: {"text": ..., "complexity": ...} per line."""
    templates: List[PromptTemplate] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            row = json.loads(line)
            templates.append(PromptTemplate(text=row["text"],
                                            complexity=row.get("complexity", "simple")))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise SchemaViolation(f"{path}:{lineno}: bad template row: {exc}") from exc
    return templates


def write_templates(templates: Sequence[PromptTemplate], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in templates:
            fh.write(json.dumps({"text": t.text, "complexity": t.complexity},
                                sort_keys=True) + "\n")
