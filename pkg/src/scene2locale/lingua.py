"""Script detection, dictionary translation and punctuation-free tokenization."""

from __future__ import annotations

import csv
import enum
import re
import unicodedata
from dataclasses import dataclass
from typing import Iterable, Mapping


class ScriptId(enum.Enum):
    LATIN = "latin"
    DEVANAGARI = "devanagari"
    TELUGU = "telugu"

    @property
    def language(self) -> str:
        return SCRIPT_LANGUAGE[self]

    @property
    def head(self) -> str:
        return SCRIPT_HEAD[self]


SCRIPT_LANGUAGE = {ScriptId.LATIN: "English", ScriptId.DEVANAGARI: "Hindi", ScriptId.TELUGU: "Telugu"}
SCRIPT_HEAD = {ScriptId.LATIN: "en", ScriptId.DEVANAGARI: "hi", ScriptId.TELUGU: "te"}

# tie-break order is the declaration order
_BLOCKS = (
    (ScriptId.LATIN, None),
    (ScriptId.DEVANAGARI, (0x0900, 0x097F)),
    (ScriptId.TELUGU, (0x0C00, 0x0C7F)),
)


def _script_of(ch: str) -> ScriptId | None:
    cat = unicodedata.category(ch)
    if cat[0] not in "LM":
        return None
    if ("a" <= ch <= "z") or ("A" <= ch <= "Z"):
        return ScriptId.LATIN
    cp = ord(ch)
    for script, rng in _BLOCKS[1:]:
        if rng[0] <= cp <= rng[1]:
            return script
    return None


def script_counts(text: str) -> dict[ScriptId, int]:
    """Letters (including combining vowel signs) per supported block."""
    counts = {s: 0 for s, _ in _BLOCKS}
    for ch in text:
        s = _script_of(ch)
        if s is not None:
            counts[s] += 1
    return counts


def detect_script(text: str) -> ScriptId:
    """Majority Unicode block among letters; digits and punctuation are ignored.

    Devanagari/Telugu vowel signs and viramas count as letters of their block.
    """
    counts = script_counts(text)
    best = max(counts.values())
    if best == 0:
        raise ValueError("no script content")
    return next(s for s, _ in _BLOCKS if counts[s] == best)


def load_translation_dict(path) -> dict[str, str]:
    """UTF-8 TSV, one `native<TAB>english` pair per line."""
    table: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), 1):
            if not row or not row[0].strip() or row[0].startswith("#"):
                continue
            if len(row) < 2:
                raise ValueError(f"{path}:{lineno}: expected native<TAB>english")
            key = row[0].strip()
            if key in table:
                raise ValueError(f"{path}:{lineno}: duplicate entry {key!r}")
            table[key] = row[1].strip()
    return table


_PUNCT = ".,;:!?'\"()[]{}"
_WORD_EDGE = re.compile(rf"^([{re.escape(_PUNCT)}]*)(.*?)([{re.escape(_PUNCT)}]*)$", re.S)


def translate_to_english(text: str, table: Mapping[str, str]) -> str:
    """Word-by-word lookup; unknown words and all whitespace pass through untouched."""
    if not table:
        return text
    parts = re.split(r"(\s+)", text)
    out = []
    for part in parts:
        if not part or part.isspace():
            out.append(part)
            continue
        if part in table:
            out.append(table[part])
            continue
        lead, core, trail = _WORD_EDGE.match(part).groups()
        out.append(lead + table[core] + trail if core in table else part)
    return "".join(out)


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int


# separators: whitespace, the stripped punctuation set, and hyphen/dash variants
TOKEN_RE = re.compile(r"[^\s" + re.escape(_PUNCT) + r"\-‐-―।॥]+")


def tokenize(text: str) -> list[Token]:
    """Punctuation-free word tokens with their source spans.

    Hyphenated compounds split into their parts ("Salt-Lake" -> Salt, Lake).
    """
    return [Token(m.group(), m.start(), m.end()) for m in TOKEN_RE.finditer(text)]


def normalize_name(name: str) -> str:
    return " ".join(name.casefold().split())


def filter_location_tokens(tokens: Iterable[Token], place_names: Iterable[str]) -> list[Token]:
    """Tokens whose text matches a known place name, case-insensitively; order and repeats kept.

    A frozenset is taken to be an already-normalized index (see `normalize_name`).
    """
    index = place_names if isinstance(place_names, frozenset) else {normalize_name(n) for n in place_names}
    return [t for t in tokens if normalize_name(t.text) in index]
