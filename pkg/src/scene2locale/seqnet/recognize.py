"""Per-box recognition across language heads with confidence gating."""

from __future__ import annotations

from collections import Counter
from typing import NamedTuple, Sequence

import numpy as np

from ..geometry import BBox
from .ctc import best_path_decode
from .font import normalize_word_image, to_strips
from .network import SeqNetParams, head_probs

DEFAULT_GATE_THRESHOLD = 0.5


def gate_language(scores: dict[str, float], threshold: float = DEFAULT_GATE_THRESHOLD) -> str | None:
    """Highest-scoring head at or above `threshold`; ties go to the earlier head."""
    if not scores:
        raise ValueError("no language heads to gate")
    best = None
    for lang, score in scores.items():
        if score >= threshold and (best is None or score > scores[best]):
            best = lang
    return best


def head_confidence(probs: np.ndarray) -> float:
    """Geometric mean of the per-step maximum probability (greedy path prob ** 1/T)."""
    return float(np.exp(np.mean(np.log(np.maximum(probs.max(axis=1), 1e-300)))))


def reading_order(boxes: Sequence[BBox], min_overlap: float = 0.5) -> list[list[BBox]]:
    """Group boxes into text rows (top to bottom), each sorted left to right.

    A box joins the current row when its vertical overlap with the row's first
    box is at least `min_overlap` of the smaller height.
    """
    rows: list[list[BBox]] = []
    for box in sorted(boxes, key=lambda b: (b.center[1], b.x_min)):
        if rows:
            ref = rows[-1][0]
            overlap = min(ref.y_max, box.y_max) - max(ref.y_min, box.y_min)
            if overlap >= min_overlap * min(ref.height, box.height):
                rows[-1].append(box)
                continue
        rows.append([box])
    return [sorted(r, key=lambda b: (b.x_min, b.y_min)) for r in rows]


def to_gray(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 3:
        return img[..., 0] * 0.299 + img[..., 1] * 0.587 + img[..., 2] * 0.114
    return img


def crop(gray: np.ndarray, box: BBox) -> np.ndarray:
    h, w = gray.shape
    x0 = max(0, int(np.floor(box.x_min)))
    y0 = max(0, int(np.floor(box.y_min)))
    x1 = min(w, int(np.ceil(box.x_max)))
    y1 = min(h, int(np.ceil(box.y_max)))
    return gray[y0:y1, x0:x1]


class WordResult(NamedTuple):
    box: BBox
    text: str
    language: str | None
    scores: dict


class Recognition(NamedTuple):
    text: str
    language: str | None
    words: list


def recognize_strips(strips: np.ndarray, heads: Sequence[SeqNetParams],
                     threshold: float = DEFAULT_GATE_THRESHOLD) -> tuple[str, str | None, dict]:
    probs = {h.language: head_probs(strips, h) for h in heads}
    scores = {lang: head_confidence(p) for lang, p in probs.items()}
    lang = gate_language(scores, threshold)
    if lang is None:
        return "", None, scores
    head = next(h for h in heads if h.language == lang)
    text, _ = best_path_decode(probs[lang], head.alphabet)
    return text, lang, scores


def recognize(masked_img: np.ndarray, boxes: Sequence[BBox], heads: Sequence[SeqNetParams],
              threshold: float = DEFAULT_GATE_THRESHOLD) -> Recognition:
    """Read every box and join the words: spaces within a row, newlines between rows."""
    if not boxes:
        raise ValueError("no boxes to recognize")
    if not heads:
        raise ValueError("no language heads to gate")
    gray = to_gray(masked_img)
    words = []
    lines = []
    for row in reading_order(boxes):
        parts = []
        for box in row:
            patch = crop(gray, box)
            strips = to_strips(normalize_word_image(patch)) if patch.size else np.zeros((1, heads[0].input_dim))
            text, lang, scores = recognize_strips(strips, heads, threshold)
            words.append(WordResult(box, text, lang, scores))
            if text:
                parts.append(text)
        if parts:
            lines.append(" ".join(parts))
    langs = [w.language for w in words if w.language is not None]
    language = Counter(langs).most_common(1)[0][0] if langs else None
    return Recognition("\n".join(lines), language, words)
