"""Bundled 5x7 bitmap font and the strip normalization shared by training and inference."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

STRIP_HEIGHT = 32
STRIP_WIDTH = 8
GLYPH_SCALE = 4
# glyph body is 28 px tall inside a 32 px strip
BODY_HEIGHT = 7 * GLYPH_SCALE
TOP_MARGIN = (STRIP_HEIGHT - BODY_HEIGHT) // 2
SIDE_MARGIN = 4
GLYPH_GAP = 4
# 5 * 4 + 4 = 24 px advance, i.e. exactly three strips per glyph
ADVANCE = 5 * GLYPH_SCALE + GLYPH_GAP

_GLYPHS = {
    "A": ["01110", "10001", "10001", "11111", "10001", "10001", "10001"],
    "B": ["11110", "10001", "10001", "11110", "10001", "10001", "11110"],
    "C": ["01110", "10001", "10000", "10000", "10000", "10001", "01110"],
    "D": ["11100", "10010", "10001", "10001", "10001", "10010", "11100"],
    "E": ["11111", "10000", "10000", "11110", "10000", "10000", "11111"],
    "F": ["11111", "10000", "10000", "11110", "10000", "10000", "10000"],
    "G": ["01110", "10001", "10000", "10111", "10001", "10001", "01111"],
    "H": ["10001", "10001", "10001", "11111", "10001", "10001", "10001"],
    "I": ["01110", "00100", "00100", "00100", "00100", "00100", "01110"],
    "J": ["00111", "00010", "00010", "00010", "00010", "10010", "01100"],
    "K": ["10001", "10010", "10100", "11000", "10100", "10010", "10001"],
    "L": ["10000", "10000", "10000", "10000", "10000", "10000", "11111"],
    "M": ["10001", "11011", "10101", "10101", "10001", "10001", "10001"],
    "N": ["10001", "10001", "11001", "10101", "10011", "10001", "10001"],
    "O": ["01110", "10001", "10001", "10001", "10001", "10001", "01110"],
    "P": ["11110", "10001", "10001", "11110", "10000", "10000", "10000"],
    "Q": ["01110", "10001", "10001", "10001", "10101", "10010", "01101"],
    "R": ["11110", "10001", "10001", "11110", "10100", "10010", "10001"],
    "S": ["01111", "10000", "10000", "01110", "00001", "00001", "11110"],
    "T": ["11111", "00100", "00100", "00100", "00100", "00100", "00100"],
    "U": ["10001", "10001", "10001", "10001", "10001", "10001", "01110"],
    "V": ["10001", "10001", "10001", "10001", "10001", "01010", "00100"],
    "W": ["10001", "10001", "10001", "10101", "10101", "10101", "01010"],
    "X": ["10001", "10001", "01010", "00100", "01010", "10001", "10001"],
    "Y": ["10001", "10001", "01010", "00100", "00100", "00100", "00100"],
    "Z": ["11111", "00001", "00010", "00100", "01000", "10000", "11111"],
    "0": ["01110", "10001", "10011", "10101", "11001", "10001", "01110"],
    "1": ["00100", "01100", "00100", "00100", "00100", "00100", "01110"],
    "2": ["01110", "10001", "00001", "00010", "00100", "01000", "11111"],
    "3": ["11111", "00010", "00100", "00010", "00001", "10001", "01110"],
    "4": ["00010", "00110", "01010", "10010", "11111", "00010", "00010"],
    "5": ["11111", "10000", "11110", "00001", "00001", "10001", "01110"],
    "6": ["00110", "01000", "10000", "11110", "10001", "10001", "01110"],
    "7": ["11111", "00001", "00010", "00100", "01000", "01000", "01000"],
    "8": ["01110", "10001", "10001", "01110", "10001", "10001", "01110"],
    "9": ["01110", "10001", "10001", "01111", "00001", "00010", "01100"],
}

FONT_CHARS = "".join(sorted(_GLYPHS))


def glyph(ch: str) -> np.ndarray:
    """Boolean 7x5 bitmap for `ch` (case-insensitive)."""
    rows = _GLYPHS.get(ch.upper())
    if rows is None:
        raise KeyError(f"toy font has no glyph for {ch!r}")
    return np.array([[c == "1" for c in r] for r in rows], dtype=bool)


def render_word(word: str, scale: int = GLYPH_SCALE, fg: float = 255.0, bg: float = 0.0) -> np.ndarray:
    """Render `word` as a light-on-dark gray image; spaces advance one cell."""
    if not word:
        raise ValueError("cannot render an empty word")
    adv = 5 * scale + GLYPH_GAP * scale // GLYPH_SCALE
    height = 7 * scale + 2 * (TOP_MARGIN * scale // GLYPH_SCALE)
    side = SIDE_MARGIN * scale // GLYPH_SCALE
    width = 2 * side + adv * len(word) - GLYPH_GAP * scale // GLYPH_SCALE
    out = np.full((height, width), bg, dtype=np.float64)
    top = TOP_MARGIN * scale // GLYPH_SCALE
    for i, ch in enumerate(word):
        if ch == " ":
            continue
        big = np.kron(glyph(ch), np.ones((scale, scale), dtype=bool))
        x0 = side + i * adv
        out[top:top + 7 * scale, x0:x0 + 5 * scale][big] = fg
    return out


def normalize_word_image(gray: np.ndarray, fg_thresh: float = 127.0) -> np.ndarray:
    """Crop to ink, rescale to the strip height and re-pad to whole strips.

    Text is assumed light on dark. Returns an array whose height is
    STRIP_HEIGHT and whose width is a multiple of STRIP_WIDTH, scaled to [0, 1].
    An image without ink yields a single blank strip.
    """
    gray = np.asarray(gray, dtype=np.float64)
    ink = gray > fg_thresh
    if not ink.any():
        return np.zeros((STRIP_HEIGHT, STRIP_WIDTH))
    rows = np.flatnonzero(ink.any(axis=1))
    cols = np.flatnonzero(ink.any(axis=0))
    crop = gray[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1]
    factor = BODY_HEIGHT / crop.shape[0]
    if crop.shape[0] != BODY_HEIGHT:
        crop = ndimage.zoom(crop, factor, order=0, grid_mode=True, mode="nearest")
    crop = np.clip(crop, 0.0, 255.0)
    width = crop.shape[1] + 2 * SIDE_MARGIN
    padded_w = -(-width // STRIP_WIDTH) * STRIP_WIDTH
    out = np.zeros((STRIP_HEIGHT, padded_w))
    out[TOP_MARGIN:TOP_MARGIN + crop.shape[0], SIDE_MARGIN:SIDE_MARGIN + crop.shape[1]] = crop
    return out / 255.0


def to_strips(norm: np.ndarray) -> np.ndarray:
    """Cut a normalized word image into flattened column strips, shape (T, 32*8)."""
    h, w = norm.shape
    if h != STRIP_HEIGHT or w % STRIP_WIDTH:
        raise ValueError(f"expected height {STRIP_HEIGHT} and width multiple of {STRIP_WIDTH}, got {norm.shape}")
    t = w // STRIP_WIDTH
    return norm.reshape(h, t, STRIP_WIDTH).transpose(1, 0, 2).reshape(t, h * STRIP_WIDTH)


def word_strips(word: str) -> np.ndarray:
    return to_strips(normalize_word_image(render_word(word)))
