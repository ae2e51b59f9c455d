"""Synthetic signs and matching detector maps for desk-scale end-to-end runs."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .detect import write_maps
from .geometry import BBox
from .images import write_image
from .seqnet.font import GLYPH_SCALE, render_word


def render_sign(words: Sequence[str], margin: int = 24, gap: int = 40, scale: int = GLYPH_SCALE,
                fg: float = 255.0, bg: float = 0.0) -> tuple[np.ndarray, list[BBox]]:
    """One row of words as an RGB image plus each word's tight ink box."""
    glyphs = [render_word(w, scale, fg, bg) for w in words]
    h = max(g.shape[0] for g in glyphs) + 2 * margin
    w = sum(g.shape[1] for g in glyphs) + gap * (len(glyphs) - 1) + 2 * margin
    gray = np.full((h, w), bg, dtype=np.float64)
    boxes = []
    x = margin
    for g in glyphs:
        gh, gw = g.shape
        y = (h - gh) // 2
        gray[y:y + gh, x:x + gw] = g
        ink = np.argwhere(g != bg)
        (r0, c0), (r1, c1) = ink.min(axis=0), ink.max(axis=0)
        boxes.append(BBox(x + c0, y + r0, x + c1 + 1, y + r1 + 1))
        x += gw + gap
    return np.repeat(gray[..., None], 3, axis=2), boxes


def rbox_maps(height: int, width: int, boxes: Sequence[BBox], scale: int = 4,
              pad: float = 2.0) -> tuple[np.ndarray, np.ndarray]:
    """Score/geometry maps on a 1/scale grid describing axis-aligned boxes grown by `pad`.

    Every positive map pixel encodes the same rectangle, so decoding plus NMS
    returns exactly one quad per box.
    """
    mh, mw = -(-height // scale), -(-width // scale)
    score = np.zeros((mh, mw))
    geo = np.zeros((mh, mw, 5))
    for b in boxes:
        x0, y0 = max(0.0, b.x_min - pad), max(0.0, b.y_min - pad)
        x1, y1 = min(float(width), b.x_max + pad), min(float(height), b.y_max + pad)
        for my in range(mh):
            for mx in range(mw):
                x, y = mx * scale, my * scale
                if x0 < x < x1 and y0 < y < y1:
                    score[my, mx] = 1.0
                    geo[my, mx] = (y - y0, x1 - x, y1 - y, x - x0, 0.0)
    return score, geo


def write_demo(out_dir, word: str = "KAHARA", image_id: str = "sign") -> dict[str, Path]:
    """Sign PNG plus `maps/<image_id>.s2lr`; returns the written paths."""
    out = Path(out_dir)
    (out / "maps").mkdir(parents=True, exist_ok=True)
    img, boxes = render_sign([word])
    score, geo = rbox_maps(img.shape[0], img.shape[1], boxes)
    image_path = out / f"{image_id}.png"
    maps_path = out / "maps" / f"{image_id}.s2lr"
    write_image(image_path, img)
    write_maps(maps_path, score, geo, 4)
    return {"image": image_path, "maps": maps_path}
