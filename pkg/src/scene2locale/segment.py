"""Text-candidate segmentation: lateral box growth, Otsu mask, convex hull, colour masking."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .geometry import BBox, Quad, cross
from .imgproc import luma

_EPS = 1e-9


@dataclass
class SegmentConfig:
    grow_step: float = 5.0
    # None means 10% of the image width
    max_growth: float | None = None

    def resolve_max_growth(self, img_w: int) -> float:
        return 0.1 * img_w if self.max_growth is None else self.max_growth


def clamp_box(box: BBox, img_w: float, img_h: float) -> BBox | None:
    x0, y0 = max(0.0, box.x_min), max(0.0, box.y_min)
    x1, y1 = min(float(img_w), box.x_max), min(float(img_h), box.y_max)
    if x0 >= x1 or y0 >= y1:
        return None
    return BBox(x0, y0, x1, y1)


def merge_overlapping(boxes: Sequence[BBox]) -> list[BBox]:
    """Replace every group of boxes with overlapping interiors by their union."""
    out = list(boxes)
    changed = True
    while changed:
        changed = False
        for i in range(len(out)):
            for j in range(i + 1, len(out)):
                if out[i].interiors_overlap(out[j]):
                    a, b = out[i], out[j]
                    out[i] = BBox(min(a.x_min, b.x_min), min(a.y_min, b.y_min),
                                  max(a.x_max, b.x_max), max(a.y_max, b.y_max))
                    del out[j]
                    changed = True
                    break
            if changed:
                break
    return out


def _rows_overlap(a: BBox, b: BBox) -> bool:
    return a.y_min < b.y_max and b.y_min < a.y_max


def grow_boxes(boxes: Sequence[BBox], step: float, max_growth: float,
               img_w: float, img_h: float) -> list[BBox]:
    """Widen boxes left and right by `step` per round, all boxes at once.

    A side stops when it touches a box sharing its rows (two sides closing
    on the same gap meet halfway), when its total growth reaches
    `max_growth`, or at the image border. Boxes with overlapping interiors
    are merged before growing.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if max_growth < 0:
        raise ValueError("max_growth must be non-negative")
    clamped = [c for c in (clamp_box(b, img_w, img_h) for b in boxes) if c is not None]
    base = merge_overlapping(clamped)
    n = len(base)
    left = [b.x_min for b in base]
    right = [b.x_max for b in base]
    grown_l = [0.0] * n
    grown_r = [0.0] * n
    facing = [(i, j) for i in range(n) for j in range(n)
              if i != j and _rows_overlap(base[i], base[j]) and base[i].x_max <= base[j].x_min]

    def touching_right(i):
        return any(a == i and abs(left[j] - right[i]) <= _EPS for a, j in facing)

    def touching_left(j):
        return any(b == j and abs(left[j] - right[i]) <= _EPS for i, b in facing)

    active_l = [not touching_left(i) and left[i] > 0 and max_growth > 0 for i in range(n)]
    active_r = [not touching_right(i) and right[i] < img_w and max_growth > 0 for i in range(n)]

    max_rounds = 4 * (math.ceil(max_growth / step) + 1) + n
    for _ in range(max_rounds):
        if not (any(active_l) or any(active_r)):
            break
        prop_l = [min(step, max_growth - grown_l[i], left[i]) if active_l[i] else 0.0 for i in range(n)]
        prop_r = [min(step, max_growth - grown_r[i], img_w - right[i]) if active_r[i] else 0.0 for i in range(n)]
        move_l = list(prop_l)
        move_r = list(prop_r)
        for i, j in facing:
            gap = left[j] - right[i]
            a, b = prop_r[i], prop_l[j]
            if a + b >= gap - _EPS:
                ai = min(a, max(gap / 2, gap - b))
                bj = min(b, gap - ai)
                move_r[i] = min(move_r[i], ai)
                move_l[j] = min(move_l[j], bj)
        for i in range(n):
            left[i] -= move_l[i]
            grown_l[i] += move_l[i]
            right[i] += move_r[i]
            grown_r[i] += move_r[i]
        for i in range(n):
            if active_l[i] and (grown_l[i] >= max_growth - _EPS or left[i] <= _EPS or touching_left(i)):
                active_l[i] = False
            if active_r[i] and (grown_r[i] >= max_growth - _EPS or right[i] >= img_w - _EPS or touching_right(i)):
                active_r[i] = False
    return [BBox(max(0.0, left[i]), base[i].y_min, min(float(img_w), right[i]), base[i].y_max) for i in range(n)]


def otsu_threshold(gray: np.ndarray) -> int | None:
    """Otsu cut t in [0, 254]: class 0 is <= t, class 1 is > t.

    Returns None for a single-valued histogram. Ties go to the smallest t.
    """
    vals = np.clip(np.rint(np.asarray(gray, dtype=np.float64)), 0, 255).astype(int)
    hist = np.bincount(vals.ravel(), minlength=256).astype(np.float64)
    if np.count_nonzero(hist) <= 1:
        return None
    total = hist.sum()
    levels = np.arange(256)
    w0 = np.cumsum(hist)[:-1]
    s0 = np.cumsum(hist * levels)[:-1]
    w1 = total - w0
    s1 = (hist * levels).sum() - s0
    with np.errstate(divide="ignore", invalid="ignore"):
        between = w0 * w1 * (s0 / w0 - s1 / w1) ** 2
    between = np.where((w0 > 0) & (w1 > 0), between, -1.0)
    best = between.max()
    return int(np.flatnonzero(between >= best - 1e-9 * max(1.0, best))[0])


def binarize(gray: np.ndarray) -> np.ndarray:
    t = otsu_threshold(gray)
    if t is None:
        return np.ones(np.shape(gray), dtype=bool)
    return np.rint(gray) > t


def box_region(boxes: Sequence[BBox], height: int, width: int) -> np.ndarray:
    """Pixels (column c, row r) with x_min <= c < x_max and y_min <= r < y_max for some box."""
    region = np.zeros((height, width), dtype=bool)
    for b in boxes:
        c0, c1 = max(0, math.ceil(b.x_min)), min(width, math.ceil(b.x_max))
        r0, r1 = max(0, math.ceil(b.y_min)), min(height, math.ceil(b.y_max))
        region[r0:r1, c0:c1] = True
    return region


def boxes_to_mask(boxes: Sequence[BBox], img: np.ndarray) -> np.ndarray:
    """Foreground (Otsu, bright class) restricted to the union of the boxes."""
    gray = luma(img)
    h, w = gray.shape
    if not boxes:
        return np.zeros((h, w), dtype=bool)
    return box_region(boxes, h, w) & binarize(gray)


def convex_hull(points) -> list[tuple[float, float]]:
    """Counter-clockwise hull vertices (monotone chain); collinear boundary points dropped."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) < 3:
        raise ValueError("degenerate hull")
    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise ValueError("degenerate hull")
    return hull


def hull_mask(hull, height: int, width: int) -> np.ndarray:
    """Pixels whose (column, row) coordinate lies inside or on the convex CCW hull."""
    ys, xs = np.mgrid[0:height, 0:width]
    inside = np.ones((height, width), dtype=bool)
    n = len(hull)
    for i in range(n):
        (x1, y1), (x2, y2) = hull[i], hull[(i + 1) % n]
        c = (x2 - x1) * (ys - y1) - (y2 - y1) * (xs - x1)
        inside &= c >= -_EPS * max(1.0, abs(x2 - x1) + abs(y2 - y1))
    return inside


def mask_by_hull(img: np.ndarray, hull) -> np.ndarray:
    """Zero every pixel outside the hull; pixels inside or on it keep their value."""
    img = np.asarray(img)
    keep = hull_mask(hull, img.shape[0], img.shape[1])
    out = img.copy()
    out[~keep] = 0
    return out


def _extreme_points(mask: np.ndarray) -> list[tuple[int, int]]:
    # hull of all foreground pixels == hull of each row's leftmost and rightmost pixel
    pts = []
    for r in np.flatnonzero(mask.any(axis=1)):
        cols = np.flatnonzero(mask[r])
        pts.append((int(cols[0]), int(r)))
        pts.append((int(cols[-1]), int(r)))
    return pts


class Segmentation(NamedTuple):
    masked: np.ndarray
    hull: list
    boxes: list
    mask: np.ndarray


def segment_text_region(img: np.ndarray, quads: Sequence[Quad], cfg: SegmentConfig | None = None) -> Segmentation:
    """Quads -> envelopes -> grown boxes -> foreground mask -> hull -> masked image."""
    cfg = cfg or SegmentConfig()
    if not quads:
        raise ValueError("no text detected")
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    envelopes = [c for c in (clamp_box(q.envelope(), w, h) for q in quads) if c is not None]
    if not envelopes:
        raise ValueError("no text detected")
    grown = grow_boxes(envelopes, cfg.grow_step, cfg.resolve_max_growth(w), w, h)
    mask = boxes_to_mask(grown, img)
    try:
        hull = convex_hull(_extreme_points(mask))
    except ValueError:
        hull = convex_hull([c for b in grown for c in b.corners()])
    return Segmentation(mask_by_hull(img, hull), hull, grown, mask)
